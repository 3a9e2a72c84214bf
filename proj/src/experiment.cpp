#include "pairwalk/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "pairwalk/error.hpp"
#include "pairwalk/pulse.hpp"

namespace pairwalk {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------- parsing

class Reader {
public:
    Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return node_.contains(key) && !node_.at(key).is_null(); }

    double number(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        return number(key);
    }
    double number(const std::string& key) const {
        if (!has(key)) throw ConfigError(field(key), "is required");
        const json& v = node_.at(key);
        if (!v.is_number()) throw ConfigError(field(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(field(key), "must be finite");
        return x;
    }
    int integer(const std::string& key, int fallback) const {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
        return v.get<int>();
    }
    bool boolean(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_boolean()) throw ConfigError(field(key), "expected true or false");
        return v.get<bool>();
    }
    std::string string(const std::string& key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_string()) throw ConfigError(field(key), "expected a string");
        return v.get<std::string>();
    }
    std::vector<double> numbers(const std::string& key, bool non_empty = false) const {
        const json& v = node_.at(key);
        if (!v.is_array()) throw ConfigError(field(key), "expected an array of numbers");
        if (non_empty && v.empty()) throw ConfigError(field(key), "sweep axis must be non-empty");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) throw ConfigError(field(key) + "[" + std::to_string(i) + "]", "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }
    Reader child(const std::string& key) const { return Reader(node_.at(key), field(key)); }

    void allow_only(std::initializer_list<const char*> keys) const {
        const std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& item : node_.items()) {
            if (!allowed.count(item.key())) throw ConfigError(field(item.key()), "unknown field");
        }
    }

private:
    const json& node_;
    std::string path_;
};

std::vector<double> impulse_list(const Reader& r) {
    const bool radians = r.has("impulse");
    const bool in_pi = r.has("impulse_pi");
    const bool grid = r.has("impulse_grid_pi");
    if (radians + in_pi + grid > 1) {
        throw ConfigError(r.field("impulse"), "give only one of impulse, impulse_pi, impulse_grid_pi");
    }
    if (radians) return r.numbers("impulse", true);
    std::vector<double> out;
    if (in_pi) {
        for (double x : r.numbers("impulse_pi", true)) out.push_back(x * kPi);
    } else if (grid) {
        const Reader g = r.child("impulse_grid_pi");
        g.allow_only({"from", "to", "points"});
        const double from = g.number("from");
        const double to = g.number("to");
        const int points = g.integer("points", 0);
        if (points < 1) throw ConfigError(g.field("points"), "must be >= 1");
        for (int k = 0; k < points; ++k) {
            const double x = points == 1 ? from : from + (to - from) * k / (points - 1);
            out.push_back(x * kPi);
        }
    }
    return out;
}

Gauge parse_gauge(const Reader& r) {
    const std::string g = r.string("gauge", "centered");
    if (g == "centered") return Gauge::Centered;
    if (g == "absolute") return Gauge::Absolute;
    throw ConfigError(r.field("gauge"), "expected \"centered\" or \"absolute\"");
}

EdgePolicy parse_edge_policy(const Reader& r) {
    const std::string p = r.string("edge_policy", "abort");
    if (p == "abort") return EdgePolicy::Abort;
    if (p == "flag") return EdgePolicy::Flag;
    throw ConfigError(r.field("edge_policy"), "expected \"abort\" or \"flag\"");
}

// ---------------------------------------------------------------- output

// Ten significant digits keep names short when the value is a rounded ratio.
std::string slug(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 10);
    std::string s(buf, res.ptr);
    std::replace(s.begin(), s.end(), '.', 'p');
    std::replace(s.begin(), s.end(), '-', 'm');
    return s;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::BadSpec, "cannot write " + path.string());
    out << text;
}

json velocity_json(const std::optional<VelocityEstimate>& v) {
    if (!v) return nullptr;
    return json{{"impulse", v->impulse},
                {"mean_velocity", v->mean_velocity},
                {"fit_window", {v->t_start, v->t_end}},
                {"fit_residual", v->fit_residual},
                {"samples", v->samples}};
}

// Velocity of one centroid column over the post-pulse window, if measurable.
std::optional<VelocityEstimate> try_velocity(const std::vector<ObservableRecord>& records,
                                             double ObservableRecord::*field, double t_start,
                                             double t_end, double impulse) {
    const std::vector<TimeSample> samples = column(records, field);
    try {
        return mean_velocity(samples, t_start, t_end, impulse);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::InsufficientSamples) return std::nullopt;
        throw;
    }
}

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

GaussianPulse PulseSetting::resolve() const {
    if (impulse) return pulse_from_impulse(*impulse, width, center);
    return GaussianPulse{amplitude.value_or(0.0), width, center};
}

std::size_t SweepAxes::points() const {
    auto count = [](const std::vector<double>& v) { return std::max<std::size_t>(1, v.size()); };
    return count(impulses) * count(interactions) * count(widths);
}

ExperimentSpec parse_spec(const json& doc) {
    const Reader root(doc, "");
    root.allow_only({"name", "lattice", "initial_state", "pulse", "integrator", "sweep", "outputs", "$schema",
                     "description"});
    ExperimentSpec spec;
    spec.name = root.string("name", "run");
    if (spec.name.empty() || spec.name.find('/') != std::string::npos) {
        throw ConfigError("name", "must be a non-empty file-name-safe string");
    }

    if (!root.has("lattice")) throw ConfigError("lattice", "is required");
    const Reader lat = root.child("lattice");
    lat.allow_only({"n_sites", "hopping", "interaction", "onsite_energy"});
    spec.lattice.n_sites = lat.integer("n_sites", 400);
    spec.lattice.hopping = lat.number("hopping", 1.0);
    spec.lattice.interaction = lat.number("interaction", 0.0);
    if (lat.has("onsite_energy")) spec.lattice.onsite_energy = lat.numbers("onsite_energy");

    if (root.has("initial_state")) {
        const Reader init = root.child("initial_state");
        init.allow_only({"width", "offset"});
        spec.initial.width = init.number("width", 1.0);
        spec.initial.offset = init.integer("offset", 0);
    }

    if (!root.has("pulse")) throw ConfigError("pulse", "is required");
    const Reader pulse = root.child("pulse");
    pulse.allow_only({"impulse", "impulse_pi", "amplitude", "width", "center"});
    const bool has_impulse = pulse.has("impulse") || pulse.has("impulse_pi");
    if (pulse.has("impulse") && pulse.has("impulse_pi")) {
        throw ConfigError(pulse.field("impulse"), "give impulse or impulse_pi, not both");
    }
    if (has_impulse == pulse.has("amplitude")) {
        throw ConfigError(pulse.field("impulse"), "exactly one of impulse (or impulse_pi) and amplitude is required");
    }
    if (pulse.has("impulse")) spec.pulse.impulse = pulse.number("impulse");
    if (pulse.has("impulse_pi")) spec.pulse.impulse = pulse.number("impulse_pi") * kPi;
    if (pulse.has("amplitude")) spec.pulse.amplitude = pulse.number("amplitude");
    spec.pulse.width = pulse.number("width", 1.0);
    spec.pulse.center = pulse.number("center", 10.0);

    if (root.has("integrator")) {
        const Reader integ = root.child("integrator");
        integ.allow_only({"dt", "t_final", "record_interval", "marginal_interval", "norm_tolerance",
                          "edge_tolerance", "bound_width", "gauge", "edge_policy"});
        IntegratorConfig& c = spec.integrator;
        c.dt = integ.number("dt", c.dt);
        c.t_final = integ.number("t_final", c.t_final);
        c.record_interval = integ.number("record_interval", c.record_interval);
        c.marginal_interval = integ.number("marginal_interval", c.marginal_interval);
        c.norm_tolerance = integ.number("norm_tolerance", c.norm_tolerance);
        c.edge_tolerance = integ.number("edge_tolerance", c.edge_tolerance);
        c.bound_width = integ.integer("bound_width", c.bound_width);
        c.gauge = parse_gauge(integ);
        c.edge_policy = parse_edge_policy(integ);
    }

    if (root.has("sweep")) {
        const Reader sw = root.child("sweep");
        sw.allow_only({"impulse", "impulse_pi", "impulse_grid_pi", "interaction", "width"});
        SweepAxes axes;
        axes.impulses = impulse_list(sw);
        if (sw.has("interaction")) axes.interactions = sw.numbers("interaction", true);
        if (sw.has("width")) axes.widths = sw.numbers("width", true);
        if (axes.impulses.empty() && axes.interactions.empty() && axes.widths.empty()) {
            throw ConfigError("sweep", "needs at least one non-empty axis");
        }
        if (!axes.impulses.empty() && spec.pulse.amplitude) {
            throw ConfigError("sweep.impulse", "an impulse sweep needs an impulse-calibrated pulse");
        }
        spec.sweep = std::move(axes);
    }

    if (root.has("outputs")) {
        const Reader out = root.child("outputs");
        out.allow_only({"time_series", "marginals"});
        spec.outputs.time_series = out.boolean("time_series", true);
        spec.outputs.marginals = out.boolean("marginals", true);
    }

    validate_spec(spec);
    return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
    }
    return parse_spec(doc);
}

void validate_spec(const ExperimentSpec& spec) {
    const int n = spec.lattice.n_sites;
    if (n < 8) throw ConfigError("lattice.n_sites", "must be >= 8");
    if (spec.lattice.interaction < 0.0) throw ConfigError("lattice.interaction", "must be >= 0");
    if (!spec.lattice.onsite_energy.empty() && static_cast<int>(spec.lattice.onsite_energy.size()) != n) {
        throw ConfigError("lattice.onsite_energy", "must have n_sites entries");
    }
    if (!(spec.initial.width > 0.0)) throw ConfigError("initial_state.width", "must be > 0");
    if (!(spec.pulse.width > 0.0)) throw ConfigError("pulse.width", "must be > 0");
    if (spec.sweep) {
        for (double u : spec.sweep->interactions) {
            if (u < 0.0) throw ConfigError("sweep.interaction", "values must be >= 0");
        }
        for (double w : spec.sweep->widths) {
            if (!(w > 0.0)) throw ConfigError("sweep.width", "values must be > 0");
        }
    }
    const IntegratorConfig& c = spec.integrator;
    if (!(c.t_final > 0.0)) throw ConfigError("integrator.t_final", "must be > 0");
    if (!(c.dt > 0.0)) throw ConfigError("integrator.dt", "must be > 0");

    // Stability bound over every grid point the spec can produce.
    for (const ExperimentSpec& point : expand_sweep(spec)) {
        const PulseTrain drive(point.pulse.resolve());
        const double limit = stability_limit(point.lattice, drive);
        if (!(c.dt < limit)) {
            throw ConfigError("integrator.dt", "dt=" + format_number(c.dt) + " exceeds the RK4 stability limit " +
                                                   format_number(limit) + " for point " + point.name);
        }
    }
    try {
        const PulseTrain drive(spec.pulse.resolve());
        validate_config(c, spec.lattice, drive);
    } catch (const Error& e) {
        throw ConfigError("integrator", e.what());
    }
}

json to_json(const ExperimentSpec& spec) {
    json lattice{{"n_sites", spec.lattice.n_sites},
                 {"hopping", spec.lattice.hopping},
                 {"interaction", spec.lattice.interaction}};
    if (!spec.lattice.onsite_energy.empty()) lattice["onsite_energy"] = spec.lattice.onsite_energy;
    json pulse{{"width", spec.pulse.width}, {"center", spec.pulse.center}};
    if (spec.pulse.impulse) pulse["impulse"] = *spec.pulse.impulse;
    if (spec.pulse.amplitude) pulse["amplitude"] = *spec.pulse.amplitude;
    const IntegratorConfig& c = spec.integrator;
    json integ{{"dt", c.dt},
               {"t_final", c.t_final},
               {"record_interval", c.record_interval},
               {"marginal_interval", c.marginal_interval},
               {"norm_tolerance", c.norm_tolerance},
               {"edge_tolerance", c.edge_tolerance},
               {"bound_width", c.bound_width},
               {"gauge", c.gauge == Gauge::Centered ? "centered" : "absolute"},
               {"edge_policy", c.edge_policy == EdgePolicy::Abort ? "abort" : "flag"}};
    json doc{{"name", spec.name},
             {"lattice", lattice},
             {"initial_state", {{"width", spec.initial.width}, {"offset", spec.initial.offset}}},
             {"pulse", pulse},
             {"integrator", integ},
             {"outputs", {{"time_series", spec.outputs.time_series}, {"marginals", spec.outputs.marginals}}}};
    if (spec.sweep) {
        json sw = json::object();
        if (!spec.sweep->impulses.empty()) sw["impulse"] = spec.sweep->impulses;
        if (!spec.sweep->interactions.empty()) sw["interaction"] = spec.sweep->interactions;
        if (!spec.sweep->widths.empty()) sw["width"] = spec.sweep->widths;
        doc["sweep"] = sw;
    }
    return doc;
}

ExperimentSpec apply_overrides(ExperimentSpec spec, const Overrides& overrides) {
    if (overrides.fast) {
        spec.lattice.n_sites /= 2;
        spec.integrator.t_final /= 2.0;
        if (!spec.lattice.onsite_energy.empty()) spec.lattice.onsite_energy.resize(spec.lattice.n_sites);
    }
    if (overrides.n_sites) {
        spec.lattice.n_sites = *overrides.n_sites;
        if (!spec.lattice.onsite_energy.empty()) spec.lattice.onsite_energy.resize(spec.lattice.n_sites, 0.0);
    }
    if (overrides.dt) spec.integrator.dt = *overrides.dt;
    validate_spec(spec);
    return spec;
}

std::vector<ExperimentSpec> expand_sweep(const ExperimentSpec& spec) {
    if (!spec.sweep) return {spec};
    const SweepAxes& axes = *spec.sweep;
    auto or_base = [](const std::vector<double>& v, double base) {
        return v.empty() ? std::vector<double>{base} : v;
    };
    const std::vector<double> us = or_base(axes.interactions, spec.lattice.interaction);
    const std::vector<double> ws = or_base(axes.widths, spec.initial.width);
    const bool impulse_axis = !axes.impulses.empty();
    const std::vector<double> is = or_base(axes.impulses, spec.pulse.impulse.value_or(0.0));

    std::vector<ExperimentSpec> out;
    for (double u : us) {
        for (double w : ws) {
            for (double i : is) {
                ExperimentSpec p = spec;
                p.sweep.reset();
                p.lattice.interaction = u;
                p.initial.width = w;
                if (impulse_axis) p.pulse.impulse = i;
                std::string name = spec.name + "__U" + slug(u) + "_s" + slug(w);
                if (p.pulse.impulse) name += "_I" + slug(*p.pulse.impulse / kPi) + "pi";
                p.name = name;
                out.push_back(std::move(p));
            }
        }
    }
    return out;
}

Simulation simulate(const ExperimentSpec& point) {
    const InitialStateSpec init =
        InitialStateSpec::centered(point.lattice.n_sites, point.initial.width, point.initial.offset);
    const Wavefunction psi0 = build_initial_state(point.lattice, init);
    const GaussianPulse pulse = point.pulse.resolve();
    const PulseTrain drive(pulse);

    Simulation sim;
    EvolveResult run = evolve(psi0, point.lattice, drive, point.integrator, sim.series);
    sim.final_state = std::move(run.state);

    PointSummary& s = sim.summary;
    s.name = point.name;
    s.impulse = pulse.impulse();
    s.interaction = point.lattice.interaction;
    s.width = point.initial.width;
    s.ok = true;
    s.report = run.report;
    s.final_record = sim.series.back();
    s.final_record.marginal_1.clear();
    s.exchange_asymmetry = exchange_asymmetry(sim.final_state);

    const auto& records = sim.series.records();
    const double t0 = point.velocity_window_start();
    const double t1 = point.integrator.t_final;
    s.velocity = try_velocity(records, &ObservableRecord::centroid_1, t0, t1, s.impulse);
    s.bound_velocity = try_velocity(records, &ObservableRecord::bound_centroid_1, t0, t1, s.impulse);
    s.unbound_velocity = try_velocity(records, &ObservableRecord::unbound_centroid_1, t0, t1, s.impulse);
    return sim;
}

Simulation simulate_captured(const ExperimentSpec& point) {
    try {
        return simulate(point);
    } catch (const Error& e) {
        Simulation sim;
        PointSummary& s = sim.summary;
        s.name = point.name;
        s.impulse = point.pulse.resolve().impulse();
        s.interaction = point.lattice.interaction;
        s.width = point.initial.width;
        s.ok = false;
        s.error_kind = std::string(to_string(e.kind()));
        s.error_message = e.what();
        return sim;
    }
}

std::vector<Simulation> simulate_all(const std::vector<ExperimentSpec>& points, int threads,
                                     const std::function<void(const Simulation&)>& on_done) {
    std::vector<Simulation> results(points.size());
    std::atomic<std::size_t> next{0};
    std::mutex callback_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            results[i] = simulate_captured(points[i]);
            if (on_done) {
                const std::lock_guard lock(callback_mutex);
                on_done(results[i]);
            }
        }
    };
    const int workers = std::clamp<int>(threads, 1, static_cast<int>(std::max<std::size_t>(1, points.size())));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int k = 0; k < workers; ++k) pool.emplace_back(worker);
    }
    return results;
}

const std::vector<std::string>& time_series_columns() {
    static const std::vector<std::string> cols{"t",      "centroid_1", "centroid_2",     "norm",      "purity",
                                               "double_occ", "bound_fraction", "left_frac", "right_frac"};
    return cols;
}

const std::vector<std::string>& sweep_columns() {
    static const std::vector<std::string> cols{
        "name",          "impulse",          "interaction",        "width",
        "mean_velocity", "fit_residual",     "purity_final",       "bound_fraction_final",
        "left_frac",     "right_frac",       "bound_velocity",     "unbound_velocity",
        "max_norm_drift", "max_edge_probability", "valid",         "status"};
    return cols;
}

json report_json(const Simulation& sim, const ExperimentSpec& point) {
    const PointSummary& s = sim.summary;
    json doc{{"engine_version", kEngineVersion},
             {"config", to_json(point)},
             {"status", s.ok ? "ok" : "error"}};
    const GaussianPulse pulse = point.pulse.resolve();
    doc["derived"] = {{"pulse_amplitude", pulse.amplitude},
                      {"impulse", pulse.impulse()},
                      {"stability_limit", stability_limit(point.lattice, PulseTrain(pulse))},
                      {"velocity_window", {point.velocity_window_start(), point.integrator.t_final}}};
    if (!s.ok) {
        doc["error"] = {{"kind", s.error_kind}, {"message", s.error_message}};
        return doc;
    }
    const ObservableRecord& f = s.final_record;
    doc["report"] = {{"max_norm_drift", s.report.max_norm_drift},
                     {"max_edge_probability", s.report.max_edge_probability},
                     {"edge_contaminated", s.report.edge_contaminated},
                     {"valid", s.report.valid()},
                     {"steps", s.report.steps},
                     {"final_time", s.report.final_time},
                     {"wall_seconds", s.report.wall_seconds}};
    doc["final"] = {{"t", f.time},
                    {"centroid_1", f.centroid_1},
                    {"centroid_2", f.centroid_2},
                    {"norm", f.norm},
                    {"purity", f.purity},
                    {"double_occ", f.double_occupancy},
                    {"bound_fraction", f.bound_fraction},
                    {"left_frac", f.left_fraction},
                    {"right_frac", f.right_fraction},
                    {"exchange_asymmetry", s.exchange_asymmetry}};
    doc["velocity"] = velocity_json(s.velocity);
    doc["bound_branch_velocity"] = velocity_json(s.bound_velocity);
    doc["unbound_branch_velocity"] = velocity_json(s.unbound_velocity);
    return doc;
}

ArtifactPaths write_artifacts(const Simulation& sim, const ExperimentSpec& point,
                              const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    ArtifactPaths paths;
    const std::string config_line = to_json(point).dump();

    if (point.outputs.time_series && !sim.series.empty()) {
        std::ostringstream csv;
        csv << "# config: " << config_line << '\n';
        const auto& cols = time_series_columns();
        for (std::size_t k = 0; k < cols.size(); ++k) csv << (k ? "," : "") << cols[k];
        csv << '\n';
        for (const ObservableRecord& r : sim.series.records()) {
            const double row[] = {r.time,   r.centroid_1,       r.centroid_2,     r.norm,          r.purity,
                                  r.double_occupancy, r.bound_fraction, r.left_fraction, r.right_fraction};
            for (std::size_t k = 0; k < std::size(row); ++k) csv << (k ? "," : "") << format_number(row[k]);
            csv << '\n';
        }
        paths.time_series = out_dir / (point.name + ".csv");
        write_file(paths.time_series, csv.str());
    }

    if (point.outputs.marginals && !sim.series.empty()) {
        std::ostringstream nd;
        nd << json{{"config", to_json(point)}}.dump() << '\n';
        for (const ObservableRecord& r : sim.series.records()) {
            if (r.marginal_1.empty()) continue;
            nd << json{{"t", r.time}, {"density", r.marginal_1}}.dump() << '\n';
        }
        paths.marginals = out_dir / (point.name + ".marginals.ndjson");
        write_file(paths.marginals, nd.str());
    }

    paths.report = out_dir / (point.name + ".report.json");
    write_file(paths.report, report_json(sim, point).dump(2) + "\n");
    return paths;
}

std::vector<ArtifactPaths> run_single(const ExperimentSpec& spec, const std::filesystem::path& out_dir) {
    std::vector<ArtifactPaths> out;
    for (const ExperimentSpec& point : expand_sweep(spec)) {
        const Simulation sim = simulate(point);
        out.push_back(write_artifacts(sim, point, out_dir));
    }
    return out;
}

bool SweepResult::all_ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const PointSummary& s) { return s.ok; });
}

SweepResult run_sweep(const ExperimentSpec& spec, const std::filesystem::path& out_dir, int threads) {
    const std::vector<ExperimentSpec> points = expand_sweep(spec);
    const std::filesystem::path point_dir = out_dir / (spec.name + "_points");
    std::filesystem::create_directories(point_dir);

    // Each worker writes only its own point's files.
    std::vector<PointSummary> rows(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            const Simulation sim = simulate_captured(points[i]);
            write_artifacts(sim, points[i], point_dir);
            rows[i] = sim.summary;
        }
    };
    const int workers = std::clamp<int>(threads, 1, static_cast<int>(std::max<std::size_t>(1, points.size())));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int k = 0; k < workers; ++k) pool.emplace_back(worker);
    }

    std::ostringstream csv;
    csv << "# config: " << to_json(spec).dump() << '\n';
    const auto& cols = sweep_columns();
    for (std::size_t k = 0; k < cols.size(); ++k) csv << (k ? "," : "") << cols[k];
    csv << '\n';
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    auto v = [&](const std::optional<VelocityEstimate>& e) { return e ? e->mean_velocity : nan; };
    for (const PointSummary& s : rows) {
        const ObservableRecord& f = s.final_record;
        const bool ok = s.ok;
        csv << s.name << ',' << format_number(s.impulse) << ',' << format_number(s.interaction) << ','
            << format_number(s.width) << ',' << format_number(ok ? v(s.velocity) : nan) << ','
            << format_number(ok && s.velocity ? s.velocity->fit_residual : nan) << ','
            << format_number(ok ? f.purity : nan) << ',' << format_number(ok ? f.bound_fraction : nan) << ','
            << format_number(ok ? f.left_fraction : nan) << ',' << format_number(ok ? f.right_fraction : nan)
            << ',' << format_number(ok ? v(s.bound_velocity) : nan) << ','
            << format_number(ok ? v(s.unbound_velocity) : nan) << ','
            << format_number(ok ? s.report.max_norm_drift : nan) << ','
            << format_number(ok ? s.report.max_edge_probability : nan) << ','
            << (ok && s.report.valid() ? "true" : "false") << ','
            << (ok ? std::string("ok") : s.error_kind) << '\n';
    }
    SweepResult result{std::move(rows), out_dir / (spec.name + ".sweep.csv")};
    write_file(result.table, csv.str());
    return result;
}

}  // namespace pairwalk
