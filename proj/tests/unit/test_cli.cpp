#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
};

Outcome run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + std::string(PAIRWALK_CLI) + " " + args + " 2>/dev/null";
    Outcome o;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    while (const std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) o.out.append(buf.data(), n);
    const int status = pclose(pipe);
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return o;
}

// Last non-empty line of the output, parsed as JSON.
json last_json(const std::string& out) {
    std::string s = out;
    while (!s.empty() && s.back() == '\n') s.pop_back();
    return json::parse(s.substr(s.rfind('\n') == std::string::npos ? 0 : s.rfind('\n') + 1));
}

fs::path write_spec(const std::string& tag, const json& doc) {
    const fs::path p = fs::temp_directory_path() / ("pairwalk_cli_" + tag + ".json");
    std::ofstream(p) << doc.dump();
    return p;
}

json tiny() {
    return json::parse(R"({
        "name": "tiny",
        "lattice": {"n_sites": 24, "interaction": 4.0},
        "pulse": {"impulse_pi": 1.0, "width": 1.0, "center": 3.0},
        "integrator": {"dt": 0.01, "t_final": 12.0, "record_interval": 0.5, "edge_policy": "flag"}
    })");
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("validate passes") {
        const Outcome o = run("validate");
        CHECK(o.code == 0);
        CHECK(o.out.find("all checks passed") != std::string::npos);
    }

    TEST_CASE("validate with a mutated kernel fails") {
        const Outcome o = run("validate --mutate-rhs-sign");
        CHECK(o.code == 1);
        CHECK(o.out.find("FAIL ") != std::string::npos);
    }

    TEST_CASE("malformed config exits 2 and names the field") {
        json doc = tiny();
        doc["lattice"]["n_sites"] = 3;
        const Outcome o = run("run " + write_spec("bad", doc).string() + " --out-dir /tmp/pairwalk_cli_out");
        CHECK(o.code == 2);
        const json err = last_json(o.out);
        CHECK(err["status"] == "error");
        CHECK(err["kind"] == "ConfigError");
        CHECK(err["field"] == "lattice.n_sites");
    }

    TEST_CASE("unstable dt override is rejected") {
        const Outcome o = run("run " + write_spec("dt", tiny()).string() + " --dt 1.0 --out-dir /tmp/pairwalk_cli_out");
        CHECK(o.code == 2);
        CHECK(last_json(o.out)["field"] == "integrator.dt");
    }

    TEST_CASE("unknown flags are usage errors") {
        CHECK(run("run --no-such-flag").code == 2);
        CHECK(run("").code == 2);
    }

    TEST_CASE("run writes artifacts into the output directory") {
        const fs::path out = fs::temp_directory_path() / "pairwalk_cli_run";
        fs::remove_all(out);
        const Outcome o = run("run " + write_spec("ok", tiny()).string() + " --out-dir " + out.string());
        CHECK(o.code == 0);
        const json doc = last_json(o.out);
        CHECK(doc["status"] == "ok");
        CHECK(fs::exists(out / "tiny.csv"));
        CHECK(fs::exists(out / "tiny.report.json"));
        fs::remove_all(out);
    }

    TEST_CASE("sweep honours the environment default and reports partial failures") {
        json doc = tiny();
        doc["sweep"] = {{"width", {1.0, 6.0}}};
        const fs::path out = fs::temp_directory_path() / "pairwalk_cli_sweep";
        fs::remove_all(out);
        const Outcome o = run("sweep " + write_spec("sweep", doc).string() + " --threads 2",
                              "env PAIRWALK_OUT_DIR=" + out.string() + " ");
        CHECK(o.code == 1);
        const json result = last_json(o.out);
        CHECK(result["status"] == "partial");
        CHECK(result["points"] == 2);
        CHECK(result["failed"].size() == 1);
        CHECK(fs::exists(out / "tiny.sweep.csv"));
        fs::remove_all(out);
    }
}
