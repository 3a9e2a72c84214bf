#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace pairwalk {

enum class ErrorKind {
    BadSpec,
    EdgeOverlap,
    NormDrift,
    EdgeContamination,
    InsufficientSamples,
    UnfittedModel,
    DegenerateFit,
    TooLarge,
    NoBoundBand,
    ConfigError,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the engine carries a kind so the CLI can map it to
// an exit code and a machine-readable error document.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Config errors additionally name the offending field.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& message)
        : Error(ErrorKind::ConfigError, field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace pairwalk
