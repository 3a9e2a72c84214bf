#include "pairwalk/error.hpp"

namespace pairwalk {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::BadSpec: return "BadSpec";
        case ErrorKind::EdgeOverlap: return "EdgeOverlap";
        case ErrorKind::NormDrift: return "NormDrift";
        case ErrorKind::EdgeContamination: return "EdgeContamination";
        case ErrorKind::InsufficientSamples: return "InsufficientSamples";
        case ErrorKind::UnfittedModel: return "UnfittedModel";
        case ErrorKind::DegenerateFit: return "DegenerateFit";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::NoBoundBand: return "NoBoundBand";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace pairwalk
