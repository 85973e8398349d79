#include "pots/errors.hpp"

namespace pots {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::EmptyContributions: return "EmptyContributions";
        case Errc::InsufficientNodes: return "InsufficientNodes";
        case Errc::InvalidGroupSize: return "InvalidGroupSize";
        case Errc::UnauthorizedContributor: return "UnauthorizedContributor";
        case Errc::DuplicateContributor: return "DuplicateContributor";
        case Errc::MissingContributor: return "MissingContributor";
        case Errc::NoCompletion: return "NoCompletion";
        case Errc::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

}  // namespace pots
