#pragma once

#include <stdexcept>
#include <string>

namespace pots {

/// Failure codes for precondition violations across the protocol core.
enum class Errc {
    EmptyContributions,
    InsufficientNodes,
    InvalidGroupSize,
    UnauthorizedContributor,
    DuplicateContributor,
    MissingContributor,
    NoCompletion,
    InvalidConfig,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

/// Scenario/config file problems; carries the offending field name.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(what), field_(std::move(field)) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

}  // namespace pots
