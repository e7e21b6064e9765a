#pragma once

#include <stdexcept>
#include <string>

namespace qrc {

/// Raised when a config file is malformed; `field()` names the offending JSON path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what)
      , field_(std::move(field))
    {
    }

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A recurrence or training loop produced a non-finite value.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qrc
