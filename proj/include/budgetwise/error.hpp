#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace budgetwise {

// Base for all library errors. `field()` names the offending input when one
// can be identified (config key, JSON member, CLI flag).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message, std::string field = {})
        : std::runtime_error(message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

} // namespace budgetwise
