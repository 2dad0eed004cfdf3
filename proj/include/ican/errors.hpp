#pragma once

#include <stdexcept>
#include <string>

namespace ican {

// Thrown on contract violations. `code` is a stable machine-readable tag
// (e.g. "invalid-config", "layout-exceeds-unit-disk"); `what()` adds detail.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& detail)
        : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

}  // namespace ican
