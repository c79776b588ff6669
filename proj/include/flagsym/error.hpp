#pragma once

#include <stdexcept>
#include <string>

namespace flagsym {

// Input/validation failure. `code` is a stable machine-readable tag
// (e.g. "NonSymmetric", "MixedParity"); the CLI maps these to exit 2.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

// Broken internal invariant (a bug, not bad input). The CLI maps these to exit 3.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

#define FS_CHECK(cond, msg)                                                          \
    do {                                                                             \
        if (!(cond))                                                                 \
            throw ::flagsym::InternalError(std::string(__FILE__) + ":" +             \
                                           std::to_string(__LINE__) + ": " + (msg)); \
    } while (0)

} // namespace flagsym
