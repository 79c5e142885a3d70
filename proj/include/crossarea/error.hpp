#pragma once

#include <stdexcept>
#include <string>

namespace crossarea {

enum class ErrorCode {
    invalid_argument,  // precondition on an input violated
    domain,            // quantity does not exist / is infinite for these inputs
    not_converged,     // quadrature or series failed to reach tolerance
    singular,          // linear system could not be solved
    unsupported,       // no route available for this (preset, quantity)
    io,
};

const char* to_string(ErrorCode code) noexcept;

/// Library-wide exception; `code()` lets callers map failures onto exit codes.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) fail(code, what);
}

}  // namespace crossarea
