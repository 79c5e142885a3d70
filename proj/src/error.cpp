#include "crossarea/error.hpp"

namespace crossarea {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid argument";
        case ErrorCode::domain: return "domain error";
        case ErrorCode::not_converged: return "not converged";
        case ErrorCode::singular: return "singular system";
        case ErrorCode::unsupported: return "unsupported";
        case ErrorCode::io: return "i/o error";
    }
    return "unknown";
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace crossarea
