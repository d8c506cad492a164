#pragma once

#include <stdexcept>
#include <string>

namespace densediv {

enum class ErrorCode {
    InvalidArgument,  // precondition violated by caller input
    Domain,           // mathematically undefined (e.g. ratio of n = 1)
    Budget,           // input exceeds a configured size/time cap
    NoConvergence,    // iterative method failed
    Io,
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace densediv
