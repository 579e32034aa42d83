#pragma once

#include <stdexcept>
#include <string>

namespace avdiv {

/// Broad classes of failure. The CLI maps each class onto an exit code.
enum class ErrorKind {
    input,       ///< malformed or out-of-contract user data
    degeneracy,  ///< the mathematics degenerates (torsion lift, no rational Q0, ...)
    budget,      ///< a configured work budget ran out
    invariant,   ///< an internal consistency check failed
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), kind_(kind), code_(std::move(code)) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// Short machine-readable tag such as "OffCurve" or "TorsionLift".
    const std::string& code() const noexcept { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

inline Error input_error(std::string code, const std::string& what) {
    return Error(ErrorKind::input, std::move(code), what);
}
inline Error degeneracy_error(std::string code, const std::string& what) {
    return Error(ErrorKind::degeneracy, std::move(code), what);
}
inline Error invariant_error(std::string code, const std::string& what) {
    return Error(ErrorKind::invariant, std::move(code), what);
}

}  // namespace avdiv
