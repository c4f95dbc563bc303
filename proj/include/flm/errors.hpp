#ifndef FLM_ERRORS_HPP
#define FLM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace flm {

// Error taxonomy shared by the library and the CLI exit-code contract:
// verification failures are reported as violation lists, everything that
// aborts an operation throws one of these.
enum class ErrorKind {
    precondition, // caller violated a documented precondition
    infeasible,   // input claims feasibility it does not have
    capability,   // instance exceeds an implemented size cap
    identifier,   // unknown facility/client/edge identifier
    numeric,      // solver lost feasibility/termination guarantees
    io,           // file or format problem
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

inline Error precondition_error(const std::string& msg) { return Error(ErrorKind::precondition, msg); }
inline Error infeasible_error(const std::string& msg) { return Error(ErrorKind::infeasible, msg); }
inline Error capability_error(const std::string& msg) { return Error(ErrorKind::capability, msg); }
inline Error identifier_error(const std::string& msg) { return Error(ErrorKind::identifier, msg); }
inline Error numeric_error(const std::string& msg) { return Error(ErrorKind::numeric, msg); }
inline Error io_error(const std::string& msg) { return Error(ErrorKind::io, msg); }

} // namespace flm

#endif
