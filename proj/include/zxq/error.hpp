#pragma once

#include <stdexcept>
#include <string>

namespace zxq {

enum class ErrorKind {
    parse,
    invalid_argument,
    arity_mismatch,
    unbound_variable,
    too_many_variables,
    cap_exceeded,
    no_match,
    condition_mismatch,
    soundness,
    expectation,
};

/// Every failure raised by the library carries a kind so that callers (the CLI
/// in particular) can map it onto a distinct exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string const& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised when a tensor contraction would exceed the configured open-wire cap.
class CapExceeded : public Error {
public:
    CapExceeded(int best_width, int cap)
        : Error(ErrorKind::cap_exceeded,
                "contraction cap exceeded: best contraction width " + std::to_string(best_width) +
                    " > cap " + std::to_string(cap)),
          best_width_(best_width) {}

    int best_width() const noexcept { return best_width_; }

private:
    int best_width_;
};

}  // namespace zxq
