#pragma once

// Error types shared across zgap.
//
// Precondition failures are reported with std::invalid_argument. Numerical
// failures (a tolerance that could not be met, a ratio whose denominator is
// indistinguishable from zero) get their own types so callers can tell the
// two apart.

#include <stdexcept>
#include <string>

namespace zgap {

/// A computation ran to its budget without reaching the requested tolerance.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, double achieved, double requested)
        : std::runtime_error(what), achieved_(achieved), requested_(requested) {}

    double achieved() const noexcept { return achieved_; }
    double requested() const noexcept { return requested_; }

private:
    double achieved_;
    double requested_;
};

/// A ratio whose denominator is consistent with zero given its error bar.
class indeterminate_ratio : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A bisection whose initial bracket does not straddle the predicate change.
class bracket_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

inline void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

}  // namespace detail
}  // namespace zgap
