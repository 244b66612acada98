#pragma once

// Amplifier data: the divisor coefficients d_r(n) of zeta(s)^r, the
// polynomial P and its bracket P[h], the Dirichlet polynomial
// M(s) = sum_{h<y} d_r(h) P[h] h^{-s}, and the Euler-product constant A_r.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "zgap/errors.hpp"
#include "zgap/quadrature.hpp"

namespace zgap {

/// P(x) = sum_j b_j x^j, coefficients constant term first.
class AmplifierPolynomial {
public:
    AmplifierPolynomial() : coeffs_{1.0} {}

    explicit AmplifierPolynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
        detail::require(!coeffs_.empty(), "AmplifierPolynomial: need at least one coefficient");
        for (double b : coeffs_)
            detail::require(std::isfinite(b), "AmplifierPolynomial: coefficients must be finite");
    }

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<double>& coeffs() const { return coeffs_; }

    double operator()(double x) const {
        double acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    AmplifierPolynomial scaled(double c) const {
        auto b = coeffs_;
        for (double& e : b) e *= c;
        return AmplifierPolynomial(std::move(b));
    }

private:
    std::vector<double> coeffs_;
};

/// d_r(n) for 1 <= n <= limit; values[0] is unused.
struct DivisorTable {
    int r = 1;
    std::uint64_t limit = 0;
    std::vector<std::uint64_t> values;

    std::uint64_t operator[](std::uint64_t n) const { return values.at(n); }
};

namespace detail {

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out;
    if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("d_r(n) overflows 64 bits");
    return out;
}

// binom(a + r - 1, r - 1) = d_r(p^a)
inline std::uint64_t prime_power_divisor_count(int r, unsigned a) {
    std::uint64_t c = 1;
    for (unsigned k = 1; k <= a; ++k) {
        // c * (k + r - 1) / k stays integral at every step
        c = checked_mul(c, k + static_cast<std::uint64_t>(r) - 1) / k;
    }
    return c;
}

}  // namespace detail

/// Linear sieve: d_r(n) = d_r(m) * binom(a+r-1, r-1) for n = p^a m, p the
/// smallest prime factor of n.
inline DivisorTable sieve_divisor_coeffs(int r, std::uint64_t limit) {
    detail::require(r >= 1, "sieve_divisor_coeffs: r must be >= 1");
    detail::require(limit >= 1, "sieve_divisor_coeffs: limit must be >= 1");
    detail::require(limit < (std::uint64_t{1} << 32), "sieve_divisor_coeffs: limit too large");

    DivisorTable table;
    table.r = r;
    table.limit = limit;
    table.values.assign(limit + 1, 0);
    table.values[1] = 1;

    const std::uint32_t n_max = static_cast<std::uint32_t>(limit);
    std::vector<std::uint32_t> primes;
    std::vector<std::uint32_t> cofactor(limit + 1, 0);   // n with its spf-power removed
    std::vector<std::uint8_t> exponent(limit + 1, 0);    // multiplicity of spf in n
    std::vector<std::uint32_t> spf(limit + 1, 0);

    for (std::uint32_t i = 2; i <= n_max; ++i) {
        if (spf[i] == 0) {
            spf[i] = i;
            exponent[i] = 1;
            cofactor[i] = 1;
            primes.push_back(i);
        }
        table.values[i] = detail::checked_mul(table.values[cofactor[i]],
                                              detail::prime_power_divisor_count(r, exponent[i]));
        for (std::uint32_t p : primes) {
            const std::uint64_t ip = static_cast<std::uint64_t>(i) * p;
            if (p > spf[i] || ip > n_max) break;
            spf[ip] = p;
            if (p == spf[i]) {
                exponent[ip] = static_cast<std::uint8_t>(exponent[i] + 1);
                cofactor[ip] = cofactor[i];
            } else {
                exponent[ip] = 1;
                cofactor[ip] = i;
            }
        }
    }
    return table;
}

/// Primes p <= limit (Eratosthenes).
inline std::vector<std::uint32_t> primes_up_to(std::uint64_t limit) {
    std::vector<std::uint32_t> out;
    if (limit < 2) return out;
    std::vector<bool> composite(limit + 1, false);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        out.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t k = i * i; k <= limit; k += i) composite[k] = true;
    }
    return out;
}

/// P(log(y/h)/log y) for h < y, 0 for h >= y.
inline double eval_p_bracket(const AmplifierPolynomial& P, std::uint64_t h, double y) {
    detail::require(h >= 1, "eval_p_bracket: h must be >= 1");
    detail::require(y > 1.0, "eval_p_bracket: y must exceed 1");
    const double hd = static_cast<double>(h);
    if (hd >= y) return 0.0;
    return P(std::log(y / hd) / std::log(y));
}

/// M(s) = sum_{h < y} d_r(h) P[h] h^{-s}. The table must reach floor(y).
inline std::complex<double> amplifier_value(const DivisorTable& table, const AmplifierPolynomial& P,
                                            double y, std::complex<double> s) {
    const auto h_max = static_cast<std::uint64_t>(std::floor(y));
    detail::require(table.limit >= h_max, "amplifier_value: divisor table shorter than y");
    std::complex<double> acc{0.0, 0.0};
    for (std::uint64_t h = 1; h <= h_max; ++h) {
        const double coeff = static_cast<double>(table.values[h]) * eval_p_bracket(P, h, y);
        if (coeff == 0.0) continue;
        acc += coeff * std::exp(-s * std::log(static_cast<double>(h)));
    }
    return acc;
}

/// Truncated Euler product for A_r over p <= prime_limit:
///   prod_p (1 - 1/p)^{r^2} sum_l d_r(p^l)^2 / p^l.
/// Inner sums stop once a term drops below 1e-15 of the running sum. The
/// product is accumulated as a sum of log-factors.
inline double compute_A_r(int r, std::uint64_t prime_limit) {
    detail::require(r >= 1, "compute_A_r: r must be >= 1");
    detail::require(prime_limit >= 2, "compute_A_r: prime_limit must be >= 2");
    const double r2 = static_cast<double>(r) * r;
    double log_total = 0.0;
    double compensation = 0.0;  // Kahan
    for (std::uint32_t p : primes_up_to(prime_limit)) {
        const double inv_p = 1.0 / p;
        // tail = sum_{l>=1} binom(l+r-1, r-1)^2 p^{-l}
        double tail = 0.0;
        double binom = 1.0;
        double power = 1.0;
        for (int l = 1; l < 4096; ++l) {
            binom = binom * (l + r - 1) / l;
            power *= inv_p;
            const double term = binom * binom * power;
            tail += term;
            if (term < 1e-15 * (1.0 + tail)) break;
        }
        const double log_factor = r2 * std::log1p(-inv_p) + std::log1p(tail);
        const double y = log_factor - compensation;
        const double t = log_total + y;
        compensation = (t - log_total) - y;
        log_total = t;
    }
    return std::exp(log_total);
}

struct PartialSummationReport {
    std::complex<double> lhs;
    std::complex<double> main_term;
    std::complex<double> residual;
    /// |residual| / (log y)^{r-1}: the empirical constant in the error term.
    double normalized_residual = 0.0;
};

/// Compares sum_{n<=y} d_r(n) n^{-1-alpha} f(log(y/n)/log y) with
/// ((log y)^r/(r-1)!) int_0^1 y^{-alpha x} x^{r-1} f(1-x) dx.
/// `table` must reach floor(y).
inline PartialSummationReport verify_lemma42(const DivisorTable& table, std::complex<double> alpha, double y,
                                    const std::vector<double>& f) {
    detail::require(y >= 100.0, "verify_lemma42: y must be >= 100");
    detail::require(!f.empty(), "verify_lemma42: f needs at least one coefficient");
    for (double c : f)
        detail::require(std::isfinite(c), "verify_lemma42: f coefficients must be finite");
    const AmplifierPolynomial poly(f);
    const int r = table.r;
    const double log_y = std::log(y);
    const auto n_max = static_cast<std::uint64_t>(std::floor(y));
    detail::require(table.limit >= n_max, "verify_lemma42: divisor table shorter than y");

    PartialSummationReport out;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        const double log_n = std::log(static_cast<double>(n));
        out.lhs += static_cast<double>(table.values[n]) * std::exp(-(1.0 + alpha) * log_n) *
                   poly((log_y - log_n) / log_y);
    }

    // Polynomial times an entire exponential of modest size: 48 nodes is
    // exact to rounding for |alpha| log y of order 1.
    const auto rule = gl_nodes(48);
    std::complex<double> integral{0.0, 0.0};
    for (int i = 0; i < rule.order; ++i) {
        const double x = 0.5 * (rule.nodes[i] + 1.0);
        integral += 0.5 * rule.weights[i] * std::exp(-alpha * log_y * x) * std::pow(x, r - 1) *
                    poly(1.0 - x);
    }
    out.main_term = std::pow(log_y, r) / std::tgamma(static_cast<double>(r)) * integral;
    out.residual = out.lhs - out.main_term;
    out.normalized_residual = std::abs(out.residual) / std::pow(log_y, r - 1);
    return out;
}

inline PartialSummationReport verify_lemma42(int r, std::complex<double> alpha, double y,
                                    const std::vector<double>& f) {
    detail::require(r >= 1, "verify_lemma42: r must be >= 1");
    detail::require(y >= 100.0, "verify_lemma42: y must be >= 100");
    return verify_lemma42(sieve_divisor_coeffs(r, static_cast<std::uint64_t>(std::floor(y))), alpha, y, f);
}

}  // namespace zgap
