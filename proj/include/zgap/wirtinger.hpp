#pragma once

// Wirtinger-type inequalities on [a, b]:
//   (i)  f(a) = f(b) = 0                 =>  int |f|^2 <= ((b-a)/pi)^2  int |f'|^2
//   (ii) f(a) = f(b), int f = 0          =>  int |f|^2 <= ((b-a)/2pi)^2 int |f'|^2
// checked on finite sums of complex exponentials, whose L2 norms (and those
// of their derivatives) are exact pairwise sums.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "zgap/errors.hpp"
#include "zgap/quadrature.hpp"

namespace zgap {

/// f(t) = sum_k c_k exp(i w_k (t - a)) on [a, b].
class TestFunction {
public:
    struct Term {
        double omega;
        std::complex<double> coeff;
    };

    TestFunction(double a, double b, std::vector<Term> terms) : a_(a), b_(b), terms_(std::move(terms)) {
        detail::require(std::isfinite(a) && std::isfinite(b) && a < b, "TestFunction: need finite a < b");
        for (const auto& t : terms_)
            detail::require(std::isfinite(t.omega) && std::isfinite(t.coeff.real()) && std::isfinite(t.coeff.imag()),
                            "TestFunction: frequencies and coefficients must be finite");
    }

    double a() const { return a_; }
    double b() const { return b_; }
    double length() const { return b_ - a_; }
    const std::vector<Term>& terms() const { return terms_; }

    std::complex<double> operator()(double t) const {
        std::complex<double> acc{};
        for (const auto& k : terms_) acc += k.coeff * std::polar(1.0, k.omega * (t - a_));
        return acc;
    }

    std::complex<double> derivative(double t) const {
        std::complex<double> acc{};
        for (const auto& k : terms_)
            acc += std::complex<double>(0.0, k.omega) * k.coeff * std::polar(1.0, k.omega * (t - a_));
        return acc;
    }

    /// int_a^b f.
    std::complex<double> integral() const {
        std::complex<double> acc{};
        for (const auto& k : terms_) acc += k.coeff * exp_integral(k.omega);
        return acc;
    }

    /// int_a^b |f|^2.
    double norm2() const { return gram(false); }

    /// int_a^b |f'|^2.
    double derivative_norm2() const { return gram(true); }

    /// g(s) = f(a + s (b - a)) on [0, 1].
    TestFunction rescaled_to_unit() const {
        auto terms = terms_;
        for (auto& k : terms) k.omega *= length();
        return TestFunction(0.0, 1.0, std::move(terms));
    }

    /// int_0^L exp(i w s) ds = L e^{i w L/2} sinc(w L/2).
    std::complex<double> exp_integral(double omega) const {
        const double L = length();
        const double z = 0.5 * omega * L;
        const double sinc = std::abs(z) < 1e-4 ? 1.0 - z * z / 6.0 : std::sin(z) / z;
        return L * sinc * std::polar(1.0, z);
    }

private:
    double gram(bool derivative) const {
        double acc = 0.0;
        for (const auto& k : terms_) {
            for (const auto& l : terms_) {
                std::complex<double> ck = k.coeff, cl = l.coeff;
                if (derivative) {
                    ck *= k.omega;
                    cl *= l.omega;
                }
                acc += (ck * std::conj(cl) * exp_integral(k.omega - l.omega)).real();
            }
        }
        return std::max(acc, 0.0);
    }

    double a_, b_;
    std::vector<Term> terms_;
};

/// Real trigonometric term alpha cos(w s) + beta sin(w s), s = t - a.
struct RealTrigTerm {
    double omega;
    double alpha;
    double beta;
};

/// u + i w for real trigonometric sums u, w.
inline TestFunction from_real_trig(double a, double b, const std::vector<RealTrigTerm>& re,
                                   const std::vector<RealTrigTerm>& im = {}) {
    std::vector<TestFunction::Term> terms;
    auto add = [&](const RealTrigTerm& t, std::complex<double> unit) {
        // alpha cos + beta sin = (alpha - i beta)/2 e^{i w s} + (alpha + i beta)/2 e^{-i w s}
        const std::complex<double> plus{0.5 * t.alpha, -0.5 * t.beta};
        const std::complex<double> minus{0.5 * t.alpha, 0.5 * t.beta};
        if (t.omega == 0.0) {
            terms.push_back({0.0, unit * t.alpha});
            return;
        }
        terms.push_back({t.omega, unit * plus});
        terms.push_back({-t.omega, unit * minus});
    };
    for (const auto& t : re) add(t, {1.0, 0.0});
    for (const auto& t : im) add(t, {0.0, 1.0});
    return TestFunction(a, b, std::move(terms));
}

struct WirtingerReport {
    double lhs = 0.0;   // int |f|^2
    double rhs = 0.0;   // constant * int |f'|^2
    double ratio = 0.0; // lhs / rhs, 0 when both vanish
    bool satisfied = false;
};

inline constexpr double kWirtingerBoundaryTol = 1e-12;
inline constexpr double kWirtingerSlack = 1e-10;

namespace detail {

inline WirtingerReport wirtinger_report(const TestFunction& f, double constant) {
    WirtingerReport out;
    out.lhs = f.norm2();
    out.rhs = constant * f.derivative_norm2();
    out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : (out.lhs > 0.0 ? INFINITY : 0.0);
    out.satisfied = out.lhs <= out.rhs + kWirtingerSlack;
    return out;
}

}  // namespace detail

/// Case (i); requires |f(a)|, |f(b)| <= 1e-12.
inline WirtingerReport check_wirtinger_i(const TestFunction& f) {
    detail::require(std::abs(f(f.a())) <= kWirtingerBoundaryTol && std::abs(f(f.b())) <= kWirtingerBoundaryTol,
                    "check_wirtinger_i: f must vanish at both endpoints");
    const double c = f.length() / std::numbers::pi;
    return detail::wirtinger_report(f, c * c);
}

/// Case (ii); requires |f(a) - f(b)| <= 1e-12 and |int f| <= 1e-12.
inline WirtingerReport check_wirtinger_ii(const TestFunction& f) {
    detail::require(std::abs(f(f.a()) - f(f.b())) <= kWirtingerBoundaryTol,
                    "check_wirtinger_ii: f(a) must equal f(b)");
    detail::require(std::abs(f.integral()) <= kWirtingerBoundaryTol, "check_wirtinger_ii: f must have zero mean");
    const double c = f.length() / (2.0 * std::numbers::pi);
    return detail::wirtinger_report(f, c * c);
}

/// sin(pi (t - a)/(b - a)), the extremal for (i).
inline TestFunction wirtinger_extremal_i(double a, double b) {
    return from_real_trig(a, b, {{std::numbers::pi / (b - a), 0.0, 1.0}});
}

/// cos(2 pi (t - a)/(b - a)), an extremal for (ii).
inline TestFunction wirtinger_extremal_ii(double a, double b) {
    return from_real_trig(a, b, {{2.0 * std::numbers::pi / (b - a), 1.0, 0.0}});
}

namespace detail {

// Random real trigonometric sum on [0, L] satisfying two linear conditions,
// imposed by solving for two of its coefficients.
//   kind 1: u(0) = 0, u(L) = 0
//   kind 2: u(L) - u(0) = 0, int_0^L u = 0
// The solved pair is (alpha_0, beta_0) for kind 1 and the constant term
// plus beta_0 for kind 2.
inline std::vector<RealTrigTerm> random_admissible_real(CounterRng& rng, double L, int kind) {
    for (;;) {
        const int count = 1 + static_cast<int>(rng.uniform() * 5.0);
        std::vector<RealTrigTerm> terms;
        for (int k = 0; k < count; ++k) {
            const double omega = (0.2 + 6.0 * rng.uniform()) * std::numbers::pi / L;
            terms.push_back({omega, 2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0});
        }
        if (kind == 2) terms.push_back({0.0, 0.0, 0.0});

        // conditions as linear functionals of (alpha, beta) per term
        auto cond = [&](int which, const RealTrigTerm& t, bool beta) {
            const double wl = t.omega * L;
            if (kind == 1) {
                if (which == 0) return beta ? 0.0 : 1.0;
                return beta ? std::sin(wl) : std::cos(wl);
            }
            if (which == 0) return beta ? std::sin(wl) : std::cos(wl) - 1.0;
            if (t.omega == 0.0) return beta ? 0.0 : L;
            return beta ? (1.0 - std::cos(wl)) / t.omega : std::sin(wl) / t.omega;
        };
        // unknowns: x0 = alpha of terms[0] (kind 1) or the constant (kind 2),
        // x1 = beta of terms[0]
        RealTrigTerm& t0 = terms.front();
        RealTrigTerm& tc = kind == 1 ? terms.front() : terms.back();
        t0.beta = 0.0;
        tc.alpha = 0.0;
        double rhs[2];
        for (int q = 0; q < 2; ++q) {
            double s = 0.0;
            for (const auto& t : terms) s += t.alpha * cond(q, t, false) + t.beta * cond(q, t, true);
            rhs[q] = -s;
        }
        const double m00 = cond(0, tc, false), m01 = cond(0, t0, true);
        const double m10 = cond(1, tc, false), m11 = cond(1, t0, true);
        const double det = m00 * m11 - m01 * m10;
        if (std::abs(det) < 1e-3 * (std::abs(m00 * m11) + std::abs(m01 * m10) + 1e-300)) continue;
        tc.alpha = (rhs[0] * m11 - m01 * rhs[1]) / det;
        t0.beta = (m00 * rhs[1] - m10 * rhs[0]) / det;
        if (std::abs(tc.alpha) > 50.0 || std::abs(t0.beta) > 50.0) continue;
        return terms;
    }
}

}  // namespace detail

/// Random complex test function with f(a) = f(b) = 0; real and imaginary
/// parts are independent trigonometric sums.
inline TestFunction random_admissible_i(CounterRng& rng, double a, double b) {
    const double L = b - a;
    const auto re = detail::random_admissible_real(rng, L, 1);
    const auto im = detail::random_admissible_real(rng, L, 1);
    return from_real_trig(a, b, re, im);
}

/// Random complex test function with f(a) = f(b) and zero mean.
inline TestFunction random_admissible_ii(CounterRng& rng, double a, double b) {
    const double L = b - a;
    const auto re = detail::random_admissible_real(rng, L, 2);
    const auto im = detail::random_admissible_real(rng, L, 2);
    return from_real_trig(a, b, re, im);
}

struct WirtingerSuiteReport {
    double extremal_i_ratio = 0.0;
    double extremal_ii_ratio = 0.0;
    int random_i_total = 0;
    int random_i_passed = 0;
    int random_ii_total = 0;
    int random_ii_passed = 0;
    double worst_ratio_i = 0.0;
    double worst_ratio_ii = 0.0;

    bool passed(double equality_tol = 1e-10) const {
        return std::abs(extremal_i_ratio - 1.0) <= equality_tol && std::abs(extremal_ii_ratio - 1.0) <= equality_tol &&
               random_i_passed == random_i_total && random_ii_passed == random_ii_total;
    }
};

/// Extremals on [a, b] plus `count` random admissible functions per case on
/// random intervals, streams keyed by seed.
inline WirtingerSuiteReport run_wirtinger_suite(int count = 1000, std::uint64_t seed = 1, double a = 0.0,
                                                double b = 1.0) {
    detail::require(count >= 0, "run_wirtinger_suite: count must be >= 0");
    WirtingerSuiteReport out;
    out.extremal_i_ratio = check_wirtinger_i(wirtinger_extremal_i(a, b)).ratio;
    out.extremal_ii_ratio = check_wirtinger_ii(wirtinger_extremal_ii(a, b)).ratio;
    CounterRng rng(CounterRng::stream_key(seed, 0));
    for (int n = 0; n < count; ++n) {
        const double lo = 20.0 * rng.uniform() - 10.0;
        const double hi = lo + 0.1 + 5.0 * rng.uniform();
        const auto ri = check_wirtinger_i(random_admissible_i(rng, lo, hi));
        ++out.random_i_total;
        out.random_i_passed += ri.satisfied;
        out.worst_ratio_i = std::max(out.worst_ratio_i, ri.ratio);
        const auto rii = check_wirtinger_ii(random_admissible_ii(rng, lo, hi));
        ++out.random_ii_total;
        out.random_ii_passed += rii.satisfied;
        out.worst_ratio_ii = std::max(out.worst_ratio_ii, rii.ratio);
    }
    return out;
}

}  // namespace zgap
