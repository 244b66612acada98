#pragma once

// The c_j(v, kappa) integrals behind the mean values of |F^{(j)}|^2, in three
// forms:
//
//   * the direct 9-dimensional integrand over (x, x1..x4, t1..t4);
//   * a 7-dimensional form with the (t3, t4) integrals done in closed form;
//   * the shifted integrand c(a, b) with general normalized shifts
//     a_i = alpha_i * L, b_i = beta_i * L, which at a = (0, i kappa pi, 0),
//     b = (0, -i kappa pi, 0) specializes to the j = 0 direct integrand and
//     whose shift derivatives give c_1 and c_2.
//
// Shared notation for a point of the region:
//   L1 = 1 - theta (x1 + x3),  L2 = 1 - theta (x2 + x4),
//   D  = L1 t1 - L2 t2,
//   B1 = theta (x1 - x2) + D,  B2 = theta (x3 - x4) + D,
//   S  = -theta (x + x1 + x2 + x3 + x4) - L1 t1 - L2 t2.
// The derivative weight is (v + S)^{2j}.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "zgap/amplifier.hpp"
#include "zgap/errors.hpp"
#include "zgap/quadrature.hpp"

namespace zgap {

using cplx = std::complex<double>;
using Point9 = std::array<double, 9>;
using Point7 = std::array<double, 7>;

struct CjParams {
    double theta = 0.25;
    int r = 1;
    double kappa = 3.18;
    double v = 1.26;
    int j = 0;

    void validate() const {
        detail::require(theta > 0.0 && theta <= 0.25, "CjParams: theta must lie in (0, 1/4]");
        detail::require(r >= 1 && r <= 5, "CjParams: r must lie in [1, 5]");
        detail::require(kappa >= 0.0 && std::isfinite(kappa), "CjParams: kappa must be finite and >= 0");
        detail::require(std::isfinite(v), "CjParams: v must be finite");
        detail::require(j >= 0 && j <= 2, "CjParams: j must be 0, 1 or 2");
    }
};

struct NormalizedShifts {
    std::array<cplx, 3> a{};
    std::array<cplx, 3> b{};

    static constexpr double kMaxMagnitude = 10.0;

    /// a = (0, i kappa pi, 0), b = (0, -i kappa pi, 0): the point at which the
    /// shifted integral becomes c_0.
    static NormalizedShifts at_kappa(double kappa) {
        const double kp = kappa * std::numbers::pi;
        NormalizedShifts s;
        s.a = {cplx{}, cplx{0.0, kp}, cplx{}};
        s.b = {cplx{}, cplx{0.0, -kp}, cplx{}};
        return s;
    }

    void validate() const {
        for (const auto& z : a)
            detail::require(std::abs(z) <= kMaxMagnitude, "NormalizedShifts: |a_i| must be <= 10");
        for (const auto& z : b)
            detail::require(std::abs(z) <= kMaxMagnitude, "NormalizedShifts: |b_i| must be <= 10");
    }
};

enum class Scheme { direct9, reduced7, mc9, mc7 };

inline std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::direct9: return "direct9";
        case Scheme::reduced7: return "reduced7";
        case Scheme::mc9: return "mc9";
        case Scheme::mc7: return "mc7";
    }
    return "?";
}

inline std::optional<Scheme> parse_scheme(std::string_view name) {
    if (name == "direct9") return Scheme::direct9;
    if (name == "reduced7") return Scheme::reduced7;
    if (name == "mc9") return Scheme::mc9;
    if (name == "mc7") return Scheme::mc7;
    return std::nullopt;
}

inline bool is_monte_carlo(Scheme s) { return s == Scheme::mc9 || s == Scheme::mc7; }

/// value with an error estimate: standard error for Monte Carlo schemes,
/// the order-comparison delta for the Gauss-Legendre ones.
struct IntegralEstimate {
    cplx value{};
    double error_estimate = 0.0;
    std::uint64_t evaluations = 0;
    Scheme scheme = Scheme::reduced7;
};

/// Out-of-region points either throw or contribute zero (Monte Carlo).
enum class RegionMode { strict, indicator };

struct CjOptions {
    int order = 12;         // Gauss-Legendre nodes for x, x1..x4, t1, t2
    int t_order = 20;       // nodes for t3, t4 (direct9 and the shifted form)
    std::uint64_t samples = 10'000'000;
    std::uint64_t seed = 20170101;
    int threads = 1;
    double rel_tolerance = 0.0;  // 0 disables the convergence check
    bool error_pass = true;      // run the lower-order pass for error_estimate
};

namespace detail {

inline constexpr double kRegionSlack = 1e-12;

template <std::size_t D>
bool in_cj_region(const std::array<double, D>& z) {
    for (double c : z)
        if (c < -kRegionSlack || c > 1.0 + kRegionSlack) return false;
    return z[0] + z[1] + z[2] <= 1.0 + kRegionSlack && z[0] + z[3] + z[4] <= 1.0 + kRegionSlack;
}

// Factors shared by every form of the integrand.
struct CjGeometry {
    double L1, L2, D, B1, B2, S, weight;

    CjGeometry(double x, double x1, double x2, double x3, double x4, double t1, double t2,
               double theta, int r) {
        L1 = 1.0 - theta * (x1 + x3);
        L2 = 1.0 - theta * (x2 + x4);
        D = L1 * t1 - L2 * t2;
        B1 = theta * (x1 - x2) + D;
        B2 = theta * (x3 - x4) + D;
        S = -theta * (x + x1 + x2 + x3 + x4) - L1 * t1 - L2 * t2;
        weight = L1 * L2;
        if (r > 1) {
            weight *= std::pow(x, r * r - 1) * std::pow(x1 * x2 * x3 * x4, r - 1);
        }
    }
};

inline double int_pow(double base, int e) {
    double out = 1.0;
    for (int k = 0; k < e; ++k) out *= base;
    return out;
}

/// sin(z)/z with the series below |z| < 1e-4.
inline double sinc(double z) {
    if (std::abs(z) < 1e-4) {
        const double z2 = z * z;
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sin(z) / z;
}

}  // namespace detail

/// Direct 9-dimensional integrand at (x, x1, x2, x3, x4, t1, t2, t3, t4).
///   phase     = theta kappa pi (x2 - x4 - (x3 - x4) t3 + (x1 - x2) t4)
///               - kappa pi D (t3 - t4)
///   amplitude = L1 L2 B1 B2 x^{r^2-1} (x1 x2 x3 x4)^{r-1} (v + S)^{2j}
///               P(1 - x - x1 - x2) P(1 - x - x3 - x4)
inline cplx eval_cj_integrand(const Point9& z, const CjParams& p, const AmplifierPolynomial& P,
                              RegionMode mode = RegionMode::strict) {
    if (!detail::in_cj_region(z)) {
        if (mode == RegionMode::indicator) return {0.0, 0.0};
        throw std::invalid_argument("eval_cj_integrand: point outside the integration region");
    }
    const auto [x, x1, x2, x3, x4, t1, t2, t3, t4] = z;
    const detail::CjGeometry g(x, x1, x2, x3, x4, t1, t2, p.theta, p.r);
    const double kp = p.kappa * std::numbers::pi;
    const double phase =
        p.theta * kp * (x2 - x4 - (x3 - x4) * t3 + (x1 - x2) * t4) - kp * g.D * (t3 - t4);
    const double amp = g.weight * g.B1 * g.B2 * detail::int_pow(p.v + g.S, 2 * p.j) *
                       P(1.0 - x - x1 - x2) * P(1.0 - x - x3 - x4);
    return amp * cplx(std::cos(phase), std::sin(phase));
}

/// The 9-dimensional integrand with (t3, t4) integrated out. The phase is
/// linear in each: -kappa pi B2 t3 + kappa pi B1 t4, so
///   B1 B2 int int e^{i phase} dt3 dt4
///     = e^{i theta kappa pi (x2 - x4)} (1 - e^{i kappa pi B1})(1 - e^{-i kappa pi B2}) / (kappa pi)^2
///     = B1 B2 sinc(kappa pi B1 / 2) sinc(kappa pi B2 / 2)
///       e^{i theta kappa pi (x1 + x2 - x3 - x4) / 2}.
/// The last form is evaluated; it has no cancellation as kappa -> 0.
inline cplx eval_cj_reduced(const Point7& z, const CjParams& p, const AmplifierPolynomial& P,
                            RegionMode mode = RegionMode::strict) {
    if (!detail::in_cj_region(z)) {
        if (mode == RegionMode::indicator) return {0.0, 0.0};
        throw std::invalid_argument("eval_cj_reduced: point outside the integration region");
    }
    const auto [x, x1, x2, x3, x4, t1, t2] = z;
    const detail::CjGeometry g(x, x1, x2, x3, x4, t1, t2, p.theta, p.r);
    const double kp = p.kappa * std::numbers::pi;
    const double amp = g.weight * g.B1 * g.B2 * detail::sinc(0.5 * kp * g.B1) *
                       detail::sinc(0.5 * kp * g.B2) * detail::int_pow(p.v + g.S, 2 * p.j) *
                       P(1.0 - x - x1 - x2) * P(1.0 - x - x3 - x4);
    const double phase = 0.5 * p.theta * kp * (x1 + x2 - x3 - x4);
    return amp * cplx(std::cos(phase), std::sin(phase));
}

/// Shifted integrand c(a, b) with every y-power y^{-beta x} replaced by
/// e^{-theta b x} and every (T y^{-x1-x3})-power by e^{-(...) L1 t1}, etc.
/// No (v + S) weight: derivatives in the shifts produce it.
inline cplx eval_cnorm_integrand(const Point9& z, const NormalizedShifts& s, double theta, int r,
                                 const AmplifierPolynomial& P, RegionMode mode = RegionMode::strict) {
    s.validate();
    if (!detail::in_cj_region(z)) {
        if (mode == RegionMode::indicator) return {0.0, 0.0};
        throw std::invalid_argument("eval_cnorm_integrand: point outside the integration region");
    }
    const auto [x, x1, x2, x3, x4, t1, t2, t3, t4] = z;
    const auto& [a1, a2, a3] = s.a;
    const auto& [b1, b2, b3] = s.b;
    const detail::CjGeometry g(x, x1, x2, x3, x4, t1, t2, theta, r);

    const cplx da = a2 - a1;
    const cplx db = b2 - b1;
    const cplx y_exponent = (a3 + b3) * x + a3 * (x1 + x2) + b3 * (x3 + x4) + b1 * x1 + b2 * x2 +
                            a1 * x3 + a2 * x4 + da * (x3 - x4) * t3 + db * (x1 - x2) * t4;
    const cplx first_block = -(a1 + b1) * t1 - da * t1 * t3 - db * t1 * t4;
    const cplx second_block = -(a2 + b2) * t2 + da * t2 * t3 + db * t2 * t4;
    const cplx exponent = -theta * y_exponent + g.L1 * first_block + g.L2 * second_block;

    const double amp = g.weight * g.B1 * g.B2 * P(1.0 - x - x1 - x2) * P(1.0 - x - x3 - x4);
    return amp * std::exp(exponent);
}

namespace detail {

inline void check_tolerance(const IntegralEstimate& e, const CjOptions& opt, const char* what) {
    if (opt.rel_tolerance > 0.0 && e.error_estimate > opt.rel_tolerance * std::abs(e.value)) {
        throw convergence_error(std::string(what) + ": error estimate above requested tolerance",
                                e.error_estimate / std::max(std::abs(e.value), 1e-300),
                                opt.rel_tolerance);
    }
}

template <std::size_t D>
std::array<int, D> cj_orders(const CjOptions& opt) {
    std::array<int, D> orders;
    orders.fill(opt.order);
    if constexpr (D == 9) orders[7] = orders[8] = opt.t_order;
    return orders;
}

}  // namespace detail

/// c_j over {x, x_i in [0,1], x+x1+x2 <= 1, x+x3+x4 <= 1, t_i in [0,1]}.
/// The imaginary part is kept for diagnostics; callers use the real part.
inline IntegralEstimate compute_cj(const CjParams& params, const AmplifierPolynomial& P, Scheme scheme,
                                   const CjOptions& opt = {}) {
    params.validate();
    IntegralEstimate out;
    out.scheme = scheme;
    switch (scheme) {
        case Scheme::direct9: {
            auto f = [&](const Point9& z) { return eval_cj_integrand(z, params, P); };
            const auto e = integrate_nested(f, twin_simplex_region<9>(), detail::cj_orders<9>(opt),
                                            opt.threads, opt.error_pass);
            out.value = e.value;
            out.error_estimate = e.error_estimate;
            out.evaluations = e.evaluations;
            break;
        }
        case Scheme::reduced7: {
            auto f = [&](const Point7& z) { return eval_cj_reduced(z, params, P); };
            const auto e = integrate_nested(f, twin_simplex_region<7>(), detail::cj_orders<7>(opt),
                                            opt.threads, opt.error_pass);
            out.value = e.value;
            out.error_estimate = e.error_estimate;
            out.evaluations = e.evaluations;
            break;
        }
        case Scheme::mc9: {
            auto f = [&](const Point9& z) {
                return eval_cj_integrand(z, params, P, RegionMode::indicator);
            };
            const auto e = mc_integrate(f, twin_simplex_region<9>(), opt.samples, opt.seed, opt.threads);
            out.value = e.value;
            out.error_estimate = e.error_estimate;
            out.evaluations = e.evaluations;
            break;
        }
        case Scheme::mc7: {
            auto f = [&](const Point7& z) {
                return eval_cj_reduced(z, params, P, RegionMode::indicator);
            };
            const auto e = mc_integrate(f, twin_simplex_region<7>(), opt.samples, opt.seed, opt.threads);
            out.value = e.value;
            out.error_estimate = e.error_estimate;
            out.evaluations = e.evaluations;
            break;
        }
    }
    detail::check_tolerance(out, opt, "compute_cj");
    return out;
}

/// c_j for j in {1, 2} from the shifted integral: applies
///   (v + d/ds)^j (v + d/du)^j c(a0 + s(1,1,1), b0 + u(1,1,1)) at s = u = 0
/// (a0, b0 the kappa shift point) by central differences on the 3x3 stencil
/// s, u in {-step, 0, step}. All nine stencil integrands share one
/// Gauss-Legendre rule, so their quadrature errors largely cancel.
inline IntegralEstimate cj_via_differentiation(const CjParams& params, const AmplifierPolynomial& P,
                                               double step, const CjOptions& opt = {}) {
    params.validate();
    detail::require(params.j == 1 || params.j == 2, "cj_via_differentiation: j must be 1 or 2");
    detail::require(step >= 1e-4 && step <= 1e-2, "cj_via_differentiation: step must lie in [1e-4, 1e-2]");

    const NormalizedShifts base = NormalizedShifts::at_kappa(params.kappa);
    std::array<NormalizedShifts, 9> stencil;
    const std::array<double, 3> offsets{-step, 0.0, step};
    for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 3; ++k) {
            NormalizedShifts s = base;
            for (auto& ai : s.a) ai += offsets[i];
            for (auto& bi : s.b) bi += offsets[k];
            stencil[3 * i + k] = s;
        }
    }

    // 1-d weights of (v + d/ds)^j on {-h, 0, h}
    const double v = params.v;
    const double h = step;
    std::array<double, 3> w{};
    if (params.j == 1) {
        w = {-1.0 / (2 * h), v, 1.0 / (2 * h)};
    } else {
        // v^2 + 2v d/ds + d^2/ds^2
        w = {1.0 / (h * h) - v / h, v * v - 2.0 / (h * h), 1.0 / (h * h) + v / h};
    }

    // Stencil combined pointwise, one integral.
    std::array<double, 9> weights;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) weights[3 * i + k] = w[i] * w[k];
    auto f = [&](const Point9& z) {
        cplx total{};
        for (std::size_t m = 0; m < 9; ++m)
            total += weights[m] * eval_cnorm_integrand(z, stencil[m], params.theta, params.r, P);
        return total;
    };
    const auto e = integrate_nested(f, twin_simplex_region<9>(), detail::cj_orders<9>(opt), opt.threads,
                                    opt.error_pass);
    IntegralEstimate out;
    out.scheme = Scheme::direct9;
    out.value = e.value;
    out.error_estimate = e.error_estimate;
    out.evaluations = e.evaluations * 9;
    detail::check_tolerance(out, opt, "cj_via_differentiation");
    return out;
}

}  // namespace zgap
