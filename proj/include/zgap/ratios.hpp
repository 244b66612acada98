#pragma once

// The ratio criteria h1 = c0 / (kappa^2 c1) and h2 = 4 c1 / (kappa^2 c2), the
// moment tensor that makes c_j a polynomial in v and a quadratic form in the
// coefficients of P, the (v, P) optimizer, and the bisection for the largest
// kappa with h > 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zgap/amplifier.hpp"
#include "zgap/errors.hpp"
#include "zgap/integrand.hpp"
#include "zgap/quadrature.hpp"

namespace zgap {

enum class Target { h1, h2 };

inline std::string_view to_string(Target t) { return t == Target::h1 ? "h1" : "h2"; }

inline std::optional<Target> parse_target(std::string_view name) {
    if (name == "h1") return Target::h1;
    if (name == "h2") return Target::h2;
    return std::nullopt;
}

/// Lower c_j index of the ratio: h1 uses (c0, c1), h2 uses (c1, c2).
inline int numerator_j(Target t) { return t == Target::h1 ? 0 : 1; }
inline double ratio_prefactor(Target t) { return t == Target::h1 ? 1.0 : 4.0; }

/// Published parameter sets.
struct PublishedPoint {
    double kappa;
    double v;
    std::vector<double> poly;
    double h_bound;
};

inline PublishedPoint published_point(Target t) {
    if (t == Target::h1) return {3.18, 1.26, {1.0, -5.8, 6.4}, 1.0002};
    return {4.05, 1.25, {1.0, -5.2, 5.5}, 1.0048};
}

/// Margin for an "h > 1" claim: h - 1 must exceed this many propagated errors.
inline constexpr double kCertificationMargin = 5.0;

struct RatioResult {
    Target target = Target::h1;
    double h = 0.0;
    IntegralEstimate numerator_c;
    IntegralEstimate denominator_c;
    double kappa = 0.0;
    double v = 0.0;
    double propagated_error = 0.0;

    bool certified() const { return h - 1.0 > kCertificationMargin * propagated_error; }
};

namespace detail {

/// h = pre num / (kappa^2 den) with first-order relative error propagation.
inline void form_ratio(RatioResult& out, double prefactor) {
    const double num = out.numerator_c.value.real();
    const double den = out.denominator_c.value.real();
    const double den_err = out.denominator_c.error_estimate;
    if (!(std::abs(den) > 3.0 * den_err) || den == 0.0)
        throw indeterminate_ratio("ratio: denominator is consistent with zero");
    out.h = prefactor * num / (out.kappa * out.kappa * den);
    const double rel_num = num != 0.0 ? out.numerator_c.error_estimate / std::abs(num) : 0.0;
    out.propagated_error = std::abs(out.h) * (rel_num + den_err / std::abs(den));
}

}  // namespace detail

inline RatioResult ratio(Target target, double v, double kappa, double theta, int r,
                         const AmplifierPolynomial& P, Scheme scheme, const CjOptions& opt = {}) {
    detail::require(kappa > 0.0, "ratio: kappa must be > 0");
    CjParams p{theta, r, kappa, v, numerator_j(target)};
    RatioResult out;
    out.target = target;
    out.kappa = kappa;
    out.v = v;
    out.numerator_c = compute_cj(p, P, scheme, opt);
    p.j += 1;
    out.denominator_c = compute_cj(p, P, scheme, opt);
    detail::form_ratio(out, ratio_prefactor(target));
    return out;
}

/// h1 = c0 / (kappa^2 c1).
inline RatioResult h1(double v, double kappa, double theta, int r, const AmplifierPolynomial& P,
                      Scheme scheme = Scheme::reduced7, const CjOptions& opt = {}) {
    return ratio(Target::h1, v, kappa, theta, r, P, scheme, opt);
}

/// h2 = 4 c1 / (kappa^2 c2).
inline RatioResult h2(double v, double kappa, double theta, int r, const AmplifierPolynomial& P,
                      Scheme scheme = Scheme::reduced7, const CjOptions& opt = {}) {
    return ratio(Target::h2, v, kappa, theta, r, P, scheme, opt);
}

// ---------------------------------------------------------------------------
// Moment tensor

inline constexpr int kMaxTensorDegree = 6;

/// G[m][i][i'] = integral of the c_j amplitude with (v + S)^{2j} replaced by
/// S^m and the two P factors by (1-x-x1-x2)^i (1-x-x3-x4)^{i'}, real part,
/// symmetrized in (i, i'). Then for every j' <= j
///   c_{j'}(v, b) = sum_m binom(2j', m) v^{2j'-m} b' G[m] b.
struct MomentTensor {
    int j = 0;
    int max_degree = 0;
    double kappa = 0.0;
    double theta = 0.25;
    int r = 1;
    Scheme scheme = Scheme::reduced7;
    std::vector<double> entries;  // [(m * dim + i) * dim + i']
    std::vector<double> coarse;   // the same tensor at order - 2
    std::uint64_t evaluations = 0;

    int dim() const { return max_degree + 1; }
    int slices() const { return 2 * j + 1; }

    double at(int m, int i, int k) const { return entries[index(m, i, k)]; }

    /// Coefficients of S^m in (v + S)^{2 jj}.
    static std::vector<double> v_weights(int jj, double v) {
        std::vector<double> w(2 * jj + 1);
        double binom = 1.0;
        for (int m = 0; m <= 2 * jj; ++m) {
            w[m] = binom * std::pow(v, 2 * jj - m);
            binom = binom * (2 * jj - m) / (m + 1);
        }
        return w;
    }

    /// Matrix of the quadratic form b -> c_jj(v, b), row-major dim x dim.
    std::vector<double> form(int jj, double v, bool use_coarse = false) const {
        detail::require(jj >= 0 && jj <= j, "MomentTensor: requested j exceeds the tensor");
        const auto w = v_weights(jj, v);
        const int n = dim();
        std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
        for (int m = 0; m <= 2 * jj; ++m)
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k)
                    out[i * n + k] += w[m] * (use_coarse ? coarse[index(m, i, k)] : at(m, i, k));
        return out;
    }

    /// c_jj(v, b); b may be shorter than dim().
    double value(int jj, double v, const std::vector<double>& b) const { return quad(form(jj, v), b); }

    /// |c_jj(order) - c_jj(order - 2)|, the estimate compute_cj reports.
    double error(int jj, double v, const std::vector<double>& b) const {
        return std::abs(value(jj, v, b) - quad(form(jj, v, true), b));
    }

private:
    std::size_t index(int m, int i, int k) const {
        return (static_cast<std::size_t>(m) * dim() + i) * dim() + k;
    }

    double quad(const std::vector<double>& M, const std::vector<double>& b) const {
        detail::require(static_cast<int>(b.size()) <= dim(), "MomentTensor: polynomial degree exceeds the tensor");
        const int n = dim();
        double acc = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i)
            for (std::size_t k = 0; k < b.size(); ++k)
                acc += b[i] * b[k] * M[i * n + k];
        return acc;
    }
};

namespace detail {

inline constexpr std::size_t kTensorSlots = 5 * (kMaxTensorDegree + 1) * (kMaxTensorDegree + 1);
using TensorAcc = std::array<double, kTensorSlots>;

// Adds w * base * S^m u^i u'^{i'} for all (m, i, i').
inline void accumulate_moments(TensorAcc& acc, double w, double base, double S, double u, double u2,
                               int slices, int dim) {
    std::array<double, 5> s_pow;
    std::array<double, kMaxTensorDegree + 1> u_pow, u2_pow;
    s_pow[0] = w * base;
    for (int m = 1; m < slices; ++m) s_pow[m] = s_pow[m - 1] * S;
    u_pow[0] = u2_pow[0] = 1.0;
    for (int i = 1; i < dim; ++i) {
        u_pow[i] = u_pow[i - 1] * u;
        u2_pow[i] = u2_pow[i - 1] * u2;
    }
    std::size_t idx = 0;
    for (int m = 0; m < slices; ++m)
        for (int i = 0; i < dim; ++i) {
            const double a = s_pow[m] * u_pow[i];
            for (int k = 0; k < dim; ++k) acc[idx++] += a * u2_pow[k];
        }
}

template <std::size_t D, class Kernel>
TensorAcc tensor_pass(Kernel& kernel, const std::array<int, D>& orders, int threads, std::uint64_t& evals) {
    auto e = integrate_nested_accumulate<TensorAcc>(kernel, twin_simplex_region<D>(), orders, threads, false);
    evals += e.evaluations;
    return e.value;
}

}  // namespace detail

/// Builds G[m][i][i'] for m <= 2j and i, i' <= max_degree with the nested
/// Gauss-Legendre rule of `scheme` (direct9 or reduced7), at opt.order and
/// again at opt.order - 2 for error estimates.
inline MomentTensor build_moment_tensor(int j, double kappa, double theta, int r, int max_degree,
                                        Scheme scheme = Scheme::reduced7, const CjOptions& opt = {}) {
    detail::require(j >= 0 && j <= 2, "build_moment_tensor: j must be 0, 1 or 2");
    detail::require(max_degree >= 0 && max_degree <= kMaxTensorDegree,
                    "build_moment_tensor: max_degree must lie in [0, 6]");
    detail::require(!is_monte_carlo(scheme), "build_moment_tensor: needs a nested scheme (direct9 or reduced7)");
    CjParams{theta, r, kappa, 0.0, j}.validate();

    MomentTensor out;
    out.j = j;
    out.max_degree = max_degree;
    out.kappa = kappa;
    out.theta = theta;
    out.r = r;
    out.scheme = scheme;
    const int slices = out.slices();
    const int dim = out.dim();
    const double kp = kappa * std::numbers::pi;

    detail::TensorAcc fine{}, coarse{};
    if (scheme == Scheme::reduced7) {
        auto kernel = [&](const Point7& z, double w, detail::TensorAcc& acc) {
            const auto [x, x1, x2, x3, x4, t1, t2] = z;
            const detail::CjGeometry g(x, x1, x2, x3, x4, t1, t2, theta, r);
            const double phase = 0.5 * theta * kp * (x1 + x2 - x3 - x4);
            const double base = g.weight * g.B1 * g.B2 * detail::sinc(0.5 * kp * g.B1) *
                                detail::sinc(0.5 * kp * g.B2) * std::cos(phase);
            detail::accumulate_moments(acc, w, base, g.S, 1.0 - x - x1 - x2, 1.0 - x - x3 - x4, slices, dim);
        };
        auto orders = detail::cj_orders<7>(opt);
        fine = detail::tensor_pass<7>(kernel, orders, opt.threads, out.evaluations);
        for (auto& o : orders) o = std::max(1, o - 2);
        coarse = detail::tensor_pass<7>(kernel, orders, opt.threads, out.evaluations);
    } else {
        auto kernel = [&](const Point9& z, double w, detail::TensorAcc& acc) {
            const auto [x, x1, x2, x3, x4, t1, t2, t3, t4] = z;
            const detail::CjGeometry g(x, x1, x2, x3, x4, t1, t2, theta, r);
            const double phase =
                theta * kp * (x2 - x4 - (x3 - x4) * t3 + (x1 - x2) * t4) - kp * g.D * (t3 - t4);
            const double base = g.weight * g.B1 * g.B2 * std::cos(phase);
            detail::accumulate_moments(acc, w, base, g.S, 1.0 - x - x1 - x2, 1.0 - x - x3 - x4, slices, dim);
        };
        auto orders = detail::cj_orders<9>(opt);
        fine = detail::tensor_pass<9>(kernel, orders, opt.threads, out.evaluations);
        for (auto& o : orders) o = std::max(1, o - 2);
        coarse = detail::tensor_pass<9>(kernel, orders, opt.threads, out.evaluations);
    }

    const std::size_t n = static_cast<std::size_t>(slices) * dim * dim;
    out.entries.assign(n, 0.0);
    out.coarse.assign(n, 0.0);
    for (int m = 0; m < slices; ++m)
        for (int i = 0; i < dim; ++i)
            for (int k = 0; k < dim; ++k) {
                const std::size_t a = (static_cast<std::size_t>(m) * dim + i) * dim + k;
                const std::size_t b = (static_cast<std::size_t>(m) * dim + k) * dim + i;
                out.entries[a] = 0.5 * (fine[a] + fine[b]);
                out.coarse[a] = 0.5 * (coarse[a] + coarse[b]);
            }
    return out;
}

/// h and its propagated error from a tensor built with j >= numerator_j + 1.
inline std::pair<double, double> tensor_ratio(Target target, const MomentTensor& G, double v,
                                              const std::vector<double>& b) {
    const int jn = numerator_j(target);
    const double num = G.value(jn, v, b);
    const double den = G.value(jn + 1, v, b);
    const double h = ratio_prefactor(target) * num / (G.kappa * G.kappa * den);
    const double err =
        std::abs(h) * (G.error(jn, v, b) / std::abs(num) + G.error(jn + 1, v, b) / std::abs(den));
    return {h, err};
}

// ---------------------------------------------------------------------------
// Dense linear algebra for the <= 7x7 pencil

namespace detail {

/// In-place Cholesky A = L L' (lower triangle); false if A is not positive
/// definite to working precision.
inline bool cholesky(std::vector<double>& A, int n) {
    for (int k = 0; k < n; ++k) {
        double d = A[k * n + k];
        for (int p = 0; p < k; ++p) d -= A[k * n + p] * A[k * n + p];
        if (!(d > 0.0)) return false;
        d = std::sqrt(d);
        A[k * n + k] = d;
        for (int i = k + 1; i < n; ++i) {
            double s = A[i * n + k];
            for (int p = 0; p < k; ++p) s -= A[i * n + p] * A[k * n + p];
            A[i * n + k] = s / d;
        }
        for (int c = k + 1; c < n; ++c) A[k * n + c] = 0.0;
    }
    return true;
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Returns
/// eigenvalues; V holds eigenvectors in columns.
inline std::vector<double> jacobi_eigen(std::vector<double> A, int n, std::vector<double>& V) {
    V.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) V[i * n + i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0, scale = 0.0;
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) (i == k ? scale : off) += A[i * n + k] * A[i * n + k];
        if (off <= 1e-30 * scale) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = A[p * n + q];
                if (apq == 0.0) continue;
                const double tau = (A[q * n + q] - A[p * n + p]) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = A[k * n + p], akq = A[k * n + q];
                    A[k * n + p] = c * akp - s * akq;
                    A[k * n + q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A[p * n + k], aqk = A[q * n + k];
                    A[p * n + k] = c * apk - s * aqk;
                    A[q * n + k] = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V[k * n + p], vkq = V[k * n + q];
                    V[k * n + p] = c * vkp - s * vkq;
                    V[k * n + q] = s * vkp + c * vkq;
                }
            }
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = A[i * n + i];
    return eig;
}

}  // namespace detail

/// Maximizer of b'Nb / b'Db for symmetric N and positive definite D, or
/// nullopt when D is not positive definite.
inline std::optional<std::vector<double>> max_rayleigh(const std::vector<double>& N, const std::vector<double>& D,
                                                       int n) {
    std::vector<double> L = D;
    if (!detail::cholesky(L, n)) return std::nullopt;
    // C = L^{-1} N L^{-T}
    std::vector<double> X(static_cast<std::size_t>(n) * n);  // L^{-1} N
    for (int c = 0; c < n; ++c)
        for (int i = 0; i < n; ++i) {
            double s = N[i * n + c];
            for (int p = 0; p < i; ++p) s -= L[i * n + p] * X[p * n + c];
            X[i * n + c] = s / L[i * n + i];
        }
    std::vector<double> C(static_cast<std::size_t>(n) * n);
    for (int r = 0; r < n; ++r)
        for (int i = 0; i < n; ++i) {
            double s = X[r * n + i];
            for (int p = 0; p < i; ++p) s -= L[i * n + p] * C[r * n + p];
            C[r * n + i] = s / L[i * n + i];
        }
    for (int i = 0; i < n; ++i)
        for (int k = i + 1; k < n; ++k) C[i * n + k] = C[k * n + i] = 0.5 * (C[i * n + k] + C[k * n + i]);
    std::vector<double> V;
    const auto eig = detail::jacobi_eigen(C, n, V);
    const int best = static_cast<int>(std::max_element(eig.begin(), eig.end()) - eig.begin());
    // b = L^{-T} y
    std::vector<double> b(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = V[i * n + best];
        for (int p = i + 1; p < n; ++p) s -= L[p * n + i] * b[p];
        b[i] = s / L[i * n + i];
    }
    return b;
}

// ---------------------------------------------------------------------------
// Optimizer

struct OptimizeOptions {
    int degree = 2;
    int budget = 50;         // alternation rounds; Nelder-Mead gets 40x this in steps
    double v_min = -2.0;
    double v_max = 5.0;
    Scheme scheme = Scheme::reduced7;
    CjOptions cj{.order = 10};
    bool final_direct = true;  // re-evaluate the optimum with compute_cj
};

struct OptimizeStep {
    int iteration;
    std::string stage;  // rayleigh | v | nelder_mead
    double v;
    std::vector<double> b;
    double h;
};

struct OptimizeResult {
    double v = 0.0;
    AmplifierPolynomial P;
    RatioResult result;
    double tensor_h = 0.0;
    double tensor_error = 0.0;
    bool budget_exhausted = false;
    bool used_nelder_mead = false;
    std::vector<OptimizeStep> trace;
};

namespace detail {

/// Golden-section refinement after a uniform scan; returns the argmax.
template <class F>
double maximize_1d(F&& f, double lo, double hi, int grid = 1400) {
    double best_x = lo, best_f = -std::numeric_limits<double>::infinity();
    const double step = (hi - lo) / grid;
    for (int k = 0; k <= grid; ++k) {
        const double x = lo + step * k;
        const double fx = f(x);
        if (fx > best_f) {
            best_f = fx;
            best_x = x;
        }
    }
    double a = std::max(lo, best_x - step), b = std::min(hi, best_x + step);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return f(x) >= best_f ? x : best_x;
}

inline double safe_ratio(Target target, const MomentTensor& G, double v, const std::vector<double>& b) {
    const int jn = numerator_j(target);
    const double den = G.value(jn + 1, v, b);
    if (!(den > 0.0)) return -std::numeric_limits<double>::infinity();
    return ratio_prefactor(target) * G.value(jn, v, b) / (G.kappa * G.kappa * den);
}

/// Nelder-Mead maximization of h over (v, b_1..b_d) with b_0 = 1. Initial
/// simplex: the start point plus +0.5 along each coordinate.
inline std::pair<double, std::vector<double>> nelder_mead(Target target, const MomentTensor& G, double v0,
                                                          std::vector<double> b0, int max_steps,
                                                          const OptimizeOptions& opt) {
    const int n = static_cast<int>(b0.size());  // v plus b_1..b_d
    auto unpack = [&](const std::vector<double>& p) {
        std::vector<double> b(b0.size());
        b[0] = 1.0;
        for (int i = 1; i < n; ++i) b[i] = p[i];
        return b;
    };
    auto cost = [&](const std::vector<double>& p) {
        if (p[0] < opt.v_min || p[0] > opt.v_max) return std::numeric_limits<double>::infinity();
        return -safe_ratio(target, G, p[0], unpack(p));
    };
    std::vector<std::vector<double>> simplex(n + 1, std::vector<double>(n));
    simplex[0][0] = v0;
    for (int i = 1; i < n; ++i) simplex[0][i] = b0[i];
    for (int k = 1; k <= n; ++k) {
        simplex[k] = simplex[0];
        simplex[k][k - 1] += 0.5;
    }
    std::vector<double> f(n + 1);
    for (int k = 0; k <= n; ++k) f[k] = cost(simplex[k]);
    for (int step = 0; step < max_steps; ++step) {
        std::vector<int> order(n + 1);
        for (int k = 0; k <= n; ++k) order[k] = k;
        std::sort(order.begin(), order.end(), [&](int a, int b) { return f[a] < f[b]; });
        const int best = order[0], worst = order[n], second = order[n - 1];
        if (std::abs(f[worst] - f[best]) < 1e-15 * (1.0 + std::abs(f[best]))) break;
        std::vector<double> centroid(n, 0.0);
        for (int k = 0; k <= n; ++k)
            if (k != worst)
                for (int i = 0; i < n; ++i) centroid[i] += simplex[k][i] / n;
        auto along = [&](double t) {
            std::vector<double> p(n);
            for (int i = 0; i < n; ++i) p[i] = centroid[i] + t * (simplex[worst][i] - centroid[i]);
            return p;
        };
        const auto reflected = along(-1.0);
        const double fr = cost(reflected);
        if (fr < f[best]) {
            const auto expanded = along(-2.0);
            const double fe = cost(expanded);
            if (fe < fr) {
                simplex[worst] = expanded;
                f[worst] = fe;
            } else {
                simplex[worst] = reflected;
                f[worst] = fr;
            }
        } else if (fr < f[second]) {
            simplex[worst] = reflected;
            f[worst] = fr;
        } else {
            const auto contracted = along(fr < f[worst] ? -0.5 : 0.5);
            const double fc = cost(contracted);
            if (fc < std::min(fr, f[worst])) {
                simplex[worst] = contracted;
                f[worst] = fc;
            } else {
                for (int k = 0; k <= n; ++k) {
                    if (k == best) continue;
                    for (int i = 0; i < n; ++i) simplex[k][i] = simplex[best][i] + 0.5 * (simplex[k][i] - simplex[best][i]);
                    f[k] = cost(simplex[k]);
                }
            }
        }
    }
    const int best = static_cast<int>(std::min_element(f.begin(), f.end()) - f.begin());
    return {simplex[best][0], unpack(simplex[best])};
}

}  // namespace detail

/// Best v for a fixed polynomial from the tensor: exact for h1 (c1 is a
/// quadratic in v), scan plus golden section for h2.
inline double optimal_v(Target target, const MomentTensor& G, const std::vector<double>& b,
                        const OptimizeOptions& opt = {}) {
    if (target == Target::h1) {
        // c1(v) = g0 v^2 + 2 g1 v + g2 with g_m = b' G[m] b
        const double g0 = G.value(0, 0.0, b);
        const double g2 = G.value(1, 0.0, b);
        const double g1 = 0.5 * (G.value(1, 1.0, b) - g2 - g0);
        const double v = -g1 / g0;
        if (g0 > 0.0 && v >= opt.v_min && v <= opt.v_max) return v;
    }
    return detail::maximize_1d([&](double v) { return detail::safe_ratio(target, G, v, b); }, opt.v_min,
                               opt.v_max);
}

/// Maximizes h over (v, P) at fixed kappa from a tensor: alternates the
/// generalized Rayleigh quotient in b (b_0 = 1) with the 1-d optimum in v,
/// and falls back to Nelder-Mead when the pencil is not positive definite
/// or the eigenvector has b_0 ~ 0. Starts from (v0, P0).
inline OptimizeResult optimize_with_tensor(Target target, const MomentTensor& G, double v0,
                                           const std::vector<double>& P0, const OptimizeOptions& opt) {
    const int n = opt.degree + 1;
    detail::require(G.j >= numerator_j(target) + 1, "optimize: tensor j too small for the target");
    detail::require(G.max_degree >= opt.degree, "optimize: tensor degree below requested degree");
    std::vector<double> b(n, 0.0);
    for (std::size_t i = 0; i < P0.size() && i < b.size(); ++i) b[i] = P0[i];
    detail::require(b[0] != 0.0, "optimize: start polynomial must have b_0 != 0");
    for (double& e : b) e /= P0[0];

    OptimizeResult out;
    double v = std::clamp(v0, opt.v_min, opt.v_max);
    double h = detail::safe_ratio(target, G, v, b);
    out.trace.push_back({0, "start", v, b, h});
    const int jn = numerator_j(target);
    bool converged = false;
    bool fallback = false;
    for (int it = 1; it <= opt.budget; ++it) {
        const double h_before = h;
        const auto N = G.form(jn, v);
        const auto Dm = G.form(jn + 1, v);
        auto Ns = N, Ds = Dm;
        if (n < G.dim()) {  // restrict to the leading n x n block
            Ns.assign(static_cast<std::size_t>(n) * n, 0.0);
            Ds = Ns;
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k) {
                    Ns[i * n + k] = N[i * G.dim() + k];
                    Ds[i * n + k] = Dm[i * G.dim() + k];
                }
        }
        const auto y = max_rayleigh(Ns, Ds, n);
        double norm = 0.0;
        if (y) for (double e : *y) norm = std::max(norm, std::abs(e));
        if (!y || std::abs((*y)[0]) < 1e-8 * norm) {
            fallback = true;
            break;
        }
        std::vector<double> cand = *y;
        for (double& e : cand) e /= (*y)[0];
        const double h_cand = detail::safe_ratio(target, G, v, cand);
        if (h_cand >= h) {
            b = cand;
            h = h_cand;
        }
        out.trace.push_back({it, "rayleigh", v, b, h});
        const double v_cand = optimal_v(target, G, b, opt);
        const double h_v = detail::safe_ratio(target, G, v_cand, b);
        if (h_v >= h) {
            v = v_cand;
            h = h_v;
        }
        out.trace.push_back({it, "v", v, b, h});
        if (h - h_before <= 1e-13 * std::abs(h)) {
            converged = true;
            break;
        }
    }
    if (fallback) {
        out.used_nelder_mead = true;
        auto [v_nm, b_nm] = detail::nelder_mead(target, G, v, b, 40 * opt.budget, opt);
        const double h_nm = detail::safe_ratio(target, G, v_nm, b_nm);
        if (h_nm > h) {
            v = v_nm;
            b = b_nm;
            h = h_nm;
        }
        out.trace.push_back({static_cast<int>(out.trace.size()), "nelder_mead", v, b, h});
        converged = true;
    }
    out.budget_exhausted = !converged;
    out.v = v;
    out.P = AmplifierPolynomial(b);
    const auto [th, terr] = tensor_ratio(target, G, v, b);
    out.tensor_h = th;
    out.tensor_error = terr;
    return out;
}

/// Full optimization at one kappa: builds the tensor, optimizes, and (if
/// opt.final_direct) re-evaluates the optimum with compute_cj. The search
/// starts from the published point of the target.
inline OptimizeResult optimize_params(Target target, double kappa, double theta, int r,
                                      const OptimizeOptions& opt = {}) {
    detail::require(opt.degree >= 0 && opt.degree <= kMaxTensorDegree, "optimize_params: degree must lie in [0, 6]");
    detail::require(opt.budget >= 1, "optimize_params: budget must be >= 1");
    const auto start = published_point(target);
    const auto G = build_moment_tensor(numerator_j(target) + 1, kappa, theta, r, opt.degree, opt.scheme, opt.cj);
    auto out = optimize_with_tensor(target, G, start.v, start.poly, opt);
    if (opt.final_direct) {
        out.result = ratio(target, out.v, kappa, theta, r, out.P, opt.scheme, opt.cj);
    } else {
        out.result.target = target;
        out.result.kappa = kappa;
        out.result.v = out.v;
        out.result.h = out.tensor_h;
        out.result.propagated_error = out.tensor_error;
    }
    return out;
}

struct KappaTracePoint {
    double kappa;
    double h;
    double error;
    bool certified;
};

struct MaxKappaResult {
    double kappa = 0.0;  // largest kappa with a certified h > 1
    double h_at_kappa = 0.0;
    double v = 0.0;
    std::vector<double> poly;
    std::vector<KappaTracePoint> trace;  // in evaluation order
};

struct MaxKappaOptions {
    double kappa_lo = 0.0;  // 0: default bracket for the target
    double kappa_hi = 0.0;
    double tol = 1e-3;
    OptimizeOptions optimize{.final_direct = false};
};

/// Bisection on kappa of the predicate "sup_{v,P} h(kappa) - 1 exceeds
/// kCertificationMargin propagated errors". Default brackets: [2, 4] for h1,
/// [3, 5] for h2; the upper end is extended while the predicate holds.
inline MaxKappaResult max_kappa(Target target, double theta, int r, const MaxKappaOptions& opt = {}) {
    detail::require(opt.tol >= 1e-3, "max_kappa: tol must be >= 1e-3");
    double lo = opt.kappa_lo > 0.0 ? opt.kappa_lo : (target == Target::h1 ? 2.0 : 3.0);
    double hi = opt.kappa_hi > 0.0 ? opt.kappa_hi : lo + 2.0;
    detail::require(hi > lo, "max_kappa: upper bracket must exceed lower bracket");

    MaxKappaResult out;
    const auto start = published_point(target);
    double v_start = start.v;
    std::vector<double> p_start = start.poly;
    auto predicate = [&](double kappa) {
        const auto G = build_moment_tensor(numerator_j(target) + 1, kappa, theta, r, opt.optimize.degree,
                                           opt.optimize.scheme, opt.optimize.cj);
        auto res = optimize_with_tensor(target, G, v_start, p_start, opt.optimize);
        const bool ok = res.tensor_h - 1.0 > kCertificationMargin * res.tensor_error;
        out.trace.push_back({kappa, res.tensor_h, res.tensor_error, ok});
        if (ok) {
            v_start = res.v;
            p_start = res.P.coeffs();
            if (kappa >= out.kappa) {
                out.kappa = kappa;
                out.h_at_kappa = res.tensor_h;
                out.v = res.v;
                out.poly = res.P.coeffs();
            }
        }
        return ok;
    };
    if (!predicate(lo)) throw bracket_error("max_kappa: sup h <= 1 at the lower bracket");
    for (int k = 0; predicate(hi); ++k) {
        if (k == 8) throw bracket_error("max_kappa: sup h > 1 throughout the extended bracket");
        lo = hi;
        hi += 2.0;
    }
    while (hi - lo > opt.tol) {
        const double mid = 0.5 * (lo + hi);
        (predicate(mid) ? lo : hi) = mid;
    }
    return out;
}

}  // namespace zgap
