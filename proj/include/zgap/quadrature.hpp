#pragma once

// Deterministic and Monte Carlo integration over boxes cut by linear
// constraints with nonnegative coefficients, e.g. the region
//
//     { z in [0,1]^D : sum_k a_ck z_k <= b_c for every constraint c }.
//
// Both engines split their work into a fixed partition (outermost nodes for
// the nested rule, fixed-size sample blocks for Monte Carlo) and reduce the
// partial sums in partition order, so results are bit-identical for any
// thread count.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <thread>
#include <type_traits>
#include <vector>

#include "zgap/errors.hpp"

namespace zgap {

/// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    int order = 0;
};

inline constexpr int kMaxGaussOrder = 64;

/// Gauss-Legendre nodes and weights, ascending. Newton iteration on P_n from
/// the Tricomi initial guess with a fixed count of 10 steps.
inline QuadratureRule gl_nodes(int n) {
    detail::require(n >= 1 && n <= kMaxGaussOrder, "gl_nodes: order must be in [1, 64]");
    QuadratureRule rule;
    rule.order = n;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // i-th largest root
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 10; ++iter) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            z -= p1 / dp;
        }
        {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[n - 1 - i] = z;
        rule.weights[n - 1 - i] = w;
        rule.nodes[i] = -z;
        rule.weights[i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

/// sum_k coeffs[k] * z[k] <= bound, with coeffs >= 0 and bound > 0.
template <std::size_t D>
struct LinearConstraint {
    std::array<double, D> coeffs{};
    double bound = 1.0;
};

template <std::size_t D>
struct RegionSpec {
    std::vector<LinearConstraint<D>> constraints;

    static constexpr std::size_t dimension = D;

    void validate() const {
        for (const auto& c : constraints) {
            detail::require(c.bound > 0.0 && std::isfinite(c.bound),
                            "RegionSpec: constraint bound must be positive (zero-volume region)");
            for (double a : c.coeffs)
                detail::require(a >= 0.0 && std::isfinite(a),
                                "RegionSpec: constraint coefficients must be finite and nonnegative");
        }
    }

    bool contains(const std::array<double, D>& z) const {
        for (const auto& c : constraints) {
            double s = 0.0;
            for (std::size_t k = 0; k < D; ++k) s += c.coeffs[k] * z[k];
            if (s > c.bound) return false;
        }
        return true;
    }
};

/// The unit box with no constraints.
template <std::size_t D>
RegionSpec<D> unit_box() {
    return {};
}

/// Region of the c_j integrals: [0,1]^D with x+x1+x2 <= 1 and x+x3+x4 <= 1
/// on the first five coordinates (x, x1, x2, x3, x4).
template <std::size_t D>
RegionSpec<D> twin_simplex_region() {
    static_assert(D >= 5);
    RegionSpec<D> region;
    LinearConstraint<D> first, second;
    first.coeffs[0] = first.coeffs[1] = first.coeffs[2] = 1.0;
    second.coeffs[0] = second.coeffs[3] = second.coeffs[4] = 1.0;
    region.constraints = {first, second};
    return region;
}

/// Result of an integration. `error_estimate` is the order-comparison delta
/// for nested rules and the sample standard error for Monte Carlo.
template <class T>
struct Estimate {
    T value{};
    double error_estimate = 0.0;
    std::uint64_t evaluations = 0;
};

// Accumulation helpers so engines can sum scalars, complex numbers or fixed
// arrays of them.
namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
template <class T, std::size_t N>
double magnitude(const std::array<T, N>& v) {
    double m = 0.0;
    for (const auto& e : v) m = std::max(m, magnitude(e));
    return m;
}

template <class T>
void add_scaled(T& acc, const T& v, double w) {
    acc += w * v;
}
template <class T, std::size_t N>
void add_scaled(std::array<T, N>& acc, const std::array<T, N>& v, double w) {
    for (std::size_t i = 0; i < N; ++i) add_scaled(acc[i], v[i], w);
}

template <class T>
T difference(const T& a, const T& b) {
    return a - b;
}
template <class T, std::size_t N>
std::array<T, N> difference(const std::array<T, N>& a, const std::array<T, N>& b) {
    std::array<T, N> d;
    for (std::size_t i = 0; i < N; ++i) d[i] = difference(a[i], b[i]);
    return d;
}

inline int effective_threads(int threads) {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
// handled by exactly one worker; callers write into per-index slots.
template <class Body>
void parallel_for(std::size_t count, int threads, Body&& body) {
    const std::size_t workers =
        std::min<std::size_t>(count, static_cast<std::size_t>(effective_threads(threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

// Walks a tensor-product Gauss-Legendre rule over the region, with the
// upper limit of each coordinate set by the constraints it takes part in.
// Coordinates are integrated in index order (z[0] outermost).
template <std::size_t D, class Acc, class F>
class NestedWalker {
public:
    NestedWalker(const RegionSpec<D>& region, const std::array<int, D>& orders, F& f)
        : region_(region), f_(f) {
        for (std::size_t k = 0; k < D; ++k) {
            const auto rule = gl_nodes(orders[k]);
            nodes_[k].resize(rule.order);
            weights_[k].resize(rule.order);
            for (int i = 0; i < rule.order; ++i) {
                nodes_[k][i] = 0.5 * (rule.nodes[i] + 1.0);
                weights_[k][i] = 0.5 * rule.weights[i];
            }
        }
    }

    std::size_t outer_count() const { return nodes_[0].size(); }

    std::uint64_t points() const {
        std::uint64_t p = 1;
        for (const auto& n : nodes_) p *= n.size();
        return p;
    }

    // Contribution of the i-th outermost node.
    Acc outer_slot(std::size_t i) const {
        Acc acc{};
        std::array<double, D> z{};
        std::vector<double> partial(region_.constraints.size(), 0.0);
        const double upper = upper_limit(0, partial);
        if (upper <= 0.0) return acc;
        z[0] = upper * nodes_[0][i];
        advance(0, z[0], partial, +1.0);
        walk(1, z, upper * weights_[0][i], partial, acc);
        return acc;
    }

private:
    double upper_limit(std::size_t k, const std::vector<double>& partial) const {
        double u = 1.0;
        for (std::size_t c = 0; c < region_.constraints.size(); ++c) {
            const double a = region_.constraints[c].coeffs[k];
            if (a > 0.0) u = std::min(u, (region_.constraints[c].bound - partial[c]) / a);
        }
        return u;
    }

    void advance(std::size_t k, double zk, std::vector<double>& partial, double sign) const {
        for (std::size_t c = 0; c < region_.constraints.size(); ++c)
            partial[c] += sign * region_.constraints[c].coeffs[k] * zk;
    }

    void walk(std::size_t k, std::array<double, D>& z, double weight, std::vector<double>& partial,
              Acc& acc) const {
        if (k == D) {
            f_(static_cast<const std::array<double, D>&>(z), weight, acc);
            return;
        }
        const double upper = upper_limit(k, partial);
        if (upper <= 0.0) return;
        const auto& nk = nodes_[k];
        const auto& wk = weights_[k];
        for (std::size_t i = 0; i < nk.size(); ++i) {
            z[k] = upper * nk[i];
            advance(k, z[k], partial, +1.0);
            walk(k + 1, z, weight * upper * wk[i], partial, acc);
            advance(k, z[k], partial, -1.0);
        }
    }

    const RegionSpec<D>& region_;
    F& f_;
    std::array<std::vector<double>, D> nodes_;
    std::array<std::vector<double>, D> weights_;
};

template <std::size_t D, class Acc, class F>
Acc nested_pass(F& f, const RegionSpec<D>& region, const std::array<int, D>& orders, int threads,
                std::uint64_t& evaluations) {
    NestedWalker<D, Acc, F> walker(region, orders, f);
    std::vector<Acc> slots(walker.outer_count());
    parallel_for(slots.size(), threads, [&](std::size_t i) { slots[i] = walker.outer_slot(i); });
    Acc total{};
    for (const auto& s : slots) add_scaled(total, s, 1.0);
    evaluations += walker.points();
    return total;
}

}  // namespace detail

/// Iterated Gauss-Legendre with accumulate-style integrand
/// f(point, weight, acc), which must add weight * value into acc. Useful when
/// the integrand yields many values per point (moment tensors, stencils).
///
/// The error estimate is |Q(orders) - Q(orders - 2)| from a second, cheaper
/// pass (orders below 3 are clamped to 1).
template <class Acc, std::size_t D, class F>
Estimate<Acc> integrate_nested_accumulate(F&& f, const RegionSpec<D>& region,
                                          const std::array<int, D>& orders, int threads = 1,
                                          bool with_error_pass = true) {
    region.validate();
    for (int o : orders)
        detail::require(o >= 1 && o <= kMaxGaussOrder, "integrate_nested: orders must be in [1, 64]");
    Estimate<Acc> out;
    out.value = detail::nested_pass<D, Acc>(f, region, orders, threads, out.evaluations);
    if (with_error_pass) {
        std::array<int, D> lower;
        for (std::size_t k = 0; k < D; ++k) lower[k] = std::max(1, orders[k] - 2);
        const Acc coarse = detail::nested_pass<D, Acc>(f, region, lower, threads, out.evaluations);
        out.error_estimate = detail::magnitude(detail::difference(out.value, coarse));
    }
    return out;
}

/// Iterated Gauss-Legendre for a value-returning integrand f(point).
template <std::size_t D, class F>
auto integrate_nested(F&& f, const RegionSpec<D>& region, const std::array<int, D>& orders,
                      int threads = 1, bool with_error_pass = true) {
    using Value = std::decay_t<decltype(f(std::declval<const std::array<double, D>&>()))>;
    auto acc_form = [&f](const std::array<double, D>& z, double w, Value& acc) {
        detail::add_scaled(acc, f(z), w);
    };
    return integrate_nested_accumulate<Value>(acc_form, region, orders, threads, with_error_pass);
}

// ---------------------------------------------------------------------------
// Monte Carlo

/// Counter-based generator: the splitmix64 finalizer applied to
/// key + counter * golden_gamma. A stream is fully determined by its key,
/// and keys for sub-streams are derived from (seed, block index).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t stream_key(std::uint64_t seed, std::uint64_t block) {
        return mix(mix(seed) ^ (block * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
    }

    std::uint64_t next() {
        ++counter_;
        return mix(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

inline constexpr std::uint64_t kMonteCarloBlock = 1u << 16;
inline constexpr std::uint64_t kMinMonteCarloSamples = 1000;

namespace detail {

// Running mean/variance of the real and imaginary parts (Welford, merged with
// Chan's formula so block partials combine exactly in a fixed order).
struct ComplexMoments {
    std::uint64_t n = 0;
    double mean_re = 0.0, mean_im = 0.0;
    double m2_re = 0.0, m2_im = 0.0;

    void push(std::complex<double> v) {
        ++n;
        const double dre = v.real() - mean_re;
        const double dim = v.imag() - mean_im;
        mean_re += dre / static_cast<double>(n);
        mean_im += dim / static_cast<double>(n);
        m2_re += dre * (v.real() - mean_re);
        m2_im += dim * (v.imag() - mean_im);
    }

    void merge(const ComplexMoments& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double total = static_cast<double>(n + o.n);
        const double dre = o.mean_re - mean_re;
        const double dim = o.mean_im - mean_im;
        const double frac = static_cast<double>(o.n) / total;
        mean_re += dre * frac;
        mean_im += dim * frac;
        const double cross = static_cast<double>(n) * static_cast<double>(o.n) / total;
        m2_re += o.m2_re + dre * dre * cross;
        m2_im += o.m2_im + dim * dim * cross;
        n += o.n;
    }
};

}  // namespace detail

/// Uniform rejection sampling over the unit box. Points outside the region
/// contribute zero. Samples are drawn in blocks of kMonteCarloBlock, each
/// from its own stream keyed by (seed, block index).
template <std::size_t D, class F>
Estimate<std::complex<double>> mc_integrate(F&& f, const RegionSpec<D>& region, std::uint64_t samples,
                                            std::uint64_t seed, int threads = 1) {
    region.validate();
    detail::require(samples >= kMinMonteCarloSamples, "mc_integrate: need at least 1000 samples");
    const std::uint64_t blocks = (samples + kMonteCarloBlock - 1) / kMonteCarloBlock;
    std::vector<detail::ComplexMoments> partial(blocks);
    detail::parallel_for(blocks, threads, [&](std::size_t b) {
        CounterRng rng(CounterRng::stream_key(seed, b));
        const std::uint64_t begin = b * kMonteCarloBlock;
        const std::uint64_t end = std::min(samples, begin + kMonteCarloBlock);
        detail::ComplexMoments m;
        std::array<double, D> z;
        for (std::uint64_t s = begin; s < end; ++s) {
            for (auto& c : z) c = rng.uniform();
            if (region.contains(z))
                m.push(std::complex<double>(f(static_cast<const std::array<double, D>&>(z))));
            else
                m.push({0.0, 0.0});
        }
        partial[b] = m;
    });
    detail::ComplexMoments total;
    for (const auto& m : partial) total.merge(m);
    const double n = static_cast<double>(total.n);
    Estimate<std::complex<double>> out;
    out.value = {total.mean_re, total.mean_im};  // unit box volume
    out.error_estimate = std::sqrt((total.m2_re + total.m2_im) / (n - 1.0) / n);
    out.evaluations = total.n;
    return out;
}

}  // namespace zgap
