#pragma once

// zeta(1/2 + it), the Riemann-Siegel theta function and Hardy's Z(t).
//
// Two routes: Euler-Maclaurin summation (any t, cost O(t)) and the
// Riemann-Siegel formula with up to five correction terms C_0..C_4 (cost
// O(sqrt t)). zeta_half and hardy_Z switch from the first to the second at
// t = 50.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "zgap/errors.hpp"

namespace zgap {

inline constexpr double kRiemannSiegelSwitch = 50.0;

namespace detail {

// B_2, B_4, ..., B_50
inline constexpr std::array<double, 25> kBernoulliEven{
    0.16666666666666666,   -0.033333333333333333, 0.023809523809523808,  -0.033333333333333333,
    0.07575757575757576,   -0.2531135531135531,   1.1666666666666667,    -7.0921568627450977,
    54.971177944862156,    -529.12424242424242,   6192.123188405797,     -86580.253113553117,
    1425517.1666666667,    -27298231.067816094,   601580873.9006424,     -15116315767.092157,
    429614643061.16669,    -13711655205088.332,   488332318973593.19,    -19296579341940068.0,
    8.4169304757368256e+17, -4.0338071854059454e+19, 2.1150748638081993e+21, -1.2086626522296526e+23,
    7.5008667460769642e+24};

}  // namespace detail

/// log Gamma(z) for Re z > 0 on the branch continuous from the positive real
/// axis. Shifts z up to |z| >= 15 and applies Stirling's series through B_20.
inline std::complex<double> log_gamma(std::complex<double> z) {
    detail::require(z.real() > 0.0, "log_gamma: requires Re z > 0");
    std::complex<double> shift{0.0, 0.0};
    while (std::abs(z) < 15.0) {
        shift += std::log(z);
        z += 1.0;
    }
    const std::complex<double> inv = 1.0 / z;
    const std::complex<double> inv2 = inv * inv;
    std::complex<double> series{0.0, 0.0};
    std::complex<double> power = inv;
    for (int k = 1; k <= 10; ++k) {
        series += detail::kBernoulliEven[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * power;
        power *= inv2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + series - shift;
}

/// theta(t) = Im log Gamma(1/4 + it/2) - (log pi) t / 2.
inline double rs_theta(double t) {
    detail::require(t >= 0.0, "rs_theta: t must be >= 0");
    return log_gamma({0.25, 0.5 * t}).imag() - 0.5 * std::log(std::numbers::pi) * t;
}

/// zeta(s) for Re s > 0 by Euler-Maclaurin with N = 20 + ceil(|Im s|/2) and
/// 15 correction terms.
inline std::complex<double> zeta_em(std::complex<double> s) {
    detail::require(s.real() > 0.0, "zeta_em: requires Re s > 0");
    detail::require(std::abs(s - 1.0) > 1e-12, "zeta_em: pole at s = 1");
    const auto N = static_cast<std::int64_t>(20 + std::ceil(std::abs(s.imag()) / 2.0));
    std::complex<double> sum{0.0, 0.0};
    for (std::int64_t n = 1; n < N; ++n) sum += std::exp(-s * std::log(static_cast<double>(n)));
    const double logN = std::log(static_cast<double>(N));
    const std::complex<double> N_minus_s = std::exp(-s * logN);
    sum += static_cast<double>(N) * N_minus_s / (s - 1.0) + 0.5 * N_minus_s;
    // sum_k B_2k/(2k)! s(s+1)...(s+2k-2) N^{-s-2k+1}
    std::complex<double> rising = s;            // s(s+1)...(s+2k-2)
    std::complex<double> power = N_minus_s / static_cast<double>(N);  // N^{-s-2k+1}
    double factorial = 2.0;                     // (2k)!
    for (int k = 1; k <= 15; ++k) {
        sum += detail::kBernoulliEven[k - 1] / factorial * rising * power;
        rising *= (s + (2.0 * k - 1.0)) * (s + 2.0 * k);
        power /= static_cast<double>(N) * static_cast<double>(N);
        factorial *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
    }
    return sum;
}

namespace detail {

// Power-series coefficients, in q = p - 1/2, of the Riemann-Siegel
// correction functions C_0..C_4, each a combination of derivatives of
//   Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p).
// Psi is entire; its Taylor coefficients about p = 1/2 come from a discrete
// Cauchy integral on the circle |p - 1/2| = 1.
class RiemannSiegelCorrections {
public:
    static constexpr int kTerms = 5;
    static constexpr int kSeries = 64;

    static const RiemannSiegelCorrections& instance() {
        static const RiemannSiegelCorrections table;
        return table;
    }

    /// C_k(p) for k < terms, p in [0, 1).
    std::array<double, kTerms> evaluate(double p) const {
        const double q = p - 0.5;
        std::array<double, kTerms> out{};
        for (int k = 0; k < kTerms; ++k) {
            double acc = 0.0;
            for (int i = kSeries - 1; i >= 0; --i) acc = acc * q + poly_[k][i];
            out[k] = acc;
        }
        return out;
    }

private:
    RiemannSiegelCorrections() {
        constexpr double pi = std::numbers::pi;
        constexpr int samples = 256;
        constexpr int taylor_len = kSeries + 13;
        std::vector<std::complex<double>> values(samples);
        for (int n = 0; n < samples; ++n) {
            const std::complex<double> p =
                0.5 + std::polar(1.0, 2.0 * pi * (n + 0.5) / samples);
            values[n] = std::cos(2.0 * pi * (p * p - p - 1.0 / 16.0)) / std::cos(2.0 * pi * p);
        }
        std::vector<double> taylor(taylor_len, 0.0);  // Psi(1/2 + q) = sum taylor[n] q^n
        for (int m = 0; m < taylor_len; ++m) {
            std::complex<double> acc{0.0, 0.0};
            for (int n = 0; n < samples; ++n)
                acc += values[n] * std::polar(1.0, -2.0 * pi * m * (n + 0.5) / samples);
            taylor[m] = acc.real() / samples;
        }
        // derivative(d)[i]: coefficient of q^i in Psi^{(d)}
        auto derivative = [&](int d, int i) {
            double c = taylor[i + d];
            for (int k = 1; k <= d; ++k) c *= static_cast<double>(i + k);
            return c;
        };
        const double pi2 = pi * pi, pi4 = pi2 * pi2, pi6 = pi4 * pi2, pi8 = pi4 * pi4;
        // C_k = sum coeff * Psi^{(order)}
        struct Term {
            int order;
            double coeff;
        };
        const std::array<std::vector<Term>, kTerms> recipe{
            std::vector<Term>{{0, 1.0}},
            std::vector<Term>{{3, -1.0 / (96.0 * pi2)}},
            std::vector<Term>{{2, 1.0 / (64.0 * pi2)}, {6, 1.0 / (18432.0 * pi4)}},
            std::vector<Term>{{1, -1.0 / (64.0 * pi2)},
                              {5, -1.0 / (3840.0 * pi4)},
                              {9, -1.0 / (5308416.0 * pi6)}},
            std::vector<Term>{{0, 1.0 / (128.0 * pi2)},
                              {4, 19.0 / (24576.0 * pi4)},
                              {8, 11.0 / (5898240.0 * pi6)},
                              {12, 1.0 / (2038431744.0 * pi8)}}};
        for (int k = 0; k < kTerms; ++k) {
            for (int i = 0; i < kSeries; ++i) {
                double c = 0.0;
                for (const auto& term : recipe[k]) c += term.coeff * derivative(term.order, i);
                poly_[k][i] = c;
            }
        }
    }

    std::array<std::array<double, kSeries>, kTerms> poly_{};
};

// log n and n^{-1/2} for the Riemann-Siegel main sum.
class MainSumTable {
public:
    static const MainSumTable& instance() {
        static const MainSumTable table;
        return table;
    }
    static constexpr std::size_t kSize = 8192;  // covers t up to about 4e8

    std::array<double, kSize + 1> log_n{};
    std::array<double, kSize + 1> inv_sqrt_n{};

private:
    MainSumTable() {
        for (std::size_t n = 1; n <= kSize; ++n) {
            log_n[n] = std::log(static_cast<double>(n));
            inv_sqrt_n[n] = 1.0 / std::sqrt(static_cast<double>(n));
        }
    }
};

}  // namespace detail

/// Z(t) by the Riemann-Siegel formula with `terms` correction terms
/// (1 <= terms <= 5). Intended for t >= 2 pi; accuracy ~1e-9 by t = 40 with
/// all five terms.
inline double hardy_Z_rs(double t, int terms = 5) {
    detail::require(t >= 2.0 * std::numbers::pi, "hardy_Z_rs: t must be >= 2 pi");
    detail::require(terms >= 1 && terms <= detail::RiemannSiegelCorrections::kTerms,
                    "hardy_Z_rs: terms must lie in [1, 5]");
    const double tau = std::sqrt(t / (2.0 * std::numbers::pi));
    const auto N = static_cast<std::size_t>(std::floor(tau));
    const double p = tau - static_cast<double>(N);
    const double theta = rs_theta(t);

    const auto& table = detail::MainSumTable::instance();
    double main = 0.0;
    for (std::size_t n = 1; n <= N; ++n) {
        if (n <= detail::MainSumTable::kSize) {
            main += table.inv_sqrt_n[n] * std::cos(theta - t * table.log_n[n]);
        } else {
            const double dn = static_cast<double>(n);
            main += std::cos(theta - t * std::log(dn)) / std::sqrt(dn);
        }
    }
    main *= 2.0;

    const auto C = detail::RiemannSiegelCorrections::instance().evaluate(p);
    const double inv_tau = 1.0 / tau;  // (t/2pi)^{-1/2}
    double corr = 0.0;
    double scale = 1.0;
    for (int k = 0; k < terms; ++k) {
        corr += C[k] * scale;
        scale *= inv_tau;
    }
    const double sign = (N % 2 == 1) ? 1.0 : -1.0;  // (-1)^{N-1}
    return main + sign * corr / std::sqrt(tau);
}

/// zeta(1/2 + it): Euler-Maclaurin for t <= 50, Riemann-Siegel above.
inline std::complex<double> zeta_half(double t) {
    detail::require(t >= 0.0, "zeta_half: t must be >= 0");
    if (t <= kRiemannSiegelSwitch) return zeta_em({0.5, t});
    return hardy_Z_rs(t) * std::polar(1.0, -rs_theta(t));
}

/// Z(t) = e^{i theta(t)} zeta(1/2 + it), real for real t.
inline double hardy_Z(double t) {
    detail::require(t >= 0.0, "hardy_Z: t must be >= 0");
    if (t <= kRiemannSiegelSwitch) return (std::polar(1.0, rs_theta(t)) * zeta_em({0.5, t})).real();
    return hardy_Z_rs(t);
}

/// Im(e^{i theta(t)} zeta(1/2 + it)) with zeta from Euler-Maclaurin; zero in
/// exact arithmetic, so it measures the numerical error of theta and zeta.
inline double hardy_Z_im_residual(double t) {
    detail::require(t >= 0.0, "hardy_Z_im_residual: t must be >= 0");
    return (std::polar(1.0, rs_theta(t)) * zeta_em({0.5, t})).imag();
}

}  // namespace zgap
