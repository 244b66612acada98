#pragma once

// Finite-T check of the unsmoothed mean value
//   int_T^{2T} |F(t)|^2 dt ~ c0 A_{r+2} (log y)^{r^2+4r} L^4 T / (2 (r^2-1)! ((r-1)!)^4)
// with F(t) = e^{ivtL} zeta(1/2+it) zeta(1/2+it+i kappa pi/L) M(1/2+it),
// L = log(T/2pi), y = T^theta, so |F|^2 = Z(t)^2 Z(t + kappa pi/L)^2 |M|^2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "zgap/amplifier.hpp"
#include "zgap/errors.hpp"
#include "zgap/integrand.hpp"
#include "zgap/quadrature.hpp"
#include "zgap/zeta.hpp"

namespace zgap {

struct MeanSquareOptions {
    /// Fraction of [T, 2T] integrated, spread over `windows` equal segments
    /// with one centred window each; the mean density is scaled up to T.
    double coverage = 1.0;
    int windows = 64;
    int threads = 1;
    std::uint64_t prime_limit = 1'000'000;  // for A_{r+2}
    Scheme scheme = Scheme::reduced7;       // for c0
    CjOptions cj{.order = 10};
};

struct MeanSquareReport {
    double T = 0.0;
    double L = 0.0;
    double y = 0.0;
    double direct = 0.0;
    double predicted = 0.0;
    double ratio = 0.0;
    double c0 = 0.0;
    double A = 0.0;
    double coverage = 1.0;
    double step = 0.0;
    std::uint64_t points = 0;
};

/// The main term with c0 supplied.
inline double meansquare_main_term(double c0, double A, double T, double theta, int r) {
    const double L = std::log(T / (2.0 * std::numbers::pi));
    const double log_y = theta * std::log(T);
    const double r2 = static_cast<double>(r) * r;
    const double fact_r2m1 = std::tgamma(r2);                    // (r^2 - 1)!
    const double fact_rm1 = std::tgamma(static_cast<double>(r));  // (r - 1)!
    return c0 * A * std::pow(log_y, r2 + 4.0 * r) * std::pow(L, 4) * T /
           (2.0 * fact_r2m1 * std::pow(fact_rm1, 4));
}

/// Simpson quadrature of |F|^2 over [T, 2T] (or sampled windows of it) with
/// step kappa pi / (L k), k = ceil(8 kappa); shifted Z values fall on the
/// same grid and the step is <= pi / (8 L).
inline MeanSquareReport direct_meansquare(double T, const CjParams& params, const AmplifierPolynomial& P,
                                          const MeanSquareOptions& opt = {}) {
    params.validate();
    detail::require(T >= 1e4 && T <= 1e6, "direct_meansquare: T must lie in [1e4, 1e6]");
    detail::require(params.j == 0, "direct_meansquare: only j = 0 is supported");
    detail::require(opt.coverage > 0.0 && opt.coverage <= 1.0, "direct_meansquare: coverage must lie in (0, 1]");
    detail::require(opt.windows >= 1, "direct_meansquare: windows must be >= 1");

    MeanSquareReport out;
    out.T = T;
    out.coverage = opt.coverage;
    out.L = std::log(T / (2.0 * std::numbers::pi));
    out.y = std::pow(T, params.theta);
    const double shift = params.kappa * std::numbers::pi / out.L;
    const int k = std::max(1, static_cast<int>(std::ceil(8.0 * params.kappa)));
    const double h = params.kappa > 0.0 ? shift / k : std::numbers::pi / (8.0 * out.L);
    out.step = h;

    const auto table = sieve_divisor_coeffs(params.r, static_cast<std::uint64_t>(std::floor(out.y)));
    const auto h_max = static_cast<std::uint64_t>(std::floor(out.y));
    std::vector<double> coeff(h_max + 1, 0.0), log_h(h_max + 1, 0.0);
    for (std::uint64_t n = 1; n <= h_max; ++n) {
        log_h[n] = std::log(static_cast<double>(n));
        coeff[n] = static_cast<double>(table[n]) * eval_p_bracket(P, n, out.y) / std::sqrt(static_cast<double>(n));
    }
    auto M2 = [&](double t) {
        double re = 0.0, im = 0.0;
        for (std::uint64_t n = 1; n <= h_max; ++n) {
            if (coeff[n] == 0.0) continue;
            re += coeff[n] * std::cos(t * log_h[n]);
            im -= coeff[n] * std::sin(t * log_h[n]);
        }
        return re * re + im * im;
    };

    const double segment = T / opt.windows;
    const double window = segment * opt.coverage;
    auto intervals = static_cast<std::int64_t>(std::round(window / h));
    intervals += intervals % 2;
    intervals = std::max<std::int64_t>(intervals, 2);
    const int lag = params.kappa > 0.0 ? k : 0;

    std::vector<double> sums(opt.windows, 0.0);
    detail::parallel_for(static_cast<std::size_t>(opt.windows), opt.threads, [&](std::size_t w) {
        const double t0 = T + (static_cast<double>(w) + 0.5) * segment - 0.5 * intervals * h;
        std::vector<double> z(static_cast<std::size_t>(intervals + lag + 1));
        for (std::size_t i = 0; i < z.size(); ++i) z[i] = hardy_Z(t0 + h * static_cast<double>(i));
        double acc = 0.0;
        for (std::int64_t i = 0; i <= intervals; ++i) {
            const double t = t0 + h * static_cast<double>(i);
            const double f = z[i] * z[i] * z[i + lag] * z[i + lag] * M2(t);
            const double wgt = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            acc += wgt * f;
        }
        sums[w] = acc * h / 3.0;
    });
    double total = 0.0;
    for (double s : sums) total += s;
    const double covered = static_cast<double>(opt.windows) * static_cast<double>(intervals) * h;
    out.direct = total * T / covered;
    out.points = static_cast<std::uint64_t>(opt.windows) * static_cast<std::uint64_t>(intervals + lag + 1);

    out.c0 = compute_cj(params, P, opt.scheme, opt.cj).value.real();
    out.A = compute_A_r(params.r + 2, opt.prime_limit);
    out.predicted = meansquare_main_term(out.c0, out.A, T, params.theta, params.r);
    out.ratio = out.predicted != 0.0 ? out.direct / out.predicted : 0.0;
    return out;
}

}  // namespace zgap
