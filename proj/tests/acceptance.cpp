// Acceptance run: one PASS/FAIL line per criterion. Criteria 1-8 are gates
// and set the exit code; criterion 9 is exploratory and reported only.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "zgap/zgap.hpp"

using namespace zgap;

namespace {

namespace tol {
constexpr double kH1Bound = 1.0002;
constexpr double kH1Error = 5e-5;
constexpr double kH2Bound = 1.0048;
constexpr double kH2Error = 5e-4;
constexpr double kKappaH1 = 3.18;
constexpr double kKappaH2 = 4.05;
constexpr double kTriangulationSigmas = 3.0;
constexpr double kImRelative = 1e-8;
constexpr std::uint64_t kMcSamples = 100'000'000;
constexpr double kFdRelative = 1e-3;
constexpr double kFdRatioLo = 3.0;  // discrepancy ratio on step halving, second order -> 4
constexpr double kFdRatioHi = 5.0;
constexpr double kWirtingerEquality = 1e-10;
constexpr int kWirtingerCount = 1000;
constexpr double kA1 = 1e-12;
constexpr double kA2 = 1e-8;
constexpr double kSummationBound = 2.0;      // normalized residual ceiling
constexpr double kSummationSpread = 0.1;     // max - min across the three heights
constexpr double kFirstZero = 14.1347251;
constexpr double kFirstZeroTol = 1e-6;
constexpr double kDualMethod = 1e-6;
constexpr double kGapLo = 0.95;
constexpr double kGapHi = 1.05;
constexpr double kCountBound = 5.0;
constexpr double kRatioLo = 0.5;
constexpr double kRatioHi = 2.0;
}  // namespace tol

const AmplifierPolynomial kP1({1.0, -5.8, 6.4});
const AmplifierPolynomial kP2({1.0, -5.2, 5.5});

class Clock {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int gate_failures = 0;

void report(int id, bool pass, const std::string& detail, double secs, bool gate = true) {
    std::printf("%s %d %s [%.1fs]%s\n", pass ? "PASS" : "FAIL", id, detail.c_str(), secs,
                gate ? "" : " (exploratory, not a gate)");
    std::fflush(stdout);
    if (gate && !pass) ++gate_failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[1024];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

bool real_part_dominates(const IntegralEstimate& e) {
    return std::abs(e.value.imag()) <= std::max(tol::kImRelative * std::abs(e.value.real()), 3.0 * e.error_estimate) &&
           e.value.real() >= -3.0 * e.error_estimate;
}

void headline(int id, Target target, double kappa, double v, const AmplifierPolynomial& P, double bound,
              double max_error) {
    Clock clock;
    const auto r = ratio(target, v, kappa, 0.25, 1, P, Scheme::reduced7, CjOptions{});
    const bool pass = r.h > bound && r.propagated_error < max_error && r.h - r.propagated_error > bound;
    report(id, pass,
           fmt("%s(v=%.2f, kappa=%.2f) = %.10f, propagated error %.2e (need h > %.4f, error < %.0e)",
               std::string(to_string(target)).c_str(), v, kappa, r.h, r.propagated_error, bound, max_error),
           clock.seconds());
}

void criterion3() {
    Clock clock;
    const auto k1 = max_kappa(Target::h1, 0.25, 1);
    const auto k2 = max_kappa(Target::h2, 0.25, 1);
    const auto o1 = optimize_params(Target::h1, tol::kKappaH1, 0.25, 1);
    const auto o2 = optimize_params(Target::h2, tol::kKappaH2, 0.25, 1);
    const bool pass = k1.kappa >= tol::kKappaH1 && k2.kappa >= tol::kKappaH2 && o1.result.h >= tol::kH1Bound &&
                      o2.result.h >= tol::kH2Bound && o1.result.certified() && o2.result.certified();
    report(3, pass,
           fmt("max_kappa h1 = %.4f (need >= %.2f), h2 = %.4f (need >= %.2f); optimized h1(%.2f) = %.7f at v=%.4f, "
               "h2(%.2f) = %.7f at v=%.4f (need >= %.4f, %.4f)",
               k1.kappa, tol::kKappaH1, k2.kappa, tol::kKappaH2, tol::kKappaH1, o1.result.h, o1.v, tol::kKappaH2,
               o2.result.h, o2.v, tol::kH1Bound, tol::kH2Bound),
           clock.seconds());
}

void criterion4() {
    Clock clock;
    struct Set {
        double kappa, v;
        const AmplifierPolynomial* P;
        int j;
    };
    const Set sets[] = {{3.18, 1.26, &kP1, 0}, {3.18, 1.26, &kP1, 1}, {4.05, 1.25, &kP2, 1},
                        {4.05, 1.25, &kP2, 2}, {2.0, 0.8, &kP1, 1}};
    CjOptions o9;
    o9.order = 6;
    o9.t_order = 12;
    CjOptions o7;
    CjOptions mc;
    mc.samples = tol::kMcSamples;
    double worst = 0.0;
    bool reality = true;
    for (const auto& s : sets) {
        const CjParams p{0.25, 1, s.kappa, s.v, s.j};
        const auto d9 = compute_cj(p, *s.P, Scheme::direct9, o9);
        const auto r7 = compute_cj(p, *s.P, Scheme::reduced7, o7);
        const auto m9 = compute_cj(p, *s.P, Scheme::mc9, mc);
        auto z = [](const IntegralEstimate& a, const IntegralEstimate& b) {
            return std::abs(a.value.real() - b.value.real()) / std::hypot(a.error_estimate, b.error_estimate);
        };
        const double w = std::max({z(d9, r7), z(d9, m9), z(r7, m9)});
        std::printf("  set kappa=%.2f v=%.2f j=%d: direct9 %.10e (+-%.1e) reduced7 %.10e (+-%.1e) mc9 %.10e (+-%.1e) "
                    "worst z %.2f\n",
                    s.kappa, s.v, s.j, d9.value.real(), d9.error_estimate, r7.value.real(), r7.error_estimate,
                    m9.value.real(), m9.error_estimate, w);
        worst = std::max(worst, w);
        reality = reality && real_part_dominates(d9) && real_part_dominates(r7) && real_part_dominates(m9);
    }
    report(4, worst <= tol::kTriangulationSigmas && reality,
           fmt("5 parameter sets, worst pairwise deviation %.2f combined sigmas (need <= %.0f); reality bounds %s",
               worst, tol::kTriangulationSigmas, reality ? "hold" : "violated"),
           clock.seconds());
}

void criterion5() {
    Clock clock;
    CjOptions opt;
    opt.order = 6;
    opt.t_order = 10;
    opt.error_pass = false;
    bool pass = true;
    std::string detail;
    for (int j = 1; j <= 2; ++j) {
        const CjParams p{0.25, 1, 3.18, 1.26, j};
        const double direct = compute_cj(p, kP1, Scheme::direct9, opt).value.real();
        const double coarse = cj_via_differentiation(p, kP1, 1e-2, opt).value.real();
        const double fine = cj_via_differentiation(p, kP1, 5e-3, opt).value.real();
        const double rel_coarse = std::abs(coarse - direct) / std::abs(direct);
        const double rel_fine = std::abs(fine - direct) / std::abs(direct);
        const double order_ratio = (coarse - direct) / (fine - direct);
        pass = pass && rel_coarse <= tol::kFdRelative && rel_fine <= tol::kFdRelative &&
               order_ratio >= tol::kFdRatioLo && order_ratio <= tol::kFdRatioHi;
        detail += fmt("c%d: rel diff %.1e (step 1e-2), %.1e (step 5e-3), halving ratio %.2f; ", j, rel_coarse,
                      rel_fine, order_ratio);
    }
    report(5, pass,
           detail + fmt("need rel <= %.0e and ratio in [%.0f, %.0f]", tol::kFdRelative, tol::kFdRatioLo,
                        tol::kFdRatioHi),
           clock.seconds());
}

void criterion6() {
    Clock clock;
    const auto rep = run_wirtinger_suite(tol::kWirtingerCount, 1);
    report(6, rep.passed(tol::kWirtingerEquality),
           fmt("extremal ratios %.15f, %.15f; random (i) %d/%d, (ii) %d/%d, worst ratios %.6f, %.6f",
               rep.extremal_i_ratio, rep.extremal_ii_ratio, rep.random_i_passed, rep.random_i_total,
               rep.random_ii_passed, rep.random_ii_total, rep.worst_ratio_i, rep.worst_ratio_ii),
           clock.seconds());
}

void criterion7() {
    Clock clock;
    const double a1 = compute_A_r(1, 1'000'000);
    const double a2 = compute_A_r(2, 10'000'000);
    const double a2_exact = 6.0 / (std::numbers::pi * std::numbers::pi);
    const auto table = sieve_divisor_coeffs(2, 1'000'000);
    std::vector<double> res;
    for (double y : {1e4, 1e5, 1e6}) res.push_back(verify_lemma42(table, 0.0, y, {0.0, 1.0}).normalized_residual);
    const double hi = *std::max_element(res.begin(), res.end());
    const double lo = *std::min_element(res.begin(), res.end());
    const bool pass = std::abs(a1 - 1.0) <= tol::kA1 && std::abs(a2 - a2_exact) <= tol::kA2 && hi <= tol::kSummationBound &&
                      hi - lo <= tol::kSummationSpread;
    report(7, pass,
           fmt("|A_1 - 1| = %.1e, |A_2 - 6/pi^2| = %.1e; normalized residuals %.4f, %.4f, %.4f at y = 1e4, 1e5, 1e6",
               std::abs(a1 - 1.0), std::abs(a2 - a2_exact), res[0], res[1], res[2]),
           clock.seconds());
}

void criterion8() {
    Clock clock;
    const auto low = find_zeros(0.0, 20.0);
    const double first = low.ordinates.empty() ? 0.0 : low.ordinates.front();
    double dual = 0.0;
    for (double t = 40.0; t <= 60.0; t += 0.01) {
        const auto em = zeta_em({0.5, t});
        const auto rs = hardy_Z_rs(t) * std::polar(1.0, -rs_theta(t));
        dual = std::max(dual, std::abs(em - rs));
    }
    const auto zeros = find_zeros(0.0, 1e5);
    const auto stats = gap_stats(ordinates_between(zeros, 1e3, 1e5));
    double worst_count = 0.0, worst_T = 0.0;
    for (double T = 15.0; T <= 1e5; T += 25.0) {
        const double d = std::abs(count_check(zeros, T).discrepancy);
        if (d > worst_count) {
            worst_count = d;
            worst_T = T;
        }
    }
    const double secs = clock.seconds();
    const bool pass = std::abs(first - tol::kFirstZero) <= tol::kFirstZeroTol && dual <= tol::kDualMethod &&
                      stats.mean >= tol::kGapLo && stats.mean <= tol::kGapHi && worst_count <= tol::kCountBound &&
                      secs <= 1800.0;
    report(8, pass,
           fmt("first zero %.10f; dual-method max diff %.1e on [40,60]; mean normalized gap %.6f over %zu gaps in "
               "[1e3,1e5]; max count discrepancy %.3f at T=%.0f (%zu zeros below 1e5, %zu anomalies)",
               first, dual, stats.mean, stats.normalized_gaps.size(), worst_count, worst_T, zeros.ordinates.size(),
               zeros.anomalies.size()),
           secs);
}

void criterion9() {
    Clock clock;
    const CjParams p{0.25, 1, 3.18, 1.26, 0};
    MeanSquareOptions full;
    MeanSquareOptions sampled;
    sampled.coverage = 0.05;
    sampled.windows = 200;
    const auto r4 = direct_meansquare(1e4, p, kP1, full);
    const auto r5 = direct_meansquare(1e5, p, kP1, full);
    const auto r6 = direct_meansquare(1e6, p, kP1, sampled);
    const bool window = r5.ratio >= tol::kRatioLo && r5.ratio <= tol::kRatioHi;
    const bool trend = std::abs(std::log(r6.ratio)) < std::abs(std::log(r4.ratio));
    report(9, window && trend,
           fmt("direct/predicted = %.1f (T=1e4), %.1f (T=1e5), %.1f (T=1e6, 5%% sampled); window [%.1f, %.0f] at "
               "1e5: %s; trend toward 1: %s",
               r4.ratio, r5.ratio, r6.ratio, tol::kRatioLo, tol::kRatioHi, window ? "yes" : "no",
               trend ? "yes" : "no"),
           clock.seconds(), false);
}

}  // namespace

int main() {
    Clock total;
    headline(1, Target::h1, 3.18, 1.26, kP1, tol::kH1Bound, tol::kH1Error);
    headline(2, Target::h2, 4.05, 1.25, kP2, tol::kH2Bound, tol::kH2Error);
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    std::printf("%s: %d gate failure(s), %.0fs total\n", gate_failures == 0 ? "ACCEPTED" : "REJECTED", gate_failures,
                total.seconds());
    return gate_failures == 0 ? 0 : 1;
}
