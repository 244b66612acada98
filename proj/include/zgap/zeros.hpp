#pragma once

// Zeros of Z(t) on the critical line, normalized gap statistics, the zero
// count against T log(T/2pi)/2pi - T/2pi + 7/8, and the on-disk formats:
//
//   zero cache: "ZGZ1", u32 LE version (= 1), u64 LE count,
//               then count IEEE-754 f64 LE ordinates, ascending.
//   gap CSV:    header `n,gamma,gap,normalized_gap`.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "zgap/errors.hpp"
#include "zgap/quadrature.hpp"
#include "zgap/zeta.hpp"

namespace zgap {

struct ZeroOrdinates {
    std::vector<double> ordinates;  // strictly increasing
    double t_min = 0.0;
    double t_max = 0.0;
    std::string method;  // euler_maclaurin | riemann_siegel
    double tolerance = 0.0;
    /// Sign-change pairs closer than 2 * tolerance: reported, never merged
    /// into a multiplicity claim.
    std::vector<double> anomalies;
};

struct ZeroSearchOptions {
    double tolerance = 1e-9;
    int threads = 1;
};

namespace detail {

inline double bisect_zero(double lo, double hi, double z_lo, double tol) {
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double z_mid = hardy_Z(mid);
        if (z_mid == 0.0) return mid;
        if ((z_mid < 0.0) == (z_lo < 0.0)) {
            lo = mid;
            z_lo = z_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Samples z0, z1, z2 at t1 - h, t1, t1 + h share a sign and |z1| is a local
// minimum. If the parabola through them dips to the other side (or nearly),
// a close pair of zeros may hide between the samples: minimize sign * Z by
// golden section and, on a sign flip, bisect both zeros.
inline void hidden_pair(double t1, double h, double z0, double z1, double z2, double tol,
                        std::vector<double>& found) {
    const double s = z1 > 0.0 ? 1.0 : -1.0;
    const double curv = z0 - 2.0 * z1 + z2;
    if (s * curv <= 0.0) return;
    const double vertex = z1 - (z2 - z0) * (z2 - z0) / (8.0 * curv);
    if (s * vertex > 0.1 * std::abs(z1)) return;
    double a = t1 - h, b = t1 + h;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = s * hardy_Z(c), fd = s * hardy_Z(d);
    double t_min = fc < fd ? c : d, f_min = std::min(fc, fd);
    while (b - a > tol && f_min > 0.0) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = s * hardy_Z(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = s * hardy_Z(d);
        }
        if (std::min(fc, fd) < f_min) {
            f_min = std::min(fc, fd);
            t_min = fc < fd ? c : d;
        }
    }
    if (!(f_min < 0.0)) return;
    found.push_back(bisect_zero(t1 - h, t_min, z0, tol));
    found.push_back(bisect_zero(t_min, t1 + h, s * f_min, tol));
}

}  // namespace detail

/// Grid step used by find_zeros: 0.2 / max(1, log(t_max / 2 pi)), i.e. about
/// 3% of the mean zero spacing at the top of the range.
inline double zero_scan_step(double t_max) {
    return 0.2 / std::max(1.0, std::log(t_max / (2.0 * std::numbers::pi)));
}

/// Sign changes of Z on a uniform grid over [t_min, t_max], each refined by
/// bisection to `tolerance`. Work is split into disjoint grid ranges; the
/// merge re-sorts and drops duplicates at range boundaries.
inline ZeroOrdinates find_zeros(double t_min, double t_max, const ZeroSearchOptions& opt = {}) {
    detail::require(t_min >= 0.0, "find_zeros: t_min must be >= 0");
    detail::require(t_max > t_min, "find_zeros: t_max must exceed t_min");
    detail::require(opt.tolerance >= 1e-10, "find_zeros: tolerance must be >= 1e-10");

    ZeroOrdinates out;
    out.t_min = t_min;
    out.t_max = t_max;
    out.tolerance = opt.tolerance;
    out.method = t_max > kRiemannSiegelSwitch ? "riemann_siegel" : "euler_maclaurin";

    const double step = zero_scan_step(t_max);
    const auto cells = static_cast<std::uint64_t>(std::ceil((t_max - t_min) / step));
    const double h = (t_max - t_min) / static_cast<double>(cells);
    constexpr std::uint64_t kChunk = 4096;
    const std::uint64_t chunks = (cells + kChunk - 1) / kChunk;

    // Chunk c owns the cells [k-1, k] and the samples k for k in (first, last];
    // it also evaluates sample last + 1 to test sample last for a hidden pair.
    std::vector<std::vector<double>> found(chunks);
    auto grid = [&](std::uint64_t k) { return k == cells ? t_max : t_min + h * static_cast<double>(k); };
    detail::parallel_for(chunks, opt.threads, [&](std::size_t c) {
        const std::uint64_t first = c * kChunk;
        const std::uint64_t last = std::min(cells, first + kChunk);
        std::vector<double> z(last - first + 2, 0.0);
        for (std::uint64_t k = first; k <= std::min(cells, last + 1); ++k) z[k - first] = hardy_Z(grid(k));
        for (std::uint64_t k = first + 1; k <= last; ++k) {
            const double z_prev = z[k - 1 - first], z_k = z[k - first];
            if (z_k == 0.0) {
                found[c].push_back(grid(k));
            } else if (z_prev != 0.0 && (z_k < 0.0) != (z_prev < 0.0)) {
                found[c].push_back(detail::bisect_zero(grid(k - 1), grid(k), z_prev, opt.tolerance));
            }
            if (k < cells && z_k != 0.0) {
                const double z_next = z[k + 1 - first];
                if ((z_prev > 0.0) == (z_k > 0.0) && (z_next > 0.0) == (z_k > 0.0) && z_prev != 0.0 &&
                    z_next != 0.0 && std::abs(z_k) <= std::abs(z_prev) && std::abs(z_k) <= std::abs(z_next))
                    detail::hidden_pair(grid(k), h, z_prev, z_k, z_next, opt.tolerance, found[c]);
            }
        }
        if (first == 0 && z[0] == 0.0) found[c].push_back(t_min);
    });

    for (auto& f : found) out.ordinates.insert(out.ordinates.end(), f.begin(), f.end());
    std::sort(out.ordinates.begin(), out.ordinates.end());
    std::vector<double> merged;
    merged.reserve(out.ordinates.size());
    for (double g : out.ordinates) {
        if (!merged.empty() && g - merged.back() <= 0.0) continue;
        if (!merged.empty() && g - merged.back() < 2.0 * opt.tolerance) out.anomalies.push_back(g);
        merged.push_back(g);
    }
    out.ordinates = std::move(merged);
    return out;
}

struct GapHistogram {
    double bin_width = 0.1;
    std::vector<std::uint64_t> counts;  // bin k covers [k w, (k+1) w)
};

struct GapStats {
    std::vector<double> normalized_gaps;  // (g_{n+1} - g_n) log(g_n / 2pi) / 2pi
    double mean = 0.0;
    double max = 0.0;
    double max_height = 0.0;  // g_n at which the max occurs
    GapHistogram histogram;
};

inline double normalized_gap(double gamma, double next) {
    return (next - gamma) * std::log(gamma / (2.0 * std::numbers::pi)) / (2.0 * std::numbers::pi);
}

inline GapStats gap_stats(const std::vector<double>& ordinates, double bin_width = 0.1) {
    detail::require(ordinates.size() >= 2, "gap_stats: need at least two ordinates");
    detail::require(bin_width > 0.0, "gap_stats: bin width must be positive");
    GapStats out;
    out.histogram.bin_width = bin_width;
    out.normalized_gaps.reserve(ordinates.size() - 1);
    double sum = 0.0;
    for (std::size_t n = 0; n + 1 < ordinates.size(); ++n) {
        detail::require(ordinates[n + 1] > ordinates[n], "gap_stats: ordinates must be strictly increasing");
        const double g = normalized_gap(ordinates[n], ordinates[n + 1]);
        out.normalized_gaps.push_back(g);
        sum += g;
        if (g > out.max) {
            out.max = g;
            out.max_height = ordinates[n];
        }
        const auto bin = static_cast<std::size_t>(std::max(0.0, g) / bin_width);
        if (bin >= out.histogram.counts.size()) out.histogram.counts.resize(bin + 1, 0);
        ++out.histogram.counts[bin];
    }
    out.mean = sum / static_cast<double>(out.normalized_gaps.size());
    return out;
}

inline GapStats gap_stats(const ZeroOrdinates& zeros, double bin_width = 0.1) {
    return gap_stats(zeros.ordinates, bin_width);
}

/// Ordinates within [lo, hi].
inline std::vector<double> ordinates_between(const ZeroOrdinates& zeros, double lo, double hi) {
    const auto first = std::lower_bound(zeros.ordinates.begin(), zeros.ordinates.end(), lo);
    const auto last = std::upper_bound(zeros.ordinates.begin(), zeros.ordinates.end(), hi);
    return {first, last};
}

struct CountReport {
    double T = 0.0;
    std::uint64_t counted = 0;
    double predicted = 0.0;
    double discrepancy = 0.0;  // counted - predicted
};

/// T log(T/2pi)/2pi - T/2pi + 7/8.
inline double count_main_term(double T) {
    const double two_pi = 2.0 * std::numbers::pi;
    return T / two_pi * std::log(T / two_pi) - T / two_pi + 0.875;
}

/// Compares the number of zeros in (0, T] against count_main_term(T). The
/// zero list must start at 0 and reach T.
inline CountReport count_check(const ZeroOrdinates& zeros, double T) {
    detail::require(T > 2.0 * std::numbers::pi, "count_check: T must exceed 2 pi");
    detail::require(zeros.t_min <= 0.0 && zeros.t_max >= T,
                    "count_check: zero list does not cover (0, T]");
    CountReport out;
    out.T = T;
    out.counted = static_cast<std::uint64_t>(
        std::upper_bound(zeros.ordinates.begin(), zeros.ordinates.end(), T) - zeros.ordinates.begin());
    out.predicted = count_main_term(T);
    out.discrepancy = static_cast<double>(out.counted) - out.predicted;
    return out;
}

// ---------------------------------------------------------------------------
// Zero cache

inline constexpr char kZeroCacheMagic[4] = {'Z', 'G', 'Z', '1'};
inline constexpr std::uint32_t kZeroCacheVersion = 1;

namespace detail {

template <class U>
void put_le(std::ostream& os, U value) {
    for (std::size_t i = 0; i < sizeof(U); ++i) os.put(static_cast<char>((value >> (8 * i)) & 0xff));
}

template <class U>
U get_le(std::istream& is) {
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        const int c = is.get();
        if (c == std::char_traits<char>::eof()) throw std::runtime_error("zero cache: truncated file");
        value |= static_cast<U>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return value;
}

}  // namespace detail

inline void write_zero_cache(std::ostream& os, const std::vector<double>& ordinates) {
    os.write(kZeroCacheMagic, 4);
    detail::put_le<std::uint32_t>(os, kZeroCacheVersion);
    detail::put_le<std::uint64_t>(os, ordinates.size());
    for (double g : ordinates) detail::put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(g));
    if (!os) throw std::runtime_error("zero cache: write failed");
}

inline std::vector<double> read_zero_cache(std::istream& is) {
    char magic[4] = {};
    is.read(magic, 4);
    if (!is || !std::equal(magic, magic + 4, kZeroCacheMagic))
        throw std::runtime_error("zero cache: bad magic");
    const auto version = detail::get_le<std::uint32_t>(is);
    if (version != kZeroCacheVersion) throw std::runtime_error("zero cache: unsupported version");
    const auto count = detail::get_le<std::uint64_t>(is);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 24)));
    for (std::uint64_t i = 0; i < count; ++i)
        out.push_back(std::bit_cast<double>(detail::get_le<std::uint64_t>(is)));
    for (std::size_t i = 1; i < out.size(); ++i)
        if (!(out[i] > out[i - 1])) throw std::runtime_error("zero cache: ordinates not ascending");
    return out;
}

inline void write_zero_cache(const std::string& path, const std::vector<double>& ordinates) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("zero cache: cannot open " + path);
    write_zero_cache(os, ordinates);
}

inline std::vector<double> read_zero_cache(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("zero cache: cannot open " + path);
    return read_zero_cache(is);
}

/// One row per consecutive pair; n is the 1-based index of gamma in the list.
inline void write_gap_csv(std::ostream& os, const std::vector<double>& ordinates) {
    os << "n,gamma,gap,normalized_gap\n";
    os << std::setprecision(17);
    for (std::size_t n = 0; n + 1 < ordinates.size(); ++n) {
        os << (n + 1) << ',' << ordinates[n] << ',' << (ordinates[n + 1] - ordinates[n]) << ','
           << normalized_gap(ordinates[n], ordinates[n + 1]) << '\n';
    }
}

}  // namespace zgap
