#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "rtstat/errors.hpp"
#include "rtstat/moments.hpp"
#include "rtstat/rng.hpp"

namespace rtstat {

/// Two-sided bound on P(R_m >= s | R_1..R_{m-1}):
///   (1 - p_m/(1-S*))^(s-1)  <=  P  <=  (1-p_m)^(s-m),
/// with S* = p_1 + ... + p_{m-1}.
struct SandwichBound {
    std::size_t m = 0;
    std::uint64_t s = 0;
    std::vector<double> p;
    double s_star = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

inline SandwichBound conditional_sandwich(const std::vector<double>& p, std::uint64_t s,
                                          std::size_t m) {
    if (m < 2) throw DomainError("sandwich bound needs m >= 2");
    if (p.size() < m) throw DomainError("need probabilities p_1..p_m");
    if (s < m) throw DomainError("sandwich bound needs s >= m");
    for (std::size_t i = 0; i < m; ++i)
        if (!(p[i] > 0.0 && p[i] < 1.0)) throw DomainError("probabilities must lie in (0,1)");
    double s_star = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) s_star += p[i];
    if (s_star >= 1.0)
        throw InvalidMassError("conditioning probabilities sum to " + std::to_string(s_star));

    SandwichBound b;
    b.m = m;
    b.s = s;
    b.p.assign(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(m));
    b.s_star = s_star;
    const double pm = p[m - 1];
    b.lower = std::pow(1.0 - pm / (1.0 - s_star), static_cast<double>(s - 1));
    b.upper = std::pow(1.0 - pm, static_cast<double>(s - m));
    return b;
}

/// The conditional law of one modified return time given another, for an
/// equidistributed source with per-block probability p < 1/2:
///   P(R_j = y | R_i = x), y != x.
/// y = x is impossible (targets are distinct) and is rejected loudly.
inline double pair_conditional_pmf(double p, std::uint64_t x, std::uint64_t y) {
    if (!(p > 0.0 && p < 0.5)) throw DomainError("pair law requires 0 < p < 1/2");
    if (x < 1 || y < 1) throw DomainError("return times are >= 1");
    if (y == x)
        throw DomainError("P(R_j = y | R_i = x) is undefined at y = x: distinct targets "
                          "cannot be hit by the same block");
    const double q = 1.0 - p;
    const double u = (1.0 - 2.0 * p) / q;
    if (y < x) return p / q * std::pow(u, static_cast<double>(y - 1));
    return std::pow(u, static_cast<double>(x - 1)) *
           std::pow(q, static_cast<double>(y - x - 1)) * p;
}

/// Exact Cov(ln R_i, ln R_j) for the pair law above, by series. Uses the
/// exchangeability of the joint law: with u = (1-2p)/(1-p),
///   E[ln R_i ln R_j] = 2 p^2 sum_{x>=2} (1-p)^(x-2) ln x * sum_{y<x} u^(y-1) ln y,
/// so a running prefix sum makes the double series a single loop.
inline double exact_pair_log_covariance(double p, double tol = 1e-9) {
    if (!(p > 0.0 && p <= 0.25)) throw DomainError("pair covariance oracle requires p <= 1/4");
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    const double q = 1.0 - p;
    const double u = (1.0 - 2.0 * p) / q;

    // Bound on sum_y u^(y-1) ln y, used by the outer tail envelope.
    double inner_bound;
    {
        detail::KahanSum s;
        double upow = 1.0;
        double lny = 0.0;
        for (std::uint64_t y = 1;; ++y) {
            lny = std::log(static_cast<double>(y));
            const double term = upow * lny;
            s.add(term);
            if (y >= 4) {
                const double rho = u * std::log(static_cast<double>(y) + 1.0) / lny;
                if (rho < 1.0 && term * rho / (1.0 - rho) < tol) break;
            }
            upow *= u;
        }
        inner_bound = s.sum + tol;
    }

    detail::KahanSum e2;    // E[ln R_i ln R_j]
    detail::KahanSum pref;  // sum_{y<=x-1} u^(y-1) ln y
    double qpow = 1.0;      // q^(x-2)
    double upow = 1.0;      // u^(x-2) for the prefix update
    for (std::uint64_t x = 2;; ++x) {
        if (x > detail::kMaxSeriesTerms)
            throw DomainError("series did not reach tolerance within the term budget");
        pref.add(upow * std::log(static_cast<double>(x - 1)));
        const double lnx = std::log(static_cast<double>(x));
        e2.add(2.0 * p * p * qpow * lnx * pref.sum);
        if (x >= 8) {
            const double rho = q * std::log(static_cast<double>(x) + 1.0) / lnx;
            if (rho < 1.0) {
                const double tail = 2.0 * p * p * qpow * lnx * inner_bound * rho / (1.0 - rho);
                if (tail < tol / 2.0) break;
            }
        }
        qpow *= q;
        upow *= u;
    }

    const double mu = exact_log_moment(GeomParam(p), 1, tol / (8.0 * (1.0 + 2.0 * std::fabs(mu_asymptotic(GeomParam(p))))));
    return e2.sum - mu * mu;
}

/// Samples R_1..R_k for an equidistributed source directly from the
/// ordered-spacings representation: independent W_i ~ Geom((k+1-i) p),
/// partial sums assigned to indices through a uniform random permutation.
/// Distributionally identical to the modified-return construction.
inline std::vector<std::uint64_t> ordered_spacings_sample(std::size_t k, double p,
                                                          std::uint64_t seed) {
    if (k < 1) throw DomainError("k must be at least 1");
    if (!(p > 0.0 && static_cast<double>(k) * p < 1.0))
        throw DomainError("ordered spacings need k p < 1");
    Rng rng(seed);
    std::vector<std::uint64_t> ordered(k);
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < k; ++i) {
        acc += rng.geometric(static_cast<double>(k - i) * p);
        ordered[i] = acc;
    }
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = k; i-- > 1;) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
        std::swap(perm[i], perm[j]);
    }
    std::vector<std::uint64_t> r(k);
    for (std::size_t i = 0; i < k; ++i) r[perm[i]] = ordered[i];
    return r;
}

/// The fixed library of monotone coordinate functions used by the
/// negative-association checks. All three kinds are increasing in every
/// coordinate:
///   CoordinateSum       sum of the selected coordinates
///   CoordinateMax       max of the selected coordinates
///   IndicatorMaxExceeds 1 { max of the selected coordinates > threshold }
struct MonotoneSpec {
    enum class Kind { CoordinateSum, CoordinateMax, IndicatorMaxExceeds };
    Kind kind = Kind::CoordinateSum;
    std::vector<std::size_t> coords;  // 0-based columns
    double threshold = 0.0;

    double apply(const std::vector<std::uint64_t>& row) const {
        if (coords.empty()) throw DomainError("monotone spec selects no coordinates");
        double sum = 0.0;
        double mx = 0.0;
        for (std::size_t c : coords) {
            const double v = static_cast<double>(row.at(c));
            sum += v;
            mx = std::max(mx, v);
        }
        switch (kind) {
            case Kind::CoordinateSum: return sum;
            case Kind::CoordinateMax: return mx;
            case Kind::IndicatorMaxExceeds: return mx > threshold ? 1.0 : 0.0;
        }
        return 0.0;
    }
};

/// Empirical covariance of two monotone functions on disjoint coordinate
/// sets, with the standard error of the covariance estimate.
struct NaCheckResult {
    double covariance = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

inline NaCheckResult na_empirical_check(const std::vector<std::vector<std::uint64_t>>& samples,
                                        const MonotoneSpec& f1, const MonotoneSpec& f2) {
    if (samples.size() < 2) throw DomainError("need at least two sample rows");
    for (std::size_t c1 : f1.coords)
        for (std::size_t c2 : f2.coords)
            if (c1 == c2) throw DomainError("monotone specs must use disjoint coordinates");

    const std::size_t n = samples.size();
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = f1.apply(samples[i]);
        b[i] = f2.apply(samples[i]);
    }
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
    detail::KahanSum cov_acc, var_acc;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = (a[i] - ma) * (b[i] - mb);
        cov_acc.add(c);
    }
    const double cov = cov_acc.sum / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = (a[i] - ma) * (b[i] - mb) - cov;
        var_acc.add(c * c);
    }
    NaCheckResult r;
    r.covariance = cov;
    r.std_error = std::sqrt(var_acc.sum) / static_cast<double>(n);
    r.samples = n;
    return r;
}

}  // namespace rtstat
