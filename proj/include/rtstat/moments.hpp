#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>

#include "rtstat/constants.hpp"
#include "rtstat/errors.hpp"

namespace rtstat {

/// Parameter of a geometric distribution on {1, 2, ...}:
/// P(R = r) = p (1-p)^(r-1).
struct GeomParam {
    double p;
    explicit GeomParam(double prob) : p(prob) {
        if (!(p > 0.0 && p < 1.0)) throw DomainError("geometric parameter must lie in (0,1)");
    }
};

namespace detail {

/// Compensated accumulator for long series.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

/// Natural log of consecutive integers, updated incrementally. Exact
/// std::log below the threshold and every 2^20 steps; in between a short
/// log1p(1/r) expansion whose truncation error is far below double rounding.
struct RunningLog {
    double value = 0.0;  // ln(1) at r = 1
    std::uint64_t r = 1;

    void advance() {
        ++r;
        if (r <= 4096 || (r & 0xfffffu) == 0) {
            value = std::log(static_cast<double>(r));
            return;
        }
        const double u = 1.0 / (static_cast<double>(r) - 1.0);
        const double u2 = u * u;
        value += u - 0.5 * u2 + (1.0 / 3.0) * u2 * u - 0.25 * u2 * u2;
    }
};

struct SeriesResult {
    double value = 0.0;
    double tail_bound = 0.0;
    std::uint64_t terms = 0;
};

inline constexpr std::uint64_t kMaxSeriesTerms = 400000000ULL;

/// Sum_{r>=1} p q^(r-1) (ln r)^order, truncated once the geometric-ratio
/// tail envelope certifies absolute error below tol.
inline SeriesResult geom_log_series(double p, int order, double tol) {
    const double q = 1.0 - p;
    KahanSum acc;
    RunningLog lg;
    double qpow = 1.0;  // q^(r-1)
    for (std::uint64_t r = 1;; ++r) {
        if (r > kMaxSeriesTerms)
            throw DomainError("series did not reach tolerance within the term budget");
        double w = lg.value;
        if (order >= 2) w *= lg.value;
        if (order == 3) w *= lg.value;
        const double term = p * qpow * w;
        acc.add(term);
        if (r >= 4) {
            // ratio envelope: t_{r+1}/t_r <= q (ln(r+1)/ln r)^order, decreasing in r
            const double lr = lg.value;
            const double lr1 = std::log(static_cast<double>(r) + 1.0);
            double rho = q * (lr1 / lr);
            if (order >= 2) rho *= lr1 / lr;
            if (order == 3) rho *= lr1 / lr;
            if (rho < 1.0) {
                const double tail = term * rho / (1.0 - rho);
                if (tail < tol) return {acc.sum, tail, r};
            }
        }
        qpow *= q;
        lg.advance();
    }
}

}  // namespace detail

/// Raw log-moment E[(ln R)^order] of R ~ Geom(p), order in {1,2,3}, by exact
/// series summation with a rigorous tail bound below tol.
inline double exact_log_moment(GeomParam gp, int order, double tol) {
    if (order < 1 || order > 3) throw DomainError("order must be 1, 2 or 3");
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    return detail::geom_log_series(gp.p, order, tol).value;
}

/// Leading-order mean of ln Geom(p): -gamma - ln p.
inline double mu_asymptotic(GeomParam gp) { return -kEulerGamma - std::log(gp.p); }

/// Limiting variance of ln Geom(p): pi^2/6.
inline double sigma2_asymptotic() { return kPiSqOver6; }

/// Exact Var(ln R) via raw moments.
inline double exact_log_variance(GeomParam gp, double tol) {
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    const double m1_scale = 1.0 + 2.0 * std::fabs(mu_asymptotic(gp));
    const double m1 = exact_log_moment(gp, 1, tol / (4.0 * m1_scale));
    const double m2 = exact_log_moment(gp, 2, tol / 2.0);
    return m2 - m1 * m1;
}

/// Exact E|ln R - mu(p)|^3 by series. The loop runs past r = e^mu before the
/// ratio envelope is trusted, because |ln r - mu|^3 decreases and then grows
/// again around that point.
inline double third_abs_central_moment(GeomParam gp, double tol) {
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    if (gp.p > 0.5) throw DomainError("third_abs_central_moment expects p <= 1/2");
    const double p = gp.p;
    const double q = 1.0 - p;
    const double mu = exact_log_moment(gp, 1, tol / 16.0);
    const double r_turn = std::exp(mu) * 1.05 + 4.0;

    detail::KahanSum acc;
    detail::RunningLog lg;
    double qpow = 1.0;
    for (std::uint64_t r = 1;; ++r) {
        if (r > detail::kMaxSeriesTerms)
            throw DomainError("series did not reach tolerance within the term budget");
        const double d = lg.value - mu;
        const double ad = std::fabs(d);
        acc.add(p * qpow * ad * ad * ad);
        if (static_cast<double>(r) > r_turn && d > 0.05) {
            const double lr1 = std::log(static_cast<double>(r) + 1.0);
            const double g = (lr1 - mu) / d;
            const double rho = q * g * g * g;
            if (rho < 1.0) {
                const double term = p * qpow * d * d * d;
                const double tail = term * rho / (1.0 - rho);
                if (tail < tol) return acc.sum;
            }
        }
        qpow *= q;
        lg.advance();
    }
}

/// E[R^-1] (closed form) or E[R^-2] (exact series) for R ~ Geom(p).
inline double inverse_moment(GeomParam gp, int order, double tol = 1e-12) {
    const double p = gp.p;
    const double q = 1.0 - p;
    if (order == 1) return -p * std::log(p) / q;
    if (order != 2) throw DomainError("inverse_moment supports orders 1 and 2");
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    detail::KahanSum acc;
    double qpow = 1.0;
    for (std::uint64_t r = 1;; ++r) {
        if (r > detail::kMaxSeriesTerms)
            throw DomainError("series did not reach tolerance within the term budget");
        const double rd = static_cast<double>(r);
        const double term = p * qpow / (rd * rd);
        acc.add(term);
        // t_{r+1}/t_r = q (r/(r+1))^2 < q
        const double tail = term * q / p;
        if (tail < tol) return acc.sum;
        qpow *= q;
    }
}

/// Dilogarithm Li2(x) for 0 <= x < 1 by its defining series with a
/// geometric tail bound. E[R^-2] for R ~ Geom(p) equals
/// p Li2(1-p) / (1-p); inverse_moment(.,2) computes the same quantity by
/// the direct series over r.
inline double dilog(double x, double tol = 1e-12) {
    if (!(x >= 0.0 && x < 1.0)) throw DomainError("dilog series requires 0 <= x < 1");
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    if (x == 0.0) return 0.0;
    detail::KahanSum acc;
    double xpow = x;
    for (std::uint64_t n = 1;; ++n) {
        if (n > detail::kMaxSeriesTerms)
            throw DomainError("series did not reach tolerance within the term budget");
        const double nd = static_cast<double>(n);
        acc.add(xpow / (nd * nd));
        const double tail = xpow * x / ((nd + 1.0) * (nd + 1.0) * (1.0 - x));
        if (tail < tol) return acc.sum;
        xpow *= x;
    }
}

/// Exact and asymptotic log-moments of Geom(p) side by side.
struct MomentReport {
    double p = 0.0;
    double mu_exact = 0.0;
    double mu_asym = 0.0;
    double sigma2_exact = 0.0;
    double sigma2_asym = 0.0;
    double third_central_abs = 0.0;
    double tail_truncation_error_bound = 0.0;
};

inline MomentReport moment_report(GeomParam gp, double tol = 1e-10) {
    MomentReport r;
    r.p = gp.p;
    r.mu_exact = exact_log_moment(gp, 1, tol);
    r.mu_asym = mu_asymptotic(gp);
    r.sigma2_exact = exact_log_variance(gp, tol);
    r.sigma2_asym = sigma2_asymptotic();
    r.third_central_abs = gp.p <= 0.5 ? third_abs_central_moment(gp, tol)
                                      : 0.0;
    r.tail_truncation_error_bound = tol;
    return r;
}

/// A smooth function on [1, inf) handed to the Euler-Maclaurin gap check.
/// `decay_rate` is the caller's certificate that |f| and |f'| are eventually
/// bounded by geometrically decaying envelopes exp(-decay_rate * x).
struct SmoothFunction {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    double decay_rate = 0.0;
};

struct GapReport {
    double gap = 0.0;       // |sum - integral|
    double bound = 0.0;     // 0.5 |f(1)| + 0.5 int |f'|
    double series_sum = 0.0;
    double integral = 0.0;
};

namespace detail {

template <class F>
double adaptive_simpson(F&& f, double a, double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

template <class F>
double integrate(F&& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace detail

/// Checks the Euler-Maclaurin inequality
///   |sum_{i>=1} f(i) - int_1^inf f| <= 0.5 |f(1)| + 0.5 int_1^inf |f'|
/// numerically. Throws NonIntegrableError when the tails do not converge
/// under the supplied decay certificate.
inline GapReport euler_maclaurin_gap(const SmoothFunction& f, double tol = 1e-9) {
    if (!(f.decay_rate > 0.0))
        throw NonIntegrableError("decay certificate must be a positive rate");
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");

    const double rho = std::exp(-f.decay_rate);
    const double stop = tol * 0.05;

    detail::KahanSum acc;
    double prev = std::fabs(f.value(1.0));
    acc.add(f.value(1.0));
    double n_stop = 0.0;
    const std::uint64_t cap = 50000000ULL;
    for (std::uint64_t i = 2;; ++i) {
        if (i > cap)
            throw NonIntegrableError("series tail did not converge under the decay certificate");
        const double fi = f.value(static_cast<double>(i));
        acc.add(fi);
        const double afi = std::fabs(fi);
        if (i >= 8 && afi <= prev) {
            const double tail = afi * rho / (1.0 - rho);
            if (tail < stop) {
                n_stop = static_cast<double>(i);
                break;
            }
        }
        prev = afi;
    }

    const double integral = detail::integrate(f.value, 1.0, n_stop, stop);
    const double deriv_integral =
        detail::integrate([&f](double x) { return std::fabs(f.derivative(x)); }, 1.0, n_stop,
                          stop);
    const double fprime_tail = std::fabs(f.derivative(n_stop)) / f.decay_rate;

    GapReport r;
    r.series_sum = acc.sum;
    r.integral = integral;  // tail beyond n_stop is below the stop threshold
    r.gap = std::fabs(acc.sum - integral);
    r.bound = 0.5 * std::fabs(f.value(1.0)) + 0.5 * (deriv_integral + fprime_tail);
    return r;
}

}  // namespace rtstat
