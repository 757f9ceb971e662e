#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rtstat/constants.hpp"
#include "rtstat/errors.hpp"
#include "rtstat/moments.hpp"
#include "rtstat/process_model.hpp"
#include "rtstat/return_times.hpp"

namespace rtstat {

namespace detail {

/// Sum of ln S_j over all k entries; refuses censored data.
inline double log_return_sum(const ReturnTimeSet& s) {
    auto censored = s.censored_indices();
    if (!censored.empty())
        throw CensoredDataError("censored return times at " + std::to_string(censored.size()) +
                                    " indices; statistics refuse censored data",
                                censored);
    KahanSum acc;
    for (const auto& e : s.entries()) acc.add(std::log(static_cast<double>(e.value)));
    return acc.sum;
}

}  // namespace detail

/// The return-time CLT z-score:
///   z = sum_j (ln S_j - ell H ln 2 + gamma) / sqrt(k pi^2 / 6).
/// Internal logarithms are natural; entropy is supplied in bits.
inline double clt_statistic(const ReturnTimeSet& s, std::size_t ell, double entropy_bits) {
    if (!(entropy_bits >= 0.0)) throw DomainError("entropy must be non-negative");
    if (ell < 1) throw DomainError("block length must be at least 1");
    const double k = static_cast<double>(s.k());
    const double sum = detail::log_return_sum(s);
    const double centered =
        sum - k * (static_cast<double>(ell) * entropy_bits * kLn2 - kEulerGamma);
    return centered / std::sqrt(k * kPiSqOver6);
}

/// Entropy estimate in bits per symbol:
///   H_hat = sum_j (ln S_j + gamma) / (k ell ln 2).
inline double entropy_estimate(const ReturnTimeSet& s, std::size_t ell) {
    if (ell < 1) throw DomainError("block length must be at least 1");
    const double k = static_cast<double>(s.k());
    const double sum = detail::log_return_sum(s);
    return (sum + k * kEulerGamma) / (k * static_cast<double>(ell) * kLn2);
}

/// The pairwise covariance plugged into the corrected denominator. Negative:
/// return times are negatively associated. For an equidistributed model the
/// block probability p = A^-ell gives (p ln p)/4; otherwise the typical
/// block probability 2^(-H ell) stands in for p.
inline double heuristic_pair_covariance(std::size_t ell, double entropy_bits,
                                        const ProcessModel* model) {
    if (model != nullptr && model->is_equidistributed()) {
        const double p = std::exp(-static_cast<double>(ell) * std::log(model->alphabet_size()));
        return p * std::log(p) / 4.0;
    }
    const double h_nats = entropy_bits * kLn2;
    const double p_typ = std::exp(-static_cast<double>(ell) * h_nats);
    return -(p_typ * static_cast<double>(ell) * h_nats) / 4.0;
}

/// clt_statistic with the denominator replaced by
/// sqrt(k pi^2/6 + k (k-1) cov_hat). cov_hat = 0 reproduces clt_statistic.
inline double variance_corrected_with(const ReturnTimeSet& s, std::size_t ell,
                                      double entropy_bits, double cov_hat) {
    if (!(entropy_bits >= 0.0)) throw DomainError("entropy must be non-negative");
    if (ell < 1) throw DomainError("block length must be at least 1");
    const double k = static_cast<double>(s.k());
    const double denom_sq = k * kPiSqOver6 + k * (k - 1.0) * cov_hat;
    if (!(denom_sq > 0.0))
        throw CorrectionInvalidError("covariance correction makes the variance non-positive (k=" +
                                     std::to_string(s.k()) + ")");
    const double sum = detail::log_return_sum(s);
    const double centered =
        sum - k * (static_cast<double>(ell) * entropy_bits * kLn2 - kEulerGamma);
    return centered / std::sqrt(denom_sq);
}

/// Variance-corrected z-score using the heuristic pairwise covariance.
/// Pass model = nullptr to use the entropy-based form.
inline double variance_corrected_statistic(const ReturnTimeSet& s, std::size_t ell,
                                           double entropy_bits, const ProcessModel* model) {
    return variance_corrected_with(s, ell, entropy_bits,
                                   heuristic_pair_covariance(ell, entropy_bits, model));
}

/// Finite-sample values of the three growth conditions behind the normal
/// approximation, with advisory warn flags at threshold 1.
struct RegimeDiagnostics {
    double strict_product = 0.0;          // k^(3/2) ell q_max^ell
    double equidistributed_product = 0.0; // k ell A^-ell
    double weak_product = 0.0;            // k ell 2^(-H ell)
    bool strict_ok = false;
    bool equidistributed_ok = false;
    bool weak_ok = false;
};

inline RegimeDiagnostics regime_check(std::size_t k, std::size_t ell, const ProcessModel& model) {
    const double kd = static_cast<double>(k);
    const double ld = static_cast<double>(ell);
    const double qmax = model.q_max();
    if (!(qmax < 1.0)) throw DomainError("regime conditions require q_max < 1");
    RegimeDiagnostics d;
    d.strict_product = std::pow(kd, 1.5) * ld * std::exp(ld * std::log(qmax));
    d.equidistributed_product =
        kd * ld * std::exp(-ld * std::log(static_cast<double>(model.alphabet_size())));
    d.weak_product = kd * ld * std::exp2(-model.entropy_bits() * ld);
    d.strict_ok = d.strict_product <= 1.0;
    d.equidistributed_ok = d.equidistributed_product <= 1.0;
    d.weak_ok = d.weak_product <= 1.0;
    return d;
}

/// Everything the analysis of one return-time sample produces.
struct StatisticReport {
    std::size_t k = 0;
    std::size_t ell = 0;
    double entropy_bits = 0.0;  // null-hypothesis entropy used for centering
    double z = 0.0;
    double h_hat_bits = 0.0;
    bool has_corrected = false;
    double z_corrected = 0.0;
    RegimeDiagnostics regime;
};

inline StatisticReport make_report(const ReturnTimeSet& s, std::size_t ell,
                                   const ProcessModel& model, bool with_correction) {
    StatisticReport r;
    r.k = s.k();
    r.ell = ell;
    r.entropy_bits = model.entropy_bits();
    r.z = clt_statistic(s, ell, r.entropy_bits);
    r.h_hat_bits = entropy_estimate(s, ell);
    if (with_correction) {
        r.z_corrected = variance_corrected_statistic(s, ell, r.entropy_bits, &model);
        r.has_corrected = true;
    }
    r.regime = regime_check(s.k(), ell, model);
    return r;
}

}  // namespace rtstat
