#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rtstat/alphabet.hpp"
#include "rtstat/block.hpp"
#include "rtstat/errors.hpp"
#include "rtstat/normal.hpp"
#include "rtstat/process_model.hpp"
#include "rtstat/return_times.hpp"
#include "rtstat/rng.hpp"
#include "rtstat/statistics.hpp"

namespace rtstat {

/// n IID symbols from the model, deterministic per seed.
inline SymbolSequence gen_iid(const ProcessModel& model, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw DomainError("need at least one symbol");
    const auto& q = model.probs();
    std::vector<double> cum(q.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        acc += q[i];
        cum[i] = acc;
    }
    cum.back() = 1.0;

    Rng rng(seed);
    std::vector<Symbol> out(n);
    const std::size_t last = q.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform();
        std::size_t s = 0;
        while (s < last && u >= cum[s]) ++s;
        out[i] = static_cast<Symbol>(s);
    }
    return SymbolSequence(Alphabet(model.alphabet_size()), std::move(out));
}

namespace detail {

/// Block-probability classes of an IID model: all blocks sharing a symbol
/// composition have the same probability. Returns (class weight, block
/// probability) pairs; weights sum to 1. When the composition count
/// C(ell+A-1, A-1) is too large to enumerate, a fixed-seed sample of blocks
/// stands in (each sampled block carries weight 1/B and its exact
/// probability), which estimates the same mixture.
inline std::vector<std::pair<double, double>> block_classes(const ProcessModel& model,
                                                            std::size_t ell) {
    const auto& q = model.probs();
    const double a = static_cast<double>(q.size());
    const double log_count = std::lgamma(static_cast<double>(ell) + a) -
                             std::lgamma(static_cast<double>(ell) + 1.0) - std::lgamma(a);
    if (log_count > std::log(200000.0)) {
        std::vector<std::pair<double, double>> classes;
        Rng rng(0x243f6a8885a308d3ULL);  // fixed: the mixture must be reproducible
        std::vector<double> cum(q.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) cum[i] = (acc += q[i]);
        cum.back() = 1.0;
        const std::size_t draws = 8192;
        classes.reserve(draws);
        for (std::size_t b = 0; b < draws; ++b) {
            double log_p = 0.0;
            for (std::size_t i = 0; i < ell; ++i) {
                const double u = rng.uniform();
                std::size_t s = 0;
                while (s + 1 < q.size() && u >= cum[s]) ++s;
                log_p += std::log(q[s]);
            }
            classes.emplace_back(1.0 / static_cast<double>(draws), std::exp(log_p));
        }
        return classes;
    }

    std::vector<std::pair<double, double>> classes;
    std::vector<std::size_t> counts(q.size(), 0);
    const double lgamma_ell = std::lgamma(static_cast<double>(ell) + 1.0);

    // Depth-first over symbol-count compositions of ell.
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t sym, std::size_t left) {
        if (sym + 1 == q.size()) {
            counts[sym] = left;
            double log_p = 0.0;
            double log_multi = lgamma_ell;
            bool dead = false;
            for (std::size_t i = 0; i < q.size(); ++i) {
                if (counts[i] == 0) continue;
                if (q[i] <= 0.0) {
                    dead = true;
                    break;
                }
                log_p += static_cast<double>(counts[i]) * std::log(q[i]);
                log_multi -= std::lgamma(static_cast<double>(counts[i]) + 1.0);
            }
            if (!dead) classes.emplace_back(std::exp(log_multi + log_p), std::exp(log_p));
            return;
        }
        for (std::size_t c = 0; c <= left; ++c) {
            counts[sym] = c;
            rec(sym + 1, left - c);
        }
    };
    rec(0, ell);
    return classes;
}

/// Probability that one return time stays unresolved after m further blocks.
inline double censor_probability(const std::vector<std::pair<double, double>>& classes,
                                 std::uint64_t m) {
    double eps = 0.0;
    for (const auto& [w, p] : classes) {
        if (p >= 1.0) continue;  // a certain block returns immediately
        eps += w * std::exp(static_cast<double>(m) * std::log1p(-p));
    }
    return eps;
}

/// Smallest post-k block count m with k * censor_probability(m) <= target,
/// clamped to cap.
inline std::uint64_t solve_post_blocks(const std::vector<std::pair<double, double>>& classes,
                                       std::size_t k, double target, std::uint64_t cap) {
    const double per_index = target / static_cast<double>(k);
    std::uint64_t hi = 64;
    while (hi < cap && censor_probability(classes, hi) > per_index) hi *= 2;
    hi = std::min<std::uint64_t>(hi, cap);
    std::uint64_t lo = 1;
    while (lo < hi) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (censor_probability(classes, mid) <= per_index)
            hi = mid;
        else
            lo = mid + 1;
    }
    return hi;
}

}  // namespace detail

/// One Monte Carlo experiment: `trials` independent sequences, each run
/// through blockify -> return_times -> the z statistic and entropy estimate.
struct TrialConfig {
    ProcessModel model = ProcessModel::equidistributed(2);
    std::size_t k = 1;
    std::size_t ell = 1;
    std::size_t trials = 1;
    std::uint64_t master_seed = 0;
    bool correction = false;
    /// Hard cap on post-k blocks per trial; 0 means sized from the model so
    /// that a trial censors with probability below 1e-3.
    std::uint64_t max_blocks_override = 0;
};

struct TrialOutcome {
    std::size_t trial = 0;
    bool censored = false;
    std::size_t censored_indices = 0;
    double z = 0.0;
    double z_corrected = 0.0;
    double h_hat = 0.0;
    std::uint64_t post_blocks = 0;  // post-k blocks generated before resolution
};

struct TrialRun {
    std::vector<TrialOutcome> outcomes;
    std::vector<double> z;             // uncensored trials, in trial order
    std::vector<double> z_corrected;   // filled when correction is on
    std::vector<double> h_hat;
    std::size_t censored_trials = 0;
    std::uint64_t initial_post_blocks = 0;
    std::uint64_t cap_post_blocks = 0;
};

/// Runs the experiment. Per-trial sequences start at a length that makes
/// censoring unlikely and are regenerated twice as long (same seed, so the
/// prefix is unchanged) while any return time is unresolved, up to the cap.
/// Identical configs produce bit-identical results; trial t depends only on
/// (master_seed, t).
inline TrialRun run_trials(const TrialConfig& config) {
    if (config.trials < 1) throw DomainError("need at least one trial");
    if (config.ell < 1) throw DomainError("block length must be at least 1");
    if (config.k < 1) throw DomainError("k must be at least 1");
    const double h_bits = config.model.entropy_bits();

    const auto classes = detail::block_classes(config.model, config.ell);
    // The documented guarantee is a censoring probability below 1e-3 per
    // trial; sizing the cap for 1e-5 costs only a log factor and keeps
    // multi-hundred-trial runs comfortably inside the 0.5% budget.
    const std::uint64_t abs_cap = std::uint64_t{1} << 26;
    std::uint64_t cap = config.max_blocks_override > 0
                            ? config.max_blocks_override
                            : detail::solve_post_blocks(classes, config.k, 1e-5, abs_cap);
    std::uint64_t initial = std::min<std::uint64_t>(
        cap, detail::solve_post_blocks(classes, config.k, 0.5, abs_cap));

    TrialRun run;
    run.initial_post_blocks = initial;
    run.cap_post_blocks = cap;
    run.outcomes.reserve(config.trials);

    for (std::size_t t = 0; t < config.trials; ++t) {
        const std::uint64_t seed = derive_seed(config.master_seed, t);
        TrialOutcome out;
        out.trial = t;

        std::uint64_t post = initial;
        for (;;) {
            const std::size_t n_symbols = (config.k + static_cast<std::size_t>(post)) * config.ell;
            const SymbolSequence seq = gen_iid(config.model, n_symbols, seed);
            const BlockSequence blocks = blockify(seq, config.ell);
            ReturnTimeSet rt = return_times(blocks, config.k, blocks.block_count());
            if (rt.all_uncensored()) {
                out.post_blocks = post;
                out.z = clt_statistic(rt, config.ell, h_bits);
                out.h_hat = entropy_estimate(rt, config.ell);
                if (config.correction)
                    out.z_corrected =
                        variance_corrected_statistic(rt, config.ell, h_bits, &config.model);
                break;
            }
            if (post >= cap) {
                out.post_blocks = post;
                out.censored = true;
                out.censored_indices = rt.censored_indices().size();
                break;
            }
            post = std::min<std::uint64_t>(post * 2, cap);
        }

        if (out.censored) {
            ++run.censored_trials;
        } else {
            run.z.push_back(out.z);
            run.h_hat.push_back(out.h_hat);
            if (config.correction) run.z_corrected.push_back(out.z_corrected);
        }
        run.outcomes.push_back(out);
    }

    if (static_cast<double>(run.censored_trials) >
        0.005 * static_cast<double>(config.trials)) {
        throw CensoringBudgetError(
            "censoring budget exceeded: " + std::to_string(run.censored_trials) + " of " +
                std::to_string(config.trials) + " trials censored",
            run.censored_trials, config.trials);
    }
    return run;
}

/// Quantile-quantile data against N(0,1): one point per sample, plus the
/// line through the paired quartiles.
struct QQData {
    std::vector<std::pair<double, double>> points;  // (theoretical, sample)
    double slope = 0.0;
    double intercept = 0.0;
};

inline QQData qq_points(std::vector<double> samples) {
    if (samples.size() < 3) throw DomainError("need at least three samples for a QQ plot");
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();

    QQData qq;
    qq.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        qq.points.emplace_back(normal_quantile(u), samples[i]);
    }

    auto sample_quantile = [&samples, n](double prob) {
        const double h = (static_cast<double>(n) - 1.0) * prob;
        const std::size_t lo = static_cast<std::size_t>(h);
        const std::size_t hi = std::min(lo + 1, n - 1);
        return samples[lo] + (h - static_cast<double>(lo)) * (samples[hi] - samples[lo]);
    };
    const double x25 = normal_quantile(0.25);
    const double x75 = normal_quantile(0.75);
    const double y25 = sample_quantile(0.25);
    const double y75 = sample_quantile(0.75);
    qq.slope = (y75 - y25) / (x75 - x25);
    qq.intercept = y25 - qq.slope * x25;
    return qq;
}

/// Kolmogorov-Smirnov distance of a sample to N(0,1) and the asymptotic
/// p-value of that distance.
struct KsResult {
    double d = 0.0;
    double approx_p = 0.0;
};

inline KsResult ks_normal(std::vector<double> samples) {
    if (samples.size() < 20) throw DomainError("need at least 20 samples for the KS check");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = normal_cdf(samples[i]);
        const double lo = f - static_cast<double>(i) / n;
        const double hi = (static_cast<double>(i) + 1.0) / n - f;
        d = std::max(d, std::max(lo, hi));
    }
    KsResult r;
    r.d = d;
    const double sn = std::sqrt(n);
    r.approx_p = kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d);
    return r;
}

}  // namespace rtstat
