#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "rtstat/constants.hpp"
#include "rtstat/errors.hpp"

namespace rtstat {

/// An IID source over a finite alphabet. Symbol probabilities are optional:
/// without them the model only names the alphabet size (exact entropy,
/// q_max and the information variance are then unavailable).
class ProcessModel {
public:
    static ProcessModel equidistributed(std::uint32_t alphabet_size) {
        check_size(alphabet_size);
        ProcessModel m;
        m.alphabet_size_ = alphabet_size;
        m.probs_ = std::vector<double>(alphabet_size, 1.0 / alphabet_size);
        return m;
    }

    static ProcessModel with_probs(std::vector<double> probs, double tol = 1e-12) {
        check_size(static_cast<std::uint32_t>(probs.size()));
        double sum = 0.0;
        for (double q : probs) {
            if (!(q >= 0.0 && q <= 1.0)) throw DomainError("probability outside [0,1]");
            sum += q;
        }
        if (std::fabs(sum - 1.0) > tol)
            throw DomainError("probabilities sum to " + std::to_string(sum) + ", not 1");
        ProcessModel m;
        m.alphabet_size_ = static_cast<std::uint32_t>(probs.size());
        m.probs_ = std::move(probs);
        return m;
    }

    static ProcessModel alphabet_only(std::uint32_t alphabet_size) {
        check_size(alphabet_size);
        ProcessModel m;
        m.alphabet_size_ = alphabet_size;
        return m;
    }

    std::uint32_t alphabet_size() const { return alphabet_size_; }
    bool has_probs() const { return probs_.has_value(); }
    const std::vector<double>& probs() const {
        if (!probs_) throw DomainError("model carries no symbol probabilities");
        return *probs_;
    }

    double q_max() const {
        double m = 0.0;
        for (double q : probs()) m = std::max(m, q);
        return m;
    }

    bool is_equidistributed(double tol = 1e-12) const {
        if (!probs_) return false;
        const double u = 1.0 / alphabet_size_;
        for (double q : *probs_)
            if (std::fabs(q - u) > tol) return false;
        return true;
    }

    bool is_degenerate(double tol = 1e-15) const { return probs_ && q_max() > 1.0 - tol; }

    /// Shannon entropy in bits per symbol.
    double entropy_bits() const {
        double h = 0.0;
        for (double q : probs())
            if (q > 0.0) h -= q * std::log2(q);
        return h;
    }

    /// Var(-log2 P(Z)), the information variance, in bits^2.
    double information_variance_bits2() const {
        const double h = entropy_bits();
        double v = 0.0;
        for (double q : probs()) {
            if (q <= 0.0) continue;
            const double d = -std::log2(q) - h;
            v += q * d * d;
        }
        return v;
    }

private:
    static void check_size(std::uint32_t a) {
        if (a < 2) throw DomainError("alphabet size must be at least 2");
        if (a > 256) throw DomainError("alphabet size above 256 is not supported");
    }

    ProcessModel() = default;
    std::uint32_t alphabet_size_ = 0;
    std::optional<std::vector<double>> probs_;
};

/// Var(-log2 P(Z_1)) of an IID model.
inline double information_variance(const ProcessModel& model) {
    return model.information_variance_bits2();
}

}  // namespace rtstat
