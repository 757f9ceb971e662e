#include <catch2/catch.hpp>

#include <map>

#include "test_helpers.hpp"

using namespace rtstat;

namespace {

/// Exhaustive oracle for the conditional tail of R_m. Streams after block k
/// are reduced to categories (target_1, ..., target_m, other); all category
/// strings of length L are enumerated with their probabilities, which is
/// exact because the events only involve the first L positions.
struct SandwichOracle {
    // conditional tails P(R_m >= s | R_1..R_{m-1} = a) keyed by a
    std::map<std::vector<std::uint64_t>, std::pair<double, double>> mass;  // (total, good)

    static SandwichOracle build(const std::vector<double>& p, std::size_t m, std::uint64_t s,
                                std::size_t len) {
        SandwichOracle o;
        double other = 1.0;
        for (std::size_t i = 0; i < m; ++i) other -= p[i];
        REQUIRE(other >= -1e-12);

        std::vector<std::size_t> cat(len, 0);  // 0..m-1 targets, m = other
        std::vector<std::uint64_t> first(m, 0);
        std::function<void(std::size_t, double)> rec = [&](std::size_t pos, double prob) {
            if (prob == 0.0) return;
            if (pos == len) {
                std::fill(first.begin(), first.end(), 0);
                for (std::size_t t = 0; t < len; ++t)
                    if (cat[t] < m && first[cat[t]] == 0)
                        first[cat[t]] = static_cast<std::uint64_t>(t + 1);
                std::vector<std::uint64_t> key(first.begin(), first.end() - 1);
                for (std::uint64_t h : key)
                    if (h == 0) return;  // conditioning value not resolved in range
                auto& cell = o.mass[key];
                cell.first += prob;
                const std::uint64_t hm = first[m - 1];
                if (hm == 0 || hm >= s) cell.second += prob;
                return;
            }
            for (std::size_t c = 0; c <= m; ++c) {
                cat[pos] = c;
                rec(pos + 1, prob * (c < m ? p[c] : other));
            }
        };
        rec(0, 1.0);
        return o;
    }
};

}  // namespace

TEST_CASE("sandwich bound plug-in values", "[dependence]") {
    const auto b = conditional_sandwich({0.1, 0.1}, 2, 2);
    CHECK(b.s_star == Approx(0.1));
    CHECK(b.lower == Approx(1.0 - 0.1 / 0.9).margin(1e-12));
    CHECK(b.upper == Approx(1.0).margin(1e-12));

    // s = m makes the upper bound exactly 1
    const auto b2 = conditional_sandwich({0.2, 0.3, 0.1}, 3, 3);
    CHECK(b2.upper == Approx(1.0).margin(1e-15));
    CHECK(b2.lower <= b2.upper);

    CHECK_THROWS_AS(conditional_sandwich({0.6, 0.5, 0.1}, 4, 3), InvalidMassError);
    CHECK_THROWS_AS(conditional_sandwich({0.1, 0.1}, 1, 2), DomainError);
}

TEST_CASE("sandwich bounds hold on exhaustive enumeration", "[dependence][slow]") {
    struct Config {
        std::uint32_t a;
        std::size_t ell;
    };
    for (const Config cfg : {Config{2, 1}, Config{2, 2}, Config{3, 1}, Config{3, 2}}) {
        const double p = std::pow(static_cast<double>(cfg.a), -static_cast<double>(cfg.ell));
        const std::size_t keys = static_cast<std::size_t>(std::lround(1.0 / p));
        const std::size_t max_m = std::min<std::size_t>(4, keys);
        for (std::size_t m = 2; m <= max_m; ++m) {
            if ((m - 1) * p >= 1.0) continue;
            const std::vector<double> probs(m, p);
            for (std::uint64_t s = m; s <= 8; ++s) {
                const std::size_t len = 8;
                const auto oracle = SandwichOracle::build(probs, m, s, len);
                const auto bound = conditional_sandwich(probs, s, m);
                for (const auto& [a, cell] : oracle.mass) {
                    if (cell.first <= 0.0) continue;
                    const double cond = cell.second / cell.first;
                    CAPTURE(cfg.a, cfg.ell, m, s, a, cond);
                    REQUIRE(cond >= bound.lower - 1e-9);
                    REQUIRE(cond <= bound.upper + 1e-9);
                }
            }
        }
    }
}

TEST_CASE("pair conditional pmf values and normalization", "[dependence]") {
    // p = 0.25, x = 3, y = 1: (p/(1-p)) ((1-2p)/(1-p))^0 = 1/3
    CHECK(pair_conditional_pmf(0.25, 3, 1) == Approx(1.0 / 3.0).margin(1e-12));

    CHECK_THROWS_AS(pair_conditional_pmf(0.25, 4, 4), DomainError);
    CHECK_THROWS_AS(pair_conditional_pmf(0.75, 2, 1), DomainError);

    const double p = 1.0 / 16.0;
    for (std::uint64_t x : {std::uint64_t{1}, std::uint64_t{2}, std::uint64_t{5}}) {
        double sum = 0.0;
        for (std::uint64_t y = 1; y <= 3000; ++y) {
            if (y == x) continue;
            sum += pair_conditional_pmf(p, x, y);
        }
        // tail beyond 3000 is below (1-p)^(3000-x)/p < 1e-80
        CHECK(sum == Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("pair pmf matches the modified construction", "[dependence][slow]") {
    // A = 4, ell = 1, k = 2: p = 1/4.
    const double p = 0.25;
    const auto model = ProcessModel::equidistributed(4);
    const std::size_t n = 100000;
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::size_t> counts;
    for (std::size_t i = 0; i < n; ++i) {
        const auto seq = gen_iid(model, 2 + 400, derive_seed(700, i));
        const auto blocks = blockify(seq, 1);
        const auto m = modified_return_times(blocks, 2, blocks.block_count(), derive_seed(701, i));
        REQUIRE(m.all_uncensored());
        counts[{m.at(1).value, m.at(2).value}]++;
    }
    const std::vector<std::pair<std::uint64_t, std::uint64_t>> cells = {
        {1, 2}, {2, 1}, {1, 3}, {3, 1}, {2, 4}};
    for (const auto& cell : cells) {
        const auto [x, y] = cell;
        const double joint =
            p * std::pow(1.0 - p, static_cast<double>(x) - 1.0) * pair_conditional_pmf(p, x, y);
        const double emp = static_cast<double>(counts[cell]) / static_cast<double>(n);
        const double se = std::sqrt(joint * (1.0 - joint) / static_cast<double>(n));
        CAPTURE(x, y, emp, joint);
        CHECK(std::fabs(emp - joint) <= 3.0 * se);
    }
}

TEST_CASE("exact pair log covariance oracle", "[dependence]") {
    // frozen oracle values
    CHECK(exact_pair_log_covariance(0.00390625, 1e-9) ==
          Approx(-0.00510307662907).margin(1e-8));
    CHECK(exact_pair_log_covariance(0.0009765625, 1e-9) ==
          Approx(-0.00132453107743).margin(1e-8));
    CHECK(exact_pair_log_covariance(0.000244140625, 1e-9) ==
          Approx(-0.000335891087481).margin(1e-8));

    for (int e = 4; e <= 12; e += 2) {
        const double p = std::ldexp(1.0, -e);
        const double cov = exact_pair_log_covariance(p, 1e-9);
        CAPTURE(e, cov);
        CHECK(cov <= 0.0);
        CHECK(cov >= p * std::log(p));
        if (e >= 8) {
            const double heuristic = p * std::log(p) / 4.0;
            CHECK(std::fabs(cov) <= 3.0 * std::fabs(heuristic));
            CHECK(std::fabs(cov) >= std::fabs(heuristic) / 3.0);
        }
    }
}

TEST_CASE("ordered spacings sampler", "[dependence][slow]") {
    // k = 1 reduces to a plain geometric
    {
        const double p = 0.2;
        std::vector<std::uint64_t> counts(21, 0);
        const std::size_t n = 100000;
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = ordered_spacings_sample(1, p, derive_seed(510, i));
            counts[std::min<std::uint64_t>(r[0], 21) - 1]++;
        }
        CHECK(testutil::geometric_chi_square(counts, p, n) < 37.566);
    }

    // values are pairwise distinct, always
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const auto r = ordered_spacings_sample(6, 0.02, derive_seed(515, i));
        for (std::size_t a = 0; a < r.size(); ++a)
            for (std::size_t b = a + 1; b < r.size(); ++b) REQUIRE(r[a] != r[b]);
    }

    CHECK_THROWS_AS(ordered_spacings_sample(10, 0.2, 1), DomainError);  // k p >= 1
}

TEST_CASE("spacings sampler matches the exact pair law in total variation",
          "[dependence][slow]") {
    // k = 2 over a 4-letter alphabet: p = 1/4. Exact joint law of (R_1,R_2):
    // P(x,y) = p^2 (1-2p)^(min(x,y)-1) (1-p)^(|x-y|-1), x != y.
    const double p = 0.25;
    const std::size_t n = 1000000;
    std::map<std::pair<std::uint64_t, std::uint64_t>, double> emp;
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = ordered_spacings_sample(2, p, derive_seed(900, i));
        emp[{r[0], r[1]}] += 1.0 / static_cast<double>(n);
    }
    double tv = 0.0;
    double covered = 0.0;
    for (std::uint64_t x = 1; x <= 200; ++x) {
        for (std::uint64_t y = 1; y <= 200; ++y) {
            if (x == y) continue;
            const std::uint64_t mn = std::min(x, y);
            const std::uint64_t d = x > y ? x - y : y - x;
            const double q = p * p * std::pow(1.0 - 2.0 * p, static_cast<double>(mn - 1)) *
                             std::pow(1.0 - p, static_cast<double>(d - 1));
            covered += q;
            const auto it = emp.find({x, y});
            tv += std::fabs((it == emp.end() ? 0.0 : it->second) - q);
        }
    }
    tv = 0.5 * (tv + (1.0 - covered));
    CHECK(tv <= 0.01);
}

TEST_CASE("negative association of the monotone library", "[dependence][slow]") {
    // A = 2, ell = 3 source: per-block probability 1/8; k = 4.
    const double p = 0.125;
    const std::size_t n = 100000;
    std::vector<std::vector<std::uint64_t>> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        rows.push_back(ordered_spacings_sample(4, p, derive_seed(910, i)));

    using K = MonotoneSpec::Kind;
    const double t = 1.0 / p;
    const std::vector<std::pair<MonotoneSpec, MonotoneSpec>> library = {
        {{K::CoordinateSum, {0}, 0.0}, {K::CoordinateSum, {1}, 0.0}},
        {{K::CoordinateMax, {0, 1}, 0.0}, {K::IndicatorMaxExceeds, {2}, t}},
        {{K::CoordinateSum, {0, 1}, 0.0}, {K::CoordinateSum, {2, 3}, 0.0}},
        {{K::CoordinateMax, {0}, 0.0}, {K::CoordinateMax, {3}, 0.0}},
        {{K::IndicatorMaxExceeds, {0}, t}, {K::IndicatorMaxExceeds, {3}, t}},
    };
    for (std::size_t i = 0; i < library.size(); ++i) {
        const auto res = na_empirical_check(rows, library[i].first, library[i].second);
        CAPTURE(i, res.covariance, res.std_error);
        CHECK(res.covariance <= 3.0 * res.std_error);
    }

    // independence control: independent geometric columns straddle zero
    Rng rng(920);
    std::vector<std::vector<std::uint64_t>> indep(n, std::vector<std::uint64_t>(2));
    for (auto& row : indep) {
        row[0] = rng.geometric(p);
        row[1] = rng.geometric(p);
    }
    const auto res = na_empirical_check(indep, MonotoneSpec{K::CoordinateSum, {0}, 0.0},
                                        MonotoneSpec{K::CoordinateSum, {1}, 0.0});
    CHECK(std::fabs(res.covariance) <= 3.0 * res.std_error);

    CHECK_THROWS_AS(na_empirical_check(rows, MonotoneSpec{K::CoordinateSum, {0}, 0.0},
                                       MonotoneSpec{K::CoordinateSum, {0}, 0.0}),
                    DomainError);
}
