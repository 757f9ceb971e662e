#include <catch2/catch.hpp>

#include "test_helpers.hpp"

using namespace rtstat;

namespace {

/// Independent series oracle: plain double loop, no incremental-log tricks,
/// summed until the geometric factor alone is negligible.
double naive_log_moment(double p, int order, std::uint64_t terms) {
    long double acc = 0.0L;
    long double qpow = 1.0L;
    const long double q = 1.0L - static_cast<long double>(p);
    for (std::uint64_t r = 1; r <= terms; ++r) {
        long double w = std::log(static_cast<long double>(r));
        long double ww = 1.0L;
        for (int i = 0; i < order; ++i) ww *= w;
        acc += static_cast<long double>(p) * qpow * ww;
        qpow *= q;
    }
    return static_cast<double>(acc);
}

}  // namespace

TEST_CASE("exact log-moments match an independent series oracle", "[moments]") {
    for (double p : {0.5, 0.25, 0.0625}) {
        for (int order : {1, 2, 3}) {
            const double got = exact_log_moment(GeomParam(p), order, 1e-12);
            const double want = naive_log_moment(p, order, 4000);
            CHECK(got == Approx(want).margin(1e-10));
        }
    }
}

TEST_CASE("frozen log-moment values", "[moments]") {
    CHECK(exact_log_moment(GeomParam(0.5), 1, 1e-11) == Approx(0.507833922862).margin(2e-9));
    CHECK(exact_log_moment(GeomParam(0.0009765625), 1, 1e-11) ==
          Approx(6.357770733397).margin(2e-9));
    CHECK(exact_log_variance(GeomParam(0.5), 1e-11) == Approx(0.331401011177).margin(2e-9));
    CHECK(exact_log_variance(GeomParam(0.0009765625), 1e-11) ==
          Approx(1.612619837037).margin(2e-9));
}

TEST_CASE("asymptotic mean closed forms", "[moments]") {
    CHECK(mu_asymptotic(GeomParam(1.0 / std::exp(1.0))) ==
          Approx(-kEulerGamma + 1.0).margin(1e-12));
    // -gamma + 10 ln 2
    CHECK(mu_asymptotic(GeomParam(0.0009765625)) == Approx(6.3542561407).margin(1e-9));
}

TEST_CASE("gap to the asymptotic moments shrinks like p log p", "[moments]") {
    // The first-order gap is -(p ln p)/2 + O(p); these envelopes were fixed
    // by sweeping the exact series over p = 2^-4 .. 2^-20.
    for (int e = 4; e <= 20; ++e) {
        const double p = std::ldexp(1.0, -e);
        const double lp = std::fabs(std::log(p));
        const double mu_gap = exact_log_moment(GeomParam(p), 1, 1e-12) - mu_asymptotic(GeomParam(p));
        CAPTURE(e, mu_gap / p);
        CHECK(mu_gap > 0.0);
        CHECK(mu_gap <= p * (0.5 * lp + 0.6));

        const double var_gap = exact_log_variance(GeomParam(p), 1e-12) - kPiSqOver6;
        CAPTURE(var_gap / (p * lp));
        CHECK(var_gap < 0.0);
        CHECK(std::fabs(var_gap) <= p * lp * (0.5 * lp + 1.9));
    }
    // At p = 2^-13 the variance is already within 0.01 of pi^2/6.
    CHECK(exact_log_variance(GeomParam(std::ldexp(1.0, -13)), 1e-11) ==
          Approx(kPiSqOver6).margin(0.01));
}

TEST_CASE("third absolute central moment stays below 9", "[moments]") {
    for (int e = 1; e <= 20; ++e) {
        const double p = std::ldexp(1.0, -e);
        const double m3 = third_abs_central_moment(GeomParam(p), 1e-6);
        CAPTURE(e, m3);
        CHECK(m3 > 0.0);
        CHECK(m3 <= 9.0);
    }
    CHECK(third_abs_central_moment(GeomParam(0.5), 1e-9) == Approx(0.27107054).margin(1e-6));
}

TEST_CASE("third absolute central moment agrees with Monte Carlo", "[moments][slow]") {
    const double p = 0.0009765625;  // 2^-10
    const double mu = exact_log_moment(GeomParam(p), 1, 1e-11);
    Rng rng(1234);
    const std::size_t n = 1000000;
    double acc = 0.0, acc2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(static_cast<double>(rng.geometric(p)));
        const double v = std::fabs(x - mu);
        const double w = v * v * v;
        acc += w;
        acc2 += w * w;
    }
    const double mc_mean = acc / static_cast<double>(n);
    const double mc_se =
        std::sqrt((acc2 / static_cast<double>(n) - mc_mean * mc_mean) / static_cast<double>(n));
    const double exact = third_abs_central_moment(GeomParam(p), 1e-8);
    CHECK(std::fabs(exact - mc_mean) <= 3.0 * mc_se);
}

TEST_CASE("inverse moments", "[moments]") {
    // order 1 closed form at p = 1/2 is ln 2
    CHECK(inverse_moment(GeomParam(0.5), 1) == Approx(kLn2).margin(1e-12));

    // closed form vs direct series across p
    for (double p : {0.5, 0.25, 0.03125, 0.001}) {
        double series = 0.0, qpow = 1.0;
        for (std::uint64_t r = 1; r <= 200000; ++r) {
            series += p * qpow / static_cast<double>(r);
            qpow *= 1.0 - p;
        }
        CHECK(inverse_moment(GeomParam(p), 1) == Approx(series).margin(1e-12));
    }

    // order 2 via the dilogarithm identity p Li2(1-p) / (1-p)
    const double direct = inverse_moment(GeomParam(0.5), 2, 1e-13);
    CHECK(direct == Approx(0.582240526465).margin(1e-10));
    CHECK(direct == Approx(0.5 * dilog(0.5, 1e-14) / 0.5).margin(1e-10));
}

TEST_CASE("dilogarithm special value", "[moments]") {
    // Li2(1/2) = pi^2/12 - (ln 2)^2 / 2
    CHECK(dilog(0.5, 1e-14) ==
          Approx(kPiSqOver6 / 2.0 - 0.5 * kLn2 * kLn2).margin(1e-12));
    CHECK(dilog(0.0) == 0.0);
    CHECK_THROWS_AS(dilog(1.0), DomainError);
}

TEST_CASE("moment report carries both views", "[moments]") {
    const auto rep = moment_report(GeomParam(0.0009765625), 1e-10);
    CHECK(rep.mu_asym == Approx(6.3542561407).margin(1e-9));
    CHECK(rep.mu_exact > rep.mu_asym);
    CHECK(rep.sigma2_asym == Approx(kPiSqOver6));
    CHECK(rep.sigma2_exact >= 0.0);
    CHECK(rep.third_central_abs <= 9.0);
    CHECK(rep.tail_truncation_error_bound <= 1e-10);
}

TEST_CASE("Euler-Maclaurin gap stays under its bound", "[moments]") {
    const double p = 0.1;
    const double c = -std::log1p(-p);

    SECTION("exponential times log") {
        SmoothFunction f;
        f.value = [c](double x) { return std::exp(-c * x) * std::log(x); };
        f.derivative = [c](double x) {
            return std::exp(-c * x) * (1.0 / x - c * std::log(x));
        };
        f.decay_rate = c * 0.9;
        const auto r = euler_maclaurin_gap(f, 1e-9);
        CHECK(r.gap <= r.bound + 1e-7);
    }

    SECTION("plain exponential has the closed-form bound") {
        SmoothFunction f;
        f.value = [](double x) { return std::exp(-x); };
        f.derivative = [](double x) { return -std::exp(-x); };
        f.decay_rate = 1.0;
        const auto r = euler_maclaurin_gap(f, 1e-10);
        // sum = 1/(e-1), integral = 1/e, bound = e^-1
        CHECK(r.series_sum == Approx(1.0 / (std::exp(1.0) - 1.0)).margin(1e-8));
        CHECK(r.integral == Approx(std::exp(-1.0)).margin(1e-8));
        CHECK(r.gap <= r.bound + 1e-9);
        CHECK(r.bound == Approx(std::exp(-1.0)).margin(1e-6));
    }

    SECTION("exponential times squared log") {
        SmoothFunction f;
        f.value = [c](double x) {
            const double l = std::log(x);
            return std::exp(-c * x) * l * l;
        };
        f.derivative = [c](double x) {
            const double l = std::log(x);
            return std::exp(-c * x) * (2.0 * l / x - c * l * l);
        };
        f.decay_rate = c * 0.9;
        const auto r = euler_maclaurin_gap(f, 1e-9);
        CHECK(r.gap <= r.bound + 1e-7);
    }

    SECTION("a non-decaying certificate is rejected") {
        SmoothFunction f;
        f.value = [](double x) { return 1.0 / x; };
        f.derivative = [](double x) { return -1.0 / (x * x); };
        f.decay_rate = 0.0;
        CHECK_THROWS_AS(euler_maclaurin_gap(f, 1e-9), NonIntegrableError);
    }
}

TEST_CASE("series validation", "[moments]") {
    CHECK_THROWS_AS(GeomParam(0.0), DomainError);
    CHECK_THROWS_AS(GeomParam(1.0), DomainError);
    CHECK_THROWS_AS(exact_log_moment(GeomParam(0.5), 4, 1e-9), DomainError);
    CHECK_THROWS_AS(exact_log_moment(GeomParam(0.5), 1, 0.0), DomainError);
    CHECK_THROWS_AS(third_abs_central_moment(GeomParam(0.75), 1e-9), DomainError);
}
