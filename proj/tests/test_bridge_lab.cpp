#include <doctest.h>

#include <cmath>
#include <random>

#include "hgf/bridge_lab.hpp"
#include "hgf/error.hpp"

using namespace hgf;

TEST_CASE("ballot value")
{
    CHECK(ballot_exact(2) == Rational{1, 2});
    CHECK(ballot_exact(5) == Rational{1, 5});
    CHECK(ballot_exact(1) == Rational{1, 1});
    CHECK(ballot_exact(5).value() == 0.2);
    CHECK_THROWS_AS(ballot_exact(0), ValidationError);
}

TEST_CASE("bridge construction")
{
    std::mt19937_64 gen(1);
    std::normal_distribution<double> z;
    for (int n : {2, 3, 10, 257}) {
        std::vector<double> inc(n);
        for (auto& d : inc) d = 1e3 * z(gen);
        const BridgePath b(inc);
        CHECK(b.values().size() == static_cast<std::size_t>(n) + 1);
        CHECK(b(0) == 0.0);
        CHECK(b(n) == 0.0);
    }
    const BridgePath b({1.0, -2.0, 0.5});
    // Total -0.5: B(1) = 1 + 1/6, B(2) = -1 + 1/3.
    CHECK(b(1) == doctest::Approx(7.0 / 6.0));
    CHECK(b(2) == doctest::Approx(-2.0 / 3.0));
    CHECK(b.interior_max() == doctest::Approx(7.0 / 6.0));
    CHECK(b.rotated(1).increments() == std::vector<double>{-2.0, 0.5, 1.0});
    CHECK_THROWS_AS(BridgePath({1.0}), ValidationError);
    CHECK_THROWS_AS(BridgePath({1.0, NAN}), ValidationError);
}

TEST_CASE("rotation oracle")
{
    const std::vector<double> example{1.0, -2.0, 0.5};
    const auto census = rotation_census(example);
    CHECK(census.qualifying == std::vector<std::size_t>{1});
    CHECK(rotation_oracle(example) == 1);
    // Rotations 0 and 2 break B(1) <= 0.
    CHECK(BridgePath(example).rotated(0)(1) > 0.0);
    CHECK(BridgePath(example).rotated(2)(1) > 0.0);

    const std::vector<double> falling{-3.0, 0.9, 1.0, 1.1};
    CHECK(rotation_oracle(falling) == 0);

    CHECK_THROWS_AS(rotation_oracle(std::vector<double>{1.0, -1.0, 1.0, -1.0}), TieError);

    std::mt19937_64 gen(7);
    std::normal_distribution<double> z;
    for (int t = 0; t < 10000; ++t) {
        std::vector<double> inc(7);
        for (auto& d : inc) d = z(gen);
        const auto c = rotation_census(inc);
        REQUIRE(c.qualifying.size() == 1);
        CHECK(c.qualifying.front() == c.argmax);
    }
}

TEST_CASE("Monte Carlo bridge probabilities")
{
    for (std::size_t n : {2u, 3u, 7u}) {
        const auto e = bridge_below_mc(n, 0.0, 200000, 5);
        CHECK(std::abs(e.value - 1.0 / n) < 3.0 * e.std_error);
    }
    CHECK(bridge_below_mc(5, 1e6, 1000, 1).value == 1.0);
    CHECK(bridge_below_mc(5, -1e6, 1000, 1).value == 0.0);
    CHECK(bridge_below_mc(9, 0.0, 70000, 3, 1) == bridge_below_mc(9, 0.0, 70000, 3, 8));

    SUBCASE("nondecreasing in eps under common random numbers")
    {
        double previous = 0.0;
        for (double eps : {-0.5, -0.1, 0.0, 0.05, 0.3, 1.0}) {
            const double v = bridge_below_mc(12, eps, 20000, 4).value;
            CHECK(v >= previous);
            previous = v;
        }
    }
}

TEST_CASE("perturbation check")
{
    const std::vector<std::size_t> grid{2, 4, 8};
    const auto report = perturbation_check(grid, 0.1, 100000, 11);
    REQUIRE(report.points.size() == 3);
    for (const auto& pt : report.points) {
        CHECK(pt.difference.value == doctest::Approx(pt.below_eps.value - pt.below_zero.value).epsilon(1e-12));
        CHECK(pt.scaled.value == doctest::Approx(pt.difference.value * pt.n / 0.1));
        CHECK(std::isfinite(pt.scaled.value));
    }
    CHECK(report.c_fit < perturbation_default_cap);
    CHECK(report.violations.empty());

    SUBCASE("sign of eps at n = 2")
    {
        // B(1) = (d0 - d1) / 2 is symmetric, so both bands have the same mass.
        const std::vector<std::size_t> two{2};
        const auto plus = perturbation_check(two, 0.1, 400000, 21).points.front().difference;
        const auto minus = perturbation_check(two, -0.1, 400000, 22).points.front().difference;
        CHECK(std::abs(plus.value - minus.value) < 3.0 * std::hypot(plus.std_error, minus.std_error));
    }
    SUBCASE("single replicate")
    {
        const std::vector<std::size_t> one{4};
        const auto pt = perturbation_check(one, 0.1, 1, 3).points.front();
        CHECK(pt.degenerate);
        CHECK((pt.below_zero.value == 0.0 || pt.below_zero.value == 1.0));
    }
    CHECK_THROWS_AS(perturbation_check(grid, 0.0, 10, 1), ValidationError);
    CHECK_THROWS_AS(perturbation_check(grid, 1.5, 10, 1), ValidationError);
    const std::vector<std::size_t> bad{1, 4};
    CHECK_THROWS_AS(perturbation_check(bad, 0.1, 10, 1), ValidationError);
}

TEST_CASE("bridge maxima are rotation invariant in law")
{
    const auto base = bridge_maxima(9, 100000, 17, 0);
    const auto turned = bridge_maxima(9, 100000, 18, 4);
    // Two-sample KS critical value at level 0.001: 1.95 sqrt(2/n).
    CHECK(ks_two_sample(base, turned) < 1.95 * std::sqrt(2.0 / 100000));
    CHECK(bridge_maxima(9, 1000, 17, 0, 1) == bridge_maxima(9, 1000, 17, 0, 4));
}
