#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "stochpack/normal.hpp"
#include "helpers.hpp"

using namespace stochpack;

TEST_CASE("inverse normal CDF matches tabulated quantiles") {
    // Reference values from standard normal tables (15+ digits).
    struct Pair {
        double p;
        double q;
    };
    const Pair table[] = {
        {0.5, 0.0},
        {0.841344746068543, 1.0},
        {0.975, 1.959963984540054},
        {0.99, 2.3263478740408408},
        {0.992, 2.4089155458154},
        {0.999, 3.090232306167813},
        {0.99999, 4.264890793922825},
        {1e-4, -3.719016485455709},
        {1e-6, -4.753424308822899},
    };
    for (const auto& [p, q] : table) {
        REQUIRE(std::abs(inverse_normal_cdf(p) - q) < 1e-8);
    }
}

TEST_CASE("inverse normal CDF round-trips through the CDF") {
    for (double p = 0.0005; p < 1.0; p += 0.0007) {
        const double x = inverse_normal_cdf(p);
        REQUIRE(std::abs(normal_cdf(x) - p) < 1e-12);
    }
}

TEST_CASE("inverse normal CDF rejects degenerate arguments") {
    REQUIRE_THROWS_AS(inverse_normal_cdf(0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(inverse_normal_cdf(1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(inverse_normal_cdf(-0.2), std::invalid_argument);
}

TEST_CASE("truncated normal moments agree with a rejection-sampling oracle") {
    std::mt19937_64 rng(20240811);
    // Grid keeps the truncation interval within ~1.2 sd of the location so
    // the rejection oracle stays cheap; tail cases are checked separately.
    const double locs[] = {0.1, 0.3, 0.4, 0.5};
    const double scales[] = {0.3, 0.5};
    const double los[] = {0.3, 0.45};
    const double his[] = {0.7, 0.9};
    for (double loc : locs) {
        for (double scale : scales) {
            for (double lo : los) {
                for (double hi : his) {
                    const Moments m = truncated_normal_moments(loc, scale, lo, hi);
                    const auto st = oracles::sample_stats(
                        [&] { return oracles::rejection_truncated_normal(rng, loc, scale, lo, hi); },
                        1000000);
                    REQUIRE(std::abs(m.mean - st.mean) < 4.0 * st.mean_se);
                    REQUIRE(std::abs(m.variance - st.variance) < 4.0 * st.variance_se);
                }
            }
        }
    }
}

TEST_CASE("truncated normal moments hold when the location sits in the tail") {
    std::mt19937_64 rng(515151);
    // ~1% acceptance: the interval starts 2.3 sd above the location.
    const double loc = 0.1, scale = 0.15, lo = 0.45, hi = 0.9;
    const Moments m = truncated_normal_moments(loc, scale, lo, hi);
    const auto st = oracles::sample_stats(
        [&] { return oracles::rejection_truncated_normal(rng, loc, scale, lo, hi); }, 200000);
    REQUIRE(std::abs(m.mean - st.mean) < 4.0 * st.mean_se);
    REQUIRE(std::abs(m.variance - st.variance) < 4.0 * st.variance_se);
}

TEST_CASE("truncated normal handles intervals far into the tail") {
    // Interval carries ~no mass: collapses towards the near endpoint.
    const Moments m = truncated_normal_moments(0.0, 0.01, 5.0, 6.0);
    REQUIRE(m.mean >= 5.0);
    REQUIRE(m.mean <= 6.0);
    REQUIRE(m.variance >= 0.0);

    // Moderate tail truncation stays accurate.
    const Moments t = truncated_normal_moments(0.1, 0.1, 0.6, 1.0);
    REQUIRE(t.mean > 0.6);
    REQUIRE(t.mean < 0.66);  // mass hugs the lower endpoint
}
