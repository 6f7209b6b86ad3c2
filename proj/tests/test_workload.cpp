#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "stochpack/workload.hpp"
#include "helpers.hpp"

using namespace stochpack;

namespace {

UsageDistribution two_point(double lower, double upper, double loc) {
    UsageDistribution u;
    u.kind = UsageKind::TwoPoint;
    u.lower = lower;
    u.upper = upper;
    u.loc = loc;
    return u;
}

UsageDistribution trunc_gauss(double lower, double upper, double loc, double scale) {
    UsageDistribution u;
    u.kind = UsageKind::TruncatedGaussian;
    u.lower = lower;
    u.upper = upper;
    u.loc = loc;
    u.scale = scale;
    return u;
}

WorkloadSpec reference_spec(UsageKind kind, std::uint64_t seed, long long n) {
    WorkloadSpec w;
    w.job_count = n;
    w.size_mix = production_size_mix();
    w.kind = kind;
    w.seed = seed;
    return w;
}

}  // namespace

TEST_CASE("two-point moments") {
    SECTION("symmetric case") {
        const Moments m = analytic_moments(two_point(0.3, 1.0, 0.65));
        REQUIRE(m.mean == Catch::Approx(0.65).margin(1e-15));
        REQUIRE(m.variance == Catch::Approx(0.1225).margin(1e-15));
    }
    SECTION("degenerate at the lower point") {
        const Moments m = analytic_moments(two_point(0.3, 1.0, 0.3));
        REQUIRE(m.mean == Catch::Approx(0.3).margin(1e-15));
        REQUIRE(m.variance == 0.0);
    }
    SECTION("matches the probability-weighted moments on a grid") {
        for (double l = 0.0; l <= 0.6; l += 0.15) {
            for (double u = l + 0.1; u <= 1.0; u += 0.15) {
                for (double t = 0.0; t <= 1.0; t += 0.125) {
                    const double loc = l + t * (u - l);
                    const Moments m = analytic_moments(two_point(l, u, loc));
                    const double p = (loc - l) / (u - l);
                    const double mean = p * u + (1.0 - p) * l;
                    const double var = p * u * u + (1.0 - p) * l * l - mean * mean;
                    REQUIRE(std::abs(m.mean - mean) < 1e-12);
                    REQUIRE(std::abs(m.variance - var) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("truncated Gaussian moments agree with Monte Carlo across a grid") {
    std::mt19937_64 rng(7);
    // Includes locations outside the truncation interval, which the workload
    // generator produces routinely.
    const double params[][4] = {
        {0.3, 0.9, 0.4, 0.3}, {0.3, 1.0, 0.1, 0.2}, {0.45, 0.8, 0.5, 0.45}, {0.5, 0.7, 0.2, 0.3}};
    for (const auto& p : params) {
        const Moments m = truncated_normal_moments(p[2], p[3], p[0], p[1]);
        const auto st = oracles::sample_stats(
            [&] { return oracles::rejection_truncated_normal(rng, p[2], p[3], p[0], p[1]); },
            1000000);
        REQUIRE(std::abs(m.mean - st.mean) < 4.0 * st.mean_se);
        REQUIRE(std::abs(m.variance - st.variance) < 4.0 * st.variance_se);
    }
}

TEST_CASE("usage distribution validation") {
    REQUIRE_THROWS_AS(analytic_moments(two_point(0.7, 0.3, 0.5)), std::invalid_argument);
    REQUIRE_THROWS_AS(analytic_moments(two_point(0.3, 0.7, 0.8)), std::invalid_argument);
    REQUIRE_THROWS_AS(analytic_moments(trunc_gauss(0.3, 0.7, 0.5, 0.0)), std::invalid_argument);
    REQUIRE_NOTHROW(analytic_moments(trunc_gauss(0.3, 0.7, 0.9, 0.2)));  // loc outside is fine
}

TEST_CASE("workload spec validation") {
    WorkloadSpec w = reference_spec(UsageKind::TwoPoint, 1, 10);
    w.size_mix = {{1, 0.6}, {2, 0.3}};  // sums to 0.9
    REQUIRE_THROWS_WITH(generate_workload(w), Catch::Matchers::ContainsSubstring("sum to 1"));
    w = reference_spec(UsageKind::TwoPoint, 1, 10);
    w.lower_range = {0.6, 0.3};
    REQUIRE_THROWS_WITH(generate_workload(w), Catch::Matchers::ContainsSubstring("interval"));
    w = reference_spec(UsageKind::TwoPoint, 1, -1);
    REQUIRE_THROWS_AS(generate_workload(w), std::invalid_argument);
}

TEST_CASE("make_job scales moments to absolute units") {
    const Job job = make_job(3, 8.0, two_point(0.3, 1.0, 0.65));
    REQUIRE(job.mean == Catch::Approx(8.0 * 0.65));
    REQUIRE(job.variance == Catch::Approx(64.0 * 0.1225));
    REQUIRE(job.range_sq == Catch::Approx(64.0 * 0.49));
    REQUIRE(job.upper_bound() == Catch::Approx(8.0));
    REQUIRE(job.lower_bound() == Catch::Approx(2.4));
    REQUIRE(job.lower_bound() <= job.mean);
    REQUIRE(job.mean <= job.upper_bound());
}

TEST_CASE("generate_workload basics") {
    SECTION("empty when job count is zero") {
        WorkloadSpec w = reference_spec(UsageKind::TwoPoint, 1, 0);
        REQUIRE(generate_workload(w).empty());
    }
    SECTION("same seed twice gives identical jobs") {
        WorkloadSpec w = reference_spec(UsageKind::TruncatedGaussian, 99, 200);
        const auto a = generate_workload(w);
        const auto b = generate_workload(w);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            REQUIRE(a[i].id == b[i].id);
            REQUIRE(a[i].requested_size == b[i].requested_size);
            REQUIRE(a[i].mean == b[i].mean);
            REQUIRE(a[i].variance == b[i].variance);
            REQUIRE(a[i].range_sq == b[i].range_sq);
        }
    }
    SECTION("different seeds differ") {
        WorkloadSpec w1 = reference_spec(UsageKind::TwoPoint, 5, 50);
        WorkloadSpec w2 = reference_spec(UsageKind::TwoPoint, 6, 50);
        const auto a = generate_workload(w1);
        const auto b = generate_workload(w2);
        bool any_diff = false;
        for (std::size_t i = 0; i < a.size(); ++i) any_diff = any_diff || a[i].mean != b[i].mean;
        REQUIRE(any_diff);
    }
}

TEST_CASE("generated size mix tracks the production distribution") {
    WorkloadSpec w = reference_spec(UsageKind::TwoPoint, 2029, 1000);
    const auto jobs = generate_workload(w);
    std::map<double, int> hist;
    for (const Job& j : jobs) hist[j.requested_size]++;
    const std::map<double, double> expected{{1, 0.363}, {2, 0.138}, {4, 0.213},
                                            {8, 0.231}, {16, 0.035}, {32, 0.019}};
    for (const auto& [cores, share] : expected) {
        const double observed = hist[cores] / 1000.0;
        REQUIRE(std::abs(observed - share) < 0.03);
    }
}

TEST_CASE("generated jobs respect their parameter ranges and invariants") {
    for (UsageKind kind : {UsageKind::TwoPoint, UsageKind::TruncatedGaussian}) {
        WorkloadSpec w = reference_spec(kind, 11, 300);
        for (const Job& j : generate_workload(w)) {
            REQUIRE(j.usage.lower >= 0.3);
            REQUIRE(j.usage.lower <= 0.6);
            REQUIRE(j.usage.upper >= 0.7);
            REQUIRE(j.usage.upper <= 1.0);
            REQUIRE(j.lower_bound() <= j.mean);
            REQUIRE(j.mean <= j.upper_bound());
            const Moments m = analytic_moments(j.usage);
            REQUIRE(j.mean == Catch::Approx(j.requested_size * m.mean).margin(1e-12));
            REQUIRE(j.variance ==
                    Catch::Approx(j.requested_size * j.requested_size * m.variance).margin(1e-12));
        }
    }
}

TEST_CASE("sample_usage stays within bounds and hits the right support") {
    Rng rng(17);
    SECTION("two-point support") {
        const Job job = make_job(0, 4.0, two_point(0.3, 1.0, 0.65));
        for (int i = 0; i < 2000; ++i) {
            const double x = sample_usage(job, rng);
            REQUIRE((x == Catch::Approx(1.2) || x == Catch::Approx(4.0)));
        }
    }
    SECTION("degenerate two-point always draws the lower point") {
        const Job job = make_job(0, 2.0, two_point(0.3, 1.0, 0.3));
        for (int i = 0; i < 500; ++i) {
            REQUIRE(sample_usage(job, rng) == Catch::Approx(0.6));
        }
    }
    SECTION("truncated Gaussian respects the interval") {
        const Job job = make_job(0, 8.0, trunc_gauss(0.3, 0.9, 0.1, 0.2));
        for (int i = 0; i < 5000; ++i) {
            const double x = sample_usage(job, rng);
            REQUIRE(x >= job.lower_bound());
            REQUIRE(x <= job.upper_bound());
        }
    }
}

TEST_CASE("sample mean converges to the analytic mean") {
    Rng rng(23);
    const Job jobs[] = {make_job(0, 4.0, two_point(0.35, 0.95, 0.6)),
                        make_job(1, 2.0, trunc_gauss(0.3, 0.9, 0.45, 0.25)),
                        make_job(2, 1.0, trunc_gauss(0.4, 0.8, 0.2, 0.15))};
    for (const Job& job : jobs) {
        const long long n = 1000000;
        double sum = 0.0, sumsq = 0.0;
        for (long long i = 0; i < n; ++i) {
            const double x = sample_usage(job, rng);
            sum += x;
            sumsq += x * x;
        }
        const double mean = sum / n;
        const double var = sumsq / n - mean * mean;
        const double se = std::sqrt(var / n);
        REQUIRE(std::abs(mean - job.mean) < 3.0 * se + 1e-9);
    }
}
