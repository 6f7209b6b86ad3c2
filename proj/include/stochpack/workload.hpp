#ifndef STOCHPACK_WORKLOAD_HPP
#define STOCHPACK_WORKLOAD_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochpack/normal.hpp"
#include "stochpack/random.hpp"

namespace stochpack {

enum class UsageKind { TwoPoint, TruncatedGaussian };

inline const char* to_string(UsageKind k) {
    return k == UsageKind::TwoPoint ? "two_point" : "truncated_gaussian";
}

/// Per-job usage model, expressed as a fraction of the requested size.
///
/// `lower`/`upper` bound the realized fraction. For TwoPoint, `loc` is the
/// mean and fixes the probabilities of the two support points; `scale` is
/// ignored. For TruncatedGaussian, (`loc`, `scale`) parameterize the parent
/// normal before truncation to [lower, upper]; `loc` may lie outside the
/// interval.
struct UsageDistribution {
    UsageKind kind = UsageKind::TwoPoint;
    double lower = 0.0;
    double upper = 1.0;
    double loc = 0.5;
    double scale = 0.0;

    void validate() const {
        if (!(0.0 <= lower && lower < upper && upper <= 1.0)) {
            throw std::invalid_argument("UsageDistribution: need 0 <= lower < upper <= 1");
        }
        if (kind == UsageKind::TwoPoint) {
            if (!(lower <= loc && loc <= upper)) {
                throw std::invalid_argument("UsageDistribution: two-point loc must lie in [lower, upper]");
            }
        } else if (!(scale > 0.0)) {
            throw std::invalid_argument("UsageDistribution: truncated Gaussian needs scale > 0");
        }
    }
};

/// Exact mean/variance of a usage distribution, in fractional units.
inline Moments analytic_moments(const UsageDistribution& u) {
    u.validate();
    if (u.kind == UsageKind::TwoPoint) {
        // P(upper) = (loc - lower)/(upper - lower), so the mean is loc itself.
        return {u.loc, (u.upper - u.loc) * (u.loc - u.lower)};
    }
    return truncated_normal_moments(u.loc, u.scale, u.lower, u.upper);
}

/// One schedulable unit. Moments are the analytic moments of `usage`, scaled
/// to absolute units by the requested size (and its square).
struct Job {
    long long id = 0;
    double requested_size = 1.0;  // sellable size in cores; upper bound = requested_size * usage.upper
    UsageDistribution usage;
    double mean = 0.0;      // mu_j, absolute
    double variance = 0.0;  // sigma^2_j, absolute^2
    double range_sq = 0.0;  // (upper_bound - lower_bound)^2, absolute^2

    double upper_bound() const { return requested_size * usage.upper; }
    double lower_bound() const { return requested_size * usage.lower; }
};

inline Job make_job(long long id, double requested_size, const UsageDistribution& usage) {
    if (!(requested_size > 0.0)) {
        throw std::invalid_argument("make_job: requested_size must be positive");
    }
    const Moments m = analytic_moments(usage);
    Job job;
    job.id = id;
    job.requested_size = requested_size;
    job.usage = usage;
    job.mean = requested_size * m.mean;
    job.variance = requested_size * requested_size * m.variance;
    const double range = requested_size * (usage.upper - usage.lower);
    job.range_sq = range * range;
    return job;
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct SizeMixEntry {
    double cores = 1.0;
    double probability = 1.0;
};

struct WorkloadSpec {
    long long job_count = 0;
    std::vector<SizeMixEntry> size_mix;
    Interval lower_range{0.3, 0.6};
    Interval upper_range{0.7, 1.0};
    Interval loc_range{0.1, 0.5};
    Interval scale_range{0.1, 0.5};
    UsageKind kind = UsageKind::TruncatedGaussian;
    std::uint64_t seed = 0;

    void validate() const {
        if (job_count < 0) throw std::invalid_argument("WorkloadSpec: job_count must be >= 0");
        if (size_mix.empty()) throw std::invalid_argument("WorkloadSpec: size_mix must be non-empty");
        double total = 0.0;
        for (const auto& e : size_mix) {
            if (!(e.cores > 0.0) || e.probability < 0.0) {
                throw std::invalid_argument("WorkloadSpec: size_mix entries need cores > 0, probability >= 0");
            }
            total += e.probability;
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw std::invalid_argument("WorkloadSpec: size_mix probabilities must sum to 1");
        }
        for (const Interval& iv : {lower_range, upper_range, loc_range, scale_range}) {
            if (!(iv.lo <= iv.hi)) throw std::invalid_argument("WorkloadSpec: malformed interval");
        }
    }
};

/// VM size mix observed in one production data center. The published shares
/// add up to 99.9%, so they are renormalized to a proper distribution.
inline std::vector<SizeMixEntry> production_size_mix() {
    std::vector<SizeMixEntry> mix{{1, 0.363}, {2, 0.138}, {4, 0.213},
                                  {8, 0.231}, {16, 0.035}, {32, 0.019}};
    double total = 0.0;
    for (const auto& e : mix) total += e.probability;
    for (auto& e : mix) e.probability /= total;
    return mix;
}

/// Generate a synthetic workload. Pure function of the spec: the same spec
/// (including seed) always yields the same job list.
inline std::vector<Job> generate_workload(const WorkloadSpec& spec) {
    spec.validate();
    std::vector<double> cum;
    cum.reserve(spec.size_mix.size());
    double acc = 0.0;
    for (const auto& e : spec.size_mix) {
        acc += e.probability;
        cum.push_back(acc);
    }
    cum.back() = 1.0;

    Rng rng(spec.seed);
    std::vector<Job> jobs;
    jobs.reserve(static_cast<std::size_t>(spec.job_count));
    for (long long i = 0; i < spec.job_count; ++i) {
        const double us = uniform01(rng);
        std::size_t k = 0;
        while (k + 1 < cum.size() && us >= cum[k]) ++k;
        const double cores = spec.size_mix[k].cores;

        // All four parameters are drawn for every job regardless of kind, so
        // the two usage models share bounds for a given seed.
        UsageDistribution u;
        u.kind = spec.kind;
        u.lower = uniform(rng, spec.lower_range.lo, spec.lower_range.hi);
        u.upper = uniform(rng, spec.upper_range.lo, spec.upper_range.hi);
        u.loc = uniform(rng, spec.loc_range.lo, spec.loc_range.hi);
        u.scale = uniform(rng, spec.scale_range.lo, spec.scale_range.hi);
        if (u.kind == UsageKind::TwoPoint) {
            u.loc = std::clamp(u.loc, u.lower, u.upper);
        }
        jobs.push_back(make_job(i, cores, u));
    }
    return jobs;
}

/// Draw one usage realization in absolute units; always lands in
/// [lower_bound, upper_bound].
inline double sample_usage(const Job& job, Rng& rng) {
    const UsageDistribution& u = job.usage;
    if (u.kind == UsageKind::TwoPoint) {
        const double p_upper = (u.loc - u.lower) / (u.upper - u.lower);
        const double frac = uniform01(rng) < p_upper ? u.upper : u.lower;
        return job.requested_size * frac;
    }
    // Inverse-CDF restricted to the truncation interval: one uniform per draw.
    const double alpha = (u.lower - u.loc) / u.scale;
    const double beta = (u.upper - u.loc) / u.scale;
    const double ca = normal_cdf(alpha);
    const double cb = normal_cdf(beta);
    const double p = ca + (cb - ca) * uniform01(rng);
    double frac;
    if (p <= 0.0) {
        frac = u.lower;
    } else if (p >= 1.0) {
        frac = u.upper;
    } else {
        frac = u.loc + u.scale * inverse_normal_cdf(p);
        frac = std::clamp(frac, u.lower, u.upper);
    }
    return job.requested_size * frac;
}

}  // namespace stochpack

#endif
