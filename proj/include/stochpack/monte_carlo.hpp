#ifndef STOCHPACK_MONTE_CARLO_HPP
#define STOCHPACK_MONTE_CARLO_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "stochpack/capacity.hpp"
#include "stochpack/online.hpp"
#include "stochpack/random.hpp"

namespace stochpack {

struct ViolationEstimate {
    std::vector<double> per_machine_rate;
    double aggregate_rate = 0.0;  // mean over machines (equal sample counts)
    long long samples = 0;
    std::uint64_t seed = 0;
};

/// Realized violation probability of a packed assignment: for each machine,
/// draw joint usage realizations (independent across jobs and machines) and
/// count those whose total exceeds capacity. Deterministic given the seed;
/// machines use derived sub-seeds so they can be evaluated in any order.
inline ViolationEstimate estimate_violations(const Assignment& a, std::span<const Job> jobs,
                                             const ConstraintSpec& spec, long long samples,
                                             std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("estimate_violations: samples must be >= 1");
    std::unordered_map<long long, const Job*> by_id;
    by_id.reserve(jobs.size());
    for (const Job& j : jobs) by_id.emplace(j.id, &j);

    ViolationEstimate est;
    est.samples = samples;
    est.seed = seed;
    est.per_machine_rate.reserve(a.machines.size());
    double total = 0.0;
    for (const Machine& m : a.machines) {
        std::vector<const Job*> members;
        members.reserve(m.jobs.size());
        for (long long id : m.jobs) members.push_back(by_id.at(id));
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(m.id)}));
        long long violations = 0;
        for (long long s = 0; s < samples; ++s) {
            double usage = 0.0;
            for (const Job* j : members) usage += sample_usage(*j, rng);
            if (usage > spec.capacity) ++violations;
        }
        const double rate = static_cast<double>(violations) / static_cast<double>(samples);
        est.per_machine_rate.push_back(rate);
        total += rate;
    }
    est.aggregate_rate = a.machines.empty() ? 0.0 : total / static_cast<double>(a.machines.size());
    return est;
}

}  // namespace stochpack

#endif
