#ifndef STOCHPACK_ONLINE_HPP
#define STOCHPACK_ONLINE_HPP

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "stochpack/capacity.hpp"
#include "stochpack/workload.hpp"

namespace stochpack {

struct Machine {
    int id = 0;  // purchase order
    LoadSummary load;
    std::vector<long long> jobs;  // job ids in insertion order
};

struct Assignment {
    std::vector<Machine> machines;
    std::unordered_map<long long, int> job_to_machine;

    int machine_count() const { return static_cast<int>(machines.size()); }

    long long job_count() const { return static_cast<long long>(job_to_machine.size()); }
};

namespace detail {

inline void check_packable(const Job& job, const ConstraintSpec& spec) {
    if (job.upper_bound() > spec.capacity) {
        throw std::invalid_argument("job " + std::to_string(job.id) +
                                    " exceeds machine capacity even at its upper bound");
    }
}

// Every insertion keeps the machine feasible; a violation here is a bug in
// the caller's fit check.
inline void place(Assignment& a, int machine_index, const Job& job, const ConstraintSpec& spec) {
    Machine& m = a.machines[static_cast<std::size_t>(machine_index)];
    m.load.add(job, spec);
    m.jobs.push_back(job.id);
    a.job_to_machine.emplace(job.id, m.id);
    if (effective_load(m.load, spec) > spec.capacity) {
        throw std::logic_error("machine " + std::to_string(m.id) + " became infeasible");
    }
}

inline int purchase(Assignment& a) {
    const int id = a.machine_count();
    a.machines.push_back(Machine{id, {}, {}});
    return id;
}

}  // namespace detail

/// First-Fit: place each arriving job on the lowest-id machine that fits;
/// purchase a new machine only when none does.
inline Assignment first_fit(std::span<const Job> jobs, const ConstraintSpec& spec) {
    spec.validate();
    Assignment a;
    for (const Job& job : jobs) {
        detail::check_packable(job, spec);
        int target = -1;
        for (const Machine& m : a.machines) {
            if (fits(m.load, job, spec)) {
                target = m.id;
                break;
            }
        }
        if (target < 0) target = detail::purchase(a);
        detail::place(a, target, job, spec);
    }
    return a;
}

/// Best-Fit: among fitting machines pick the one with the least remaining
/// slack (capacity - effective load before insertion); ties go to the lowest
/// id. Purchases only when no machine fits.
inline Assignment best_fit(std::span<const Job> jobs, const ConstraintSpec& spec) {
    spec.validate();
    Assignment a;
    for (const Job& job : jobs) {
        detail::check_packable(job, spec);
        int target = -1;
        double best_slack = std::numeric_limits<double>::infinity();
        for (const Machine& m : a.machines) {
            if (!fits(m.load, job, spec)) continue;
            const double slack = spec.capacity - effective_load(m.load, spec);
            if (slack < best_slack) {
                best_slack = slack;
                target = m.id;
            }
        }
        if (target < 0) target = detail::purchase(a);
        detail::place(a, target, job, spec);
    }
    return a;
}

/// Next-Fit: only the most recently purchased machine is ever a candidate.
/// Not lazy -- it may purchase while an older machine still has room -- so it
/// is excluded from the lazy-bound audits.
inline Assignment next_fit(std::span<const Job> jobs, const ConstraintSpec& spec) {
    spec.validate();
    Assignment a;
    for (const Job& job : jobs) {
        detail::check_packable(job, spec);
        int target = -1;
        if (!a.machines.empty() && fits(a.machines.back().load, job, spec)) {
            target = a.machines.back().id;
        }
        if (target < 0) target = detail::purchase(a);
        detail::place(a, target, job, spec);
    }
    return a;
}

/// Buckets over the dispersion-to-mean ratio r = b/mu. Jobs with mu = 0 get
/// the dedicated infinite-ratio bucket.
struct BucketingPolicy {
    std::vector<double> boundaries;  // strictly increasing, positive

    void validate() const {
        for (std::size_t i = 0; i < boundaries.size(); ++i) {
            if (!(boundaries[i] > 0.0) || (i > 0 && !(boundaries[i] > boundaries[i - 1]))) {
                throw std::invalid_argument("BucketingPolicy: boundaries must be positive and strictly increasing");
            }
        }
    }

    // Bucket indices: 0..n over finite ratios, n+1 reserved for mu = 0.
    int bucket_of(double mu, double b) const {
        if (mu == 0.0) return static_cast<int>(boundaries.size()) + 1;
        const double r = b / mu;
        int k = 0;
        while (k < static_cast<int>(boundaries.size()) && r >= boundaries[static_cast<std::size_t>(k)]) ++k;
        return k;
    }

    /// Geometric boundaries lo, lo*ratio, ... up to hi. Ratio 2 keeps jobs in
    /// one bucket within a factor-2 ratio spread (delta = 1).
    static BucketingPolicy geometric(double lo = 1.0 / 16.0, double hi = 64.0, double ratio = 2.0) {
        if (!(lo > 0.0) || !(ratio > 1.0)) {
            throw std::invalid_argument("BucketingPolicy: need lo > 0 and ratio > 1");
        }
        BucketingPolicy p;
        for (double x = lo; x <= hi * (1.0 + 1e-12); x *= ratio) p.boundaries.push_back(x);
        return p;
    }
};

/// Similarity-bucketing scheduler: route each job to the bucket holding its
/// b/mu ratio, then First-Fit within that bucket's private machine pool.
inline Assignment bucketed_fit(std::span<const Job> jobs, const ConstraintSpec& spec,
                               const BucketingPolicy& policy) {
    spec.validate();
    policy.validate();
    Assignment a;
    // bucket -> machine ids owned by that bucket (in purchase order)
    std::unordered_map<int, std::vector<int>> pools;
    for (const Job& job : jobs) {
        detail::check_packable(job, spec);
        auto& pool = pools[policy.bucket_of(job.mean, b_value(job, spec))];
        int target = -1;
        for (int id : pool) {
            if (fits(a.machines[static_cast<std::size_t>(id)].load, job, spec)) {
                target = id;
                break;
            }
        }
        if (target < 0) {
            target = detail::purchase(a);
            pool.push_back(target);
        }
        detail::place(a, target, job, spec);
    }
    return a;
}

/// Replays a run and checks the lazy property: whenever a machine was
/// purchased, the triggering job must not have fit any machine existing at
/// its arrival. `jobs` must be in arrival order.
inline bool verify_lazy(std::span<const Job> jobs, const ConstraintSpec& spec, const Assignment& a) {
    std::unordered_map<int, LoadSummary> loads;  // open machines only
    for (const Job& job : jobs) {
        const auto it = a.job_to_machine.find(job.id);
        if (it == a.job_to_machine.end()) return false;
        auto machine = loads.find(it->second);
        if (machine == loads.end()) {
            for (const auto& [id, load] : loads) {
                if (fits(load, job, spec)) return false;
            }
            machine = loads.emplace(it->second, LoadSummary{}).first;
        }
        machine->second.add(job, spec);
    }
    return true;
}

enum class AlgorithmKind { FirstFit, BestFit, NextFit, Bucketed, LocalSearch };

inline const char* to_string(AlgorithmKind k) {
    switch (k) {
        case AlgorithmKind::FirstFit: return "first-fit";
        case AlgorithmKind::BestFit: return "best-fit";
        case AlgorithmKind::NextFit: return "next-fit";
        case AlgorithmKind::Bucketed: return "bucketed";
        case AlgorithmKind::LocalSearch: return "local-search";
    }
    return "?";
}

}  // namespace stochpack

#endif
