#ifndef STOCHPACK_OFFLINE_HPP
#define STOCHPACK_OFFLINE_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "stochpack/capacity.hpp"
#include "stochpack/online.hpp"

namespace stochpack {

struct ExactResult {
    long long count = 0;
    Assignment assignment;
};

/// Exact minimum machine count by dynamic programming over subsets:
/// feasibility of all 2^N subsets, then minimum partition into feasible
/// subsets. Only for small instances (default cap 12 jobs).
inline ExactResult exact_optimal(std::span<const Job> jobs, const ConstraintSpec& spec,
                                 int job_cap = 12) {
    spec.validate();
    const int n = static_cast<int>(jobs.size());
    if (job_cap > 20) job_cap = 20;  // subset DP; anything larger stops being a desk-scale oracle
    if (n > job_cap) {
        throw std::invalid_argument("exact_optimal: instance too large for exact oracle");
    }
    ExactResult result;
    if (n == 0) return result;
    for (const Job& j : jobs) detail::check_packable(j, spec);

    const std::uint32_t full = (1u << n) - 1u;
    std::vector<double> sum_mean(full + 1, 0.0), sum_b(full + 1, 0.0), sum_upper(full + 1, 0.0);
    std::vector<double> contrib_b(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        contrib_b[static_cast<std::size_t>(j)] =
            is_linear(spec.variant) ? buffered_size(jobs[static_cast<std::size_t>(j)], spec)
                                    : b_value(jobs[static_cast<std::size_t>(j)], spec);
    }
    std::vector<bool> feasible(full + 1, false);
    for (std::uint32_t s = 1; s <= full; ++s) {
        const int low = std::countr_zero(s);
        const std::uint32_t rest = s & (s - 1);
        const Job& j = jobs[static_cast<std::size_t>(low)];
        sum_mean[s] = sum_mean[rest] + j.mean;
        sum_b[s] = sum_b[rest] + contrib_b[static_cast<std::size_t>(low)];
        sum_upper[s] = sum_upper[rest] + j.upper_bound();
        LoadSummary load{sum_mean[s], sum_b[s], sum_upper[s], std::popcount(s)};
        feasible[s] = effective_load(load, spec) <= spec.capacity;
    }

    constexpr long long inf = 1LL << 40;
    std::vector<long long> dp(full + 1, inf);
    std::vector<std::uint32_t> choice(full + 1, 0);
    dp[0] = 0;
    for (std::uint32_t s = 1; s <= full; ++s) {
        const std::uint32_t low_bit = s & (~s + 1u);
        // Enumerate submasks of s that contain the lowest job; one of them is
        // the machine that serves it in an optimal partition.
        for (std::uint32_t t = s; t != 0; t = (t - 1) & s) {
            if (!(t & low_bit) || !feasible[t]) continue;
            if (dp[s ^ t] + 1 < dp[s]) {
                dp[s] = dp[s ^ t] + 1;
                choice[s] = t;
            }
        }
    }
    if (dp[full] >= inf) {
        throw std::logic_error("exact_optimal: no feasible partition (oversized job?)");
    }

    result.count = dp[full];
    for (std::uint32_t s = full; s != 0; s ^= choice[s]) {
        Machine m;
        m.id = result.assignment.machine_count();
        std::vector<Job> members;
        for (std::uint32_t t = choice[s]; t != 0; t &= t - 1) {
            const Job& j = jobs[static_cast<std::size_t>(std::countr_zero(t))];
            m.jobs.push_back(j.id);
            members.push_back(j);
            result.assignment.job_to_machine.emplace(j.id, m.id);
        }
        m.load = LoadSummary::of(members, spec);
        result.assignment.machines.push_back(std::move(m));
    }
    return result;
}

namespace detail {

class LocalSearchState {
  public:
    LocalSearchState(std::span<const Job> jobs, const ConstraintSpec& spec, const Assignment& initial)
        : spec_(spec) {
        for (const Job& j : jobs) by_id_.emplace(j.id, &j);
        machines_ = initial.machines;
        std::sort(machines_.begin(), machines_.end(),
                  [](const Machine& a, const Machine& b) { return a.id < b.id; });
        next_id_ = machines_.empty() ? 0 : machines_.back().id + 1;
        for (Machine& m : machines_) {
            if (m.jobs.empty()) throw std::invalid_argument("local_search: empty machine in initial assignment");
            recompute(m);
            if (effective_load(m.load, spec_) > spec_.capacity) {
                throw std::invalid_argument("local_search: initial assignment is infeasible");
            }
        }
    }

    // Runs update operations until none applies; returns the operation count.
    long long run(long long op_limit) {
        long long ops = 0;
        while (step()) {
            if (++ops > op_limit) {
                throw std::logic_error("local_search: exceeded the N^3 operation bound");
            }
        }
        return ops;
    }

    Assignment take() {
        Assignment out;
        out.machines = std::move(machines_);
        for (const Machine& m : out.machines) {
            for (long long id : m.jobs) out.job_to_machine.emplace(id, m.id);
        }
        return out;
    }

  private:
    const ConstraintSpec& spec_;
    std::unordered_map<long long, const Job*> by_id_;
    std::vector<Machine> machines_;  // kept sorted by id
    int next_id_ = 0;

    const Job& job(long long id) const { return *by_id_.at(id); }

    void recompute(Machine& m) {
        m.load = LoadSummary{};
        for (long long id : m.jobs) m.load.add(job(id), spec_);
    }

    bool fits_in(const Machine& m, const Job& j) const { return fits(m.load, j, spec_); }

    std::vector<std::size_t> single_job_machines() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < machines_.size(); ++i) {
            if (machines_[i].jobs.size() == 1) out.push_back(i);
        }
        return out;
    }

    bool is_medium(const Machine& m) const { return m.jobs.size() >= 2 && m.jobs.size() <= 4; }

    // good job: fits in at least 6 of the current single-job machines.
    bool is_good(const Job& j, const std::vector<std::size_t>& a1) const {
        int hits = 0;
        for (std::size_t i : a1) {
            if (fits_in(machines_[i], j) && ++hits >= 6) return true;
        }
        return false;
    }

    int fit_count_in_a1(const Job& j, const std::vector<std::size_t>& a1) const {
        int hits = 0;
        for (std::size_t i : a1) {
            if (fits_in(machines_[i], j)) ++hits;
        }
        return hits;
    }

    // Plans distinct A1 targets for `ids` greedily (lowest id first). Targets
    // already claimed in this operation are excluded.
    std::optional<std::vector<std::size_t>> plan_scatter(const std::vector<long long>& ids,
                                                         const std::vector<std::size_t>& a1,
                                                         std::vector<bool>& used) const {
        std::vector<std::size_t> plan;
        plan.reserve(ids.size());
        for (long long id : ids) {
            bool placed = false;
            for (std::size_t k = 0; k < a1.size(); ++k) {
                if (used[k]) continue;
                if (fits_in(machines_[a1[k]], job(id))) {
                    used[k] = true;
                    plan.push_back(a1[k]);
                    placed = true;
                    break;
                }
            }
            if (!placed) return std::nullopt;
        }
        return plan;
    }

    void commit_scatter(const std::vector<long long>& ids, const std::vector<std::size_t>& plan) {
        for (std::size_t k = 0; k < ids.size(); ++k) {
            Machine& target = machines_[plan[k]];
            target.jobs.push_back(ids[k]);
            target.load.add(job(ids[k]), spec_);
        }
    }

    void erase_machines(std::vector<std::size_t> idx) {
        std::sort(idx.rbegin(), idx.rend());
        for (std::size_t i : idx) machines_.erase(machines_.begin() + static_cast<std::ptrdiff_t>(i));
    }

    // Operation 1: move a job to a lower-id machine.
    bool try_move_down() {
        for (std::size_t i = 1; i < machines_.size(); ++i) {
            Machine& src = machines_[i];
            for (std::size_t jpos = 0; jpos < src.jobs.size(); ++jpos) {
                const Job& j = job(src.jobs[jpos]);
                for (std::size_t t = 0; t < i; ++t) {
                    if (!fits_in(machines_[t], j)) continue;
                    machines_[t].jobs.push_back(j.id);
                    machines_[t].load.add(j, spec_);
                    src.jobs.erase(src.jobs.begin() + static_cast<std::ptrdiff_t>(jpos));
                    if (src.jobs.empty()) {
                        erase_machines({i});
                    } else {
                        recompute(src);
                    }
                    return true;
                }
            }
        }
        return false;
    }

    // Operation 2: evacuate a medium machine whose jobs are all good into
    // distinct single-job machines.
    bool try_evacuate_all_good() {
        const auto a1 = single_job_machines();
        for (std::size_t i = 0; i < machines_.size(); ++i) {
            const Machine& m = machines_[i];
            if (!is_medium(m)) continue;
            bool all_good = true;
            for (long long id : m.jobs) {
                if (!is_good(job(id), a1)) {
                    all_good = false;
                    break;
                }
            }
            if (!all_good) continue;
            std::vector<bool> used(a1.size(), false);
            auto plan = plan_scatter(m.jobs, a1, used);
            if (!plan) continue;
            const std::vector<long long> ids = m.jobs;
            commit_scatter(ids, *plan);
            erase_machines({i});
            return true;
        }
        return false;
    }

    // Operation 3: medium machine with one job placeable in A1 and the rest
    // all good.
    bool try_evacuate_one_placeable() {
        const auto a1 = single_job_machines();
        for (std::size_t i = 0; i < machines_.size(); ++i) {
            const Machine& m = machines_[i];
            if (!is_medium(m)) continue;
            for (std::size_t pivot = 0; pivot < m.jobs.size(); ++pivot) {
                const Job& pj = job(m.jobs[pivot]);
                if (fit_count_in_a1(pj, a1) < 1) continue;
                bool rest_good = true;
                for (std::size_t k = 0; k < m.jobs.size(); ++k) {
                    if (k != pivot && !is_good(job(m.jobs[k]), a1)) {
                        rest_good = false;
                        break;
                    }
                }
                if (!rest_good) continue;
                std::vector<long long> order{m.jobs[pivot]};
                for (std::size_t k = 0; k < m.jobs.size(); ++k) {
                    if (k != pivot) order.push_back(m.jobs[k]);
                }
                std::vector<bool> used(a1.size(), false);
                auto plan = plan_scatter(order, a1, used);
                if (!plan) continue;
                commit_scatter(order, *plan);
                erase_machines({i});
                return true;
            }
        }
        return false;
    }

    // A critical machine is medium, holds exactly one job that fits in no A1
    // machine, and its remaining jobs are all good.
    std::optional<long long> critical_job(const Machine& m, const std::vector<std::size_t>& a1) const {
        if (!is_medium(m)) return std::nullopt;
        std::optional<long long> outcast;
        for (long long id : m.jobs) {
            if (fit_count_in_a1(job(id), a1) == 0) {
                if (outcast) return std::nullopt;  // more than one
                outcast = id;
            } else if (!is_good(job(id), a1)) {
                return std::nullopt;
            }
        }
        return outcast;
    }

    // Operation 4: merge the two outcast jobs of two critical machines into a
    // fresh machine and scatter the rest.
    bool try_merge_criticals() {
        const auto a1 = single_job_machines();
        std::vector<std::pair<std::size_t, long long>> criticals;
        for (std::size_t i = 0; i < machines_.size(); ++i) {
            if (auto c = critical_job(machines_[i], a1)) criticals.emplace_back(i, *c);
        }
        for (std::size_t x = 0; x < criticals.size(); ++x) {
            for (std::size_t y = x + 1; y < criticals.size(); ++y) {
                const Job& j1 = job(criticals[x].second);
                const Job& j2 = job(criticals[y].second);
                LoadSummary pair_load;
                pair_load.add(j1, spec_);
                pair_load.add(j2, spec_);
                if (effective_load(pair_load, spec_) > spec_.capacity) continue;  // ignore this pair

                std::vector<long long> rest;
                for (long long id : machines_[criticals[x].first].jobs) {
                    if (id != j1.id) rest.push_back(id);
                }
                for (long long id : machines_[criticals[y].first].jobs) {
                    if (id != j2.id) rest.push_back(id);
                }
                std::vector<bool> used(a1.size(), false);
                auto plan = plan_scatter(rest, a1, used);
                if (!plan) continue;

                commit_scatter(rest, *plan);
                Machine fresh;
                fresh.id = next_id_++;
                fresh.jobs = {j1.id, j2.id};
                fresh.load = pair_load;
                erase_machines({criticals[x].first, criticals[y].first});
                machines_.push_back(std::move(fresh));  // highest id, keeps sort order
                return true;
            }
        }
        return false;
    }

    bool step() {
        return try_move_down() || try_evacuate_all_good() || try_evacuate_one_placeable() ||
               try_merge_criticals();
    }
};

}  // namespace detail

/// Offline local search: applies the four update operations (move a job to a
/// lower-id machine; evacuate an all-good medium machine; evacuate a medium
/// machine with one A1-placeable job plus good jobs; merge two critical
/// machines) until none applies. Never increases the machine count and keeps
/// every intermediate assignment feasible.
inline Assignment local_search(std::span<const Job> jobs, const ConstraintSpec& spec,
                               const Assignment& initial, long long* operations = nullptr) {
    spec.validate();
    detail::LocalSearchState state(jobs, spec, initial);
    const long long n = static_cast<long long>(jobs.size());
    const long long ops = state.run(std::max<long long>(1, n * n * n));
    if (operations) *operations = ops;
    return state.take();
}

/// Convenience entry point: First-Fit for the initial assignment, then local
/// search.
inline Assignment local_search(std::span<const Job> jobs, const ConstraintSpec& spec,
                               long long* operations = nullptr) {
    return local_search(jobs, spec, first_fit(jobs, spec), operations);
}

}  // namespace stochpack

#endif
