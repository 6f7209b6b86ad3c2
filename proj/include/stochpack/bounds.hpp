#ifndef STOCHPACK_BOUNDS_HPP
#define STOCHPACK_BOUNDS_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "stochpack/capacity.hpp"
#include "stochpack/online.hpp"

namespace stochpack {

/// Job statistics in normalized units: capacity 1, risk multiplier 1.
/// Obtained from absolute units by mu/V and b * D(alpha)^2 / V^2.
struct NormalizedJob {
    double mu = 0.0;
    double b = 0.0;
};

inline NormalizedJob normalize_job(const Job& job, const ConstraintSpec& spec) {
    const double v = spec.capacity;
    const double d = spec.variant == Variant::NoOvercommit ? 0.0 : d_of_alpha(spec);
    return {job.mean / v, b_value(job, spec) * d * d / (v * v)};
}

inline std::vector<NormalizedJob> normalize_jobs(std::span<const Job> jobs, const ConstraintSpec& spec) {
    std::vector<NormalizedJob> out;
    out.reserve(jobs.size());
    for (const Job& j : jobs) out.push_back(normalize_job(j, spec));
    return out;
}

/// Cost of a set in normalized units: sum(mu) + sqrt(sum(b)). A set is
/// feasible for the square-root constraint iff the cost is at most 1.
inline double cost_of_set(std::span<const NormalizedJob> jobs) {
    double mu = 0.0, b = 0.0;
    for (const NormalizedJob& j : jobs) {
        mu += j.mu;
        b += j.b;
    }
    return mu + std::sqrt(b);
}

/// sum(mu_j + b_j): at most 1 on feasible sets, strictly above 3/4 on
/// infeasible sets. Its total over all jobs lower-bounds the optimum
/// machine count.
inline double sum_mu_plus_b(std::span<const NormalizedJob> jobs) {
    double s = 0.0;
    for (const NormalizedJob& j : jobs) s += j.mu + j.b;
    return s;
}

/// f(a, b) = (2a + b + sqrt(b(4a + b))) / 2. Concave in each argument and
/// homogeneous of degree one; any feasible set has sum f <= 1, so the total
/// over all jobs is a sharper lower bound on the optimum.
inline double f_of(double a, double b) {
    return 0.5 * (2.0 * a + b + std::sqrt(b * (4.0 * a + b)));
}

inline double f_bound(std::span<const NormalizedJob> jobs) {
    double s = 0.0;
    for (const NormalizedJob& j : jobs) s += f_of(j.mu, j.b);
    return s;
}

/// Lazy-algorithm approximation factor 2 / f(p) for the p-power buffer,
/// with f(p) = 1 - (1-p) p^(1/p - 1). Equals 8/3 at p = 0.5 and 2 at p = 1.
inline double p_norm_ratio_bound(double p) {
    if (!(p >= 0.5 && p <= 1.0)) throw std::invalid_argument("p_norm_ratio_bound: p must lie in [0.5, 1]");
    const double fp = 1.0 - (1.0 - p) * std::pow(p, 1.0 / p - 1.0);
    return 2.0 / fp;
}

struct OvercommitReport {
    long long b_alpha = 0;  // machines with overcommitment
    long long b_one = 0;    // machines without
    double ocf_alpha = 0.0;
    double ocf_one = 0.0;
    double savings = 0.0;  // 1 - B(alpha)/B(1)
};

/// Overcommitment factor: total sellable capacity over purchased physical
/// capacity. Satisfies OCF(1)/OCF(alpha) = B(alpha)/B(1) exactly.
inline OvercommitReport overcommit_report(long long b_alpha, long long b_one, double total_upper,
                                          double capacity) {
    if (b_alpha < 1 || b_one < 1) throw std::invalid_argument("overcommit_report: machine counts must be >= 1");
    OvercommitReport r;
    r.b_alpha = b_alpha;
    r.b_one = b_one;
    r.ocf_alpha = total_upper / (capacity * static_cast<double>(b_alpha));
    r.ocf_one = total_upper / (capacity * static_cast<double>(b_one));
    r.savings = 1.0 - static_cast<double>(b_alpha) / static_cast<double>(b_one);
    return r;
}

enum class BoundSource { OracleOpt, SumMuPlusB, FBound, PairwiseConflict, MeanLoad };

inline const char* to_string(BoundSource s) {
    switch (s) {
        case BoundSource::OracleOpt: return "oracle_opt";
        case BoundSource::SumMuPlusB: return "sum_mu_plus_b";
        case BoundSource::FBound: return "f_bound";
        case BoundSource::PairwiseConflict: return "pairwise_conflict";
        case BoundSource::MeanLoad: return "mean_load";
    }
    return "?";
}

struct TheoremCheck {
    std::string name;
    double bound = std::numeric_limits<double>::quiet_NaN();
    bool hypothesis_met = false;
    bool satisfied = true;  // only meaningful when hypothesis_met
};

struct RatioAudit {
    std::string algorithm;
    long long machines_used = 0;
    double lower_bound = 0.0;
    BoundSource bound_source = BoundSource::PairwiseConflict;
    double ratio = 1.0;
    double theorem_bound = std::numeric_limits<double>::quiet_NaN();
    bool hypothesis_met = false;
    bool clip_free = false;
    double eps_measured = 0.0;    // 1 - min machine cost
    double delta_measured = 0.0;  // max within-machine ratio spread - 1
    long long min_jobs_per_machine = 0;
    std::vector<TheoremCheck> checks;

    bool all_passed() const {
        for (const TheoremCheck& c : checks) {
            if (c.hypothesis_met && !c.satisfied) return false;
        }
        return true;
    }

    std::string flags() const {
        std::string out;
        for (const TheoremCheck& c : checks) {
            if (c.hypothesis_met && !c.satisfied) {
                if (!out.empty()) out += ';';
                out += c.name;
            }
        }
        if (!clip_free) {
            if (!out.empty()) out += ';';
            out += "clipped";
        }
        return out;
    }
};

namespace detail {

// With every job's solo buffered requirement at or below its upper bound,
// subadditivity of the buffer keeps raw <= sum of uppers for every set, so
// the clipping rule never binds and the square-root theory applies exactly.
inline bool clip_never_binds(std::span<const Job> jobs, const ConstraintSpec& spec) {
    if (spec.variant == Variant::NoOvercommit) return true;
    const double d = d_of_alpha(spec);
    for (const Job& job : jobs) {
        const double b = b_value(job, spec);
        double buffer;
        switch (spec.variant) {
            case Variant::PNorm: buffer = d * std::pow(b, spec.p_exponent); break;
            case Variant::LogBuffer: buffer = d * std::log1p(b); break;
            default: buffer = d * std::sqrt(b); break;
        }
        if (job.mean + buffer > job.upper_bound()) return false;
    }
    return true;
}

// Greedy chain of pairwise-unpackable jobs; its size lower-bounds OPT under
// the implemented (clipped) feasibility.
inline long long pairwise_conflict_bound(std::span<const Job> jobs, const ConstraintSpec& spec) {
    std::vector<const Job*> kept;
    for (const Job& j : jobs) {
        bool conflicts_all = true;
        for (const Job* k : kept) {
            LoadSummary solo;
            solo.add(*k, spec);
            if (fits(solo, j, spec)) {
                conflicts_all = false;
                break;
            }
        }
        if (conflicts_all) kept.push_back(&j);
    }
    return static_cast<long long>(kept.size());
}

}  // namespace detail

/// Minimum over machine pairs of sum(mu + b) of the union, in normalized
/// units. For a lazy run every pair's union is infeasible, so this exceeds
/// 3/4 (valid under clipping too: clipped-infeasible implies raw-infeasible).
inline double min_pair_support(std::span<const Job> jobs, const ConstraintSpec& spec,
                               const Assignment& a) {
    std::unordered_map<long long, NormalizedJob> norm;
    for (const Job& j : jobs) norm.emplace(j.id, normalize_job(j, spec));
    std::vector<double> per_machine;
    per_machine.reserve(a.machines.size());
    for (const Machine& m : a.machines) {
        double s = 0.0;
        for (long long id : m.jobs) {
            const NormalizedJob& nj = norm.at(id);
            s += nj.mu + nj.b;
        }
        per_machine.push_back(s);
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < per_machine.size(); ++i) {
        for (std::size_t k = i + 1; k < per_machine.size(); ++k) {
            best = std::min(best, per_machine[i] + per_machine[k]);
        }
    }
    return best;
}

/// Checks every approximation guarantee whose hypothesis the run satisfies against the
/// best available lower bound (the exact optimum when provided).
inline RatioAudit audit_run(std::span<const Job> jobs, const ConstraintSpec& spec,
                            const Assignment& a, AlgorithmKind algorithm,
                            std::optional<long long> oracle_opt = std::nullopt) {
    RatioAudit audit;
    audit.algorithm = to_string(algorithm);
    audit.machines_used = a.machine_count();
    audit.clip_free = detail::clip_never_binds(jobs, spec);
    const bool sqrt_variant = is_sqrt_buffered(spec.variant);
    const bool lazy = algorithm == AlgorithmKind::FirstFit || algorithm == AlgorithmKind::BestFit;
    const double m = static_cast<double>(audit.machines_used);

    std::unordered_map<long long, NormalizedJob> norm;
    for (const Job& j : jobs) norm.emplace(j.id, normalize_job(j, spec));

    // Lower bounds on the optimum.
    const auto normalized = normalize_jobs(jobs, spec);
    const double sum_bound = sum_mu_plus_b(normalized);
    const double f_lower = f_bound(normalized);
    const long long conflict = detail::pairwise_conflict_bound(jobs, spec);

    audit.lower_bound = static_cast<double>(conflict);
    audit.bound_source = BoundSource::PairwiseConflict;
    if (lazy) {
        // Jobs still alone on their machines at the end of a lazy run are
        // pairwise unpackable, so their machine count bounds the optimum.
        long long singletons = 0;
        for (const Machine& mach : a.machines) {
            if (mach.jobs.size() == 1) ++singletons;
        }
        if (static_cast<double>(singletons) > audit.lower_bound) {
            audit.lower_bound = static_cast<double>(singletons);
        }
    }
    {
        // Mean load stays a valid bound even when the clip is active: every
        // machine's effective requirement is at least its mean load.
        double mean_total = 0.0;
        for (const NormalizedJob& j : normalized) mean_total += j.mu;
        if (mean_total > audit.lower_bound) {
            audit.lower_bound = mean_total;
            audit.bound_source = BoundSource::MeanLoad;
        }
    }
    if (sqrt_variant && audit.clip_free) {
        if (sum_bound > audit.lower_bound) {
            audit.lower_bound = sum_bound;
            audit.bound_source = BoundSource::SumMuPlusB;
        }
        if (f_lower > audit.lower_bound) {
            audit.lower_bound = f_lower;
            audit.bound_source = BoundSource::FBound;
        }
    }
    if (oracle_opt) {
        audit.lower_bound = static_cast<double>(*oracle_opt);
        audit.bound_source = BoundSource::OracleOpt;
    }
    audit.ratio = audit.lower_bound > 0.0 ? m / audit.lower_bound : 1.0;
    const double ref = audit.lower_bound;

    // Per-machine measurements for the refined bounds.
    audit.min_jobs_per_machine = a.machines.empty() ? 0 : std::numeric_limits<long long>::max();
    double min_cost = std::numeric_limits<double>::infinity();
    double max_spread = a.machines.empty() ? 1.0 : 0.0;
    for (const Machine& mach : a.machines) {
        audit.min_jobs_per_machine =
            std::min(audit.min_jobs_per_machine, static_cast<long long>(mach.jobs.size()));
        double mu = 0.0, b = 0.0;
        double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
        bool any_inf = false, any_fin = false;
        for (long long id : mach.jobs) {
            const NormalizedJob& nj = norm.at(id);
            mu += nj.mu;
            b += nj.b;
            if (nj.mu == 0.0) {
                any_inf = true;
            } else {
                any_fin = true;
                const double r = nj.b / nj.mu;
                rmin = std::min(rmin, r);
                rmax = std::max(rmax, r);
            }
        }
        min_cost = std::min(min_cost, mu + std::sqrt(b));
        double spread;
        if (any_inf && any_fin) {
            spread = std::numeric_limits<double>::infinity();
        } else if (!any_fin) {
            spread = 1.0;  // all infinite-ratio jobs count as similar
        } else {
            spread = rmin > 0.0 ? rmax / rmin : (rmax == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
        }
        max_spread = std::max(max_spread, spread);
    }
    if (a.machines.empty()) min_cost = 1.0;
    audit.eps_measured = std::max(0.0, 1.0 - min_cost);
    audit.delta_measured = max_spread - 1.0;

    auto add_check = [&](std::string name, double bound, bool hypothesis) {
        TheoremCheck c;
        c.name = std::move(name);
        c.bound = bound;
        c.hypothesis_met = hypothesis && ref > 0.0;
        c.satisfied = !c.hypothesis_met || m <= bound;
        audit.checks.push_back(std::move(c));
    };

    const bool theory_ok = sqrt_variant && audit.clip_free;
    add_check("lazy_8_3", (8.0 / 3.0) * ref, lazy && theory_ok);
    add_check("first_fit_9_4", (9.0 / 4.0) * ref + 1.0,
              algorithm == AlgorithmKind::FirstFit && theory_ok);
    {
        const long long k = audit.min_jobs_per_machine;
        add_check("at_least_k_jobs",
                  k > 0 ? (4.0 / 3.0) * (1.0 + 1.0 / static_cast<double>(k)) * ref
                        : std::numeric_limits<double>::quiet_NaN(),
                  algorithm == AlgorithmKind::FirstFit && theory_ok && k >= 1);
    }
    add_check("nearly_full_4_3", (4.0 / 3.0 + 3.0 * audit.eps_measured) * ref,
              lazy && theory_ok && audit.eps_measured <= 0.3);
    {
        const double eps = audit.eps_measured;
        const double delta = audit.delta_measured;
        const bool hyp = theory_ok && eps < 1.0 && delta < 1.0;
        const double denom = (1.0 - eps) * (1.0 - eps) * (1.0 - delta);
        add_check("full_homogeneous",
                  hyp ? f_lower / denom + 1.0 : std::numeric_limits<double>::quiet_NaN(), hyp);
    }
    add_check("pnorm_lazy",
              spec.variant == Variant::PNorm ? p_norm_ratio_bound(spec.p_exponent) * ref
                                             : std::numeric_limits<double>::quiet_NaN(),
              spec.variant == Variant::PNorm && lazy && audit.clip_free && oracle_opt.has_value());
    add_check("local_search_2opt_11", 2.0 * ref + 11.0,
              algorithm == AlgorithmKind::LocalSearch && oracle_opt.has_value());
    {
        const double support = min_pair_support(jobs, spec, a);
        TheoremCheck c;
        c.name = "lazy_pair_support";
        c.bound = 0.75;
        c.hypothesis_met = lazy && sqrt_variant && a.machine_count() >= 2;
        c.satisfied = !c.hypothesis_met || support > 0.75;
        audit.checks.push_back(std::move(c));
    }

    // Headline bound for the algorithm that produced the run.
    for (const TheoremCheck& c : audit.checks) {
        const bool headline = (algorithm == AlgorithmKind::FirstFit && c.name == "first_fit_9_4") ||
                              (algorithm == AlgorithmKind::BestFit && c.name == "lazy_8_3") ||
                              (algorithm == AlgorithmKind::LocalSearch && c.name == "local_search_2opt_11");
        if (headline) {
            audit.theorem_bound = c.bound;
            audit.hypothesis_met = c.hypothesis_met;
        }
    }
    return audit;
}

}  // namespace stochpack

#endif
