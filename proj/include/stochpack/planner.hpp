#ifndef STOCHPACK_PLANNER_HPP
#define STOCHPACK_PLANNER_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "stochpack/capacity.hpp"

namespace stochpack {

/// One statistical class of jobs: shared (mu, b), optional per-job upper
/// bound (needed for NoOvercommit planning and for the clipping rule).
struct JobClass {
    double mu = 0.0;
    double b = 0.0;
    long long count = 0;
    double upper = std::numeric_limits<double>::quiet_NaN();

    bool has_upper() const { return !std::isnan(upper); }
};

namespace detail {

// Buffered load of counts n_k of classes, before clipping.
inline double class_raw_load(std::span<const JobClass> classes, std::span<const long long> counts,
                             const ConstraintSpec& spec) {
    double mean = 0.0, b = 0.0;
    for (std::size_t k = 0; k < classes.size(); ++k) {
        const double n = static_cast<double>(counts[k]);
        mean += n * classes[k].mu;
        if (is_linear(spec.variant)) {
            b += n * (classes[k].mu + d_of_alpha(spec) * std::sqrt(classes[k].b));
        } else {
            b += n * classes[k].b;
        }
    }
    LoadSummary load{mean, b, 0.0, 1};
    switch (spec.variant) {
        case Variant::NoOvercommit: {
            double upper = 0.0;
            for (std::size_t k = 0; k < classes.size(); ++k) {
                upper += static_cast<double>(counts[k]) * classes[k].upper;
            }
            return upper;
        }
        default:
            load.sum_upper = std::numeric_limits<double>::infinity();
            return raw_load(load, spec);
    }
}

// Feasibility of a class-count pattern under the same semantics as fits():
// the buffered value or, when uppers are known, the clipped value.
inline bool class_pattern_feasible(std::span<const JobClass> classes,
                                   std::span<const long long> counts, const ConstraintSpec& spec) {
    long long total = 0;
    for (long long c : counts) total += c;
    if (total == 0) return true;
    if (spec.variant == Variant::NoOvercommit) {
        for (std::size_t k = 0; k < classes.size(); ++k) {
            if (counts[k] > 0 && !classes[k].has_upper()) {
                throw std::invalid_argument("class planning under NoOvercommit needs per-job upper bounds");
            }
        }
    }
    const double raw = class_raw_load(classes, counts, spec);
    if (raw <= spec.capacity) return true;
    bool all_upper = true;
    double upper = 0.0;
    for (std::size_t k = 0; k < classes.size(); ++k) {
        if (counts[k] > 0 && !classes[k].has_upper()) {
            all_upper = false;
            break;
        }
        upper += static_cast<double>(counts[k]) * (classes[k].has_upper() ? classes[k].upper : 0.0);
    }
    return all_upper && upper <= spec.capacity;
}

// Largest n >= 0 with feasible(counts + n * e_k); the feasible region in one
// coordinate is a prefix, so binary search is exact.
inline long long max_count_in_direction(std::span<const JobClass> classes,
                                        std::vector<long long> counts, std::size_t k,
                                        const ConstraintSpec& spec, long long guess) {
    if (!class_pattern_feasible(classes, counts, spec)) return -1;
    auto feasible_at = [&](long long n) {
        counts[k] = n;
        return class_pattern_feasible(classes, counts, spec);
    };
    long long lo = 0;
    long long hi = std::max<long long>(1, guess);
    while (feasible_at(hi)) {
        lo = hi;
        hi *= 2;
        if (hi > (1LL << 40)) throw std::logic_error("max_count_in_direction: unbounded pattern");
    }
    while (lo + 1 < hi) {
        const long long mid = lo + (hi - lo) / 2;
        if (feasible_at(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

}  // namespace detail

/// Largest number of identically distributed jobs (mu, b) one machine holds.
///
/// Square-root variants use the closed form
///   n = V/mu + (b D^2 - sqrt(b^2 D^4 + 4 b D^2 V mu)) / (2 mu^2),
/// then the result is verified and adjusted by direct constraint evaluation,
/// so floating-point edge cases at the boundary cannot produce an off-by-one.
/// When `upper` is given, the clipping rule applies (a machine may also be
/// filled to floor(V/upper) regardless of the buffer); NoOvercommit requires
/// `upper`.
inline long long max_identical_jobs(double mu, double b, const ConstraintSpec& spec,
                                    double upper = std::numeric_limits<double>::quiet_NaN()) {
    spec.validate();
    if (!(mu > 0.0) && spec.variant != Variant::NoOvercommit) {
        throw std::invalid_argument("max_identical_jobs: mu must be positive");
    }
    if (b < 0.0) throw std::invalid_argument("max_identical_jobs: b must be non-negative");

    JobClass cls{mu, b, 0, upper};
    if (spec.variant == Variant::NoOvercommit && !cls.has_upper()) {
        throw std::invalid_argument("max_identical_jobs: NoOvercommit needs the per-job upper bound");
    }

    const std::vector<JobClass> classes{cls};
    long long guess = 1;
    if (spec.variant == Variant::NoOvercommit) {
        guess = static_cast<long long>(std::floor(spec.capacity / upper));
    } else if (is_sqrt_buffered(spec.variant) && b > 0.0) {
        const double d2 = d_of_alpha(spec) * d_of_alpha(spec);
        const double v = spec.capacity;
        const double disc = b * b * d2 * d2 + 4.0 * b * d2 * v * mu;
        const double n_alpha = v / mu + (b * d2 - std::sqrt(disc)) / (2.0 * mu * mu);
        guess = static_cast<long long>(std::floor(std::max(0.0, n_alpha)));
    } else if (mu > 0.0) {
        guess = static_cast<long long>(std::floor(spec.capacity / mu));
    }
    std::vector<long long> counts{0};
    return detail::max_count_in_direction(classes, counts, 0, spec, std::max<long long>(1, guess));
}

struct FrontierPoint {
    long long n2 = 0;
    long long max_n1 = -1;  // -1: n2 alone is already infeasible
};

/// For each n2 in [0, n2_max], the largest n1 such that (n1, n2) satisfies
/// the modified capacity constraint. Closed form seeded, integer verified.
inline std::vector<FrontierPoint> two_class_frontier(const JobClass& class1, const JobClass& class2,
                                                     const ConstraintSpec& spec, long long n2_max) {
    spec.validate();
    if (!(class1.mu > 0.0) && spec.variant != Variant::NoOvercommit) {
        throw std::invalid_argument("two_class_frontier: class1.mu must be positive");
    }
    const std::vector<JobClass> classes{class1, class2};
    std::vector<FrontierPoint> frontier;
    frontier.reserve(static_cast<std::size_t>(n2_max + 1));
    long long guess = std::max<long long>(
        1, max_identical_jobs(class1.mu, class1.b, spec,
                              class1.has_upper() ? class1.upper
                                                 : std::numeric_limits<double>::quiet_NaN()));
    for (long long n2 = 0; n2 <= n2_max; ++n2) {
        std::vector<long long> counts{0, n2};
        const long long n1 = detail::max_count_in_direction(classes, counts, 0, spec, guess);
        frontier.push_back({n2, n1});
        if (n1 > 0) guess = n1;
    }
    return frontier;
}

/// A machine template: how many jobs of each class share one machine, and
/// how many machines use this template.
struct MixPattern {
    std::vector<long long> per_class_counts;
    long long uses = 0;
};

struct CuttingStockResult {
    long long machine_count = 0;
    std::vector<MixPattern> patterns;  // only patterns with uses > 0
    double lp_bound = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline void enumerate_patterns(std::span<const JobClass> classes, const ConstraintSpec& spec,
                               std::vector<long long>& counts, std::size_t k,
                               std::vector<std::vector<long long>>& out) {
    if (k + 1 == classes.size()) {
        counts[k] = 0;
        long long top = max_count_in_direction(classes, counts, k, spec, 8);
        counts[k] = std::min(top, std::max<long long>(classes[k].count, 0));
        if (counts[k] >= 0) out.push_back(counts);
        counts[k] = 0;
        return;
    }
    counts[k] = 0;
    const long long top = max_count_in_direction(classes, counts, k, spec, 8);
    const long long cap = std::min(top, std::max<long long>(classes[k].count, 0));
    for (long long c = 0; c <= cap; ++c) {
        counts[k] = c;
        enumerate_patterns(classes, spec, counts, k + 1, out);
    }
    counts[k] = 0;
}

inline bool dominates(const std::vector<long long>& a, const std::vector<long long>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return false;
    }
    return true;
}

struct CoverSearch {
    std::span<const std::vector<long long>> patterns;
    std::vector<std::vector<long long>> suffix_max;  // per pattern index, per class
    std::vector<long long> best_counts;
    long long best = std::numeric_limits<long long>::max();
    std::vector<long long> current;

    long long lower_bound(const std::vector<long long>& rem, std::size_t from) const {
        long long lb = 0;
        for (std::size_t c = 0; c < rem.size(); ++c) {
            if (rem[c] <= 0) continue;
            const long long cov = suffix_max[from][c];
            if (cov <= 0) return std::numeric_limits<long long>::max();
            lb = std::max(lb, (rem[c] + cov - 1) / cov);
        }
        return lb;
    }

    void dfs(std::size_t idx, std::vector<long long>& rem, long long used) {
        bool done = true;
        for (long long r : rem) {
            if (r > 0) {
                done = false;
                break;
            }
        }
        if (done) {
            if (used < best) {
                best = used;
                best_counts = current;
            }
            return;
        }
        if (idx >= patterns.size()) return;
        const long long lb = lower_bound(rem, idx);
        if (lb == std::numeric_limits<long long>::max() || used + lb >= best) return;

        long long max_use = 0;
        for (std::size_t c = 0; c < rem.size(); ++c) {
            const long long cov = patterns[idx][c];
            if (cov > 0 && rem[c] > 0) max_use = std::max(max_use, (rem[c] + cov - 1) / cov);
        }
        for (long long t = max_use; t >= 0; --t) {
            std::vector<long long> next = rem;
            for (std::size_t c = 0; c < rem.size(); ++c) next[c] -= t * patterns[idx][c];
            current[idx] = t;
            dfs(idx + 1, next, used + t);
            current[idx] = 0;
        }
    }
};

// LP relaxation of the covering problem via its dual: with at most four
// classes, the dual has as many variables as classes and one constraint per
// pattern, so exact vertex enumeration is cheap for small pattern sets.
inline double covering_lp_bound(const std::vector<std::vector<long long>>& patterns,
                                const std::vector<long long>& demand) {
    const std::size_t c = demand.size();
    const std::size_t rows = patterns.size() + c;  // pattern constraints + sign bounds
    double combos = 1.0;
    for (std::size_t i = 0; i < c; ++i) combos *= static_cast<double>(rows - i) / static_cast<double>(i + 1);
    if (combos > 2e6) return std::numeric_limits<double>::quiet_NaN();

    // Constraint rows: a^T y <= 1 for each pattern, plus y_i >= 0.
    auto row = [&](std::size_t r, std::size_t col) -> double {
        if (r < patterns.size()) return static_cast<double>(patterns[r][col]);
        return (r - patterns.size()) == col ? 1.0 : 0.0;
    };
    auto rhs = [&](std::size_t r) -> double { return r < patterns.size() ? 1.0 : 0.0; };

    std::vector<double> y(c);
    double best = 0.0;

    // Enumerate all c-subsets of constraint rows, solve the c x c system,
    // keep feasible vertices with the best dual objective.
    std::vector<std::size_t> idx(c);
    for (std::size_t i = 0; i < c; ++i) idx[i] = i;
    bool more = true;
    while (more) {
        // Solve sum_j row(idx[r], j) * y_j = rhs(idx[r]) by Gaussian elimination.
        std::vector<std::vector<double>> m(c, std::vector<double>(c + 1, 0.0));
        for (std::size_t r = 0; r < c; ++r) {
            for (std::size_t j = 0; j < c; ++j) m[r][j] = row(idx[r], j);
            m[r][c] = rhs(idx[r]);
        }
        bool singular = false;
        for (std::size_t col = 0; col < c && !singular; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < c; ++r) {
                if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
            }
            if (std::abs(m[piv][col]) < 1e-12) {
                singular = true;
                break;
            }
            std::swap(m[col], m[piv]);
            for (std::size_t r = 0; r < c; ++r) {
                if (r == col) continue;
                const double f = m[r][col] / m[col][col];
                for (std::size_t j = col; j <= c; ++j) m[r][j] -= f * m[col][j];
            }
        }
        if (!singular) {
            for (std::size_t j = 0; j < c; ++j) y[j] = m[j][c] / m[j][j];
            bool feasible = true;
            for (std::size_t j = 0; j < c && feasible; ++j) feasible = y[j] >= -1e-9;
            for (std::size_t r = 0; r < patterns.size() && feasible; ++r) {
                double lhs = 0.0;
                for (std::size_t j = 0; j < c; ++j) lhs += static_cast<double>(patterns[r][j]) * y[j];
                feasible = lhs <= 1.0 + 1e-9;
            }
            if (feasible) {
                double obj = 0.0;
                for (std::size_t j = 0; j < c; ++j) obj += static_cast<double>(demand[j]) * y[j];
                best = std::max(best, obj);
            }
        }

        // next combination
        more = false;
        for (std::size_t i = c; i-- > 0;) {
            if (idx[i] + (c - i) < rows) {
                ++idx[i];
                for (std::size_t j = i + 1; j < c; ++j) idx[j] = idx[j - 1] + 1;
                more = true;
                break;
            }
        }
    }
    return best;
}

}  // namespace detail

/// Minimum machines covering the given class counts: enumerate Pareto-maximal
/// feasible patterns, then solve the covering problem exactly by branch and
/// bound. The LP relaxation bound is reported alongside when cheap to compute.
inline CuttingStockResult solve_cutting_stock(std::span<const JobClass> classes,
                                              const ConstraintSpec& spec) {
    spec.validate();
    if (classes.empty() || classes.size() > 4) {
        throw std::invalid_argument("solve_cutting_stock: supports 1 to 4 classes");
    }
    CuttingStockResult result;
    std::vector<long long> demand;
    bool any = false;
    for (const JobClass& c : classes) {
        if (c.count < 0) throw std::invalid_argument("solve_cutting_stock: negative class count");
        demand.push_back(c.count);
        any = any || c.count > 0;
    }
    if (!any) {
        result.machine_count = 0;
        result.lp_bound = 0.0;
        return result;
    }
    for (std::size_t k = 0; k < classes.size(); ++k) {
        if (classes[k].count == 0) continue;
        std::vector<long long> single(classes.size(), 0);
        single[k] = 1;
        if (!detail::class_pattern_feasible(classes, single, spec)) {
            throw std::invalid_argument("solve_cutting_stock: a single job of class " +
                                        std::to_string(k) + " does not fit any machine");
        }
    }

    std::vector<std::vector<long long>> raw_patterns;
    std::vector<long long> counts(classes.size(), 0);
    detail::enumerate_patterns(classes, spec, counts, 0, raw_patterns);

    // Keep Pareto-maximal patterns; dominated ones never help a covering IP.
    std::vector<std::vector<long long>> patterns;
    for (const auto& p : raw_patterns) {
        long long total = 0;
        for (long long v : p) total += v;
        if (total == 0) continue;
        bool dominated = false;
        for (const auto& q : raw_patterns) {
            if (&q != &p && detail::dominates(q, p) && q != p) {
                dominated = true;
                break;
            }
        }
        if (!dominated) patterns.push_back(p);
    }
    std::sort(patterns.begin(), patterns.end(), [](const auto& a, const auto& b) {
        long long sa = 0, sb = 0;
        for (long long v : a) sa += v;
        for (long long v : b) sb += v;
        return sa > sb;
    });

    detail::CoverSearch search;
    search.patterns = patterns;
    search.suffix_max.assign(patterns.size() + 1, std::vector<long long>(classes.size(), 0));
    for (std::size_t i = patterns.size(); i-- > 0;) {
        for (std::size_t c = 0; c < classes.size(); ++c) {
            search.suffix_max[i][c] = std::max(search.suffix_max[i + 1][c], patterns[i][c]);
        }
    }
    search.current.assign(patterns.size(), 0);
    std::vector<long long> rem = demand;
    search.dfs(0, rem, 0);
    if (search.best == std::numeric_limits<long long>::max()) {
        throw std::logic_error("solve_cutting_stock: no covering found");
    }

    result.machine_count = search.best;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        if (search.best_counts[i] > 0) {
            result.patterns.push_back({patterns[i], search.best_counts[i]});
        }
    }
    result.lp_bound = detail::covering_lp_bound(patterns, demand);
    return result;
}

}  // namespace stochpack

#endif
