#ifndef STOCHPACK_INSTANCES_HPP
#define STOCHPACK_INSTANCES_HPP

#include <cmath>
#include <vector>

#include "stochpack/capacity.hpp"
#include "stochpack/random.hpp"
#include "stochpack/workload.hpp"

namespace stochpack {

/// A small random instance in normalized units (capacity 1, D(alpha) 1) for
/// checking the approximation theorems against the exact oracle.
struct TheoryInstance {
    std::vector<Job> jobs;
    ConstraintSpec spec;
};

/// Normalized constraint: RobustMeanVar at alpha = 0.5 gives D = 1 exactly.
inline ConstraintSpec normalized_spec() {
    ConstraintSpec spec;
    spec.variant = Variant::RobustMeanVar;
    spec.alpha = 0.5;
    spec.capacity = 1.0;
    return spec;
}

/// Builds a genuine two-point job with the requested normalized mean and
/// dispersion. The upper support point is placed at or above mu + sqrt(b),
/// so the clipping rule never binds and the square-root theory applies
/// exactly -- on sets as well as single jobs, by subadditivity of the root.
inline Job make_theory_job(long long id, double mu, double b) {
    UsageDistribution u;
    u.kind = UsageKind::TwoPoint;
    if (b <= 0.0) {
        u.lower = mu;
        u.upper = std::min(1.0, mu + 0.5 * (1.0 - mu) + 1e-6);
        u.loc = mu;
    } else {
        const double root = std::sqrt(b);
        const double c = std::max(1.0, root / mu) * (1.0 + 1e-9);
        u.lower = mu - root / c;
        u.upper = mu + c * root;
        u.loc = mu;
    }
    return make_job(id, 1.0, u);
}

/// Mixed random instance: 2..max_jobs jobs, mostly stochastic with a few
/// deterministic ones. Every job is singleton-feasible at capacity 1.
inline TheoryInstance random_theory_instance(Rng& rng, int max_jobs = 12) {
    TheoryInstance inst;
    inst.spec = normalized_spec();
    if (max_jobs < 2) max_jobs = 2;
    const int n = 2 + static_cast<int>(uniform01(rng) * static_cast<double>(max_jobs - 1));
    inst.jobs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double mu = uniform(rng, 0.05, 0.9);
        double b = 0.0;
        if (uniform01(rng) >= 0.15) {
            const double cap = std::min((1.0 - mu) * (1.0 - mu), mu * (1.0 - mu));
            b = cap * uniform(rng, 0.01, 0.995);
        }
        inst.jobs.push_back(make_theory_job(i, mu, b));
    }
    return inst;
}

}  // namespace stochpack

#endif
