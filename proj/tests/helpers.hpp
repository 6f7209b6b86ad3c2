#ifndef STOCHPACK_TESTS_HELPERS_HPP
#define STOCHPACK_TESTS_HELPERS_HPP

// Independent oracles used by the tests. Everything here is deliberately
// implemented from first principles, separate from the library code paths it
// checks.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace oracles {

// P(Binomial(n, 1/2) >= k), exact up to double rounding via log-binomials.
inline double binomial_half_tail_ge(int n, int k) {
    if (k <= 0) return 1.0;
    if (k > n) return 0.0;
    double total = 0.0;
    const double log_half_n = -static_cast<double>(n) * std::log(2.0);
    for (int i = k; i <= n; ++i) {
        const double log_comb =
            std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0);
        total += std::exp(log_comb + log_half_n);
    }
    return total;
}

// Classical deterministic First-Fit on plain sizes; returns per-machine item
// index lists.
inline std::vector<std::vector<int>> classical_first_fit(const std::vector<double>& sizes,
                                                         double capacity) {
    std::vector<std::vector<int>> machines;
    std::vector<double> loads;
    for (int i = 0; i < static_cast<int>(sizes.size()); ++i) {
        bool placed = false;
        for (std::size_t m = 0; m < machines.size(); ++m) {
            if (loads[m] + sizes[static_cast<std::size_t>(i)] <= capacity) {
                machines[m].push_back(i);
                loads[m] += sizes[static_cast<std::size_t>(i)];
                placed = true;
                break;
            }
        }
        if (!placed) {
            machines.push_back({i});
            loads.push_back(sizes[static_cast<std::size_t>(i)]);
        }
    }
    return machines;
}

// Classical deterministic Best-Fit: tightest remaining space wins, lowest
// index on ties.
inline std::vector<std::vector<int>> classical_best_fit(const std::vector<double>& sizes,
                                                        double capacity) {
    std::vector<std::vector<int>> machines;
    std::vector<double> loads;
    for (int i = 0; i < static_cast<int>(sizes.size()); ++i) {
        int best = -1;
        double best_slack = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < machines.size(); ++m) {
            const double slack = capacity - loads[m];
            if (loads[m] + sizes[static_cast<std::size_t>(i)] <= capacity && slack < best_slack) {
                best = static_cast<int>(m);
                best_slack = slack;
            }
        }
        if (best < 0) {
            machines.push_back({i});
            loads.push_back(sizes[static_cast<std::size_t>(i)]);
        } else {
            machines[static_cast<std::size_t>(best)].push_back(i);
            loads[static_cast<std::size_t>(best)] += sizes[static_cast<std::size_t>(i)];
        }
    }
    return machines;
}

struct SampleStats {
    double mean = 0.0;
    double variance = 0.0;
    double mean_se = 0.0;
    double variance_se = 0.0;
};

// Sample mean/variance with standard errors from the 2nd and 4th central
// moments.
template <typename Draw>
SampleStats sample_stats(Draw&& draw, long long n) {
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (long long i = 0; i < n; ++i) {
        xs.push_back(draw());
        sum += xs.back();
    }
    SampleStats st;
    st.mean = sum / static_cast<double>(n);
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d = x - st.mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    st.variance = m2 * static_cast<double>(n) / static_cast<double>(n - 1);
    st.mean_se = std::sqrt(m2 / static_cast<double>(n));
    st.variance_se = std::sqrt(std::max(0.0, m4 - m2 * m2) / static_cast<double>(n));
    return st;
}

// Truncated-normal sampler by rejection from the parent normal, independent
// of the library's inverse-CDF path.
inline double rejection_truncated_normal(std::mt19937_64& rng, double loc, double scale, double lo,
                                         double hi) {
    std::normal_distribution<double> parent(loc, scale);
    for (;;) {
        const double x = parent(rng);
        if (x >= lo && x <= hi) return x;
    }
}

}  // namespace oracles

#endif
