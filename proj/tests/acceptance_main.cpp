// Acceptance suite: runs every exit criterion end to end and prints one
// PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "stochpack/stochpack.hpp"
#include "helpers.hpp"

using namespace stochpack;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s  criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- criterion 1
void criterion_closed_form() {
    ConstraintSpec hoeff;
    hoeff.variant = Variant::Hoeffding;
    hoeff.alpha = 0.992;
    hoeff.capacity = 30.0;
    ConstraintSpec noc;
    noc.variant = Variant::NoOvercommit;
    noc.capacity = 30.0;
    const long long with_oc = max_identical_jobs(0.65, 0.49, hoeff, 1.0);
    const long long without = max_identical_jobs(0.65, 0.49, noc, 1.0);
    report(1, "closed-form capacity", with_oc == 36 && without == 30,
           "hoeffding alpha=0.992 -> " + std::to_string(with_oc) + " jobs, no-overcommit -> " +
               std::to_string(without) + " jobs (expected 36 / 30)");
}

// ------------------------------------------------------------ criteria 2 and 3
void criteria_theorem_audits() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(90210);
    const int instances = 500;
    long long ratio_violations = 0;
    long long bound_violations = 0;
    std::string first_failure;

    for (int i = 0; i < instances; ++i) {
        const TheoryInstance inst = random_theory_instance(rng, 12);
        const long long opt = exact_optimal(inst.jobs, inst.spec).count;
        const long long ff = first_fit(inst.jobs, inst.spec).machine_count();
        const long long bf = best_fit(inst.jobs, inst.spec).machine_count();
        const long long ls = local_search(inst.jobs, inst.spec).machine_count();

        // integer-exact forms of the 9/4 OPT + 1, 8/3 OPT and 2 OPT + 11 bounds
        if (4 * ff > 9 * opt + 4) {
            ++ratio_violations;
            if (first_failure.empty()) first_failure = "first-fit 9/4 at instance " + std::to_string(i);
        }
        if (3 * ff > 8 * opt || 3 * bf > 8 * opt) {
            ++ratio_violations;
            if (first_failure.empty()) first_failure = "lazy 8/3 at instance " + std::to_string(i);
        }
        if (ls > 2 * opt + 11) {
            ++ratio_violations;
            if (first_failure.empty()) first_failure = "local-search 2OPT+11 at instance " + std::to_string(i);
        }

        const auto norm = normalize_jobs(inst.jobs, inst.spec);
        if (static_cast<double>(opt) < sum_mu_plus_b(norm) ||
            static_cast<double>(opt) < f_bound(norm) - 1e-9) {
            ++bound_violations;
            if (first_failure.empty()) first_failure = "lower bound above OPT at instance " + std::to_string(i);
        }
    }

    // Feasibility separation over 1e5 random normalized sets, both directions.
    Rng set_rng(424243);
    for (int trial = 0; trial < 100000; ++trial) {
        const int n = 1 + static_cast<int>(uniform01(set_rng) * 6.0);
        std::vector<NormalizedJob> set;
        for (int i = 0; i < n; ++i) {
            set.push_back({uniform(set_rng, 0.0, 0.8), uniform(set_rng, 0.0, 0.6)});
        }
        const double cost = cost_of_set(set);
        const double sum = sum_mu_plus_b(set);
        if (cost > 1.0 && !(sum > 0.75)) ++bound_violations;
        if (cost <= 1.0 && !(sum <= 1.0 + 1e-12)) ++bound_violations;
    }

    const double elapsed = seconds_since(t0);
    report(2, "theorem audits vs exact oracle", ratio_violations == 0 && elapsed < 120.0,
           std::to_string(instances) + " instances, " + std::to_string(ratio_violations) +
               " ratio violations" + (first_failure.empty() ? "" : " (" + first_failure + ")") +
               ", " + std::to_string(elapsed).substr(0, 5) + "s");
    report(3, "lower-bound soundness", bound_violations == 0,
           "OPT vs sum(mu+b), OPT vs sum f, 3/4-threshold on 1e5 sets: " +
               std::to_string(bound_violations) + " violations");
}

// ---------------------------------------------------------------- criterion 4
void criterion_hoeffding_guarantee() {
    const auto t0 = std::chrono::steady_clock::now();
    const long long samples = 100000;
    const double se = std::sqrt(0.25 / static_cast<double>(samples));
    long long machines_checked = 0;
    long long violations = 0;
    double worst_margin = 1.0;

    WorkloadSpec w;
    w.job_count = 400;
    w.size_mix = production_size_mix();
    w.seed = 1905;
    for (UsageKind kind : {UsageKind::TwoPoint, UsageKind::TruncatedGaussian}) {
        w.kind = kind;
        const auto jobs = generate_workload(w);
        std::unordered_map<long long, const Job*> by_id;
        for (const Job& j : jobs) by_id.emplace(j.id, &j);
        for (double alpha : {0.9, 0.99, 0.999}) {
            ConstraintSpec spec;
            spec.variant = Variant::Hoeffding;
            spec.alpha = alpha;
            spec.capacity = 32.0;
            const Assignment a = best_fit(jobs, spec);
            for (const Machine& m : a.machines) {
                std::vector<Job> members;
                for (long long id : m.jobs) members.push_back(*by_id.at(id));
                Rng rng(derive_seed(808, {static_cast<std::uint64_t>(m.id),
                                          static_cast<std::uint64_t>(alpha * 1e6),
                                          static_cast<std::uint64_t>(kind)}));
                const double sat = chance_satisfaction_oracle(members, spec, samples, rng);
                worst_margin = std::min(worst_margin, sat - (alpha - 3.0 * se));
                if (sat < alpha - 3.0 * se) ++violations;
                ++machines_checked;
            }
        }
    }
    const double elapsed = seconds_since(t0);
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "%lld machines at alpha in {0.9, 0.99, 0.999}, %lld below alpha - 3se, worst margin %.4f, %.1fs",
                  machines_checked, violations, worst_margin, elapsed);
    report(4, "hoeffding chance guarantee", violations == 0 && elapsed < 60.0, detail);
}

// ---------------------------------------------------------------- criterion 5
void criterion_production_experiment() {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg;
    cfg.workload.job_count = 1000;
    cfg.workload.size_mix = production_size_mix();
    cfg.workload.kind = UsageKind::TruncatedGaussian;
    cfg.machine_sizes = {72.0};
    cfg.variants = {{Variant::NoOvercommit}, {Variant::Gaussian}};
    cfg.alpha_grid = {0.5, 0.9, 0.99, 0.999, 0.9999, 0.99999};
    cfg.replicas = 50;
    cfg.mc_samples = 5000;
    cfg.base_seed = 1729;
    cfg.threads = 2;
    const auto rows = run_experiment(cfg);

    double noc_sum = 0.0;
    int noc_n = 0;
    // average (risk, machines) per alpha across replicas
    std::map<double, std::pair<double, double>> curve;  // alpha -> (sum risk, sum machines)
    std::map<double, int> curve_n;
    for (const ExperimentRow& r : rows) {
        if (r.variant == "no_overcommit") {
            noc_sum += static_cast<double>(r.machines_used);
            ++noc_n;
        } else {
            curve[r.alpha].first += r.violation_rate;
            curve[r.alpha].second += static_cast<double>(r.machines_used);
            curve_n[r.alpha]++;
        }
    }
    const double noc_mean = noc_sum / noc_n;

    std::vector<std::pair<double, double>> pts;  // (mean risk, mean machines)
    for (const auto& [alpha, sums] : curve) {
        pts.emplace_back(sums.first / curve_n[alpha], sums.second / curve_n[alpha]);
    }
    const double machines_at_1pct = machines_at_risk(pts, 0.01);

    const auto table = summarize(rows, {0.01});
    double savings_pct = 0.0;
    for (const SummaryEntry& e : table) {
        if (e.variant == "gaussian") savings_pct = e.savings_pct;
    }

    const double elapsed = seconds_since(t0);
    const bool ok = std::abs(noc_mean - 54.0) <= 3.0 && std::abs(machines_at_1pct - 46.0) <= 3.0 &&
                    savings_pct >= 4.0 && savings_pct <= 18.0 && elapsed < 600.0;
    char detail[220];
    std::snprintf(detail, sizeof detail,
                  "no-overcommit mean %.2f (target 54+-3), machines at 1%% risk %.2f (target 46+-3), "
                  "savings at 1%% %.1f%% (band 4-18%%), %.0fs",
                  noc_mean, machines_at_1pct, savings_pct, elapsed);
    report(5, "production-scale experiment at 72 cores", ok, detail);
}

// ---------------------------------------------------------------- criterion 6
void criterion_benchmark_dominance() {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg;
    cfg.workload.job_count = 1000;
    cfg.workload.size_mix = production_size_mix();
    cfg.workload.kind = UsageKind::TruncatedGaussian;
    cfg.machine_sizes = {32.0};
    cfg.variants = {{Variant::NoOvercommit}, {Variant::Gaussian},  {Variant::LinearGaussian},
                    {Variant::Hoeffding},    {Variant::LinearHoeffding}, {Variant::RobustMeanVar},
                    {Variant::LinearRobust}};
    cfg.alpha_grid = {0.5, 0.9, 0.99, 0.999, 0.9999, 0.99999};
    cfg.replicas = 50;
    cfg.mc_samples = 2500;
    cfg.base_seed = 6174;
    cfg.threads = 2;
    const auto rows = run_experiment(cfg);

    // Per replica, savings at matched 1% realized risk per variant.
    std::map<std::pair<std::string, int>, std::vector<std::pair<double, double>>> pts;
    std::map<int, long long> baseline;
    for (const ExperimentRow& r : rows) {
        if (r.variant == "no_overcommit") {
            baseline[r.replica] = r.machines_used;
        } else {
            pts[{r.variant, r.replica}].emplace_back(r.violation_rate,
                                                     static_cast<double>(r.machines_used));
        }
    }
    auto savings_at = [&](const std::string& variant, int replica) {
        const double m = machines_at_risk(pts.at({variant, replica}), 0.01);
        return 1.0 - m / static_cast<double>(baseline.at(replica));
    };

    const std::pair<std::string, std::string> pairs[] = {{"gaussian", "linear_gaussian"},
                                                         {"hoeffding", "linear_hoeffding"},
                                                         {"robust", "linear_robust"}};
    bool ok = true;
    std::string detail;
    for (const auto& [nonlinear, linear] : pairs) {
        int wins = 0;
        for (int r = 0; r < cfg.replicas; ++r) {
            if (savings_at(nonlinear, r) >= savings_at(linear, r) - 1e-12) ++wins;
        }
        ok = ok && wins >= 45;
        if (!detail.empty()) detail += ", ";
        detail += nonlinear + ">=" + linear + " in " + std::to_string(wins) + "/50";
    }
    const double elapsed = seconds_since(t0);
    detail += " (need >= 45), " + std::to_string(static_cast<int>(elapsed)) + "s";
    report(6, "nonlinear vs linear benchmarks at 32 cores", ok, detail);
}

// ---------------------------------------------------------------- criterion 7
void criterion_classical_reduction() {
    Rng rng(1202);
    long long mismatches = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + static_cast<int>(uniform01(rng) * 25);
        std::vector<double> sizes;
        std::vector<Job> jobs;
        for (int i = 0; i < n; ++i) {
            sizes.push_back(uniform(rng, 0.05, 0.95));
            jobs.push_back(make_theory_job(i, sizes.back(), 0.0));
        }
        const ConstraintSpec spec = normalized_spec();
        const auto check = [&](const Assignment& got, const std::vector<std::vector<int>>& want) {
            if (got.machine_count() != static_cast<int>(want.size())) return false;
            for (std::size_t m = 0; m < want.size(); ++m) {
                if (got.machines[m].jobs.size() != want[m].size()) return false;
                for (std::size_t k = 0; k < want[m].size(); ++k) {
                    if (got.machines[m].jobs[k] != want[m][k]) return false;
                }
            }
            return true;
        };
        if (!check(first_fit(jobs, spec), oracles::classical_first_fit(sizes, 1.0))) ++mismatches;
        if (!check(best_fit(jobs, spec), oracles::classical_best_fit(sizes, 1.0))) ++mismatches;
    }
    report(7, "classical reduction at b = 0", mismatches == 0,
           "first-fit and best-fit vs classical reference on 100 instances, " +
               std::to_string(mismatches) + " mismatches");
}

// ---------------------------------------------------------------- criterion 8
void criterion_frontier_consistency() {
    long long violations = 0;
    for (Variant v : {Variant::Gaussian, Variant::Hoeffding, Variant::RobustMeanVar}) {
        for (double alpha : {0.9, 0.99, 0.992, 0.999}) {
            for (double capacity : {10.0, 30.0, 72.0}) {
                ConstraintSpec spec;
                spec.variant = v;
                spec.alpha = alpha;
                spec.capacity = capacity;
                const double d = d_of_alpha(spec);
                long long prev_n = 1LL << 40;
                for (double b : {0.0, 0.1225, 0.49, 1.2}) {
                    const long long n = max_identical_jobs(0.65, b, spec);
                    // closed form agrees with direct evaluation at n and n+1
                    const auto holds = [&](long long k) {
                        return static_cast<double>(k) * 0.65 +
                                   d * std::sqrt(static_cast<double>(k) * b) <=
                               capacity;
                    };
                    if (!holds(n) || holds(n + 1)) ++violations;
                    if (n > prev_n) ++violations;  // monotone in b
                    prev_n = n;
                }

                // frontier: monotone in n2 and integer-tight per point
                const JobClass c1{0.65, 0.0, 0};
                const JobClass c2{0.65, 0.49, 0};
                long long prev_n1 = 1LL << 40;
                for (const FrontierPoint& p : two_class_frontier(c1, c2, spec, 20)) {
                    if (p.max_n1 > prev_n1) ++violations;
                    prev_n1 = p.max_n1;
                    if (p.max_n1 < 0) continue;
                    const double base = static_cast<double>(p.n2) * 0.65 +
                                        d * std::sqrt(static_cast<double>(p.n2) * 0.49);
                    const double with_n1 = base + static_cast<double>(p.max_n1) * 0.65;
                    if (with_n1 > capacity || with_n1 + 0.65 <= capacity) ++violations;
                }
            }
        }
    }
    // alpha monotonicity of the identical-jobs count
    for (double capacity : {30.0, 72.0}) {
        long long prev = 1LL << 40;
        for (double alpha : {0.5, 0.9, 0.99, 0.999, 0.9999}) {
            ConstraintSpec spec;
            spec.variant = Variant::Hoeffding;
            spec.alpha = alpha;
            spec.capacity = capacity;
            const long long n = max_identical_jobs(0.65, 0.49, spec);
            if (n > prev) ++violations;
            prev = n;
        }
    }
    report(8, "frontier consistency grid", violations == 0,
           "closed forms vs direct integer search plus monotonicity: " +
               std::to_string(violations) + " violations");
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion_closed_form();
    criteria_theorem_audits();
    criterion_hoeffding_guarantee();
    criterion_production_experiment();
    criterion_benchmark_dominance();
    criterion_classical_reduction();
    criterion_frontier_consistency();
    std::printf("%s: %d failure(s), total %.0fs\n", g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
                g_failures, seconds_since(t0));
    return g_failures == 0 ? 0 : 1;
}
