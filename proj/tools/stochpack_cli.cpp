// Command-line harness for the stochastic bin packing library: reproducible
// overcommitment experiments, class-planner frontier tables, theorem audits
// against the exact oracle, and single-run traces.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stochpack/stochpack.hpp"

namespace {

using namespace stochpack;

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& out, const std::string& algorithm, int jobs) {
    ExperimentConfig cfg = load_config(config_path);
    if (seed) cfg.base_seed = *seed;
    if (!algorithm.empty()) cfg.algorithm = parse_algorithm(algorithm);
    if (!out.empty()) cfg.output_path = out;
    if (jobs > 0) cfg.threads = jobs;

    const std::vector<ExperimentRow> rows = run_experiment(cfg);
    if (cfg.output_path.empty()) {
        write_csv(rows, std::cout);
    } else {
        write_csv_file(rows, cfg.output_path);
        std::cerr << "wrote " << rows.size() << " rows to " << cfg.output_path << "\n";
    }

    bool has_baseline = false, has_other = false;
    for (const ExperimentRow& r : rows) {
        (r.variant == to_string(Variant::NoOvercommit) ? has_baseline : has_other) = true;
    }
    if (has_baseline && has_other) {
        const auto table = summarize(rows);
        print_summary(table, cfg.output_path.empty() ? std::cerr : std::cout);
    }
    return 0;
}

int cmd_frontier(double capacity, const std::string& variant, double alpha, double mu1, double b1,
                 double upper1, double mu2, double b2, double upper2, long long n2_max,
                 long long count1, long long count2, const std::string& out) {
    ConstraintSpec spec;
    spec.variant = [&] {
        ExperimentConfig dummy;
        for (Variant v : {Variant::NoOvercommit, Variant::Gaussian, Variant::Hoeffding,
                          Variant::RobustMeanVar, Variant::LinearGaussian, Variant::LinearHoeffding,
                          Variant::LinearRobust, Variant::PNorm, Variant::LogBuffer}) {
            if (variant == to_string(v)) return v;
        }
        throw CLI::ValidationError("--variant", "unknown variant '" + variant + "'");
    }();
    spec.alpha = spec.variant == Variant::NoOvercommit ? 1.0 : alpha;
    spec.capacity = capacity;

    const auto nan = std::numeric_limits<double>::quiet_NaN();
    JobClass c1{mu1, b1, count1, upper1 > 0 ? upper1 : nan};
    JobClass c2{mu2, b2, count2, upper2 > 0 ? upper2 : nan};

    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!out.empty()) {
        file.open(out, std::ios::binary);
        if (!file) throw CLI::ValidationError("--out", "cannot open " + out);
        os = &file;
    }

    *os << "n2,max_n1\n";
    for (const FrontierPoint& p : two_class_frontier(c1, c2, spec, n2_max)) {
        *os << p.n2 << ',' << p.max_n1 << '\n';
    }

    if (count1 > 0 || count2 > 0) {
        const std::vector<JobClass> classes{c1, c2};
        const CuttingStockResult res = solve_cutting_stock(classes, spec);
        std::cerr << "machines: " << res.machine_count;
        if (!std::isnan(res.lp_bound)) std::cerr << " (LP bound " << res.lp_bound << ")";
        std::cerr << "\npatterns:";
        for (const MixPattern& p : res.patterns) {
            std::cerr << " " << p.uses << "x(" << p.per_class_counts[0] << ","
                      << p.per_class_counts[1] << ")";
        }
        std::cerr << "\n";
    }
    return 0;
}

int cmd_audit(std::uint64_t seed, int instances, int max_jobs, bool verbose) {
    Rng rng(seed);
    long long violations = 0;
    for (int i = 0; i < instances; ++i) {
        const TheoryInstance inst = random_theory_instance(rng, max_jobs);
        const ExactResult opt = exact_optimal(inst.jobs, inst.spec);

        struct RunCase {
            AlgorithmKind kind;
            Assignment assignment;
        };
        std::vector<RunCase> runs;
        runs.push_back({AlgorithmKind::FirstFit, first_fit(inst.jobs, inst.spec)});
        runs.push_back({AlgorithmKind::BestFit, best_fit(inst.jobs, inst.spec)});
        runs.push_back({AlgorithmKind::LocalSearch, local_search(inst.jobs, inst.spec)});

        for (const RunCase& run : runs) {
            const RatioAudit audit =
                audit_run(inst.jobs, inst.spec, run.assignment, run.kind, opt.count);
            if (run.assignment.machine_count() < opt.count) {
                ++violations;
                std::cout << "instance " << i << ": " << audit.algorithm
                          << " beat the exact oracle (" << run.assignment.machine_count() << " < "
                          << opt.count << ")\n";
            }
            if (!audit.all_passed()) {
                ++violations;
                std::cout << "instance " << i << ": " << audit.algorithm
                          << " violated: " << audit.flags() << " (machines "
                          << run.assignment.machine_count() << ", OPT " << opt.count << ")\n";
            }
            if (verbose) {
                std::cout << "instance " << i << " " << audit.algorithm << ": machines "
                          << run.assignment.machine_count() << " OPT " << opt.count << " ratio "
                          << audit.ratio << "\n";
            }
        }

        const auto norm = normalize_jobs(inst.jobs, inst.spec);
        const double sum_bound = sum_mu_plus_b(norm);
        const double f_lower = f_bound(norm);
        if (static_cast<double>(opt.count) < sum_bound || static_cast<double>(opt.count) < f_lower) {
            ++violations;
            std::cout << "instance " << i << ": lower bound above OPT (sum " << sum_bound << ", f "
                      << f_lower << ", OPT " << opt.count << ")\n";
        }
    }
    if (violations > 0) {
        std::cout << "AUDIT FAILED: " << violations << " violation(s) over " << instances
                  << " instances (seed " << seed << ")\n";
        return 1;
    }
    std::cout << "audit passed: " << instances << " instances, seed " << seed << "\n";
    return 0;
}

int cmd_single(const std::string& config_path, std::optional<std::uint64_t> seed,
               const std::string& variant, double alpha, double size,
               const std::string& algorithm) {
    ExperimentConfig cfg = load_config(config_path);
    if (seed) cfg.workload.seed = *seed;
    if (!algorithm.empty()) cfg.algorithm = parse_algorithm(algorithm);

    VariantTemplate tpl = cfg.variants.front();
    if (!variant.empty()) {
        nlohmann::json j = variant;
        tpl = variant_from_json(j);
    }
    const double capacity = size > 0 ? size : cfg.machine_sizes.front();
    ConstraintSpec spec;
    spec.variant = tpl.variant;
    spec.alpha = tpl.variant == Variant::NoOvercommit ? 1.0 : alpha;
    spec.p_exponent = tpl.p_exponent;
    spec.base = tpl.base;
    spec.capacity = capacity;

    const std::vector<Job> jobs = generate_workload(cfg.workload);
    double total_upper = 0.0, total_mean = 0.0;
    for (const Job& j : jobs) {
        total_upper += j.upper_bound();
        total_mean += j.mean;
    }
    std::cout << "workload: " << jobs.size() << " jobs, kind " << to_string(cfg.workload.kind)
              << ", seed " << cfg.workload.seed << "\n"
              << "total sellable " << total_upper << ", total mean " << total_mean << "\n"
              << "constraint: " << to_string(spec.variant) << " alpha " << spec.alpha
              << " capacity " << capacity << "\n";

    const Assignment a = detail::pack(jobs, spec, cfg.algorithm);
    const ViolationEstimate est =
        estimate_violations(a, jobs, spec, cfg.mc_samples, derive_seed(cfg.workload.seed, {2}));
    const RatioAudit audit = audit_run(jobs, spec, a, cfg.algorithm);

    std::cout << "machines: " << a.machine_count() << " (" << to_string(cfg.algorithm) << ")\n";
    for (const Machine& m : a.machines) {
        std::cout << "  machine " << m.id << ": " << m.jobs.size() << " jobs, effective load "
                  << effective_load(m.load, spec) << " / " << capacity << ", violation rate "
                  << est.per_machine_rate[static_cast<std::size_t>(m.id)] << "\n";
    }
    std::cout << "aggregate violation rate: " << est.aggregate_rate << " (" << est.samples
              << " samples/machine)\n"
              << "OCF: " << (total_upper / (capacity * std::max(1, a.machine_count()))) << "\n"
              << "audit: lower bound " << audit.lower_bound << " (" << to_string(audit.bound_source)
              << "), ratio " << audit.ratio
              << (audit.flags().empty() ? ", all checks passed" : ", flags " + audit.flags())
              << "\n";
    return audit.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic bin packing with overcommitment"};
    app.require_subcommand(1);

    // run
    std::string run_config, run_out, run_algorithm;
    std::optional<std::uint64_t> run_seed;
    int run_jobs = 0;
    auto* run = app.add_subcommand("run", "run an experiment sweep from a JSON config, emit CSV");
    run->add_option("--config", run_config, "experiment config path")->required();
    run->add_option("--seed", run_seed, "override the base seed");
    run->add_option("--out", run_out, "output CSV path (default: config outputPath or stdout)");
    run->add_option("--algorithm", run_algorithm,
                    "first-fit|best-fit|next-fit|bucketed|local-search");
    run->add_option("--jobs", run_jobs, "worker threads for replicas");

    // frontier
    double fr_capacity = 30.0, fr_alpha = 0.99, fr_mu1 = 0.65, fr_b1 = 0.0, fr_upper1 = 0.0;
    double fr_mu2 = 0.65, fr_b2 = 0.49, fr_upper2 = 0.0;
    long long fr_n2max = 40, fr_count1 = 0, fr_count2 = 0;
    std::string fr_variant = "hoeffding", fr_out;
    auto* frontier = app.add_subcommand("frontier", "two-class frontier table as CSV");
    frontier->add_option("--capacity", fr_capacity, "machine capacity V");
    frontier->add_option("--variant", fr_variant, "constraint variant");
    frontier->add_option("--alpha", fr_alpha, "confidence level");
    frontier->add_option("--mu1", fr_mu1, "class 1 mean");
    frontier->add_option("--b1", fr_b1, "class 1 dispersion");
    frontier->add_option("--upper1", fr_upper1, "class 1 per-job upper bound (0 = unset)");
    frontier->add_option("--mu2", fr_mu2, "class 2 mean");
    frontier->add_option("--b2", fr_b2, "class 2 dispersion");
    frontier->add_option("--upper2", fr_upper2, "class 2 per-job upper bound (0 = unset)");
    frontier->add_option("--n2-max", fr_n2max, "largest n2 to tabulate");
    frontier->add_option("--count1", fr_count1, "class 1 job count (enables cutting stock)");
    frontier->add_option("--count2", fr_count2, "class 2 job count (enables cutting stock)");
    frontier->add_option("--out", fr_out, "CSV output path (default stdout)");

    // audit
    std::uint64_t audit_seed = 0;
    int audit_instances = 200, audit_max_jobs = 12;
    bool audit_verbose = false;
    auto* audit = app.add_subcommand("audit", "theorem audits on random instances vs exact oracle");
    audit->add_option("--seed", audit_seed, "RNG seed");
    audit->add_option("--instances", audit_instances, "number of random instances");
    audit->add_option("--max-jobs", audit_max_jobs, "largest instance size (<= oracle cap)");
    audit->add_flag("--verbose", audit_verbose, "print every ratio");

    // single
    std::string single_config, single_variant, single_algorithm;
    std::optional<std::uint64_t> single_seed;
    double single_alpha = 0.99, single_size = 0.0;
    auto* single = app.add_subcommand("single", "one workload, one variant, verbose trace");
    single->add_option("--config", single_config, "experiment config path")->required();
    single->add_option("--seed", single_seed, "override the workload seed");
    single->add_option("--variant", single_variant, "constraint variant (default: first in config)");
    single->add_option("--alpha", single_alpha, "confidence level");
    single->add_option("--size", single_size, "machine size (default: first in config)");
    single->add_option("--algorithm", single_algorithm,
                       "first-fit|best-fit|next-fit|bucketed|local-search");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_config, run_seed, run_out, run_algorithm, run_jobs);
        if (frontier->parsed()) {
            return cmd_frontier(fr_capacity, fr_variant, fr_alpha, fr_mu1, fr_b1, fr_upper1, fr_mu2,
                                fr_b2, fr_upper2, fr_n2max, fr_count1, fr_count2, fr_out);
        }
        if (audit->parsed()) {
            return cmd_audit(audit_seed, audit_instances, audit_max_jobs, audit_verbose);
        }
        if (single->parsed()) {
            return cmd_single(single_config, single_seed, single_variant, single_alpha, single_size,
                              single_algorithm);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
