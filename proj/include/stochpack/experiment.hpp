#ifndef STOCHPACK_EXPERIMENT_HPP
#define STOCHPACK_EXPERIMENT_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "stochpack/bounds.hpp"
#include "stochpack/capacity.hpp"
#include "stochpack/monte_carlo.hpp"
#include "stochpack/offline.hpp"
#include "stochpack/online.hpp"
#include "stochpack/workload.hpp"

namespace stochpack {

struct VariantTemplate {
    Variant variant = Variant::NoOvercommit;
    double p_exponent = 0.5;
    BufferBase base = BufferBase::Gaussian;
};

struct ExperimentConfig {
    WorkloadSpec workload;
    std::vector<double> machine_sizes;
    std::vector<VariantTemplate> variants;
    std::vector<double> alpha_grid{0.5, 0.9, 0.99, 0.999, 0.9999, 0.99999};
    int replicas = 50;
    long long mc_samples = 5000;
    std::uint64_t base_seed = 0;
    std::string output_path;
    AlgorithmKind algorithm = AlgorithmKind::BestFit;
    int threads = 1;

    void validate() const {
        workload.validate();
        if (machine_sizes.empty()) throw std::invalid_argument("ExperimentConfig: machineSizes must be non-empty");
        for (double v : machine_sizes) {
            if (!(v > 0.0)) throw std::invalid_argument("ExperimentConfig: machine sizes must be positive");
        }
        if (variants.empty()) throw std::invalid_argument("ExperimentConfig: variants must be non-empty");
        if (alpha_grid.empty()) throw std::invalid_argument("ExperimentConfig: alphaGrid must be non-empty");
        for (double a : alpha_grid) {
            if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("ExperimentConfig: alphaGrid values must lie in (0, 1)");
        }
        if (replicas < 1) throw std::invalid_argument("ExperimentConfig: replicas must be >= 1");
        if (mc_samples < 1) throw std::invalid_argument("ExperimentConfig: mcSamples must be >= 1");
        if (threads < 1) throw std::invalid_argument("ExperimentConfig: threads must be >= 1");
    }
};

struct ExperimentRow {
    std::string variant;
    std::string algorithm;
    double alpha = 1.0;
    double machine_size = 0.0;
    int replica = 0;
    std::uint64_t workload_seed = 0;
    std::uint64_t mc_seed = 0;
    long long machines_used = 0;
    double violation_rate = 0.0;
    double ocf = 0.0;
    double savings_vs_no_overcommit = 0.0;
    std::string audit_flags;
};

namespace detail {

inline Assignment pack(std::span<const Job> jobs, const ConstraintSpec& spec, AlgorithmKind algo) {
    switch (algo) {
        case AlgorithmKind::FirstFit: return first_fit(jobs, spec);
        case AlgorithmKind::BestFit: return best_fit(jobs, spec);
        case AlgorithmKind::NextFit: return next_fit(jobs, spec);
        case AlgorithmKind::Bucketed: return bucketed_fit(jobs, spec, BucketingPolicy::geometric());
        case AlgorithmKind::LocalSearch: return local_search(jobs, spec);
    }
    throw std::invalid_argument("pack: unknown algorithm");
}

inline ConstraintSpec instantiate(const VariantTemplate& tpl, double alpha, double capacity) {
    ConstraintSpec spec;
    spec.variant = tpl.variant;
    spec.alpha = tpl.variant == Variant::NoOvercommit ? 1.0 : alpha;
    spec.p_exponent = tpl.p_exponent;
    spec.capacity = capacity;
    spec.base = tpl.base;
    return spec;
}

}  // namespace detail

/// Runs the full sweep: replicas x variants x alpha grid x machine sizes.
/// Rows come back ordered by (replica, variant, alpha, size) and are a pure
/// function of the config; replicas may execute on several threads without
/// changing a byte of the output.
inline std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t sizes = cfg.machine_sizes.size();
    std::size_t rows_per_replica = 0;
    for (const VariantTemplate& tpl : cfg.variants) {
        rows_per_replica += (tpl.variant == Variant::NoOvercommit ? 1 : cfg.alpha_grid.size()) * sizes;
    }
    std::vector<ExperimentRow> rows(rows_per_replica * static_cast<std::size_t>(cfg.replicas));

    auto run_replica = [&](int r) {
        const std::uint64_t wseed = derive_seed(cfg.base_seed, {1, static_cast<std::uint64_t>(r)});
        WorkloadSpec wspec = cfg.workload;
        wspec.seed = wseed;
        const std::vector<Job> jobs = generate_workload(wspec);
        double total_upper = 0.0;
        for (const Job& j : jobs) total_upper += j.upper_bound();

        // No-overcommit baseline per machine size, for OCF and savings.
        std::vector<long long> baseline(sizes, 0);
        for (std::size_t s = 0; s < sizes; ++s) {
            ConstraintSpec noc;
            noc.variant = Variant::NoOvercommit;
            noc.alpha = 1.0;
            noc.capacity = cfg.machine_sizes[s];
            baseline[s] = detail::pack(jobs, noc, cfg.algorithm).machine_count();
        }

        std::size_t slot = rows_per_replica * static_cast<std::size_t>(r);
        for (std::size_t v = 0; v < cfg.variants.size(); ++v) {
            const VariantTemplate& tpl = cfg.variants[v];
            const bool baseline_variant = tpl.variant == Variant::NoOvercommit;
            const std::size_t alpha_count = baseline_variant ? 1 : cfg.alpha_grid.size();
            for (std::size_t ai = 0; ai < alpha_count; ++ai) {
                for (std::size_t s = 0; s < sizes; ++s) {
                    const double alpha = baseline_variant ? 1.0 : cfg.alpha_grid[ai];
                    const ConstraintSpec spec = detail::instantiate(tpl, alpha, cfg.machine_sizes[s]);
                    const Assignment a = detail::pack(jobs, spec, cfg.algorithm);
                    const std::uint64_t mc_seed = derive_seed(
                        cfg.base_seed, {2, static_cast<std::uint64_t>(r), v, ai, s});
                    const ViolationEstimate est =
                        estimate_violations(a, jobs, spec, cfg.mc_samples, mc_seed);
                    const RatioAudit audit = audit_run(jobs, spec, a, cfg.algorithm);

                    ExperimentRow row;
                    row.variant = to_string(tpl.variant);
                    row.algorithm = to_string(cfg.algorithm);
                    row.alpha = alpha;
                    row.machine_size = cfg.machine_sizes[s];
                    row.replica = r;
                    row.workload_seed = wseed;
                    row.mc_seed = mc_seed;
                    row.machines_used = a.machine_count();
                    row.violation_rate = est.aggregate_rate;
                    row.ocf = a.machine_count() > 0
                                  ? total_upper / (cfg.machine_sizes[s] * a.machine_count())
                                  : 0.0;
                    row.savings_vs_no_overcommit =
                        baseline[s] > 0
                            ? 1.0 - static_cast<double>(a.machine_count()) / static_cast<double>(baseline[s])
                            : 0.0;
                    row.audit_flags = audit.flags();
                    rows[slot++] = std::move(row);
                }
            }
        }
    };

    if (cfg.threads <= 1 || cfg.replicas <= 1) {
        for (int r = 0; r < cfg.replicas; ++r) run_replica(r);
    } else {
        std::vector<std::thread> pool;
        const int t = std::min(cfg.threads, cfg.replicas);
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(t));
        for (int w = 0; w < t; ++w) {
            pool.emplace_back([&, w]() {
                try {
                    for (int r = w; r < cfg.replicas; r += t) run_replica(r);
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    return rows;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace detail

inline void write_csv(std::span<const ExperimentRow> rows, std::ostream& os) {
    os << "variant,algorithm,alpha,machine_size,replica,workload_seed,mc_seed,machines_used,"
          "violation_rate,ocf,savings_vs_no_overcommit,audit_flags\n";
    for (const ExperimentRow& r : rows) {
        os << detail::csv_quote(r.variant) << ',' << detail::csv_quote(r.algorithm) << ','
           << detail::format_double(r.alpha) << ',' << detail::format_double(r.machine_size) << ','
           << r.replica << ',' << r.workload_seed << ',' << r.mc_seed << ',' << r.machines_used
           << ',' << detail::format_double(r.violation_rate) << ',' << detail::format_double(r.ocf)
           << ',' << detail::format_double(r.savings_vs_no_overcommit) << ','
           << detail::csv_quote(r.audit_flags) << '\n';
    }
}

inline void write_csv_file(std::span<const ExperimentRow> rows, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    write_csv(rows, os);
}

struct SummaryEntry {
    std::string variant;
    double machine_size = 0.0;
    double target_risk = 0.0;
    double savings_pct = 0.0;       // mean over replicas, percent
    double machines_at_risk = 0.0;  // mean over replicas
    int replicas = 0;
};

// Machines needed at a tolerated risk level: lower envelope of the
// (realized risk, machines) points, linearly interpolated, clamped at the
// ends of the observed risk range.
inline double machines_at_risk(std::vector<std::pair<double, double>> pts, double risk) {
    std::sort(pts.begin(), pts.end());
    std::vector<std::pair<double, double>> env;
    for (const auto& p : pts) {
        if (!env.empty() && env.back().first == p.first) {
            env.back().second = std::min(env.back().second, p.second);
            continue;
        }
        env.push_back(p);
        if (env.size() >= 2) {
            auto& prev = env[env.size() - 2];
            env.back().second = std::min(env.back().second, prev.second);
        }
    }
    if (env.empty()) return 0.0;
    if (risk <= env.front().first) return env.front().second;
    if (risk >= env.back().first) return env.back().second;
    for (std::size_t i = 1; i < env.size(); ++i) {
        if (risk <= env[i].first) {
            const auto& [x0, y0] = env[i - 1];
            const auto& [x1, y1] = env[i];
            const double t = (risk - x0) / (x1 - x0);
            return y0 + t * (y1 - y0);
        }
    }
    return env.back().second;
}

/// Savings at the target risk levels (0.1% and 1%), interpolated per replica
/// from that replica's realized tradeoff curve, then averaged.
inline std::vector<SummaryEntry> summarize(std::span<const ExperimentRow> rows,
                                           std::vector<double> target_risks = {0.001, 0.01}) {
    if (rows.empty()) throw std::invalid_argument("summarize: no rows");
    // (size, replica) -> baseline machine count
    std::map<std::pair<double, int>, long long> baseline;
    for (const ExperimentRow& r : rows) {
        if (r.variant == to_string(Variant::NoOvercommit)) {
            baseline[{r.machine_size, r.replica}] = r.machines_used;
        }
    }
    // (variant, size) -> replica -> tradeoff points
    std::map<std::pair<std::string, double>, std::map<int, std::vector<std::pair<double, double>>>> curves;
    for (const ExperimentRow& r : rows) {
        if (r.variant == to_string(Variant::NoOvercommit)) continue;
        curves[{r.variant, r.machine_size}][r.replica].emplace_back(
            r.violation_rate, static_cast<double>(r.machines_used));
    }

    std::vector<SummaryEntry> out;
    for (const auto& [key, by_replica] : curves) {
        for (double risk : target_risks) {
            SummaryEntry e;
            e.variant = key.first;
            e.machine_size = key.second;
            e.target_risk = risk;
            double savings_sum = 0.0, machines_sum = 0.0;
            int n = 0;
            for (const auto& [replica, pts] : by_replica) {
                const auto base_it = baseline.find({key.second, replica});
                if (base_it == baseline.end() || base_it->second <= 0) continue;
                const double m = machines_at_risk(pts, risk);
                savings_sum += 1.0 - m / static_cast<double>(base_it->second);
                machines_sum += m;
                ++n;
            }
            if (n == 0) continue;
            e.savings_pct = 100.0 * savings_sum / n;
            e.machines_at_risk = machines_sum / n;
            e.replicas = n;
            out.push_back(std::move(e));
        }
    }
    return out;
}

inline void print_summary(std::span<const SummaryEntry> entries, std::ostream& os) {
    os << "variant              size   risk%   savings%   machines\n";
    for (const SummaryEntry& e : entries) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-20s %-6g %-7g %-10.2f %-10.2f\n", e.variant.c_str(),
                      e.machine_size, 100.0 * e.target_risk, e.savings_pct, e.machines_at_risk);
        os << buf;
    }
}

// ---------------------------------------------------------------------------
// JSON config

namespace detail {

inline UsageKind parse_usage_kind(const std::string& s) {
    if (s == "two_point" || s == "bernoulli") return UsageKind::TwoPoint;
    if (s == "truncated_gaussian") return UsageKind::TruncatedGaussian;
    throw std::invalid_argument("config: unknown usage kind '" + s + "'");
}

inline Variant parse_variant_name(const std::string& s) {
    for (Variant v : {Variant::NoOvercommit, Variant::Gaussian, Variant::Hoeffding,
                      Variant::RobustMeanVar, Variant::LinearGaussian, Variant::LinearHoeffding,
                      Variant::LinearRobust, Variant::PNorm, Variant::LogBuffer}) {
        if (s == to_string(v)) return v;
    }
    throw std::invalid_argument("config: unknown variant '" + s + "'");
}

inline BufferBase parse_buffer_base(const std::string& s) {
    if (s == "gaussian") return BufferBase::Gaussian;
    if (s == "hoeffding") return BufferBase::Hoeffding;
    if (s == "robust") return BufferBase::Robust;
    throw std::invalid_argument("config: unknown buffer base '" + s + "'");
}

inline Interval parse_interval(const nlohmann::json& j, const char* field) {
    if (!j.is_array() || j.size() != 2) {
        throw std::invalid_argument(std::string("config: ") + field + " must be [lo, hi]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

inline AlgorithmKind parse_algorithm(const std::string& s) {
    for (AlgorithmKind k : {AlgorithmKind::FirstFit, AlgorithmKind::BestFit, AlgorithmKind::NextFit,
                            AlgorithmKind::Bucketed, AlgorithmKind::LocalSearch}) {
        if (s == to_string(k)) return k;
    }
    throw std::invalid_argument("unknown algorithm '" + s + "'");
}

inline WorkloadSpec workload_from_json(const nlohmann::json& j) {
    WorkloadSpec w;
    if (!j.contains("jobCount")) throw std::invalid_argument("config: workload.jobCount is required");
    w.job_count = j.at("jobCount").get<long long>();
    if (j.contains("sizeMix")) {
        const auto& mix = j.at("sizeMix");
        if (mix.is_string() && mix.get<std::string>() == "production") {
            w.size_mix = production_size_mix();
        } else {
            w.size_mix.clear();
            for (const auto& e : mix) {
                if (!e.is_array() || e.size() != 2) {
                    throw std::invalid_argument("config: sizeMix entries must be [cores, probability]");
                }
                w.size_mix.push_back({e[0].get<double>(), e[1].get<double>()});
            }
        }
    } else {
        w.size_mix = production_size_mix();
    }
    if (j.contains("lowerRange")) w.lower_range = detail::parse_interval(j.at("lowerRange"), "lowerRange");
    if (j.contains("upperRange")) w.upper_range = detail::parse_interval(j.at("upperRange"), "upperRange");
    if (j.contains("locRange")) w.loc_range = detail::parse_interval(j.at("locRange"), "locRange");
    if (j.contains("scaleRange")) w.scale_range = detail::parse_interval(j.at("scaleRange"), "scaleRange");
    if (j.contains("kind")) w.kind = detail::parse_usage_kind(j.at("kind").get<std::string>());
    if (j.contains("seed")) w.seed = j.at("seed").get<std::uint64_t>();
    w.validate();
    return w;
}

inline VariantTemplate variant_from_json(const nlohmann::json& j) {
    VariantTemplate tpl;
    if (j.is_string()) {
        tpl.variant = detail::parse_variant_name(j.get<std::string>());
        return tpl;
    }
    if (!j.is_object() || !j.contains("variant")) {
        throw std::invalid_argument("config: variant entries must be a name or {variant, ...}");
    }
    tpl.variant = detail::parse_variant_name(j.at("variant").get<std::string>());
    if (j.contains("pExponent")) tpl.p_exponent = j.at("pExponent").get<double>();
    if (j.contains("base")) tpl.base = detail::parse_buffer_base(j.at("base").get<std::string>());
    return tpl;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    if (!j.contains("workload")) throw std::invalid_argument("config: workload section is required");
    cfg.workload = workload_from_json(j.at("workload"));
    if (!j.contains("machineSizes")) throw std::invalid_argument("config: machineSizes is required");
    cfg.machine_sizes = j.at("machineSizes").get<std::vector<double>>();
    if (!j.contains("variants")) throw std::invalid_argument("config: variants is required");
    cfg.variants.clear();
    for (const auto& v : j.at("variants")) cfg.variants.push_back(variant_from_json(v));
    if (j.contains("alphaGrid")) cfg.alpha_grid = j.at("alphaGrid").get<std::vector<double>>();
    if (j.contains("replicas")) cfg.replicas = j.at("replicas").get<int>();
    if (j.contains("mcSamples")) cfg.mc_samples = j.at("mcSamples").get<long long>();
    if (j.contains("baseSeed")) {
        cfg.base_seed = j.at("baseSeed").get<std::uint64_t>();
    } else {
        cfg.base_seed = cfg.workload.seed;
    }
    if (j.contains("outputPath")) cfg.output_path = j.at("outputPath").get<std::string>();
    if (j.contains("algorithm")) cfg.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config parse error in " + path + ": " + e.what());
    }
    try {
        return config_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config schema error in " + path + ": " + e.what());
    }
}

}  // namespace stochpack

#endif
