#ifndef STOCHPACK_CAPACITY_HPP
#define STOCHPACK_CAPACITY_HPP

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

#include "stochpack/normal.hpp"
#include "stochpack/workload.hpp"

namespace stochpack {

/// Capacity models for a machine of size V.
///
/// The buffered variants replace the hard constraint with
///   sum(mu_j) + D(alpha) * buffer(sum(b_j)) <= V,
/// where the buffer is a square root (Gaussian/Hoeffding/RobustMeanVar), a
/// p-th power (PNorm), or log(1 + x) (LogBuffer). The Linear* variants charge
/// each job mu_j + D(alpha) * sqrt(b_j) up front, which drops the risk
/// pooling across jobs. NoOvercommit books every job at its upper bound.
enum class Variant {
    NoOvercommit,
    Gaussian,
    Hoeffding,
    RobustMeanVar,
    LinearGaussian,
    LinearHoeffding,
    LinearRobust,
    PNorm,
    LogBuffer,
};

/// Which (b_j, D(alpha)) family the PNorm / LogBuffer shapes borrow.
enum class BufferBase { Gaussian, Hoeffding, Robust };

inline const char* to_string(Variant v) {
    switch (v) {
        case Variant::NoOvercommit: return "no_overcommit";
        case Variant::Gaussian: return "gaussian";
        case Variant::Hoeffding: return "hoeffding";
        case Variant::RobustMeanVar: return "robust";
        case Variant::LinearGaussian: return "linear_gaussian";
        case Variant::LinearHoeffding: return "linear_hoeffding";
        case Variant::LinearRobust: return "linear_robust";
        case Variant::PNorm: return "pnorm";
        case Variant::LogBuffer: return "log_buffer";
    }
    return "?";
}

inline bool is_linear(Variant v) {
    return v == Variant::LinearGaussian || v == Variant::LinearHoeffding ||
           v == Variant::LinearRobust;
}

inline bool is_sqrt_buffered(Variant v) {
    return v == Variant::Gaussian || v == Variant::Hoeffding || v == Variant::RobustMeanVar;
}

struct ConstraintSpec {
    Variant variant = Variant::NoOvercommit;
    double alpha = 1.0;          // confidence level; 1 only for NoOvercommit
    double p_exponent = 0.5;     // PNorm only, in [0.5, 1]
    double capacity = 1.0;       // V
    BufferBase base = BufferBase::Gaussian;  // PNorm / LogBuffer only

    void validate() const {
        if (!(capacity > 0.0)) throw std::invalid_argument("ConstraintSpec: capacity must be positive");
        if (variant == Variant::NoOvercommit) {
            if (alpha != 1.0) throw std::invalid_argument("ConstraintSpec: NoOvercommit requires alpha = 1");
        } else if (!(alpha > 0.0 && alpha < 1.0)) {
            throw std::invalid_argument("ConstraintSpec: buffered variants require alpha in (0, 1)");
        }
        if (!(p_exponent >= 0.5 && p_exponent <= 1.0)) {
            throw std::invalid_argument("ConstraintSpec: p_exponent must lie in [0.5, 1]");
        }
    }
};

namespace detail {

inline BufferBase family_of(const ConstraintSpec& spec) {
    switch (spec.variant) {
        case Variant::Gaussian:
        case Variant::LinearGaussian: return BufferBase::Gaussian;
        case Variant::Hoeffding:
        case Variant::LinearHoeffding: return BufferBase::Hoeffding;
        case Variant::RobustMeanVar:
        case Variant::LinearRobust: return BufferBase::Robust;
        default: return spec.base;
    }
}

}  // namespace detail

/// Risk multiplier D(alpha) for the buffer term.
inline double d_of_alpha(const ConstraintSpec& spec) {
    if (spec.variant == Variant::NoOvercommit) return 0.0;
    if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) {
        throw std::invalid_argument("d_of_alpha: degenerate confidence (alpha must be in (0, 1))");
    }
    switch (detail::family_of(spec)) {
        case BufferBase::Gaussian: return inverse_normal_cdf(spec.alpha);
        case BufferBase::Hoeffding: return std::sqrt(-0.5 * std::log1p(-spec.alpha));
        case BufferBase::Robust: return std::sqrt(spec.alpha / (1.0 - spec.alpha));
    }
    return 0.0;
}

/// Per-job dispersion parameter b_j: the variance for the Gaussian/robust
/// family, the squared range for the Hoeffding family.
inline double b_value(const Job& job, const ConstraintSpec& spec) {
    if (spec.variant == Variant::NoOvercommit) return 0.0;
    return detail::family_of(spec) == BufferBase::Hoeffding ? job.range_sq : job.variance;
}

/// Pre-buffered size mu_j + D(alpha) * sqrt(b_j) used by the linear variants.
inline double buffered_size(const Job& job, const ConstraintSpec& spec) {
    return job.mean + d_of_alpha(spec) * std::sqrt(b_value(job, spec));
}

/// Additive aggregates of one machine's job set.
///
/// `sum_b` holds sum(b_j) for the pooled variants and the pre-buffered sum
/// of (mu_j + D sqrt(b_j)) for the linear variants, so insertions stay O(1)
/// for every variant.
struct LoadSummary {
    double sum_mean = 0.0;
    double sum_b = 0.0;
    double sum_upper = 0.0;
    long long count = 0;

    void add(const Job& job, const ConstraintSpec& spec) {
        sum_mean += job.mean;
        sum_b += is_linear(spec.variant) ? buffered_size(job, spec) : b_value(job, spec);
        sum_upper += job.upper_bound();
        count += 1;
    }

    LoadSummary plus(const Job& job, const ConstraintSpec& spec) const {
        LoadSummary out = *this;
        out.add(job, spec);
        return out;
    }

    static LoadSummary of(std::span<const Job> jobs, const ConstraintSpec& spec) {
        LoadSummary out;
        for (const Job& j : jobs) out.add(j, spec);
        return out;
    }
};

/// Unbuffered constraint value before the upper-bound clip.
inline double raw_load(const LoadSummary& load, const ConstraintSpec& spec) {
    switch (spec.variant) {
        case Variant::NoOvercommit:
            return load.sum_upper;
        case Variant::Gaussian:
        case Variant::Hoeffding:
        case Variant::RobustMeanVar:
            return load.sum_mean + d_of_alpha(spec) * std::sqrt(load.sum_b);
        case Variant::PNorm:
            // p = 0.5 must coincide bit-for-bit with the square-root form.
            return load.sum_mean + d_of_alpha(spec) * (spec.p_exponent == 0.5
                                                           ? std::sqrt(load.sum_b)
                                                           : std::pow(load.sum_b, spec.p_exponent));
        case Variant::LogBuffer:
            return load.sum_mean + d_of_alpha(spec) * std::log1p(load.sum_b);
        case Variant::LinearGaussian:
        case Variant::LinearHoeffding:
        case Variant::LinearRobust:
            return load.sum_b;  // pre-buffered per-job sizes
    }
    return load.sum_upper;
}

/// Effective capacity requirement of a machine, clipped at sum of upper
/// bounds: a set that fits with every job at its worst case always fits.
inline double effective_load(const LoadSummary& load, const ConstraintSpec& spec) {
    if (load.count == 0) return 0.0;
    return std::min(raw_load(load, spec), load.sum_upper);
}

/// Feasibility test used by every packing algorithm. Exact <= on doubles.
inline bool fits(const LoadSummary& load, const Job& job, const ConstraintSpec& spec) {
    return effective_load(load.plus(job, spec), spec) <= spec.capacity;
}

/// Monte Carlo estimate of the true chance constraint: the fraction of joint
/// usage realizations whose total stays within capacity.
inline double chance_satisfaction_oracle(std::span<const Job> jobs, const ConstraintSpec& spec,
                                         long long samples, Rng& rng) {
    if (samples < 1) throw std::invalid_argument("chance_satisfaction_oracle: samples must be >= 1");
    long long ok = 0;
    for (long long s = 0; s < samples; ++s) {
        double total = 0.0;
        for (const Job& j : jobs) total += sample_usage(j, rng);
        if (total <= spec.capacity) ++ok;
    }
    return static_cast<double>(ok) / static_cast<double>(samples);
}

}  // namespace stochpack

#endif
