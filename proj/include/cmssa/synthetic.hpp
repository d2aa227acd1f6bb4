#pragma once

// Synthetic foreground/background pair: independent mixtures of random
// sinusoids plus white noise, with a low-variance sub-signal added to the
// foreground only.

#include "cmssa/time_series.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <variant>

namespace cmssa::synth {

using Eigen::Index;

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

/// sin(2 pi f_env t) * sin(2 pi f_carrier t); frequencies in cycles per sample.
struct ModulatedSinusoid {
    double carrier_frequency = 0.1;
    double envelope_frequency = 0.0025;
};

struct SynthConfig {
    int n_sinusoids = 500;
    Index length = 2000;
    double noise_sigma = 1.0;
    Range amplitude{0.5, 2.0};
    /// cycles per sample; the lower bound keeps several periods inside `length`
    Range frequency{0.002, 0.05};
    Range phase{0.0, 2.0 * std::numbers::pi};
    Range offset{-1.0, 1.0};
    /// Shape of the injected sub-signal; it is rescaled so its variance is
    /// `subsignal_variance_fraction` of the composite's variance.
    std::variant<ModulatedSinusoid, Eigen::VectorXd> subsignal = ModulatedSinusoid{};
    double subsignal_variance_fraction = 0.05;
    std::uint64_t seed = 1;
};

/// Throws a parameter error for negative noise, empty ranges, or a bad fraction.
void validate(const SynthConfig& cfg);

/// Sinusoid mixture plus N(0, noise_sigma^2) noise, drawn from cfg.seed.
Eigen::VectorXd mixture(const SynthConfig& cfg);

/// Unscaled sub-signal shape of length cfg.length.
Eigen::VectorXd subsignal_shape(const SynthConfig& cfg);

ingest::TimeSeries generate_background(const SynthConfig& cfg);

struct Foreground {
    ingest::TimeSeries composite;
    Eigen::VectorXd subsignal;
};

/// mixture(cfg) + scaled sub-signal. Use a different seed than the
/// background so the two mixtures are independent.
Foreground generate_foreground(const SynthConfig& cfg);

/// Sidecar CSV `t,subsignal`.
void save_subsignal(const std::filesystem::path& path, const Eigen::VectorXd& subsignal);

double variance(const Eigen::VectorXd& x);
double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

} // namespace cmssa::synth
