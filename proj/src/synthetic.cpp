#include "cmssa/synthetic.hpp"

#include "cmssa/error.hpp"

#include <cmath>
#include <fstream>
#include <random>

namespace cmssa::synth {

namespace {

double draw(std::mt19937_64& rng, const Range& r)
{
    if (r.lo == r.hi)
        return r.lo;
    return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

// positive s with var(s g) = f var(m + s g)
double subsignal_scale(const Eigen::VectorXd& mix, const Eigen::VectorXd& shape, double fraction)
{
    const double vg = variance(shape);
    if (vg == 0.0 || fraction == 0.0)
        return 0.0;
    const double vm = variance(mix);
    const double n = static_cast<double>(mix.size());
    const double cov = ((mix.array() - mix.mean()) * (shape.array() - shape.mean())).sum() / n;
    const double a = vg * (1.0 - fraction);
    const double b = -2.0 * fraction * cov;
    const double c = -fraction * vm;
    return (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
}

} // namespace

void validate(const SynthConfig& cfg)
{
    if (cfg.length < 1)
        fail(ErrorKind::parameter, "synthetic length must be >= 1");
    if (cfg.n_sinusoids < 0)
        fail(ErrorKind::parameter, "sinusoid count must be >= 0");
    if (!(cfg.noise_sigma >= 0.0))
        fail(ErrorKind::parameter, "noise sigma must be >= 0");
    for (const auto* r : {&cfg.amplitude, &cfg.frequency, &cfg.phase, &cfg.offset})
        if (!(r->lo <= r->hi))
            fail(ErrorKind::parameter, "synthetic parameter range is empty");
    if (!(cfg.subsignal_variance_fraction >= 0.0 && cfg.subsignal_variance_fraction < 1.0))
        fail(ErrorKind::parameter, "sub-signal variance fraction must lie in [0, 1)");
}

Eigen::VectorXd mixture(const SynthConfig& cfg)
{
    validate(cfg);
    std::mt19937_64 rng(cfg.seed);
    const Index t = cfg.length;
    const Eigen::ArrayXd time = Eigen::ArrayXd::LinSpaced(t, 0.0, static_cast<double>(t - 1));
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(t);
    for (int s = 0; s < cfg.n_sinusoids; ++s) {
        const double amp = draw(rng, cfg.amplitude);
        const double freq = draw(rng, cfg.frequency);
        const double phase = draw(rng, cfg.phase);
        const double offset = draw(rng, cfg.offset);
        out += amp * (2.0 * std::numbers::pi * freq * time + phase).sin() + offset;
    }
    if (cfg.noise_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
        for (Index i = 0; i < t; ++i)
            out(i) += noise(rng);
    }
    return out.matrix();
}

Eigen::VectorXd subsignal_shape(const SynthConfig& cfg)
{
    if (const auto* explicit_shape = std::get_if<Eigen::VectorXd>(&cfg.subsignal)) {
        if (explicit_shape->size() != cfg.length)
            fail(ErrorKind::shape, "sub-signal has length " + std::to_string(explicit_shape->size()) + ", expected "
                                       + std::to_string(cfg.length));
        return *explicit_shape;
    }
    const auto& mod = std::get<ModulatedSinusoid>(cfg.subsignal);
    const Eigen::ArrayXd time = Eigen::ArrayXd::LinSpaced(cfg.length, 0.0, static_cast<double>(cfg.length - 1));
    const double two_pi = 2.0 * std::numbers::pi;
    return ((two_pi * mod.envelope_frequency * time).sin() * (two_pi * mod.carrier_frequency * time).sin()).matrix();
}

ingest::TimeSeries generate_background(const SynthConfig& cfg)
{
    return ingest::TimeSeries(mixture(cfg), "background");
}

Foreground generate_foreground(const SynthConfig& cfg)
{
    const Eigen::VectorXd shape = subsignal_shape(cfg);
    const Eigen::VectorXd mix = mixture(cfg);
    Eigen::VectorXd sub = subsignal_scale(mix, shape, cfg.subsignal_variance_fraction) * shape;
    Eigen::VectorXd composite = mix + sub;
    if (variance(sub) > cfg.subsignal_variance_fraction * variance(composite) * (1.0 + 1e-9) + 1e-300)
        fail(ErrorKind::numeric, "sub-signal variance exceeds the configured fraction");
    return {ingest::TimeSeries(std::move(composite), "foreground"), std::move(sub)};
}

void save_subsignal(const std::filesystem::path& path, const Eigen::VectorXd& subsignal)
{
    std::ofstream out(path);
    if (!out)
        fail(ErrorKind::io, "cannot write '" + path.string() + "'");
    out << "t,subsignal\n";
    for (Index i = 0; i < subsignal.size(); ++i)
        out << i << ',' << ingest::format_double(subsignal(i)) << '\n';
}

double variance(const Eigen::VectorXd& x)
{
    if (x.size() == 0)
        return 0.0;
    return (x.array() - x.mean()).square().sum() / static_cast<double>(x.size());
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    if (a.size() != b.size() || a.size() < 2)
        fail(ErrorKind::shape, "correlation needs two vectors of equal length >= 2");
    const Eigen::ArrayXd da = a.array() - a.mean();
    const Eigen::ArrayXd db = b.array() - b.mean();
    const double denom = std::sqrt(da.square().sum() * db.square().sum());
    return denom > 0.0 ? (da * db).sum() / denom : 0.0;
}

} // namespace cmssa::synth
