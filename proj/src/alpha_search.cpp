#include "cmssa/alpha_search.hpp"

#include "cmssa/error.hpp"
#include "cmssa/parallel.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace cmssa::alpha {

std::vector<double> log_space(double alpha_min, double alpha_max, int n)
{
    if (!(alpha_min > 0.0) || !(alpha_max > alpha_min) || !std::isfinite(alpha_max))
        fail(ErrorKind::parameter, "log-space range needs 0 < alpha_min < alpha_max");
    if (n < 2)
        fail(ErrorKind::parameter, "log-space needs at least 2 points, got " + std::to_string(n));

    const double lo = std::log10(alpha_min);
    const double hi = std::log10(alpha_max);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = std::pow(10.0, lo + (hi - lo) * i / (n - 1));
    out.front() = alpha_min;
    out.back() = alpha_max;
    return out;
}

double eigenspace_affinity(const ssa::EigenBasis& b1, const ssa::EigenBasis& b2)
{
    if (b1.dimension() != b2.dimension() || b1.components() != b2.components())
        fail(ErrorKind::shape, "eigenspace affinity needs bases of equal dimension and component count");
    const Eigen::MatrixXd cross = b1.vectors.transpose() * b2.vectors;
    return Eigen::JacobiSVD<Eigen::MatrixXd>(cross).singularValues().sum();
}

AlphaCandidateSet build_candidates(const ssa::ContrastiveFit& fit, ssa::Index k, const SearchConfig& config)
{
    AlphaCandidateSet set;
    set.alphas.push_back(0.0);
    for (double a : log_space(config.alpha_min, config.alpha_max, config.n))
        set.alphas.push_back(a);

    const std::size_t count = set.alphas.size();
    set.bases.resize(count);
    parallel_for(count, config.jobs, [&](std::size_t i) { set.bases[i] = fit.basis(k, set.alphas[i]); });

    set.affinity.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(count));
    parallel_for(count, config.jobs, [&](std::size_t i) {
        for (std::size_t j = i; j < count; ++j) {
            const double s = eigenspace_affinity(set.bases[i], set.bases[j]);
            set.affinity(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
            set.affinity(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = s;
        }
    });
    return set;
}

std::size_t medoid(const Eigen::MatrixXd& affinity, std::span<const std::size_t> members)
{
    if (members.empty())
        fail(ErrorKind::degenerate_input, "medoid of an empty cluster");
    std::size_t best = members.front();
    double best_total = -1.0;
    for (const auto i : members) {
        double total = 0.0;
        for (const auto j : members)
            total += affinity(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (total > best_total) {
            best_total = total;
            best = i;
        }
    }
    return best;
}

AlphaSelection select(const AlphaCandidateSet& set, const SearchConfig& config)
{
    if (config.m < 1)
        fail(ErrorKind::parameter, "m must be >= 1");
    if (config.n < config.m)
        fail(ErrorKind::parameter, "n must be >= m");

    AlphaSelection out;
    out.candidates = set.alphas;
    out.cluster_assignments = cluster::spectral_labels(set.affinity, config.m, config.seed, config.spectral);

    std::vector<std::vector<std::size_t>> clusters(static_cast<std::size_t>(config.m));
    for (std::size_t i = 0; i < out.cluster_assignments.size(); ++i)
        clusters[static_cast<std::size_t>(out.cluster_assignments[i])].push_back(i);

    out.selected.push_back(0.0);
    for (const auto& members : clusters) {
        const bool has_zero = std::any_of(members.begin(), members.end(),
                                          [&](std::size_t i) { return set.alphas[i] == 0.0; });
        if (has_zero || members.empty())
            continue;
        out.selected.push_back(set.alphas[medoid(set.affinity, members)]);
    }
    std::sort(out.selected.begin() + 1, out.selected.end());
    return out;
}

AlphaSelection search(std::span<const ingest::TimeSeries> foreground, std::span<const ingest::TimeSeries> background,
                      ssa::Index window, ssa::Index k, const SearchConfig& config)
{
    if (config.m < 1)
        fail(ErrorKind::parameter, "m must be >= 1");
    if (config.n < config.m)
        fail(ErrorKind::parameter, "n must be >= m");
    const ssa::ContrastiveFit fit(foreground, background, window);
    return select(build_candidates(fit, k, config), config);
}

} // namespace cmssa::alpha
