#pragma once

// Automatic selection of a few diverse contrast strengths: embed candidate
// alphas by the similarity of their eigenspaces, cluster them, and return
// one medoid per cluster that does not already contain alpha = 0.

#include "cmssa/spectral.hpp"
#include "cmssa/ssa.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace cmssa::alpha {

/// n geometrically spaced values from alpha_min to alpha_max, both inclusive.
std::vector<double> log_space(double alpha_min, double alpha_max, int n);

/// Nuclear norm of E1^T E2, in [0, K] for orthonormal bases.
double eigenspace_affinity(const ssa::EigenBasis& b1, const ssa::EigenBasis& b2);

struct SearchConfig {
    double alpha_min = 1e-3;
    double alpha_max = 1e3;
    int n = 300;
    int m = 5;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    cluster::SpectralOptions spectral;
};

/// Candidates are ordered {0, log_space(...)}; bases and affinity rows follow.
struct AlphaCandidateSet {
    std::vector<double> alphas;
    std::vector<ssa::EigenBasis> bases;
    Eigen::MatrixXd affinity;
};

struct AlphaSelection {
    /// 0 first, then the medoids in ascending order.
    std::vector<double> selected;
    /// Candidate alphas and their cluster index, aligned.
    std::vector<double> candidates;
    std::vector<int> cluster_assignments;
};

AlphaCandidateSet build_candidates(const ssa::ContrastiveFit& fit, ssa::Index k, const SearchConfig& config);

AlphaSelection select(const AlphaCandidateSet& set, const SearchConfig& config);

/// Member of `members` with the largest summed affinity to the others;
/// ties go to the lowest index (lowest alpha).
std::size_t medoid(const Eigen::MatrixXd& affinity, std::span<const std::size_t> members);

AlphaSelection search(std::span<const ingest::TimeSeries> foreground, std::span<const ingest::TimeSeries> background,
                      ssa::Index window, ssa::Index k, const SearchConfig& config = {});

} // namespace cmssa::alpha
