#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace cmssa::cluster {

struct SpectralOptions {
    /// Independent k-means++ initializations; the lowest-inertia run wins.
    int kmeans_runs = 10;
    /// Extra initializations allowed when a run ends with an empty cluster.
    int max_retries = 10;
    int max_iterations = 300;
};

/// Lloyd's k-means with k-means++ seeding over the rows of `points`.
///
/// Labels are renumbered by first appearance, so item 0 is always in
/// cluster 0. Throws a numeric error when no run produces k non-empty
/// clusters within the retry budget.
std::vector<int> kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, const SpectralOptions& options = {});

/// Row-normalized top-k eigenvectors of D^-1/2 S D^-1/2, i.e. the bottom
/// of the symmetric normalized Laplacian spectrum.
Eigen::MatrixXd spectral_embedding(const Eigen::MatrixXd& affinity, int k);

/// Spectral clustering of a symmetric non-negative affinity matrix.
std::vector<int> spectral_labels(const Eigen::MatrixXd& affinity, int k, std::uint64_t seed,
                                 const SpectralOptions& options = {});

} // namespace cmssa::cluster
