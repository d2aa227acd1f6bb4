#pragma once

// Dynamic time warping under a Euclidean local cost, exact and the
// multiresolution FastDTW approximation (coarsen by halves, project the
// warp path, refine inside a radius-widened window).

#include <Eigen/Core>

#include <utility>
#include <vector>

namespace cmssa::cluster {

using Eigen::Index;

struct WarpPath {
    double distance = 0.0;
    /// (row of a, row of b) pairs from (0, 0) to (n-1, m-1).
    std::vector<std::pair<Index, Index>> cells;
};

/// Inclusive column range [lo[i], hi[i]] of b allowed for each row i of a.
struct SearchWindow {
    std::vector<Index> lo;
    std::vector<Index> hi;

    static SearchWindow full(Index rows, Index cols);
};

/// Euclidean distance between row i of a and row j of b.
double local_cost(const Eigen::MatrixXd& a, Index i, const Eigen::MatrixXd& b, Index j);

WarpPath dtw(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
WarpPath constrained_dtw(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const SearchWindow& window);

/// Pairwise means of consecutive rows; an odd trailing row is dropped.
Eigen::MatrixXd coarsen(const Eigen::MatrixXd& x);

/// Fine-resolution window around a coarse path, widened by `radius` coarse cells.
SearchWindow expand_window(const WarpPath& coarse, Index rows, Index cols, Index radius);

WarpPath fastdtw(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Index radius = 1);
double fastdtw_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Index radius = 1);

} // namespace cmssa::cluster
