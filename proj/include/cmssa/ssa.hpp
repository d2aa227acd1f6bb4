#pragma once

// Hankel embedding, (contrastive) covariance, eigenbasis selection, and the
// PC / RC transforms of multivariate singular spectrum analysis.

#include "cmssa/time_series.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>

namespace cmssa::ssa {

using Eigen::Index;

/// T' x DW lag embedding. Column block j holds the Hankel matrix of channel j:
/// entry (r, j*W + c) is x_j[r + c] (0-based).
struct TrajectoryMatrix {
    Eigen::MatrixXd values;
    Index window = 0;
    Index channels = 0;
    /// Length of the embedded series; unset for stacked trajectories.
    std::optional<Index> source_length;

    Index rows() const noexcept { return values.rows(); }
};

struct CovarianceMatrix {
    Eigen::MatrixXd values;
    Index row_count = 0;

    Index dimension() const noexcept { return values.rows(); }
};

/// Top-K eigenvectors (as columns) of a (contrastive) covariance matrix.
///
/// Eigenvalues are in descending algebraic order and every column is
/// sign-canonical: its entry of largest magnitude is positive.
struct EigenBasis {
    Eigen::MatrixXd vectors;
    Eigen::VectorXd eigenvalues;
    Index window = 0;
    Index channels = 0;
    double alpha = 0.0;

    Index components() const noexcept { return vectors.cols(); }
    Index dimension() const noexcept { return vectors.rows(); }
};

/// PC matrix A (T' x K) and concatenated RC matrix R (T x DK) of one series.
/// Columns [k*D, (k+1)*D) of R hold component k.
struct Decomposition {
    Eigen::MatrixXd pcs;
    Eigen::MatrixXd rcs;
    EigenBasis basis;
    /// Means removed from the input; reconstructions stay centered.
    Eigen::RowVectorXd channel_means;

    /// T x D block of component k.
    Eigen::MatrixXd component(Index k) const;
    /// Sum of all K components (T x D), centered.
    Eigen::MatrixXd summed() const;
    /// summed() with the channel means added back, for display.
    Eigen::MatrixXd summed_with_means() const;
};

TrajectoryMatrix hankelize(const Eigen::MatrixXd& values, Index window);
TrajectoryMatrix hankelize(const ingest::CenteredSeries& x, Index window);

/// Row-wise concatenation for fitting on several series.
TrajectoryMatrix stack(std::span<const TrajectoryMatrix> trajectories);

/// Column-centered H^T H / (rows - 1).
CovarianceMatrix covariance(const TrajectoryMatrix& h);

/// C_X - alpha * C_Y. alpha == 0 returns C_X unchanged.
CovarianceMatrix contrast(const CovarianceMatrix& cx, const CovarianceMatrix& cy, double alpha);

EigenBasis top_eigenbasis(const CovarianceMatrix& c, Index k, Index window, Index channels, double alpha);

/// A = H_X E.
Eigen::MatrixXd project(const ingest::CenteredSeries& x, const EigenBasis& basis);

/// PCs plus diagonal-averaged reconstructed components.
Decomposition reconstruct(const ingest::CenteredSeries& x, const EigenBasis& basis);

/// Centers each series, embeds it, and stacks the trajectories.
TrajectoryMatrix collection_trajectory(std::span<const ingest::TimeSeries> series, Index window);

/// Caches C_X and C_Y so bases for many alphas share one embedding pass.
class ContrastiveFit {
public:
    ContrastiveFit(std::span<const ingest::TimeSeries> foreground, std::span<const ingest::TimeSeries> background,
                   Index window);

    const CovarianceMatrix& foreground_covariance() const noexcept { return cx_; }
    const CovarianceMatrix& background_covariance() const noexcept { return cy_; }
    Index window() const noexcept { return window_; }
    Index channels() const noexcept { return channels_; }

    EigenBasis basis(Index k, double alpha) const;

private:
    Index window_;
    Index channels_;
    CovarianceMatrix cx_;
    CovarianceMatrix cy_;
};

/// Plain MSSA on the foreground collection.
EigenBasis fit_mssa(std::span<const ingest::TimeSeries> foreground, Index window, Index k);

/// cMSSA; with alpha == 0 the basis is identical to fit_mssa.
EigenBasis fit_cmssa(std::span<const ingest::TimeSeries> foreground, std::span<const ingest::TimeSeries> background,
                     Index window, Index k, double alpha);

} // namespace cmssa::ssa
