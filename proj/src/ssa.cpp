#include "cmssa/ssa.hpp"

#include "cmssa/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace cmssa::ssa {

namespace {

void check_window(Index length, Index window)
{
    if (window < 1)
        fail(ErrorKind::parameter, "window must be >= 1, got " + std::to_string(window));
    if (window > length)
        fail(ErrorKind::window_too_large,
             "window " + std::to_string(window) + " exceeds series length " + std::to_string(length));
}

void check_basis_shape(Index channels, const EigenBasis& basis)
{
    if (channels != basis.channels)
        fail(ErrorKind::schema, "series has " + std::to_string(channels) + " channels, basis expects "
                                    + std::to_string(basis.channels));
    if (basis.dimension() != basis.window * basis.channels)
        fail(ErrorKind::shape, "basis vectors do not have window * channels rows");
}

} // namespace

Eigen::MatrixXd Decomposition::component(Index k) const
{
    const Index d = basis.channels;
    return rcs.middleCols(k * d, d);
}

Eigen::MatrixXd Decomposition::summed() const
{
    const Index d = basis.channels;
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(rcs.rows(), d);
    for (Index k = 0; k < basis.components(); ++k)
        total += rcs.middleCols(k * d, d);
    return total;
}

Eigen::MatrixXd Decomposition::summed_with_means() const
{
    return summed().rowwise() + channel_means;
}

TrajectoryMatrix hankelize(const Eigen::MatrixXd& values, Index window)
{
    const Index t = values.rows();
    const Index d = values.cols();
    check_window(t, window);
    const Index rows = t - window + 1;

    TrajectoryMatrix h;
    h.values.resize(rows, d * window);
    for (Index j = 0; j < d; ++j)
        for (Index c = 0; c < window; ++c)
            h.values.col(j * window + c) = values.col(j).segment(c, rows);
    h.window = window;
    h.channels = d;
    h.source_length = t;
    return h;
}

TrajectoryMatrix hankelize(const ingest::CenteredSeries& x, Index window)
{
    return hankelize(x.values, window);
}

TrajectoryMatrix stack(std::span<const TrajectoryMatrix> trajectories)
{
    if (trajectories.empty())
        fail(ErrorKind::degenerate_input, "cannot stack an empty list of trajectories");
    const auto& first = trajectories.front();
    Index rows = 0;
    for (const auto& h : trajectories) {
        if (h.window != first.window || h.channels != first.channels)
            fail(ErrorKind::shape, "stacked trajectories must share window and channel count");
        rows += h.rows();
    }

    TrajectoryMatrix out;
    out.values.resize(rows, first.values.cols());
    Index offset = 0;
    for (const auto& h : trajectories) {
        out.values.middleRows(offset, h.rows()) = h.values;
        offset += h.rows();
    }
    out.window = first.window;
    out.channels = first.channels;
    if (trajectories.size() == 1)
        out.source_length = first.source_length;
    return out;
}

CovarianceMatrix covariance(const TrajectoryMatrix& h)
{
    const Index n = h.rows();
    if (n < 2)
        fail(ErrorKind::insufficient_data, "covariance needs at least 2 trajectory rows, got " + std::to_string(n));
    const Eigen::MatrixXd centered = h.values.rowwise() - h.values.colwise().mean();
    Eigen::MatrixXd c = (centered.transpose() * centered) / static_cast<double>(n - 1);
    // GEMM does not guarantee bitwise symmetry
    c = 0.5 * (c + c.transpose()).eval();
    return {std::move(c), n};
}

CovarianceMatrix contrast(const CovarianceMatrix& cx, const CovarianceMatrix& cy, double alpha)
{
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        fail(ErrorKind::parameter, "alpha must be a finite value >= 0");
    if (cx.dimension() != cy.dimension())
        fail(ErrorKind::shape, "foreground and background covariance dimensions differ ("
                                   + std::to_string(cx.dimension()) + " vs " + std::to_string(cy.dimension()) + ")");
    if (alpha == 0.0)
        return cx;
    return {cx.values - alpha * cy.values, cx.row_count};
}

EigenBasis top_eigenbasis(const CovarianceMatrix& c, Index k, Index window, Index channels, double alpha)
{
    const Index n = c.dimension();
    if (c.values.cols() != n)
        fail(ErrorKind::shape, "covariance matrix is not square");
    if (k < 1 || k > n)
        fail(ErrorKind::parameter, "component count " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    if (window * channels != n)
        fail(ErrorKind::shape, "window * channels does not match covariance dimension");
    const double scale = c.values.cwiseAbs().maxCoeff();
    if ((c.values - c.values.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (scale + 1e-300))
        fail(ErrorKind::parameter, "covariance matrix is not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c.values);
    if (solver.info() != Eigen::Success)
        fail(ErrorKind::numeric, "symmetric eigensolver did not converge");

    // ascending order from the solver; take the top k in reverse
    EigenBasis basis;
    basis.vectors.resize(n, k);
    basis.eigenvalues.resize(k);
    for (Index i = 0; i < k; ++i) {
        basis.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
        basis.eigenvalues(i) = solver.eigenvalues()(n - 1 - i);
    }
    for (Index i = 0; i < k; ++i) {
        Index arg = 0;
        basis.vectors.col(i).cwiseAbs().maxCoeff(&arg);
        if (basis.vectors(arg, i) < 0.0)
            basis.vectors.col(i) = -basis.vectors.col(i);
    }
    basis.window = window;
    basis.channels = channels;
    basis.alpha = alpha;
    return basis;
}

Eigen::MatrixXd project(const ingest::CenteredSeries& x, const EigenBasis& basis)
{
    check_basis_shape(x.channels(), basis);
    return hankelize(x.values, basis.window).values * basis.vectors;
}

Decomposition reconstruct(const ingest::CenteredSeries& x, const EigenBasis& basis)
{
    check_basis_shape(x.channels(), basis);
    const Index t = x.length();
    const Index w = basis.window;
    const Index d = basis.channels;
    const Index kcount = basis.components();

    Decomposition out;
    out.pcs = hankelize(x.values, w).values * basis.vectors;
    out.basis = basis;
    out.channel_means = x.channel_means;

    const Index rows = t - w + 1;
    // number of anti-diagonal entries that land on each time step
    Eigen::VectorXd counts(t);
    for (Index i = 0; i < t; ++i) {
        const Index lo = std::max<Index>(0, i - rows + 1);
        const Index hi = std::min<Index>(i, w - 1);
        counts(i) = static_cast<double>(hi - lo + 1);
    }

    out.rcs = Eigen::MatrixXd::Zero(t, d * kcount);
    for (Index k = 0; k < kcount; ++k) {
        const auto a = out.pcs.col(k);
        for (Index j = 0; j < d; ++j) {
            auto r = out.rcs.col(k * d + j);
            for (Index c = 0; c < w; ++c)
                r.segment(c, rows) += basis.vectors(j * w + c, k) * a;
            r.array() /= counts.array();
        }
    }
    return out;
}

TrajectoryMatrix collection_trajectory(std::span<const ingest::TimeSeries> series, Index window)
{
    if (series.empty())
        fail(ErrorKind::degenerate_input, "empty series collection");
    ingest::require_uniform_channels(series);
    std::vector<TrajectoryMatrix> parts;
    parts.reserve(series.size());
    for (const auto& s : series)
        parts.push_back(hankelize(ingest::center(s), window));
    return stack(parts);
}

ContrastiveFit::ContrastiveFit(std::span<const ingest::TimeSeries> foreground,
                               std::span<const ingest::TimeSeries> background, Index window)
    : window_(window)
{
    const auto hx = collection_trajectory(foreground, window);
    const auto hy = collection_trajectory(background, window);
    if (hx.channels != hy.channels)
        fail(ErrorKind::schema, "foreground has " + std::to_string(hx.channels) + " channels, background has "
                                    + std::to_string(hy.channels));
    channels_ = hx.channels;
    cx_ = covariance(hx);
    cy_ = covariance(hy);
}

EigenBasis ContrastiveFit::basis(Index k, double alpha) const
{
    return top_eigenbasis(contrast(cx_, cy_, alpha), k, window_, channels_, alpha);
}

EigenBasis fit_mssa(std::span<const ingest::TimeSeries> foreground, Index window, Index k)
{
    const auto hx = collection_trajectory(foreground, window);
    return top_eigenbasis(covariance(hx), k, window, hx.channels, 0.0);
}

EigenBasis fit_cmssa(std::span<const ingest::TimeSeries> foreground, std::span<const ingest::TimeSeries> background,
                     Index window, Index k, double alpha)
{
    return ContrastiveFit(foreground, background, window).basis(k, alpha);
}

} // namespace cmssa::ssa
