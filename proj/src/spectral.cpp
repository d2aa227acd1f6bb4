#include "cmssa/spectral.hpp"

#include "cmssa/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <limits>
#include <optional>
#include <random>
#include <string>

namespace cmssa::cluster {

namespace {

using Eigen::Index;

struct KmeansRun {
    std::vector<int> labels;
    double inertia = 0.0;
    bool complete = false;
};

Eigen::MatrixXd plus_plus_centers(const Eigen::MatrixXd& points, int k, std::mt19937_64& rng)
{
    const Index n = points.rows();
    Eigen::MatrixXd centers(k, points.cols());
    std::vector<bool> chosen(static_cast<std::size_t>(n), false);

    const auto first = std::uniform_int_distribution<Index>(0, n - 1)(rng);
    centers.row(0) = points.row(first);
    chosen[static_cast<std::size_t>(first)] = true;

    Eigen::VectorXd nearest = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = nearest.sum();
        Index pick = -1;
        if (total > 0.0) {
            const double target = std::uniform_real_distribution<double>(0.0, total)(rng);
            double acc = 0.0;
            for (Index i = 0; i < n; ++i) {
                acc += nearest(i);
                if (nearest(i) > 0.0 && acc >= target) {
                    pick = i;
                    break;
                }
            }
            if (pick < 0) // roundoff at the tail
                for (Index i = n - 1; i >= 0 && pick < 0; --i)
                    if (nearest(i) > 0.0)
                        pick = i;
        } else {
            for (Index i = 0; i < n && pick < 0; ++i)
                if (!chosen[static_cast<std::size_t>(i)])
                    pick = i;
        }
        centers.row(c) = points.row(pick);
        chosen[static_cast<std::size_t>(pick)] = true;
        nearest = nearest.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }
    return centers;
}

KmeansRun lloyd(const Eigen::MatrixXd& points, Eigen::MatrixXd centers, int max_iterations)
{
    const Index n = points.rows();
    const int k = static_cast<int>(centers.rows());
    KmeansRun run;
    run.labels.assign(static_cast<std::size_t>(n), -1);

    for (int iter = 0; iter < max_iterations; ++iter) {
        bool changed = false;
        run.inertia = 0.0;
        for (Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double dist = (points.row(i) - centers.row(c)).squaredNorm();
                if (dist < best_d) {
                    best_d = dist;
                    best = c;
                }
            }
            run.inertia += best_d;
            if (run.labels[static_cast<std::size_t>(i)] != best) {
                run.labels[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
        std::vector<Index> sizes(static_cast<std::size_t>(k), 0);
        for (Index i = 0; i < n; ++i) {
            const int c = run.labels[static_cast<std::size_t>(i)];
            sums.row(c) += points.row(i);
            ++sizes[static_cast<std::size_t>(c)];
        }
        for (int c = 0; c < k; ++c)
            if (sizes[static_cast<std::size_t>(c)] == 0)
                return run; // incomplete
        for (int c = 0; c < k; ++c)
            centers.row(c) = sums.row(c) / static_cast<double>(sizes[static_cast<std::size_t>(c)]);
        if (!changed)
            break;
    }
    run.complete = true;
    return run;
}

std::vector<int> renumber(const std::vector<int>& labels)
{
    std::vector<int> map;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto l = static_cast<std::size_t>(labels[i]);
        if (map.size() <= l)
            map.resize(l + 1, -1);
        if (map[l] < 0)
            map[l] = static_cast<int>(std::count_if(map.begin(), map.end(), [](int v) { return v >= 0; }));
        out[i] = map[l];
    }
    return out;
}

} // namespace

std::vector<int> kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, const SpectralOptions& options)
{
    const Index n = points.rows();
    if (k < 1 || k > n)
        fail(ErrorKind::parameter, "cluster count " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    if (k == 1)
        return std::vector<int>(static_cast<std::size_t>(n), 0);

    std::optional<KmeansRun> best;
    int successes = 0;
    const int budget = options.kmeans_runs + options.max_retries;
    for (int attempt = 0; attempt < budget && successes < options.kmeans_runs; ++attempt) {
        std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(attempt));
        auto run = lloyd(points, plus_plus_centers(points, k, rng), options.max_iterations);
        if (!run.complete)
            continue;
        ++successes;
        if (!best || run.inertia < best->inertia)
            best = std::move(run);
    }
    if (!best)
        fail(ErrorKind::numeric, "k-means produced an empty cluster in every one of " + std::to_string(budget)
                                     + " attempts (k=" + std::to_string(k) + ")");
    return renumber(best->labels);
}

Eigen::MatrixXd spectral_embedding(const Eigen::MatrixXd& affinity, int k)
{
    const Index n = affinity.rows();
    if (affinity.cols() != n)
        fail(ErrorKind::shape, "affinity matrix is not square");
    if (k < 1 || k > n)
        fail(ErrorKind::parameter, "cluster count " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");

    const Eigen::VectorXd degree = affinity.rowwise().sum();
    if ((degree.array() <= 0.0).any() || !degree.allFinite())
        fail(ErrorKind::numeric, "affinity matrix has a row with non-positive degree");
    const Eigen::VectorXd inv_sqrt = degree.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd normalized = inv_sqrt.asDiagonal() * affinity * inv_sqrt.asDiagonal();
    normalized = 0.5 * (normalized + normalized.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(normalized);
    if (solver.info() != Eigen::Success)
        fail(ErrorKind::numeric, "eigensolver failed on the normalized affinity");

    Eigen::MatrixXd embedding(n, k);
    for (int c = 0; c < k; ++c)
        embedding.col(c) = solver.eigenvectors().col(n - 1 - c);
    for (Index i = 0; i < n; ++i) {
        const double norm = embedding.row(i).norm();
        if (norm > 0.0)
            embedding.row(i) /= norm;
    }
    return embedding;
}

std::vector<int> spectral_labels(const Eigen::MatrixXd& affinity, int k, std::uint64_t seed,
                                 const SpectralOptions& options)
{
    const Index n = affinity.rows();
    if (k < 1 || k > n)
        fail(ErrorKind::parameter, "cluster count " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    if (k == 1)
        return std::vector<int>(static_cast<std::size_t>(n), 0);
    return kmeans(spectral_embedding(affinity, k), k, seed, options);
}

} // namespace cmssa::cluster
