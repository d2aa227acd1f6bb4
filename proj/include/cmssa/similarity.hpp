#pragma once

#include "cmssa/fastdtw.hpp"
#include "cmssa/spectral.hpp"
#include "cmssa/ssa.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cmssa::cluster {

/// Pairwise series similarity 1 / (DTW + 1); symmetric with unit diagonal.
struct SimilarityMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> ids;
};

struct ClusterAssignment {
    std::vector<std::string> ids;
    std::vector<int> labels;
    int k = 0;

    int at(const std::string& id) const;
};

/// 1 / (min(d(a, b), d(b, a)) + 1) with d the FastDTW distance.
double similarity(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Index radius = 1);

SimilarityMatrix similarity_matrix(std::span<const Eigen::MatrixXd> features, std::vector<std::string> ids,
                                   Index radius = 1, unsigned jobs = 1);

ClusterAssignment spectral_cluster(const SimilarityMatrix& s, int k, std::uint64_t seed,
                                   const SpectralOptions& options = {});

/// Representation fed to DTW: raw values, PC matrix A, or RC matrix R.
enum class Transform { none, pc, rc };

const char* to_string(Transform t);
Transform parse_transform(const std::string& text);

/// Per-series features; `basis` is required unless `transform` is none.
std::vector<Eigen::MatrixXd> transform_features(std::span<const ingest::TimeSeries> series,
                                                const ssa::EigenBasis* basis, Transform transform);

/// Stable hex digest of the features and radius, used as cache key.
std::string similarity_cache_key(std::span<const Eigen::MatrixXd> features, Index radius);

void write_similarity_csv(const std::filesystem::path& path, const SimilarityMatrix& s);
SimilarityMatrix read_similarity_csv(const std::filesystem::path& path);

/// Reads `<cache_dir>/similarity-<key>.csv` if present, else computes and
/// writes it.
SimilarityMatrix cached_similarity_matrix(const std::filesystem::path& cache_dir,
                                          std::span<const Eigen::MatrixXd> features, std::vector<std::string> ids,
                                          Index radius = 1, unsigned jobs = 1);

void write_assignment_csv(const std::filesystem::path& path, const ClusterAssignment& assignment);
ClusterAssignment read_assignment_csv(const std::filesystem::path& path);

} // namespace cmssa::cluster
