#include "cmssa/similarity.hpp"

#include "cmssa/error.hpp"
#include "cmssa/parallel.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace cmssa::cluster {

namespace {

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    for (auto& f : out)
        if (!f.empty() && f.back() == '\r')
            f.pop_back();
    return out;
}

double parse_number(const std::string& text, const std::filesystem::path& path, std::size_t line)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
        fail(ErrorKind::parse, path.string() + ":" + std::to_string(line) + ": cannot parse '" + text + "'");
    return v;
}

class Fnv1a {
public:
    void bytes(const void* data, std::size_t n)
    {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            hash_ ^= p[i];
            hash_ *= 0x100000001b3ULL;
        }
    }
    template <typename T>
    void value(const T& v)
    {
        bytes(&v, sizeof v);
    }
    std::uint64_t digest() const { return hash_; }

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

} // namespace

int ClusterAssignment::at(const std::string& id) const
{
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (ids[i] == id)
            return labels[i];
    fail(ErrorKind::data, "no cluster assignment for '" + id + "'");
}

double similarity(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Index radius)
{
    const double d = std::min(fastdtw_distance(a, b, radius), fastdtw_distance(b, a, radius));
    return 1.0 / (d + 1.0);
}

SimilarityMatrix similarity_matrix(std::span<const Eigen::MatrixXd> features, std::vector<std::string> ids,
                                   Index radius, unsigned jobs)
{
    const auto n = static_cast<Index>(features.size());
    if (static_cast<Index>(ids.size()) != n)
        fail(ErrorKind::shape, "similarity matrix needs one id per series");
    if (n == 0)
        fail(ErrorKind::degenerate_input, "similarity matrix of an empty collection");

    std::vector<std::pair<Index, Index>> pairs;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            pairs.emplace_back(i, j);

    SimilarityMatrix s;
    s.values = Eigen::MatrixXd::Identity(n, n);
    s.ids = std::move(ids);
    parallel_for(pairs.size(), jobs, [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        const double v = similarity(features[static_cast<std::size_t>(i)], features[static_cast<std::size_t>(j)],
                                    radius);
        s.values(i, j) = v;
        s.values(j, i) = v;
    });
    return s;
}

ClusterAssignment spectral_cluster(const SimilarityMatrix& s, int k, std::uint64_t seed,
                                   const SpectralOptions& options)
{
    const auto n = static_cast<int>(s.ids.size());
    if (k < 1 || k > n)
        fail(ErrorKind::parameter, "cluster count " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    return {s.ids, spectral_labels(s.values, k, seed, options), k};
}

const char* to_string(Transform t)
{
    switch (t) {
    case Transform::none: return "none";
    case Transform::pc: return "pc";
    case Transform::rc: return "rc";
    }
    return "none";
}

Transform parse_transform(const std::string& text)
{
    if (text == "pc")
        return Transform::pc;
    if (text == "rc")
        return Transform::rc;
    if (text == "none")
        return Transform::none;
    fail(ErrorKind::parameter, "unknown transform '" + text + "' (expected pc, rc or none)");
}

std::vector<Eigen::MatrixXd> transform_features(std::span<const ingest::TimeSeries> series,
                                                const ssa::EigenBasis* basis, Transform transform)
{
    std::vector<Eigen::MatrixXd> out;
    out.reserve(series.size());
    if (transform != Transform::none && basis == nullptr)
        fail(ErrorKind::parameter, std::string("transform '") + to_string(transform) + "' needs a fitted model");
    for (const auto& s : series) {
        switch (transform) {
        case Transform::none: out.push_back(s.values()); break;
        case Transform::pc: out.push_back(ssa::project(ingest::center(s), *basis)); break;
        case Transform::rc: out.push_back(ssa::reconstruct(ingest::center(s), *basis).rcs); break;
        }
    }
    return out;
}

std::string similarity_cache_key(std::span<const Eigen::MatrixXd> features, Index radius)
{
    Fnv1a h;
    h.value(radius);
    h.value(features.size());
    for (const auto& f : features) {
        h.value(f.rows());
        h.value(f.cols());
        h.bytes(f.data(), sizeof(double) * static_cast<std::size_t>(f.size()));
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h.digest()));
    return buf;
}

void write_similarity_csv(const std::filesystem::path& path, const SimilarityMatrix& s)
{
    std::ofstream out(path);
    if (!out)
        fail(ErrorKind::io, "cannot write '" + path.string() + "'");
    for (std::size_t i = 0; i < s.ids.size(); ++i)
        out << (i ? "," : "") << s.ids[i];
    out << '\n';
    for (Index r = 0; r < s.values.rows(); ++r) {
        for (Index c = 0; c < s.values.cols(); ++c)
            out << (c ? "," : "") << ingest::format_double(s.values(r, c));
        out << '\n';
    }
}

SimilarityMatrix read_similarity_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::io, "cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line))
        fail(ErrorKind::parse, path.string() + ": missing id header");
    SimilarityMatrix s;
    s.ids = split_csv(line);
    const auto n = static_cast<Index>(s.ids.size());
    s.values.resize(n, n);
    Index r = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        const auto fields = split_csv(line);
        if (r >= n || static_cast<Index>(fields.size()) != n)
            fail(ErrorKind::parse, path.string() + ":" + std::to_string(line_no) + ": similarity matrix is not "
                                       + std::to_string(n) + "x" + std::to_string(n));
        for (Index c = 0; c < n; ++c)
            s.values(r, c) = parse_number(fields[static_cast<std::size_t>(c)], path, line_no);
        ++r;
    }
    if (r != n)
        fail(ErrorKind::parse, path.string() + ": expected " + std::to_string(n) + " rows, found " + std::to_string(r));
    return s;
}

SimilarityMatrix cached_similarity_matrix(const std::filesystem::path& cache_dir,
                                          std::span<const Eigen::MatrixXd> features, std::vector<std::string> ids,
                                          Index radius, unsigned jobs)
{
    const auto path = cache_dir / ("similarity-" + similarity_cache_key(features, radius) + ".csv");
    if (std::filesystem::exists(path)) {
        auto s = read_similarity_csv(path);
        if (s.ids == ids)
            return s;
    }
    auto s = similarity_matrix(features, std::move(ids), radius, jobs);
    std::filesystem::create_directories(cache_dir);
    write_similarity_csv(path, s);
    return s;
}

void write_assignment_csv(const std::filesystem::path& path, const ClusterAssignment& assignment)
{
    std::ofstream out(path);
    if (!out)
        fail(ErrorKind::io, "cannot write '" + path.string() + "'");
    out << "series_id,cluster\n";
    for (std::size_t i = 0; i < assignment.ids.size(); ++i)
        out << assignment.ids[i] << ',' << assignment.labels[i] << '\n';
}

ClusterAssignment read_assignment_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::io, "cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{"series_id", "cluster"})
        fail(ErrorKind::parse, path.string() + ":1: header must be series_id,cluster");
    ClusterAssignment a;
    std::set<std::string> seen;
    std::size_t line_no = 1;
    int max_label = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        const auto fields = split_csv(line);
        if (fields.size() != 2)
            fail(ErrorKind::parse, path.string() + ":" + std::to_string(line_no) + ": expected 2 fields");
        int label = 0;
        const auto [ptr, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), label);
        if (ec != std::errc() || ptr != fields[1].data() + fields[1].size() || label < 0)
            fail(ErrorKind::parse, path.string() + ":" + std::to_string(line_no) + ": bad cluster index");
        if (!seen.insert(fields[0]).second)
            fail(ErrorKind::data, path.string() + ":" + std::to_string(line_no) + ": duplicate id '" + fields[0] + "'");
        a.ids.push_back(fields[0]);
        a.labels.push_back(label);
        max_label = std::max(max_label, label);
    }
    a.k = max_label + 1;
    return a;
}

} // namespace cmssa::cluster
