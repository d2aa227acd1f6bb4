#include "cmssa/basis_io.hpp"

#include "cmssa/error.hpp"

#include <fstream>

namespace cmssa::ssa {

nlohmann::json to_json(const EigenBasis& basis)
{
    nlohmann::json j;
    j["window"] = basis.window;
    j["channels"] = basis.channels;
    j["alpha"] = basis.alpha;
    j["components"] = basis.components();
    j["eigenvalues"] = std::vector<double>(basis.eigenvalues.data(), basis.eigenvalues.data() + basis.eigenvalues.size());
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(basis.vectors.size()));
    for (Index r = 0; r < basis.vectors.rows(); ++r)
        for (Index c = 0; c < basis.vectors.cols(); ++c)
            flat.push_back(basis.vectors(r, c));
    j["vectors"] = std::move(flat);
    return j;
}

EigenBasis basis_from_json(const nlohmann::json& j)
{
    try {
        EigenBasis basis;
        basis.window = j.at("window").get<Index>();
        basis.channels = j.at("channels").get<Index>();
        basis.alpha = j.at("alpha").get<double>();
        const auto eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
        const auto flat = j.at("vectors").get<std::vector<double>>();
        const auto k = static_cast<Index>(eigenvalues.size());
        const Index dim = basis.window * basis.channels;
        if (basis.window < 1 || basis.channels < 1 || k < 1)
            fail(ErrorKind::schema, "model must have positive window, channels and component count");
        if (static_cast<Index>(flat.size()) != dim * k)
            fail(ErrorKind::schema, "model vectors have " + std::to_string(flat.size()) + " entries, expected "
                                        + std::to_string(dim * k));
        basis.eigenvalues = Eigen::Map<const Eigen::VectorXd>(eigenvalues.data(), k);
        basis.vectors = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            flat.data(), dim, k);
        return basis;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::schema, std::string("malformed model JSON: ") + e.what());
    }
}

void save_basis(const std::filesystem::path& path, const EigenBasis& basis)
{
    std::ofstream out(path);
    if (!out)
        fail(ErrorKind::io, "cannot write '" + path.string() + "'");
    out << to_json(basis).dump(2) << '\n';
}

EigenBasis load_basis(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::io, "cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::parse, path.string() + ": " + e.what());
    }
    return basis_from_json(j);
}

} // namespace cmssa::ssa
