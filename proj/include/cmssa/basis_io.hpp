#pragma once

#include "cmssa/ssa.hpp"

#include <json.hpp>

#include <filesystem>

namespace cmssa::ssa {

/// {window, channels, alpha, eigenvalues: [...], vectors: row-major [...]}.
/// Doubles are written in shortest round-trip form, so load(save(b)) == b.
nlohmann::json to_json(const EigenBasis& basis);
EigenBasis basis_from_json(const nlohmann::json& j);

void save_basis(const std::filesystem::path& path, const EigenBasis& basis);
EigenBasis load_basis(const std::filesystem::path& path);

} // namespace cmssa::ssa
