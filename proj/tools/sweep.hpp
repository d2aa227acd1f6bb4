#pragma once

#include "commands.hpp"

#include <string>

namespace cmssa::cli {

struct SweepConfig {
    fs::path foreground;
    fs::path background;
    std::vector<ssa::Index> windows{8, 16, 32, 64, 128};
    std::vector<ssa::Index> components{1, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    /// Explicit alphas, used when alpha_auto is false.
    std::vector<double> alphas{0.0};
    bool alpha_auto = true;
    alpha::SearchConfig search;
    std::vector<cluster::Transform> transforms{cluster::Transform::pc, cluster::Transform::rc};
    int clusters = 4;
    ssa::Index radius = 1;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    bool model_free = true;
    fs::path out = "results.csv";
    std::optional<fs::path> cache;
    ingest::CsvLayout layout;
};

struct SweepRow {
    std::optional<ssa::Index> window;
    std::optional<ssa::Index> components;
    std::optional<double> alpha;
    cluster::Transform transform = cluster::Transform::none;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t n_items = 0;
    /// "ok" or an error message.
    std::string status = "ok";

    std::string key() const;
    bool ok() const { return status == "ok"; }
};

/// Best non-contrastive vs best contrastive F1 for one (W, K, transform).
struct PairedF1 {
    ssa::Index window = 0;
    ssa::Index components = 0;
    cluster::Transform transform = cluster::Transform::pc;
    double mssa_f1 = 0.0;
    double best_cmssa_f1 = 0.0;
    double best_alpha = 0.0;
};

struct SweepResult {
    /// Every row in the results file after the run, in file order.
    std::vector<SweepRow> rows;
    /// Rows computed by this run (the rest were already present).
    std::size_t computed = 0;
    std::size_t skipped_pairs = 0;
    std::vector<PairedF1> paired;
};

/// Runs the grid, appending to config.out and skipping rows already
/// there. Writes the paired table to `<out stem>_paired.csv`.
SweepResult cmd_sweep(const SweepConfig& config, std::ostream& log);

std::vector<SweepRow> read_results(const fs::path& path);
std::vector<PairedF1> paired_f1(std::span<const SweepRow> rows);
fs::path paired_path(const fs::path& results);

} // namespace cmssa::cli
