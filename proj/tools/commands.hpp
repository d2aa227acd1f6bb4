#pragma once

#include "cmssa/alpha_search.hpp"
#include "cmssa/bcubed.hpp"
#include "cmssa/similarity.hpp"
#include "cmssa/ssa.hpp"
#include "cmssa/synthetic.hpp"
#include "cmssa/time_series.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace cmssa::cli {

namespace fs = std::filesystem;

/// Parses argv and dispatches to a subcommand. Returns the process exit
/// code: 0 success, 1 numeric failure, 2 input or configuration error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int exit_code_for(const std::exception& e);

struct SynthOptions {
    synth::SynthConfig config;
    std::uint64_t background_seed = 2;
    fs::path out = ".";
};

/// Writes foreground.csv, background.csv and subsignal.csv into options.out.
void cmd_synth(const SynthOptions& options, std::ostream& log);

struct FitOptions {
    fs::path foreground;
    std::optional<fs::path> background;
    ssa::Index window = 0;
    ssa::Index components = 0;
    double alpha = 0.0;
    bool alpha_auto = false;
    alpha::SearchConfig search;
    fs::path out = "model.json";
    ingest::CsvLayout layout;
};

/// Fits one model, or one per selected alpha with alpha_auto (written as
/// `<stem>.<i><ext>`). Returns the fitted bases.
std::vector<ssa::EigenBasis> cmd_fit(const FitOptions& options, std::ostream& log);

struct DecomposeOptions {
    fs::path model;
    fs::path series;
    fs::path out = ".";
    bool add_means = false;
    ingest::CsvLayout layout;
};

/// Per series: `<id>.pcs.csv`, `<id>.rcs.csv`, `<id>.rc_sum.csv` and one
/// `<id>.rc<k>.plot.csv` per component.
void cmd_decompose(const DecomposeOptions& options, std::ostream& log);

struct AlphaSearchOptions {
    fs::path foreground;
    fs::path background;
    ssa::Index window = 0;
    ssa::Index components = 0;
    alpha::SearchConfig search;
    std::optional<fs::path> out;
    ingest::CsvLayout layout;
};

/// {candidates: n + 1, selected: [...], alphas: [...], clusters: [...]}
nlohmann::json alpha_selection_json(const alpha::AlphaSelection& selection);
nlohmann::json cmd_alpha_search(const AlphaSearchOptions& options, std::ostream& log);

struct ClusterOptions {
    fs::path series;
    std::optional<fs::path> model;
    cluster::Transform transform = cluster::Transform::none;
    int clusters = 4;
    ssa::Index radius = 1;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    std::optional<fs::path> cache;
    fs::path out = "assignments.csv";
    ingest::CsvLayout layout;
};

cluster::ClusterAssignment cmd_cluster(const ClusterOptions& options, std::ostream& log);

struct EvaluateOptions {
    fs::path assignments;
    fs::path gold;
    std::optional<fs::path> out;
    ingest::CsvLayout layout;
};

eval::EvalReport cmd_evaluate(const EvaluateOptions& options, std::ostream& log);

/// Gold labels keyed by series id; every series must carry a label.
std::map<std::string, std::string> gold_labels(std::span<const ingest::TimeSeries> series);

/// Load a collection, failing with an error naming the path when it is empty.
std::vector<ingest::TimeSeries> load_nonempty(const fs::path& path, const ingest::CsvLayout& layout);

} // namespace cmssa::cli
