#include "commands.hpp"

#include "sweep.hpp"

#include "cmssa/basis_io.hpp"
#include "cmssa/error.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace cmssa::cli {

namespace {

std::string file_stem_for(const std::string& id)
{
    std::string out = id;
    for (auto& c : out)
        if (c == '/' || c == '\\' || c == ':' || c == ' ')
            c = '_';
    return out;
}

std::ofstream open_out(const fs::path& path)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        fail(ErrorKind::io, "cannot write '" + path.string() + "'");
    return out;
}

void write_matrix_csv(const fs::path& path, const std::vector<std::string>& columns, const Eigen::MatrixXd& m)
{
    auto out = open_out(path);
    out << "t";
    for (const auto& c : columns)
        out << ',' << c;
    out << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        out << r;
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            out << ',' << ingest::format_double(m(r, c));
        out << '\n';
    }
}

void write_json(const std::optional<fs::path>& path, const nlohmann::json& j, std::ostream& fallback)
{
    if (path) {
        auto out = open_out(*path);
        out << j.dump(2) << '\n';
    } else {
        fallback << j.dump(2) << '\n';
    }
}

void log_spectrum(std::ostream& log, const ssa::EigenBasis& basis)
{
    log << "alpha " << ingest::format_double(basis.alpha) << " eigenvalues:";
    for (Eigen::Index i = 0; i < basis.eigenvalues.size(); ++i)
        log << ' ' << ingest::format_double(basis.eigenvalues(i));
    log << '\n';
}

fs::path indexed_path(const fs::path& base, std::size_t index)
{
    auto name = base.stem().string() + "." + std::to_string(index) + base.extension().string();
    return base.parent_path() / name;
}

} // namespace

int exit_code_for(const std::exception& e)
{
    if (const auto* err = dynamic_cast<const Error*>(&e))
        return err->kind() == ErrorKind::numeric ? 1 : 2;
    if (dynamic_cast<const fs::filesystem_error*>(&e) != nullptr)
        return 2;
    return 1;
}

std::vector<ingest::TimeSeries> load_nonempty(const fs::path& path, const ingest::CsvLayout& layout)
{
    auto series = ingest::load_collection(path, layout);
    if (series.empty())
        fail(ErrorKind::degenerate_input, "'" + path.string() + "' contains no series");
    return series;
}

std::map<std::string, std::string> gold_labels(std::span<const ingest::TimeSeries> series)
{
    std::map<std::string, std::string> gold;
    for (const auto& s : series) {
        if (!s.label())
            fail(ErrorKind::data, "series '" + s.id() + "' has no label");
        gold[s.id()] = *s.label();
    }
    return gold;
}

void cmd_synth(const SynthOptions& options, std::ostream& log)
{
    auto cfg = options.config;
    const auto fg = synth::generate_foreground(cfg);
    cfg.seed = options.background_seed;
    const auto bg = synth::generate_background(cfg);

    fs::create_directories(options.out);
    ingest::save_collection(options.out / "foreground.csv", std::span(&fg.composite, 1));
    ingest::save_collection(options.out / "background.csv", std::span(&bg, 1));
    synth::save_subsignal(options.out / "subsignal.csv", fg.subsignal);
    log << "wrote foreground.csv, background.csv, subsignal.csv to " << options.out.string() << '\n';
}

std::vector<ssa::EigenBasis> cmd_fit(const FitOptions& options, std::ostream& log)
{
    const auto fg = load_nonempty(options.foreground, options.layout);
    const bool contrastive = options.alpha_auto || options.alpha != 0.0;
    if (contrastive && !options.background)
        fail(ErrorKind::parameter, "a background collection is required when alpha != 0 or --alpha-auto is set");

    std::vector<ssa::EigenBasis> bases;
    if (!options.background) {
        bases.push_back(ssa::fit_mssa(fg, options.window, options.components));
    } else {
        const auto bg = load_nonempty(*options.background, options.layout);
        const ssa::ContrastiveFit fit(fg, bg, options.window);
        if (options.alpha_auto) {
            const auto selection
                = alpha::select(alpha::build_candidates(fit, options.components, options.search), options.search);
            for (double a : selection.selected)
                bases.push_back(fit.basis(options.components, a));
        } else {
            bases.push_back(fit.basis(options.components, options.alpha));
        }
    }

    for (std::size_t i = 0; i < bases.size(); ++i) {
        const auto path = options.alpha_auto ? indexed_path(options.out, i) : options.out;
        if (path.has_parent_path())
            fs::create_directories(path.parent_path());
        ssa::save_basis(path, bases[i]);
        log_spectrum(log, bases[i]);
        log << "wrote " << path.string() << '\n';
    }
    return bases;
}

void cmd_decompose(const DecomposeOptions& options, std::ostream& log)
{
    const auto basis = ssa::load_basis(options.model);
    const auto series = load_nonempty(options.series, options.layout);
    fs::create_directories(options.out);

    const Eigen::Index d = basis.channels;
    const Eigen::Index k = basis.components();
    std::vector<std::string> pc_cols;
    std::vector<std::string> rc_cols;
    std::vector<std::string> ch_cols;
    for (Eigen::Index c = 0; c < d; ++c)
        ch_cols.push_back("ch" + std::to_string(c + 1));
    for (Eigen::Index i = 0; i < k; ++i) {
        pc_cols.push_back("pc" + std::to_string(i + 1));
        for (Eigen::Index c = 0; c < d; ++c)
            rc_cols.push_back("rc" + std::to_string(i + 1) + "_ch" + std::to_string(c + 1));
    }

    for (const auto& s : series) {
        if (s.channels() != d)
            fail(ErrorKind::schema, "series '" + s.id() + "' has " + std::to_string(s.channels())
                                        + " channels, model expects " + std::to_string(d));
        const auto dec = ssa::reconstruct(ingest::center(s), basis);
        const auto stem = options.out / file_stem_for(s.id());
        write_matrix_csv(stem.string() + ".pcs.csv", pc_cols, dec.pcs);
        write_matrix_csv(stem.string() + ".rcs.csv", rc_cols, dec.rcs);
        write_matrix_csv(stem.string() + ".rc_sum.csv", ch_cols,
                         options.add_means ? dec.summed_with_means() : dec.summed());
        for (Eigen::Index i = 0; i < k; ++i)
            write_matrix_csv(stem.string() + ".rc" + std::to_string(i + 1) + ".plot.csv", ch_cols, dec.component(i));
        log << "decomposed " << s.id() << '\n';
    }
}

nlohmann::json alpha_selection_json(const alpha::AlphaSelection& selection)
{
    nlohmann::json j;
    j["candidates"] = selection.candidates.size();
    j["selected"] = selection.selected;
    j["alphas"] = selection.candidates;
    j["clusters"] = selection.cluster_assignments;
    return j;
}

nlohmann::json cmd_alpha_search(const AlphaSearchOptions& options, std::ostream& log)
{
    const auto fg = load_nonempty(options.foreground, options.layout);
    const auto bg = load_nonempty(options.background, options.layout);
    const auto selection = alpha::search(fg, bg, options.window, options.components, options.search);
    auto j = alpha_selection_json(selection);
    write_json(options.out, j, log);
    return j;
}

cluster::ClusterAssignment cmd_cluster(const ClusterOptions& options, std::ostream& log)
{
    const auto series = load_nonempty(options.series, options.layout);
    std::optional<ssa::EigenBasis> basis;
    if (options.model)
        basis = ssa::load_basis(*options.model);
    const auto features = cluster::transform_features(series, basis ? &*basis : nullptr, options.transform);
    std::vector<std::string> ids;
    for (const auto& s : series)
        ids.push_back(s.id());

    const auto sim = options.cache
                         ? cluster::cached_similarity_matrix(*options.cache, features, ids, options.radius, options.jobs)
                         : cluster::similarity_matrix(features, ids, options.radius, options.jobs);
    auto assignment = cluster::spectral_cluster(sim, options.clusters, options.seed);
    if (options.out.has_parent_path())
        fs::create_directories(options.out.parent_path());
    cluster::write_assignment_csv(options.out, assignment);
    log << "clustered " << ids.size() << " series into " << options.clusters << " clusters -> "
        << options.out.string() << '\n';
    return assignment;
}

eval::EvalReport cmd_evaluate(const EvaluateOptions& options, std::ostream& log)
{
    const auto assignment = cluster::read_assignment_csv(options.assignments);
    const auto series = load_nonempty(options.gold, options.layout);
    auto report = eval::bcubed(assignment, gold_labels(series));
    write_json(options.out, eval::to_json(report), log);
    return report;
}

namespace {

void add_layout(CLI::App* cmd, std::string& delimiter)
{
    cmd->add_option("--delimiter", delimiter, "CSV delimiter (default: $CMSSA_DELIMITER or ',')");
}

ingest::CsvLayout layout_from(const std::string& delimiter)
{
    auto layout = ingest::CsvLayout::from_environment();
    if (!delimiter.empty())
        layout.delimiter = delimiter == "\\t" || delimiter == "tab" ? '\t' : delimiter.front();
    return layout;
}

void add_search(CLI::App* cmd, alpha::SearchConfig& s)
{
    cmd->add_option("--alpha-min", s.alpha_min, "smallest candidate alpha")->capture_default_str();
    cmd->add_option("--alpha-max", s.alpha_max, "largest candidate alpha")->capture_default_str();
    cmd->add_option("--alpha-n", s.n, "number of log-spaced candidates")->capture_default_str();
    cmd->add_option("--alpha-m", s.m, "number of alpha clusters")->capture_default_str();
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Contrastive multivariate singular spectrum analysis"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key = value file; options go under a [<subcommand>] section and flags override them");
    std::string delimiter;

    SynthOptions synth_opt;
    auto* synth = app.add_subcommand("synth", "generate a synthetic foreground/background pair");
    synth->add_option("--length", synth_opt.config.length, "series length")->capture_default_str();
    synth->add_option("--sinusoids", synth_opt.config.n_sinusoids, "sinusoids per mixture")->capture_default_str();
    synth->add_option("--noise", synth_opt.config.noise_sigma, "noise standard deviation")->capture_default_str();
    synth->add_option("--fraction", synth_opt.config.subsignal_variance_fraction,
                      "sub-signal share of foreground variance")
        ->capture_default_str();
    synth->add_option("--seed", synth_opt.config.seed, "foreground seed")->capture_default_str();
    std::optional<std::uint64_t> background_seed;
    synth->add_option("--background-seed", background_seed, "background seed (default: seed + 1)");
    synth->add_option("--out", synth_opt.out, "output directory")->capture_default_str();

    FitOptions fit_opt;
    std::string fit_background;
    auto* fit = app.add_subcommand("fit", "fit an MSSA / cMSSA eigenbasis");
    fit->add_option("--foreground", fit_opt.foreground, "foreground collection CSV")->required();
    fit->add_option("--background", fit_background, "background collection CSV");
    fit->add_option("--window", fit_opt.window, "window length W")->required();
    fit->add_option("--components", fit_opt.components, "number of components K")->required();
    auto* fit_alpha = fit->add_option("--alpha", fit_opt.alpha, "contrast strength")->capture_default_str();
    fit->add_flag("--alpha-auto", fit_opt.alpha_auto, "select alphas automatically")->excludes(fit_alpha);
    add_search(fit, fit_opt.search);
    fit->add_option("--seed", fit_opt.search.seed, "clustering seed for --alpha-auto");
    fit->add_option("--jobs", fit_opt.search.jobs, "worker threads (0 = all)");
    fit->add_option("--out", fit_opt.out, "model JSON path")->capture_default_str();
    add_layout(fit, delimiter);

    DecomposeOptions dec_opt;
    auto* decompose = app.add_subcommand("decompose", "write PC / RC transforms of a collection");
    decompose->add_option("--model", dec_opt.model, "model JSON")->required();
    decompose->add_option("--series", dec_opt.series, "collection CSV")->required();
    decompose->add_option("--out", dec_opt.out, "output directory")->capture_default_str();
    decompose->add_flag("--add-means", dec_opt.add_means, "add channel means to the summed reconstruction");
    add_layout(decompose, delimiter);

    AlphaSearchOptions as_opt;
    std::string as_out;
    auto* asearch = app.add_subcommand("alpha-search", "select diverse contrast strengths");
    asearch->add_option("--foreground", as_opt.foreground, "foreground collection CSV")->required();
    asearch->add_option("--background", as_opt.background, "background collection CSV")->required();
    asearch->add_option("--window", as_opt.window, "window length W")->required();
    asearch->add_option("--components", as_opt.components, "number of components K")->required();
    add_search(asearch, as_opt.search);
    asearch->add_option("--seed", as_opt.search.seed, "clustering seed")->capture_default_str();
    asearch->add_option("--jobs", as_opt.search.jobs, "worker threads (0 = all)");
    asearch->add_option("--out", as_out, "output JSON (default: stdout)");
    add_layout(asearch, delimiter);

    ClusterOptions cl_opt;
    std::string cl_model;
    std::string cl_transform = "none";
    std::string cl_cache;
    auto* clus = app.add_subcommand("cluster", "spectral clustering under FastDTW similarity");
    clus->add_option("--series", cl_opt.series, "collection CSV")->required();
    clus->add_option("--model", cl_model, "model JSON (needed for pc / rc)");
    clus->add_option("--transform", cl_transform, "pc, rc or none")->capture_default_str();
    clus->add_option("--clusters", cl_opt.clusters, "number of clusters")->capture_default_str();
    clus->add_option("--radius", cl_opt.radius, "FastDTW radius")->capture_default_str();
    clus->add_option("--seed", cl_opt.seed, "k-means seed")->capture_default_str();
    clus->add_option("--jobs", cl_opt.jobs, "worker threads (0 = all)");
    clus->add_option("--cache", cl_cache, "similarity cache directory");
    clus->add_option("--out", cl_opt.out, "assignment CSV")->capture_default_str();
    add_layout(clus, delimiter);

    EvaluateOptions ev_opt;
    std::string ev_out;
    auto* evaluate = app.add_subcommand("evaluate", "BCubed scores of a clustering");
    evaluate->add_option("--assignments", ev_opt.assignments, "assignment CSV")->required();
    evaluate->add_option("--gold", ev_opt.gold, "labelled collection CSV")->required();
    evaluate->add_option("--out", ev_out, "report JSON (default: stdout)");
    add_layout(evaluate, delimiter);

    SweepConfig sw;
    std::vector<std::string> sw_transforms{"pc", "rc"};
    std::string sw_cache;
    bool sw_no_model_free = false;
    auto* sweep = app.add_subcommand("sweep", "hyperparameter grid over W, K, alpha and transform");
    sweep->fallthrough();
    sweep->add_option("--foreground", sw.foreground, "foreground collection CSV")->required();
    sweep->add_option("--background", sw.background, "background collection CSV")->required();
    sweep->add_option("--window", sw.windows, "window grid")->capture_default_str();
    sweep->add_option("--components", sw.components, "K grid")->capture_default_str();
    auto* sw_alpha = sweep->add_option("--alpha", sw.alphas, "explicit alpha list (disables --alpha-auto)");
    bool sw_auto_flag = false;
    sweep->add_flag("--alpha-auto", sw_auto_flag, "select alphas automatically (default without --alpha)")
        ->excludes(sw_alpha);
    add_search(sweep, sw.search);
    sweep->add_option("--transform", sw_transforms, "transforms to evaluate")->capture_default_str();
    sweep->add_option("--clusters", sw.clusters, "number of clusters")->capture_default_str();
    sweep->add_option("--radius", sw.radius, "FastDTW radius")->capture_default_str();
    sweep->add_option("--seed", sw.seed, "seed for alpha search and clustering")->capture_default_str();
    sweep->add_option("--jobs", sw.jobs, "concurrent rows (0 = all)");
    sweep->add_flag("--no-model-free", sw_no_model_free, "skip the untransformed baseline row");
    sweep->add_option("--cache", sw_cache, "similarity cache directory");
    sweep->add_option("--out", sw.out, "results CSV")->capture_default_str();
    add_layout(sweep, delimiter);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        const auto layout = layout_from(delimiter);
        if (*synth) {
            synth_opt.background_seed = background_seed.value_or(synth_opt.config.seed + 1);
            cmd_synth(synth_opt, err);
        } else if (*fit) {
            fit_opt.layout = layout;
            if (!fit_background.empty())
                fit_opt.background = fit_background;
            cmd_fit(fit_opt, err);
        } else if (*decompose) {
            dec_opt.layout = layout;
            cmd_decompose(dec_opt, err);
        } else if (*asearch) {
            as_opt.layout = layout;
            if (!as_out.empty())
                as_opt.out = as_out;
            cmd_alpha_search(as_opt, out);
        } else if (*clus) {
            cl_opt.layout = layout;
            cl_opt.transform = cluster::parse_transform(cl_transform);
            if (!cl_model.empty())
                cl_opt.model = cl_model;
            if (!cl_cache.empty())
                cl_opt.cache = cl_cache;
            cmd_cluster(cl_opt, err);
        } else if (*evaluate) {
            ev_opt.layout = layout;
            if (!ev_out.empty())
                ev_opt.out = ev_out;
            cmd_evaluate(ev_opt, out);
        } else if (*sweep) {
            sw.layout = layout;
            sw.alpha_auto = sw_alpha->count() == 0;
            sw.search.seed = sw.seed;
            sw.search.jobs = 1;
            sw.model_free = !sw_no_model_free;
            sw.transforms.clear();
            for (const auto& t : sw_transforms)
                sw.transforms.push_back(cluster::parse_transform(t));
            if (!sw_cache.empty())
                sw.cache = sw_cache;
            cmd_sweep(sw, err);
        }
    } catch (const std::exception& e) {
        err << app.get_subcommands().front()->get_name() << ": " << e.what() << '\n';
        return exit_code_for(e);
    }
    return 0;
}

} // namespace cmssa::cli
