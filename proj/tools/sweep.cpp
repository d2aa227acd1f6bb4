#include "sweep.hpp"

#include "cmssa/error.hpp"
#include "cmssa/parallel.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <utility>

namespace cmssa::cli {

namespace {

const char* results_header = "window,components,alpha,transform,precision,recall,f1,n_items,status";

std::string sanitize(std::string s)
{
    for (auto& c : s)
        if (c == ',' || c == '\n' || c == '\r')
            c = c == ',' ? ';' : ' ';
    return s;
}

std::string format_row(const SweepRow& r)
{
    std::ostringstream out;
    if (r.window)
        out << *r.window;
    out << ',';
    if (r.components)
        out << *r.components;
    out << ',';
    if (r.alpha)
        out << ingest::format_double(*r.alpha);
    out << ',' << cluster::to_string(r.transform) << ',' << ingest::format_double(r.precision) << ','
        << ingest::format_double(r.recall) << ',' << ingest::format_double(r.f1) << ',' << r.n_items << ','
        << sanitize(r.status);
    return out.str();
}

template <typename T>
std::optional<T> parse_optional(const std::string& text, const fs::path& path, std::size_t line)
{
    if (text.empty())
        return std::nullopt;
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        fail(ErrorKind::parse, path.string() + ":" + std::to_string(line) + ": cannot parse '" + text + "'");
    return value;
}

// Appends finished groups to the results file in submission order.
class OrderedWriter {
public:
    OrderedWriter(const fs::path& path, bool write_header)
        : out_(path, std::ios::app)
    {
        if (!out_)
            fail(ErrorKind::io, "cannot write '" + path.string() + "'");
        if (write_header)
            out_ << results_header << '\n';
        out_.flush();
    }

    void submit(std::size_t index, std::vector<SweepRow> rows)
    {
        std::lock_guard lock(mutex_);
        pending_[index] = std::move(rows);
        while (!pending_.empty() && pending_.begin()->first == next_) {
            for (const auto& r : pending_.begin()->second) {
                out_ << format_row(r) << '\n';
                written_.push_back(r);
            }
            out_.flush();
            pending_.erase(pending_.begin());
            ++next_;
        }
    }

    std::vector<SweepRow> take() { return std::move(written_); }

private:
    std::ofstream out_;
    std::mutex mutex_;
    std::map<std::size_t, std::vector<SweepRow>> pending_;
    std::size_t next_ = 0;
    std::vector<SweepRow> written_;
};

struct Group {
    std::optional<ssa::Index> window;
    std::optional<ssa::Index> components;
};

} // namespace

std::string SweepRow::key() const
{
    std::string k;
    k += window ? std::to_string(*window) : "";
    k += '|';
    k += components ? std::to_string(*components) : "";
    k += '|';
    k += alpha ? ingest::format_double(*alpha) : "";
    k += '|';
    k += cluster::to_string(transform);
    return k;
}

fs::path paired_path(const fs::path& results)
{
    return results.parent_path() / (results.stem().string() + "_paired" + results.extension().string());
}

std::vector<SweepRow> read_results(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::io, "cannot open '" + path.string() + "'");
    std::string line;
    std::size_t line_no = 0;
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line == results_header)
            continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ','))
            f.push_back(field);
        if (!line.empty() && line.back() == ',')
            f.emplace_back();
        if (f.size() != 9)
            fail(ErrorKind::parse, path.string() + ":" + std::to_string(line_no) + ": expected 9 result fields");
        SweepRow r;
        r.window = parse_optional<ssa::Index>(f[0], path, line_no);
        r.components = parse_optional<ssa::Index>(f[1], path, line_no);
        r.alpha = parse_optional<double>(f[2], path, line_no);
        r.transform = cluster::parse_transform(f[3]);
        r.precision = parse_optional<double>(f[4], path, line_no).value_or(0.0);
        r.recall = parse_optional<double>(f[5], path, line_no).value_or(0.0);
        r.f1 = parse_optional<double>(f[6], path, line_no).value_or(0.0);
        r.n_items = parse_optional<std::size_t>(f[7], path, line_no).value_or(0);
        r.status = f[8];
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<PairedF1> paired_f1(std::span<const SweepRow> rows)
{
    struct Acc {
        std::optional<double> mssa;
        std::optional<double> best;
        double best_alpha = 0.0;
    };
    std::map<std::tuple<ssa::Index, ssa::Index, int>, Acc> groups;
    for (const auto& r : rows) {
        if (!r.ok() || r.transform == cluster::Transform::none || !r.window || !r.components || !r.alpha)
            continue;
        auto& acc = groups[{*r.window, *r.components, static_cast<int>(r.transform)}];
        if (*r.alpha == 0.0) {
            acc.mssa = r.f1;
        } else if (!acc.best || r.f1 > *acc.best || (r.f1 == *acc.best && *r.alpha < acc.best_alpha)) {
            acc.best = r.f1;
            acc.best_alpha = *r.alpha;
        }
    }
    std::vector<PairedF1> out;
    for (const auto& [key, acc] : groups) {
        if (!acc.mssa || !acc.best)
            continue;
        out.push_back({std::get<0>(key), std::get<1>(key), static_cast<cluster::Transform>(std::get<2>(key)),
                       *acc.mssa, *acc.best, acc.best_alpha});
    }
    return out;
}

SweepResult cmd_sweep(const SweepConfig& config, std::ostream& log)
{
    const auto fg = load_nonempty(config.foreground, config.layout);
    const auto bg = load_nonempty(config.background, config.layout);
    ingest::require_uniform_channels(fg);
    ingest::require_uniform_channels(bg);
    if (fg.front().channels() != bg.front().channels())
        fail(ErrorKind::schema, "foreground and background channel counts differ");
    if (config.clusters < 1)
        fail(ErrorKind::parameter, "cluster count must be >= 1");
    if (!config.alpha_auto && config.alphas.empty())
        fail(ErrorKind::parameter, "explicit alpha list is empty");
    const auto gold = gold_labels(fg);
    const ssa::Index channels = fg.front().channels();
    std::vector<std::string> ids;
    for (const auto& s : fg)
        ids.push_back(s.id());

    std::vector<SweepRow> existing;
    const bool had_file = fs::exists(config.out);
    if (had_file)
        existing = read_results(config.out);
    std::set<std::string> done;
    for (const auto& r : existing)
        if (r.ok())
            done.insert(r.key());

    SweepResult result;
    std::vector<Group> groups;
    if (config.model_free)
        groups.push_back({});
    std::set<ssa::Index> windows_in_use;
    for (const auto w : config.windows) {
        for (const auto k : config.components) {
            if (k > channels * w || k < 1) {
                log << "skipping W=" << w << " K=" << k << ": K must lie in [1, D*W] = [1, " << channels * w
                    << "]\n";
                ++result.skipped_pairs;
                continue;
            }
            groups.push_back({w, k});
            windows_in_use.insert(w);
        }
    }

    // covariance pair per window, shared by every K
    std::map<ssa::Index, std::shared_ptr<const ssa::ContrastiveFit>> fits;
    std::map<ssa::Index, std::string> fit_errors;
    for (const auto w : windows_in_use) {
        try {
            fits[w] = std::make_shared<const ssa::ContrastiveFit>(fg, bg, w);
        } catch (const Error& e) {
            fit_errors[w] = e.what();
        }
    }

    auto cluster_row = [&](SweepRow row, const ssa::EigenBasis* basis) {
        try {
            const auto features = cluster::transform_features(fg, basis, row.transform);
            const auto sim = config.cache ? cluster::cached_similarity_matrix(*config.cache, features, ids,
                                                                              config.radius, 1)
                                          : cluster::similarity_matrix(features, ids, config.radius, 1);
            const auto assignment = cluster::spectral_cluster(sim, config.clusters, config.seed);
            const auto report = eval::bcubed(assignment, gold);
            row.precision = report.precision;
            row.recall = report.recall;
            row.f1 = report.f1;
            row.n_items = report.n_items;
        } catch (const Error& e) {
            row.status = e.what();
        }
        return row;
    };

    OrderedWriter writer(config.out, !had_file);
    parallel_for(groups.size(), config.jobs, [&](std::size_t gi) {
        const auto& g = groups[gi];
        std::vector<SweepRow> rows;
        if (!g.window) {
            SweepRow row;
            if (!done.contains(row.key()))
                rows.push_back(cluster_row(row, nullptr));
            writer.submit(gi, std::move(rows));
            return;
        }

        auto error_rows = [&](const std::string& message) {
            for (const auto t : config.transforms) {
                SweepRow row{g.window, g.components, std::nullopt, t};
                row.status = message;
                rows.push_back(std::move(row));
            }
        };

        if (const auto it = fit_errors.find(*g.window); it != fit_errors.end()) {
            error_rows(it->second);
            writer.submit(gi, std::move(rows));
            return;
        }
        const auto& fit = *fits.at(*g.window);

        std::vector<double> alphas = config.alphas;
        if (config.alpha_auto) {
            try {
                alphas = alpha::select(alpha::build_candidates(fit, *g.components, config.search), config.search)
                             .selected;
            } catch (const Error& e) {
                error_rows(e.what());
                writer.submit(gi, std::move(rows));
                return;
            }
        }

        for (const double a : alphas) {
            std::optional<ssa::EigenBasis> basis;
            std::string basis_error;
            try {
                basis = fit.basis(*g.components, a);
            } catch (const Error& e) {
                basis_error = e.what();
            }
            for (const auto t : config.transforms) {
                SweepRow row{g.window, g.components, a, t};
                if (done.contains(row.key()))
                    continue;
                if (!basis) {
                    row.status = basis_error;
                    rows.push_back(std::move(row));
                    continue;
                }
                rows.push_back(cluster_row(std::move(row), &*basis));
            }
        }
        writer.submit(gi, std::move(rows));
    });

    const auto fresh = writer.take();
    result.computed = fresh.size();

    // later rows supersede earlier ones with the same key
    std::map<std::string, std::size_t> position;
    for (const std::vector<SweepRow>* source : {&std::as_const(existing), &fresh}) {
        for (const auto& r : *source) {
            const auto [it, inserted] = position.try_emplace(r.key(), result.rows.size());
            if (inserted)
                result.rows.push_back(r);
            else
                result.rows[it->second] = r;
        }
    }
    result.paired = paired_f1(result.rows);

    std::ofstream paired(paired_path(config.out));
    if (!paired)
        fail(ErrorKind::io, "cannot write '" + paired_path(config.out).string() + "'");
    paired << "window,components,transform,mssa_f1,best_cmssa_f1,best_alpha\n";
    for (const auto& p : result.paired)
        paired << p.window << ',' << p.components << ',' << cluster::to_string(p.transform) << ','
               << ingest::format_double(p.mssa_f1) << ',' << ingest::format_double(p.best_cmssa_f1) << ','
               << ingest::format_double(p.best_alpha) << '\n';

    log << "sweep: " << result.computed << " rows computed, " << result.rows.size() << " rows total, "
        << result.skipped_pairs << " (W, K) pairs skipped\n";
    return result;
}

} // namespace cmssa::cli
