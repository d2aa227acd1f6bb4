#include "cmssa/time_series.hpp"

#include "cmssa/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

namespace cmssa::ingest {

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char delimiter)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delimiter, start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::string where(const std::string& source, std::size_t line)
{
    return source + ":" + std::to_string(line);
}

struct PendingSeries {
    std::string id;
    std::optional<std::string> label;
    std::vector<std::vector<double>> rows;
};

} // namespace

TimeSeries::TimeSeries(Eigen::MatrixXd values, std::string id, std::optional<std::string> label)
    : values_(std::move(values)), id_(std::move(id)), label_(std::move(label))
{
    if (values_.rows() < 1 || values_.cols() < 1)
        fail(ErrorKind::degenerate_input, "series '" + id_ + "' must have at least one row and one channel");
    for (Eigen::Index r = 0; r < values_.rows(); ++r)
        for (Eigen::Index c = 0; c < values_.cols(); ++c)
            if (!std::isfinite(values_(r, c)))
                fail(ErrorKind::data, "series '" + id_ + "' has a non-finite value at row " + std::to_string(r + 1)
                                          + ", channel " + std::to_string(c + 1));
}

Eigen::MatrixXd CenteredSeries::restored() const
{
    return values.rowwise() + channel_means;
}

CsvLayout CsvLayout::from_environment()
{
    CsvLayout layout;
    if (const char* env = std::getenv("CMSSA_DELIMITER"); env != nullptr && *env != '\0') {
        const std::string_view value(env);
        layout.delimiter = value == "\\t" || value == "tab" ? '\t' : value.front();
    }
    return layout;
}

std::vector<TimeSeries> parse_collection(std::istream& in, const CsvLayout& layout, const std::string& source)
{
    std::string line;
    std::size_t line_no = 0;

    // header
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty())
            break;
    }
    if (trim(line).empty())
        fail(ErrorKind::parse, where(source, line_no) + ": missing header row");

    const auto header = split_fields(line, layout.delimiter);
    if (header.size() < 3 || trim(header[0]) != "series_id" || trim(header[1]) != "label")
        fail(ErrorKind::parse, where(source, line_no) + ": header must be series_id,label,ch1,...,chD");

    std::vector<std::size_t> channel_cols;
    if (layout.channels.empty()) {
        for (std::size_t c = 2; c < header.size(); ++c)
            channel_cols.push_back(c);
    } else {
        for (const auto& name : layout.channels) {
            std::size_t found = 0;
            for (std::size_t c = 2; c < header.size(); ++c)
                if (trim(header[c]) == name)
                    found = c;
            if (found == 0)
                fail(ErrorKind::schema, source + ": channel column '" + name + "' not in header");
            channel_cols.push_back(found);
        }
    }

    std::vector<TimeSeries> out;
    std::set<std::string> finished;
    std::optional<PendingSeries> current;

    auto flush = [&]() {
        if (!current)
            return;
        const auto rows = static_cast<Eigen::Index>(current->rows.size());
        const auto cols = static_cast<Eigen::Index>(channel_cols.size());
        Eigen::MatrixXd values(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c)
                values(r, c) = current->rows[r][c];
        finished.insert(current->id);
        out.emplace_back(std::move(values), current->id, current->label);
        current.reset();
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        const auto fields = split_fields(line, layout.delimiter);
        if (fields.size() != header.size())
            fail(ErrorKind::parse, where(source, line_no) + ": expected " + std::to_string(header.size())
                                       + " fields, found " + std::to_string(fields.size()));

        const std::string id(trim(fields[0]));
        if (id.empty())
            fail(ErrorKind::parse, where(source, line_no) + ": empty series_id");
        const std::string_view label_field = trim(fields[1]);
        std::optional<std::string> label;
        if (!label_field.empty())
            label = std::string(label_field);

        if (!current || current->id != id) {
            if (finished.contains(id))
                fail(ErrorKind::parse, where(source, line_no) + ": rows of series '" + id + "' are not contiguous");
            flush();
            current = PendingSeries{id, label, {}};
        } else if (current->label != label) {
            fail(ErrorKind::data, where(source, line_no) + ": label changes within series '" + id + "'");
        }

        std::vector<double> row;
        row.reserve(channel_cols.size());
        for (const auto c : channel_cols) {
            const auto text = trim(fields[c]);
            double value = 0.0;
            const auto* first = text.data();
            const auto* last = text.data() + text.size();
            // from_chars rejects a leading '+'
            if (first != last && *first == '+')
                ++first;
            const auto [ptr, ec] = std::from_chars(first, last, value);
            if (text.empty() || ec != std::errc() || ptr != last)
                fail(ErrorKind::parse, where(source, line_no) + ": cannot parse '" + std::string(text)
                                           + "' as a number in column " + std::to_string(c + 1));
            if (!std::isfinite(value))
                fail(ErrorKind::data, where(source, line_no) + ": series '" + id + "' row "
                                          + std::to_string(current->rows.size() + 1) + " has a non-finite value");
            row.push_back(value);
        }
        current->rows.push_back(std::move(row));
    }
    flush();

    require_uniform_channels(out);
    return out;
}

std::vector<TimeSeries> load_collection(const std::filesystem::path& path, const CsvLayout& layout)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::io, "cannot open '" + path.string() + "'");
    return parse_collection(in, layout, path.string());
}

std::string format_double(double value)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

void write_collection(std::ostream& out, std::span<const TimeSeries> series, std::vector<std::string> channel_names,
                      char delimiter)
{
    require_uniform_channels(series);
    const Eigen::Index channels = series.empty() ? 0 : series.front().channels();
    if (channel_names.empty())
        for (Eigen::Index c = 0; c < channels; ++c)
            channel_names.push_back("ch" + std::to_string(c + 1));
    if (static_cast<Eigen::Index>(channel_names.size()) != channels)
        fail(ErrorKind::schema, "channel name count does not match channel count");

    out << "series_id" << delimiter << "label";
    for (const auto& name : channel_names)
        out << delimiter << name;
    out << '\n';
    for (const auto& s : series) {
        for (Eigen::Index r = 0; r < s.length(); ++r) {
            out << s.id() << delimiter << s.label().value_or("");
            for (Eigen::Index c = 0; c < s.channels(); ++c)
                out << delimiter << format_double(s.values()(r, c));
            out << '\n';
        }
    }
}

void save_collection(const std::filesystem::path& path, std::span<const TimeSeries> series,
                     std::vector<std::string> channel_names, char delimiter)
{
    std::ofstream out(path);
    if (!out)
        fail(ErrorKind::io, "cannot write '" + path.string() + "'");
    write_collection(out, series, std::move(channel_names), delimiter);
}

void require_uniform_channels(std::span<const TimeSeries> series)
{
    for (const auto& s : series)
        if (s.channels() != series.front().channels())
            fail(ErrorKind::schema, "series '" + s.id() + "' has " + std::to_string(s.channels())
                                        + " channels, expected " + std::to_string(series.front().channels()));
}

CenteredSeries center(const TimeSeries& x)
{
    CenteredSeries out;
    out.channel_means = x.values().colwise().mean();
    out.values = x.values().rowwise() - out.channel_means;
    out.id = x.id();
    return out;
}

std::vector<CenteredSeries> center_all(std::span<const TimeSeries> series)
{
    std::vector<CenteredSeries> out;
    out.reserve(series.size());
    for (const auto& s : series)
        out.push_back(center(s));
    return out;
}

std::pair<TimeSeries, TimeSeries> split_halves(const TimeSeries& x)
{
    if (x.length() < 2)
        fail(ErrorKind::degenerate_input, "series '" + x.id() + "' needs at least 2 rows to split");
    const Eigen::Index first = (x.length() + 1) / 2;
    const Eigen::Index second = x.length() - first;
    return {TimeSeries(x.values().topRows(first), x.id() + "/1", x.label()),
            TimeSeries(x.values().bottomRows(second), x.id() + "/2", x.label())};
}

} // namespace cmssa::ingest
