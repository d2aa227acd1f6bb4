#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cmssa::ingest {

/// A T x D multichannel series: rows are time steps, columns are channels.
///
/// Construction validates T >= 1, D >= 1 and that every entry is finite.
/// The label is evaluation metadata only; fitting code never reads it.
class TimeSeries {
public:
    TimeSeries(Eigen::MatrixXd values, std::string id, std::optional<std::string> label = std::nullopt);

    const Eigen::MatrixXd& values() const noexcept { return values_; }
    Eigen::Index length() const noexcept { return values_.rows(); }
    Eigen::Index channels() const noexcept { return values_.cols(); }
    const std::string& id() const noexcept { return id_; }
    const std::optional<std::string>& label() const noexcept { return label_; }

private:
    Eigen::MatrixXd values_;
    std::string id_;
    std::optional<std::string> label_;
};

/// Per-channel mean-subtracted copy of a series.
struct CenteredSeries {
    Eigen::MatrixXd values;
    Eigen::RowVectorXd channel_means;
    std::string id;

    Eigen::Index length() const noexcept { return values.rows(); }
    Eigen::Index channels() const noexcept { return values.cols(); }

    /// values with the channel means added back.
    Eigen::MatrixXd restored() const;
};

/// Column layout of the ingest CSV: `series_id,label,ch1,...,chD`.
struct CsvLayout {
    char delimiter = ',';
    /// Channel columns to keep, by header name. Empty keeps every column
    /// after `label`, in file order.
    std::vector<std::string> channels;

    /// Default layout with the delimiter taken from CMSSA_DELIMITER when set.
    static CsvLayout from_environment();
};

std::vector<TimeSeries> load_collection(const std::filesystem::path& path, const CsvLayout& layout = {});
std::vector<TimeSeries> parse_collection(std::istream& in, const CsvLayout& layout,
                                         const std::string& source = "<stream>");

/// Writes a collection in the ingest layout. Channel names default to ch1..chD.
void write_collection(std::ostream& out, std::span<const TimeSeries> series,
                      std::vector<std::string> channel_names = {}, char delimiter = ',');
void save_collection(const std::filesystem::path& path, std::span<const TimeSeries> series,
                     std::vector<std::string> channel_names = {}, char delimiter = ',');

/// Throws a schema error unless every series has the same channel count.
void require_uniform_channels(std::span<const TimeSeries> series);

CenteredSeries center(const TimeSeries& x);
std::vector<CenteredSeries> center_all(std::span<const TimeSeries> series);

/// First half gets the first ceil(T/2) rows. Ids get suffixes "/1" and "/2".
std::pair<TimeSeries, TimeSeries> split_halves(const TimeSeries& x);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

} // namespace cmssa::ingest
