#include "cmssa/mhealth.hpp"

#include "cmssa/error.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

namespace cmssa::ingest {

namespace {

constexpr int ecg_lead1_column = 3; // 0-based
constexpr int ecg_lead2_column = 4;
constexpr int label_column = 23;
constexpr int column_count = 24;

} // namespace

std::string mhealth_activity_name(int code)
{
    static const std::array<const char*, 13> names = {
        "NULL",          "Standing",     "Sitting",        "Lying",   "Walking",
        "ClimbingStairs", "WaistBends",  "ArmElevation",   "Crouching", "Cycling",
        "Jogging",       "Running",      "Jumping",
    };
    if (code < 0 || code >= static_cast<int>(names.size()))
        fail(ErrorKind::data, "unknown MHEALTH activity code " + std::to_string(code));
    return names[code];
}

std::vector<TimeSeries> load_mhealth_log(const std::filesystem::path& path, const std::string& subject)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::io, "cannot open '" + path.string() + "'");

    std::vector<TimeSeries> out;
    std::vector<std::array<double, 2>> run;
    int run_code = -1;
    auto flush = [&]() {
        if (run.empty())
            return;
        Eigen::MatrixXd values(static_cast<Eigen::Index>(run.size()), 2);
        for (std::size_t r = 0; r < run.size(); ++r) {
            values(static_cast<Eigen::Index>(r), 0) = run[r][0];
            values(static_cast<Eigen::Index>(r), 1) = run[r][1];
        }
        out.emplace_back(std::move(values), subject + ":" + std::to_string(out.size()),
                         mhealth_activity_name(run_code));
        run.clear();
    };

    std::string line;
    std::size_t line_no = 0;
    std::array<double, column_count> fields{};
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream row(line);
        int n = 0;
        while (n < column_count && row >> fields[n])
            ++n;
        if (n == 0)
            continue;
        if (n != column_count)
            fail(ErrorKind::parse, path.string() + ":" + std::to_string(line_no) + ": expected "
                                       + std::to_string(column_count) + " columns");
        const int code = static_cast<int>(fields[label_column]);
        if (code != run_code) {
            flush();
            run_code = code;
        }
        run.push_back({fields[ecg_lead1_column], fields[ecg_lead2_column]});
    }
    flush();
    return out;
}

MhealthSplit load_mhealth_directory(const std::filesystem::path& dir,
                                    const std::vector<std::string>& foreground_activities)
{
    std::vector<std::filesystem::path> logs;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.starts_with("mHealth_subject") && name.ends_with(".log"))
            logs.push_back(entry.path());
    }
    if (logs.empty())
        fail(ErrorKind::io, "no mHealth_subject*.log files in '" + dir.string() + "'");
    std::sort(logs.begin(), logs.end());

    MhealthSplit split;
    for (const auto& log : logs) {
        const auto subject = log.stem().string().substr(std::string("mHealth_").size());
        for (const auto& run : load_mhealth_log(log, subject)) {
            const auto& label = *run.label();
            const bool fg = std::find(foreground_activities.begin(), foreground_activities.end(), label)
                            != foreground_activities.end();
            if (!fg && label != "NULL")
                continue;
            if (run.length() < 2)
                continue;
            auto [a, b] = split_halves(run);
            auto& target = fg ? split.foreground : split.background;
            target.push_back(std::move(a));
            target.push_back(std::move(b));
        }
    }
    return split;
}

} // namespace cmssa::ingest
