#pragma once

#include "cmssa/time_series.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace cmssa::ingest {

/// Activity name for an MHEALTH label code (0 is "NULL").
std::string mhealth_activity_name(int code);

/// Reads one raw `mHealth_subjectN.log` file (whitespace separated, 24
/// columns) and returns one dual-channel ECG series per contiguous run of
/// the same activity code. Ids are `<subject>:<run index>`, labels are
/// activity names.
std::vector<TimeSeries> load_mhealth_log(const std::filesystem::path& path, const std::string& subject);

struct MhealthSplit {
    std::vector<TimeSeries> foreground;
    std::vector<TimeSeries> background;
};

/// Loads every `mHealth_subject*.log` under `dir`, halves each run, and
/// splits foreground (the listed activities) from background (NULL runs).
MhealthSplit load_mhealth_directory(const std::filesystem::path& dir,
                                    const std::vector<std::string>& foreground_activities = {"Cycling", "Jogging",
                                                                                              "Running", "Jumping"});

} // namespace cmssa::ingest
