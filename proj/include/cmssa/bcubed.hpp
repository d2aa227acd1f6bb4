#pragma once

#include "cmssa/similarity.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>

namespace cmssa::eval {

/// Settings that produced a clustering, echoed into reports.
struct RunConfig {
    std::optional<long> window;
    std::optional<long> components;
    std::optional<double> alpha;
    std::string transform = "none";
};

struct EvalReport {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t n_items = 0;
    RunConfig config;
};

/// Item-averaged BCubed precision and recall of a clustering against gold
/// classes. Every assigned id needs a gold label.
EvalReport bcubed(const cluster::ClusterAssignment& predicted, const std::map<std::string, std::string>& gold,
                  RunConfig config = {});

/// 2PR / (P + R), or 0 when both are 0.
double f1_score(double precision, double recall);

nlohmann::json to_json(const EvalReport& report);

} // namespace cmssa::eval
