#include "cmssa/bcubed.hpp"

#include "cmssa/error.hpp"

namespace cmssa::eval {

double f1_score(double precision, double recall)
{
    const double sum = precision + recall;
    return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

EvalReport bcubed(const cluster::ClusterAssignment& predicted, const std::map<std::string, std::string>& gold,
                  RunConfig config)
{
    const std::size_t n = predicted.ids.size();
    if (predicted.labels.size() != n)
        fail(ErrorKind::shape, "assignment ids and labels differ in length");
    if (n == 0)
        fail(ErrorKind::degenerate_input, "cannot score an empty clustering");

    std::vector<const std::string*> classes(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto it = gold.find(predicted.ids[i]);
        if (it == gold.end())
            fail(ErrorKind::data, "no gold label for '" + predicted.ids[i] + "'");
        classes[i] = &it->second;
    }

    // sizes of clusters, classes, and their intersections
    std::map<int, std::size_t> cluster_size;
    std::map<std::string, std::size_t> class_size;
    std::map<std::pair<int, std::string>, std::size_t> overlap;
    for (std::size_t i = 0; i < n; ++i) {
        ++cluster_size[predicted.labels[i]];
        ++class_size[*classes[i]];
        ++overlap[{predicted.labels[i], *classes[i]}];
    }

    double precision = 0.0;
    double recall = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto shared = static_cast<double>(overlap[{predicted.labels[i], *classes[i]}]);
        precision += shared / static_cast<double>(cluster_size[predicted.labels[i]]);
        recall += shared / static_cast<double>(class_size[*classes[i]]);
    }

    EvalReport report;
    report.precision = precision / static_cast<double>(n);
    report.recall = recall / static_cast<double>(n);
    report.f1 = f1_score(report.precision, report.recall);
    report.n_items = n;
    report.config = std::move(config);
    return report;
}

nlohmann::json to_json(const EvalReport& report)
{
    nlohmann::json j;
    j["precision"] = report.precision;
    j["recall"] = report.recall;
    j["f1"] = report.f1;
    j["n_items"] = report.n_items;
    auto& c = j["config"];
    c["window"] = report.config.window ? nlohmann::json(*report.config.window) : nlohmann::json();
    c["components"] = report.config.components ? nlohmann::json(*report.config.components) : nlohmann::json();
    c["alpha"] = report.config.alpha ? nlohmann::json(*report.config.alpha) : nlohmann::json();
    c["transform"] = report.config.transform;
    return j;
}

} // namespace cmssa::eval
