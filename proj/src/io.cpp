#include "odtomo/io.hpp"

#include <fstream>

#include "odtomo/error.hpp"

namespace odtomo {

using nlohmann::json;

json result_to_json(const EstimationResult& result, const std::vector<std::string>& column_names) {
    json doc;
    doc["schema"] = kResultSchema;
    doc["length"] = result.visited.empty() ? column_names.size() : result.visited.length();
    if (!column_names.empty()) {
        doc["columns"] = column_names;
    }
    json support = json::array();
    json means = json::array();
    for (std::size_t i = 0; i < result.support.size(); ++i) {
        support.push_back(result.support[i].to_string());
        means.push_back(result.means(static_cast<Eigen::Index>(i)));
    }
    doc["support"] = support;
    doc["means"] = means;
    json visited = json::array();
    for (std::size_t i = 0; i < result.visited.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        visited.push_back({{"vector", result.visited[i].to_string()}, {"phi", result.phi(ii)}, {"psi", result.psi(ii)}});
    }
    doc["visited"] = visited;
    const Diagnostics& d = result.diagnostics;
    doc["diagnostics"] = {{"visited", d.visited},
                          {"queue_pops", d.queue_pops},
                          {"evaluations", d.evaluations},
                          {"order_cap_hits", d.order_cap_hits},
                          {"max_order", d.max_order},
                          {"negative_dropped", d.negative_dropped},
                          {"small_dropped", d.small_dropped},
                          {"truncated", d.truncated}};
    return doc;
}

json truth_to_json(const Instance& inst, const std::string& network_label) {
    const Network& net = *inst.network;
    json doc;
    doc["schema"] = kTruthSchema;
    doc["network"] = network_label;
    doc["seed"] = inst.seed;
    doc["instance_hash"] = inst.hash();
    doc["edge_count"] = net.edge_count();
    doc["observed_edges"] = inst.plan.edges;
    json paths = json::array();
    for (std::size_t j = 0; j < inst.paths.size(); ++j) {
        const Path& p = inst.paths[j];
        json nodes = json::array();
        for (std::size_t n : path_nodes(net, p)) {
            nodes.push_back(net.node_name(n));
        }
        paths.push_back({{"origin", net.node_name(p.origin)},
                         {"destination", net.node_name(p.destination)},
                         {"edges", p.edges},
                         {"nodes", nodes},
                         {"mean", inst.means[j]}});
    }
    doc["paths"] = paths;
    const QuotientModel q = inst.quotient();
    json classes = json::array();
    for (const auto& c : q.classes) {
        classes.push_back({{"key", c.key.to_string()}, {"mean", c.mean}, {"paths", c.members}});
    }
    doc["classes"] = classes;
    doc["dropped_paths"] = q.dropped_paths;
    doc["dropped_mass"] = q.dropped_mass;
    return doc;
}

ExactModel truth_model_from_json(const json& doc, const std::string& source_name) {
    try {
        if (doc.at("schema").get<std::string>() != kTruthSchema) {
            throw ParseError(source_name, 0, "unexpected schema '" + doc.at("schema").get<std::string>() + "'");
        }
        ExactModel model;
        model.link_count = doc.at("observed_edges").size();
        for (const auto& c : doc.at("classes")) {
            model.columns.push_back(BitVector::from_string(c.at("key").get<std::string>()));
            model.means.push_back(c.at("mean").get<double>());
        }
        model.validate();
        return model;
    } catch (const json::exception& e) {
        throw ParseError(source_name, 0, e.what());
    } catch (const InvalidInput& e) {
        throw ParseError(source_name, 0, e.what());
    }
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path, 0, "cannot open file");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path, 0, e.what());
    }
}

} // namespace odtomo
