#include "odtomo/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <unordered_map>
#include <utility>

#include "odtomo/error.hpp"

namespace odtomo {

Network::Network(std::vector<std::string> node_names, std::vector<Edge> edges)
    : names_(std::move(node_names)), edges_(std::move(edges)) {
    std::set<std::string> names(names_.begin(), names_.end());
    if (names.size() != names_.size()) {
        throw InvalidInput("duplicate node name");
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const Edge& ed = edges_[e];
        if (ed.tail >= names_.size() || ed.head >= names_.size()) {
            throw InvalidInput("edge " + std::to_string(e) + " has an endpoint outside the node list");
        }
        if (ed.tail == ed.head) {
            throw InvalidInput("edge " + std::to_string(e) + " is a self loop");
        }
        if (!(ed.time > 0.0) || !std::isfinite(ed.time)) {
            throw InvalidInput("edge " + std::to_string(e) + " has nonpositive travel time");
        }
        if (!seen.emplace(ed.tail, ed.head).second) {
            throw InvalidInput("duplicate edge " + names_[ed.tail] + " -> " + names_[ed.head]);
        }
    }
    out_begin_.assign(names_.size() + 1, 0);
    for (const Edge& ed : edges_) {
        ++out_begin_[ed.tail + 1];
    }
    for (std::size_t n = 0; n < names_.size(); ++n) {
        out_begin_[n + 1] += out_begin_[n];
    }
    out_index_.resize(edges_.size());
    std::vector<std::size_t> fill(out_begin_.begin(), out_begin_.end() - 1);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        out_index_[fill[edges_[e].tail]++] = e;
    }
}

std::optional<std::size_t> Network::find_node(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - names_.begin());
}

std::size_t Network::node(const std::string& name) const {
    if (auto n = find_node(name)) {
        return *n;
    }
    throw InvalidInput("unknown node '" + name + "'");
}

void validate_path(const Network& net, const Path& path) {
    if (path.edges.empty()) {
        throw InvalidInput("path has no edges");
    }
    std::set<std::size_t> used;
    std::size_t at = path.origin;
    for (std::size_t e : path.edges) {
        if (e >= net.edge_count()) {
            throw InvalidInput("path edge " + std::to_string(e) + " out of range");
        }
        if (net.edge(e).tail != at) {
            throw InvalidInput("path edges are not adjacent");
        }
        if (!used.insert(e).second) {
            throw InvalidInput("path repeats edge " + std::to_string(e));
        }
        at = net.edge(e).head;
    }
    if (at != path.destination) {
        throw InvalidInput("path does not end at its destination");
    }
}

double path_time(const Network& net, const Path& path) {
    double t = 0.0;
    for (std::size_t e : path.edges) {
        t += net.edge(e).time;
    }
    return t;
}

std::vector<std::size_t> path_nodes(const Network& net, const Path& path) {
    std::vector<std::size_t> nodes{path.origin};
    for (std::size_t e : path.edges) {
        nodes.push_back(net.edge(e).head);
    }
    return nodes;
}

Path shortest_path(const Network& net, std::size_t s, std::size_t t) {
    if (s >= net.node_count() || t >= net.node_count()) {
        throw InvalidInput("shortest_path: node index out of range");
    }
    if (s == t) {
        throw InvalidInput("shortest_path: origin equals destination");
    }
    constexpr double kInf = std::numeric_limits<double>::infinity();
    const std::size_t n = net.node_count();
    std::vector<double> dist(n, kInf);
    std::vector<std::vector<std::size_t>> nodes(n); // best node sequence so far
    std::vector<std::vector<std::size_t>> via(n);   // matching edge sequence
    std::vector<bool> settled(n, false);

    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[s] = 0.0;
    nodes[s] = {s};
    heap.emplace(0.0, s);
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (settled[u] || d > dist[u]) {
            continue;
        }
        settled[u] = true;
        if (u == t) {
            break;
        }
        for (std::size_t e : net.out_edges(u)) {
            const std::size_t v = net.edge(e).head;
            if (settled[v]) {
                continue;
            }
            const double cand = d + net.edge(e).time;
            bool better = cand < dist[v];
            if (!better && cand == dist[v]) {
                // Equal time: compare node sequences nodes[u]+v against nodes[v].
                std::vector<std::size_t> seq = nodes[u];
                seq.push_back(v);
                better = std::lexicographical_compare(seq.begin(), seq.end(), nodes[v].begin(), nodes[v].end());
            }
            if (better) {
                const bool improved = cand < dist[v];
                dist[v] = cand;
                nodes[v] = nodes[u];
                nodes[v].push_back(v);
                via[v] = via[u];
                via[v].push_back(e);
                if (improved) {
                    heap.emplace(cand, v);
                }
            }
        }
    }
    if (dist[t] == kInf) {
        throw NoPath("no path from " + net.node_name(s) + " to " + net.node_name(t));
    }
    return Path{via[t], s, t};
}

std::vector<bool> reachable_from(const Network& net, std::size_t s) {
    std::vector<bool> seen(net.node_count(), false);
    std::vector<std::size_t> stack{s};
    std::vector<bool> reached(net.node_count(), false);
    seen[s] = true;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t e : net.out_edges(u)) {
            const std::size_t v = net.edge(e).head;
            if (v != s) {
                reached[v] = true;
            }
            if (!seen[v]) {
                seen[v] = true;
                stack.push_back(v);
            }
        }
    }
    return reached;
}

BitVector path_indicator(const Path& path, std::size_t edge_count) {
    BitVector v(edge_count);
    for (std::size_t e : path.edges) {
        if (e >= edge_count) {
            throw InvalidInput("path_indicator: edge index out of range");
        }
        v.set(e);
    }
    return v;
}

ObservationPlan ObservationPlan::all(std::size_t edge_count) {
    ObservationPlan plan;
    plan.edges.resize(edge_count);
    for (std::size_t e = 0; e < edge_count; ++e) {
        plan.edges[e] = e;
    }
    return plan;
}

void ObservationPlan::validate(std::size_t edge_count) const {
    std::vector<bool> seen(edge_count, false);
    for (std::size_t e : edges) {
        if (e >= edge_count) {
            throw InvalidInput("observation plan: edge " + std::to_string(e) + " out of range");
        }
        if (seen[e]) {
            throw InvalidInput("observation plan: edge " + std::to_string(e) + " listed twice");
        }
        seen[e] = true;
    }
}

BitVector project(const BitVector& indicator, const ObservationPlan& plan) {
    BitVector out(plan.size());
    for (std::size_t k = 0; k < plan.size(); ++k) {
        if (plan.edges[k] >= indicator.size()) {
            throw InvalidInput("project: plan edge out of range");
        }
        if (indicator.test(plan.edges[k])) {
            out.set(k);
        }
    }
    return out;
}

ExactModel QuotientModel::as_model() const {
    ExactModel model;
    model.link_count = link_count;
    for (const auto& c : classes) {
        model.columns.push_back(c.key);
        model.means.push_back(c.mean);
    }
    return model;
}

double QuotientModel::total() const {
    double s = 0.0;
    for (const auto& c : classes) {
        s += c.mean;
    }
    return s;
}

QuotientModel build_quotient(std::span<const Path> paths, std::span<const double> means, const ObservationPlan& plan,
                             std::size_t edge_count) {
    if (paths.size() != means.size()) {
        throw InvalidInput("build_quotient: paths and means differ in length");
    }
    plan.validate(edge_count);
    QuotientModel q;
    q.link_count = plan.size();
    std::map<BitVector, std::size_t, PopcountLexLess> by_key;
    for (std::size_t j = 0; j < paths.size(); ++j) {
        if (!(means[j] > 0.0)) {
            throw InvalidInput("build_quotient: means must be positive");
        }
        const BitVector key = project(path_indicator(paths[j], edge_count), plan);
        if (key.none()) {
            q.dropped_paths.push_back(j);
            q.dropped_mass += means[j];
            continue;
        }
        auto [it, inserted] = by_key.emplace(key, 0);
        if (inserted) {
            it->second = q.classes.size();
            q.classes.push_back(QuotientClass{key, {}, 0.0});
        }
        auto& cls = q.classes[it->second];
        cls.members.push_back(j);
        cls.mean += means[j];
    }
    std::sort(q.classes.begin(), q.classes.end(),
              [](const QuotientClass& a, const QuotientClass& b) { return PopcountLexLess{}(a.key, b.key); });
    return q;
}

} // namespace odtomo
