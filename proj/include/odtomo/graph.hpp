#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "odtomo/bit_vector.hpp"
#include "odtomo/cumulants.hpp"

namespace odtomo {

struct Edge {
    std::size_t tail = 0;
    std::size_t head = 0;
    double time = 0.0;
};

/// Directed road network. Nodes are addressed by dense index; names are the
/// ids used in the input file. Immutable after construction.
class Network {
  public:
    Network() = default;
    /// Throws InvalidInput on duplicate directed edges, self loops, bad endpoints
    /// or nonpositive travel times.
    Network(std::vector<std::string> node_names, std::vector<Edge> edges);

    [[nodiscard]] std::size_t node_count() const { return names_.size(); }
    [[nodiscard]] std::size_t edge_count() const { return edges_.size(); }
    [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
    [[nodiscard]] const Edge& edge(std::size_t e) const { return edges_[e]; }
    [[nodiscard]] const std::string& node_name(std::size_t n) const { return names_[n]; }
    [[nodiscard]] std::optional<std::size_t> find_node(const std::string& name) const;
    /// Like find_node but throws InvalidInput for unknown names.
    [[nodiscard]] std::size_t node(const std::string& name) const;

    /// Outgoing edge indices of a node, in file order.
    [[nodiscard]] std::span<const std::size_t> out_edges(std::size_t n) const {
        return {out_index_.data() + out_begin_[n], out_begin_[n + 1] - out_begin_[n]};
    }

  private:
    std::vector<std::string> names_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> out_begin_;
    std::vector<std::size_t> out_index_;
};

struct Path {
    std::vector<std::size_t> edges;
    std::size_t origin = 0;
    std::size_t destination = 0;

    friend bool operator==(const Path&, const Path&) = default;
};

/// Throws InvalidInput unless the edges are adjacent, non-repeating and run from origin to destination.
void validate_path(const Network& net, const Path& path);
double path_time(const Network& net, const Path& path);
std::vector<std::size_t> path_nodes(const Network& net, const Path& path);

/// Minimum travel-time path from s to t. Among equal-time paths the one with the
/// lexicographically smallest node-index sequence wins. Throws NoPath if t is unreachable.
Path shortest_path(const Network& net, std::size_t s, std::size_t t);

/// Nodes reachable from s (excluding s itself).
std::vector<bool> reachable_from(const Network& net, std::size_t s);

/// Bit e set iff edge e lies on the path; length m.
BitVector path_indicator(const Path& path, std::size_t edge_count);

/// Edge–path incidence: rows are edges, column j is the indicator of path j.
template <typename Scalar = int>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> incidence(std::span<const Path> paths, std::size_t edge_count) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(
        static_cast<Eigen::Index>(edge_count), static_cast<Eigen::Index>(paths.size()));
    for (std::size_t j = 0; j < paths.size(); ++j) {
        for (std::size_t e : paths[j].edges) {
            m(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(j)) = Scalar(1);
        }
    }
    return m;
}

using IncidenceMatrix = Eigen::MatrixXi;

/// The observed subset of edges, in measurement order.
struct ObservationPlan {
    std::vector<std::size_t> edges;

    static ObservationPlan all(std::size_t edge_count);
    [[nodiscard]] std::size_t size() const { return edges.size(); }
    /// Throws InvalidInput on duplicates or indices ≥ edge_count.
    void validate(std::size_t edge_count) const;
};

/// Projection Π ∈ {0,1}^{ℓ×m} with Y = Π T.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> projection_matrix(const ObservationPlan& plan,
                                                                         std::size_t edge_count) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> pi = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(
        static_cast<Eigen::Index>(plan.size()), static_cast<Eigen::Index>(edge_count));
    for (std::size_t k = 0; k < plan.size(); ++k) {
        pi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(plan.edges[k])) = Scalar(1);
    }
    return pi;
}

/// Observed coordinates of an m-length indicator, in plan order.
BitVector project(const BitVector& indicator, const ObservationPlan& plan);

struct QuotientClass {
    BitVector key;                    // projected indicator
    std::vector<std::size_t> members; // indices into the path list
    double mean = 0.0;                // sum of member means
};

/// Paths grouped by observed footprint. Classes are in support order of their keys.
struct QuotientModel {
    std::vector<QuotientClass> classes;
    std::vector<std::size_t> dropped_paths; // paths that touch no observed edge
    double dropped_mass = 0.0;
    std::size_t link_count = 0; // ℓ, number of observed edges

    [[nodiscard]] ExactModel as_model() const;
    [[nodiscard]] double total() const;
};

QuotientModel build_quotient(std::span<const Path> paths, std::span<const double> means, const ObservationPlan& plan,
                             std::size_t edge_count);

} // namespace odtomo
