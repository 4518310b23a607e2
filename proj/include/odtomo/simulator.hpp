#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "odtomo/cumulants.hpp"
#include "odtomo/graph.hpp"
#include "odtomo/rng.hpp"

namespace odtomo {

/// One Poisson(mean) draw. Multiplication method below 30, Hörmann's PTRS
/// transformed rejection above. Throws InvalidInput unless mean is positive and finite.
std::uint64_t poisson_sample(double mean, Rng& rng);

struct MeanRange {
    double lo = 1.0;
    double hi = 10.0;
};

/// k active OD pairs, each carrying its shortest path with a Poisson mean.
struct Instance {
    std::shared_ptr<const Network> network;
    std::vector<Path> paths;
    std::vector<double> means;
    ObservationPlan plan;
    std::uint64_t seed = 0;

    /// FNV-1a over paths, means and plan.
    [[nodiscard]] std::uint64_t hash() const;
    /// Ground truth as seen through the observation plan.
    [[nodiscard]] QuotientModel quotient() const;
    /// A = Π M, ℓ × k.
    [[nodiscard]] Eigen::MatrixXd mixing_matrix() const;
};

/// Ordered pairs (s, t), s ≠ t, with t reachable from s; row-major by s then t.
std::vector<std::pair<std::size_t, std::size_t>> reachable_od_pairs(const Network& net);

/// Samples k distinct reachable OD pairs uniformly, routes each on its
/// shortest path and draws its mean uniformly from the range.
Instance make_instance(std::shared_ptr<const Network> net, std::size_t k, MeanRange range, ObservationPlan plan,
                       std::uint64_t seed);

struct MeasurementSet {
    SampleMatrix samples; // N × ℓ
    std::vector<std::string> column_names;
    std::uint64_t seed = 0;
    std::uint64_t instance_hash = 0;

    [[nodiscard]] std::size_t rows() const { return static_cast<std::size_t>(samples.rows()); }
};

/// N independent rows of Y = Π M X with X_j ~ Poisson(λ_j). Draws are taken row by row, path by path.
MeasurementSet measure(const Instance& inst, std::size_t n, Rng& rng);
MeasurementSet measure(const Instance& inst, std::size_t n, std::uint64_t seed);

/// Column name of an observed edge, e.g. "e12".
std::string edge_column_name(std::size_t edge);

/// CSV: header of observed edge ids, then one sample per line.
void write_measurements_csv(std::ostream& out, const MeasurementSet& m);
MeasurementSet read_measurements_csv(std::istream& in, const std::string& source_name = "<stream>");

} // namespace odtomo
