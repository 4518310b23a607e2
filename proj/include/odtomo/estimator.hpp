#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "odtomo/bit_vector.hpp"
#include "odtomo/cumulants.hpp"
#include "odtomo/graph.hpp"
#include "odtomo/poset.hpp"

namespace odtomo {

enum class ThresholdMode {
    Absolute,    // keep φ̂ > ε
    Statistical, // keep φ̂ > max(ε, z·SE(φ̂))
};

struct DpConfig {
    double epsilon = 0.0;
    int order_cap = kDefaultOrderCap;
    ThresholdMode mode = ThresholdMode::Statistical;
    double z = 3.0;

    /// Throws InvalidInput on ε < 0, order_cap < 1 or z < 0.
    void validate() const;
};

struct VisitedVector {
    BitVector vector;
    double phi = 0.0;
    double threshold = 0.0; // ε_eff the value was tested against
};

struct DpTrace {
    std::vector<VisitedVector> visited; // in visiting order
    std::size_t queue_pops = 0;
    std::size_t evaluations = 0;     // distinct vectors whose φ was queried
    std::size_t order_cap_hits = 0;  // distinct vectors left unresolved by the cap
    int max_order = 0;               // largest popcount retained
    [[nodiscard]] bool truncated() const { return order_cap_hits > 0; }
};

/// Breadth-first search over the nonzero lattice from the all-zeros sentinel.
/// Successors of each dequeued vector are tested once; those whose φ clears
/// the threshold are retained and enqueued. Exact sources use threshold 0 and
/// ignore the order cap.
DpTrace run_dp(const CumulantSource& source, std::size_t length, const DpConfig& cfg);

struct Diagnostics {
    std::size_t visited = 0;
    std::size_t queue_pops = 0;
    std::size_t evaluations = 0;
    std::size_t order_cap_hits = 0;
    int max_order = 0;
    std::size_t negative_dropped = 0; // ψ̂ < 0
    std::size_t small_dropped = 0;    // 0 ≤ ψ̂ ≤ threshold
    bool truncated = false;
};

struct EstimationResult {
    std::vector<BitVector> support; // recovered columns
    Eigen::VectorXd means;          // aligned with support
    OrderedSupport visited;
    Eigen::VectorXd phi; // aligned with visited
    Eigen::VectorXd psi; // aligned with visited
    Diagnostics diagnostics;

    [[nodiscard]] double total() const { return means.sum(); }
};

/// ψ = M_S⁻¹ φ; keeps vectors with ψ > threshold. Negative and sub-threshold
/// entries are dropped and counted, never clamped.
EstimationResult recover(const OrderedSupport& visited, const Eigen::VectorXd& phi,
                         const Eigen::VectorXd& thresholds);
EstimationResult recover(const OrderedSupport& visited, const Eigen::VectorXd& phi);

/// run_dp followed by recover, with the trace folded into the diagnostics.
/// For exact sources the support threshold is a rounding guard relative to max φ.
EstimationResult estimate(const CumulantSource& source, const DpConfig& cfg);

struct ErrorMetrics {
    double true_total = 0.0;
    double estimated_total = 0.0;
    double relative_total_error = 0.0; // |Σλ̂ − Σλ| / Σλ
    double precision = 1.0;
    double recall = 1.0;
    double l1_error = 0.0; // Σ over classes keyed by vector; unmatched count in full
};

ErrorMetrics error_metrics(const ExactModel& truth, const EstimationResult& est);
ErrorMetrics error_metrics(const QuotientModel& truth, const EstimationResult& est);

} // namespace odtomo
