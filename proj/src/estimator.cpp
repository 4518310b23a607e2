#include "odtomo/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "odtomo/error.hpp"

namespace odtomo {

namespace {

// Exact φ differences cancel to within a few ulps of the largest value.
constexpr double kExactRoundingGuard = 1e-10;

} // namespace

void DpConfig::validate() const {
    if (!(epsilon >= 0.0)) {
        throw InvalidInput("epsilon must be nonnegative");
    }
    if (order_cap < 1) {
        throw InvalidInput("order cap must be at least 1");
    }
    if (!(z >= 0.0)) {
        throw InvalidInput("z must be nonnegative");
    }
}

DpTrace run_dp(const CumulantSource& source, std::size_t length, const DpConfig& cfg) {
    cfg.validate();
    if (length == 0) {
        throw InvalidInput("run_dp: length must be positive");
    }
    if (length != source.length()) {
        throw InvalidInput("run_dp: length " + std::to_string(length) + " but source has " +
                           std::to_string(source.length()));
    }
    const bool exact = source.is_exact();
    const int cap = exact ? std::numeric_limits<int>::max() : std::min(cfg.order_cap, source.order_cap());

    DpTrace trace;
    std::deque<BitVector> queue{BitVector(length)};
    std::unordered_set<BitVector, BitVectorHash> tested;
    while (!queue.empty()) {
        const BitVector v = queue.front();
        queue.pop_front();
        ++trace.queue_pops;
        for (const BitVector& w : successors(v)) {
            if (!tested.insert(w).second) {
                continue;
            }
            if (w.count() > cap) {
                ++trace.order_cap_hits;
                continue;
            }
            const double phi = source.phi(w);
            ++trace.evaluations;
            double threshold = 0.0;
            if (!exact) {
                threshold = cfg.epsilon;
                if (cfg.mode == ThresholdMode::Statistical && phi > threshold) {
                    threshold = std::max(threshold, cfg.z * source.standard_error(w));
                }
            }
            if (phi > threshold) {
                trace.visited.push_back(VisitedVector{w, phi, threshold});
                trace.max_order = std::max(trace.max_order, w.count());
                queue.push_back(w);
            }
        }
    }
    return trace;
}

EstimationResult recover(const OrderedSupport& visited, const Eigen::VectorXd& phi,
                         const Eigen::VectorXd& thresholds) {
    if (static_cast<std::size_t>(phi.size()) != visited.size() ||
        static_cast<std::size_t>(thresholds.size()) != visited.size()) {
        throw InvalidInput("recover: phi/thresholds not aligned with the visited support");
    }
    EstimationResult res;
    res.visited = visited;
    res.phi = phi;
    res.psi = solve_unitriangular(visited, phi);
    std::vector<double> kept;
    for (std::size_t i = 0; i < visited.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const double psi = res.psi(ii);
        if (psi > thresholds(ii)) {
            res.support.push_back(visited[i]);
            kept.push_back(psi);
        } else if (psi < 0.0) {
            ++res.diagnostics.negative_dropped;
        } else {
            ++res.diagnostics.small_dropped;
        }
    }
    res.means = Eigen::Map<const Eigen::VectorXd>(kept.data(), static_cast<Eigen::Index>(kept.size()));
    res.diagnostics.visited = visited.size();
    return res;
}

EstimationResult recover(const OrderedSupport& visited, const Eigen::VectorXd& phi) {
    return recover(visited, phi, Eigen::VectorXd::Zero(phi.size()));
}

EstimationResult estimate(const CumulantSource& source, const DpConfig& cfg) {
    const DpTrace trace = run_dp(source, source.length(), cfg);

    std::vector<BitVector> vectors;
    vectors.reserve(trace.visited.size());
    for (const auto& e : trace.visited) {
        vectors.push_back(e.vector);
    }
    OrderedSupport support(std::move(vectors));
    Eigen::VectorXd phi(static_cast<Eigen::Index>(support.size()));
    Eigen::VectorXd thresholds(static_cast<Eigen::Index>(support.size()));
    double max_phi = 0.0;
    for (const auto& e : trace.visited) {
        const auto i = static_cast<Eigen::Index>(support.find(e.vector));
        phi(i) = e.phi;
        thresholds(i) = e.threshold;
        max_phi = std::max(max_phi, e.phi);
    }
    if (source.is_exact()) {
        thresholds.setConstant(kExactRoundingGuard * std::max(1.0, max_phi));
    }

    EstimationResult res = recover(support, phi, thresholds);
    res.diagnostics.queue_pops = trace.queue_pops;
    res.diagnostics.evaluations = trace.evaluations;
    res.diagnostics.order_cap_hits = trace.order_cap_hits;
    res.diagnostics.max_order = trace.max_order;
    res.diagnostics.truncated = trace.truncated();
    return res;
}

ErrorMetrics error_metrics(const ExactModel& truth, const EstimationResult& est) {
    ErrorMetrics m;
    m.true_total = truth.total();
    m.estimated_total = est.total();
    m.relative_total_error =
        m.true_total > 0.0 ? std::fabs(m.estimated_total - m.true_total) / m.true_total
                           : (m.estimated_total == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());

    std::unordered_map<BitVector, std::size_t, BitVectorHash> truth_index;
    for (std::size_t j = 0; j < truth.columns.size(); ++j) {
        truth_index.emplace(truth.columns[j], j);
    }
    std::vector<bool> matched_truth(truth.columns.size(), false);
    std::size_t matched = 0;
    for (std::size_t i = 0; i < est.support.size(); ++i) {
        const double lam = est.means(static_cast<Eigen::Index>(i));
        if (auto it = truth_index.find(est.support[i]); it != truth_index.end()) {
            ++matched;
            matched_truth[it->second] = true;
            m.l1_error += std::fabs(lam - truth.means[it->second]);
        } else {
            m.l1_error += std::fabs(lam);
        }
    }
    for (std::size_t j = 0; j < truth.columns.size(); ++j) {
        if (!matched_truth[j]) {
            m.l1_error += truth.means[j];
        }
    }
    m.precision = est.support.empty() ? 1.0 : static_cast<double>(matched) / static_cast<double>(est.support.size());
    m.recall = truth.columns.empty() ? 1.0 : static_cast<double>(matched) / static_cast<double>(truth.columns.size());
    return m;
}

ErrorMetrics error_metrics(const QuotientModel& truth, const EstimationResult& est) {
    return error_metrics(truth.as_model(), est);
}

} // namespace odtomo
