#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <unordered_map>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "odtomo/bit_vector.hpp"
#include "odtomo/error.hpp"

namespace odtomo {

inline constexpr int kDefaultOrderCap = 8;

/// N×ℓ table of link-flow realisations; row = one sample of Y.
using SampleMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>;

/// Throws InvalidInput unless N ≥ 1 and every entry is finite and nonnegative.
void validate_samples(const SampleMatrix& samples);

/// (1/N) Σ_rows Π_{i∈idx} Y_row,i
template <typename Derived>
typename Derived::Scalar empirical_moment(const Eigen::MatrixBase<Derived>& samples, std::span<const std::size_t> idx) {
    if (idx.empty()) {
        throw InvalidInput("empirical_moment: empty index set");
    }
    for (std::size_t i : idx) {
        if (static_cast<Eigen::Index>(i) >= samples.cols()) {
            throw InvalidInput("empirical_moment: column " + std::to_string(i) + " out of range");
        }
    }
    Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> prod =
        samples.col(static_cast<Eigen::Index>(idx[0])).array();
    for (std::size_t k = 1; k < idx.size(); ++k) {
        prod *= samples.col(static_cast<Eigen::Index>(idx[k])).array();
    }
    return prod.mean();
}

/// Plug-in joint cumulant of the columns selected by v, via the set-partition
/// sum over products of empirical moments.
double joint_cumulant(const SampleMatrix& samples, const BitVector& v, int order_cap = kDefaultOrderCap);

/// Known mixing columns and their Poisson means.
struct ExactModel {
    std::vector<BitVector> columns;
    std::vector<double> means;
    /// Vector length ℓ; only consulted when there are no columns.
    std::size_t link_count = 0;

    /// Throws InvalidInput on duplicate columns, length mismatch, or nonpositive means.
    void validate() const;
    [[nodiscard]] std::size_t length() const { return columns.empty() ? link_count : columns.front().size(); }
    [[nodiscard]] double total() const;
};

/// Sum of the means of every column w with v ≤ w.
double exact_phi(const ExactModel& model, const BitVector& v);

/// Empirical cumulant estimator with a moment cache shared across queries.
class EmpiricalCumulants {
  public:
    EmpiricalCumulants(SampleMatrix samples, int order_cap = kDefaultOrderCap);

    [[nodiscard]] const SampleMatrix& samples() const { return samples_; }
    [[nodiscard]] int order_cap() const { return order_cap_; }

    double cumulant(const BitVector& v);

    /// Delta-method standard error of cumulant(v): sample standard deviation
    /// of each row's linearised contribution to the partition sum, over √N.
    double standard_error(const BitVector& v);

  private:
    struct Expansion;
    Expansion expand(const BitVector& v);
    double moment(const BitVector& subset, const std::vector<std::size_t>& global_idx, std::uint32_t local_mask);

    SampleMatrix samples_;
    int order_cap_;
    std::vector<bool> column_nonzero_;
    std::unordered_map<BitVector, double, BitVectorHash> moments_;
};

/// Uniform φ(v) interface over an empirical or an exact backend, with a
/// per-vector cache. Safe for concurrent callers: the cache is guarded and
/// values are deterministic, so the same v always yields the same value.
class CumulantSource {
  public:
    static CumulantSource empirical(SampleMatrix samples, int order_cap = kDefaultOrderCap);
    static CumulantSource exact(ExactModel model);

    [[nodiscard]] bool is_exact() const;
    [[nodiscard]] std::size_t length() const;

    /// Largest cumulant order the backend resolves; unbounded for exact sources.
    [[nodiscard]] int order_cap() const;

    /// Throws OrderCapExceeded for empirical sources when popcount(v) > order_cap().
    double phi(const BitVector& v) const;

    /// Standard error of phi(v); 0 for exact sources.
    double standard_error(const BitVector& v) const;

    /// Number of distinct vectors evaluated so far.
    [[nodiscard]] std::size_t evaluations() const;

  private:
    struct State;
    explicit CumulantSource(std::unique_ptr<State> state);
    std::shared_ptr<State> state_;
};

} // namespace odtomo
