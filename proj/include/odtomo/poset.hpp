#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "odtomo/bit_vector.hpp"
#include "odtomo/error.hpp"

namespace odtomo {

/// Componentwise order on binary vectors: v ≤ w iff every bit of v is set in w.
bool leq(const BitVector& v, const BitVector& w);

/// Covering elements of v: v with exactly one extra bit set, ordered by the
/// position of that bit.
std::vector<BitVector> successors(const BitVector& v);

/// All 2^ℓ − 1 nonzero vectors of length ℓ in support order. Only sensible for small ℓ.
std::vector<BitVector> nonzero_lattice(std::size_t length);

/// Distinct equal-length vectors kept in (popcount, lexicographic) order, so
/// that vᵢ < vⱼ implies i < j.
class OrderedSupport {
  public:
    OrderedSupport() = default;
    explicit OrderedSupport(std::vector<BitVector> vectors);

    [[nodiscard]] std::size_t size() const { return vectors_.size(); }
    [[nodiscard]] bool empty() const { return vectors_.empty(); }
    [[nodiscard]] std::size_t length() const { return vectors_.empty() ? 0 : vectors_.front().size(); }
    [[nodiscard]] const BitVector& operator[](std::size_t i) const { return vectors_[i]; }
    [[nodiscard]] std::span<const BitVector> vectors() const { return vectors_; }

    /// First position whose popcount exceeds that of position i.
    [[nodiscard]] std::size_t next_level(std::size_t i) const { return level_end_[i]; }

    /// Position of v, or size() when absent.
    [[nodiscard]] std::size_t find(const BitVector& v) const;

    auto begin() const { return vectors_.begin(); }
    auto end() const { return vectors_.end(); }

  private:
    std::vector<BitVector> vectors_;
    std::vector<std::size_t> level_end_;
};

/// Order matrix of a support: M(i, j) = 1 iff vᵢ ≤ vⱼ. Unit upper triangular.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> order_matrix(const OrderedSupport& support) {
    const auto r = static_cast<Eigen::Index>(support.size());
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(r, r);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = i; j < r; ++j) {
            if (support[i].subset_of(support[j])) {
                m(i, j) = Scalar(1);
            }
        }
    }
    return m;
}

/// Solves M_S ψ = φ by back-substitution without materialising M_S.
/// O(r²) comparisons; vectors on the same level are skipped since they are incomparable.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
solve_unitriangular(const OrderedSupport& support, const Eigen::MatrixBase<Derived>& phi) {
    using Scalar = typename Derived::Scalar;
    if (static_cast<std::size_t>(phi.size()) != support.size()) {
        throw InvalidInput("solve_unitriangular: phi has " + std::to_string(phi.size()) + " entries, support has " +
                           std::to_string(support.size()));
    }
    const auto r = static_cast<Eigen::Index>(support.size());
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> psi(r);
    for (Eigen::Index i = r - 1; i >= 0; --i) {
        Scalar acc = phi(i);
        const auto& vi = support[static_cast<std::size_t>(i)];
        for (auto j = static_cast<Eigen::Index>(support.next_level(static_cast<std::size_t>(i))); j < r; ++j) {
            if (vi.subset_of(support[static_cast<std::size_t>(j)])) {
                acc -= psi(j);
            }
        }
        psi(i) = acc;
    }
    return psi;
}

} // namespace odtomo
