#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace odtomo {

inline constexpr int kMaxPartitionOrder = 12;

/// Streams the set partitions of {0, …, k−1} as restricted-growth strings.
/// Starts on the single-block partition; advance() moves to the next one and
/// returns false once every partition has been produced.
///
///     SetPartitions parts(3);
///     do { use(parts.labels(), parts.block_count()); } while (parts.advance());
class SetPartitions {
  public:
    explicit SetPartitions(int k);

    bool advance();

    [[nodiscard]] int size() const { return k_; }
    [[nodiscard]] int block_count() const { return prefix_max_[k_ - 1] + 1; }

    /// labels()[i] is the block holding element i; blocks are numbered in order of first appearance.
    [[nodiscard]] std::span<const std::uint8_t> labels() const { return {labels_.data(), static_cast<std::size_t>(k_)}; }

    /// Bitmask of members for each block; only the first block_count() entries are meaningful.
    [[nodiscard]] std::array<std::uint32_t, kMaxPartitionOrder> block_masks() const;

  private:
    int k_;
    std::array<std::uint8_t, kMaxPartitionOrder> labels_{};
    // prefix_max_[i] = max(labels_[0..i])
    std::array<std::uint8_t, kMaxPartitionOrder> prefix_max_{};
};

} // namespace odtomo
