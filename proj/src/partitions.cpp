#include "odtomo/partitions.hpp"

#include <algorithm>
#include <string>

#include "odtomo/error.hpp"

namespace odtomo {

SetPartitions::SetPartitions(int k) : k_(k) {
    if (k < 1 || k > kMaxPartitionOrder) {
        throw InvalidInput("set partitions: k=" + std::to_string(k) + " outside 1.." +
                           std::to_string(kMaxPartitionOrder));
    }
}

bool SetPartitions::advance() {
    // Rightmost position that can be incremented while staying a restricted-growth string.
    for (int i = k_ - 1; i >= 1; --i) {
        if (labels_[i] <= prefix_max_[i - 1]) {
            ++labels_[i];
            prefix_max_[i] = std::max(prefix_max_[i - 1], labels_[i]);
            for (int j = i + 1; j < k_; ++j) {
                labels_[j] = 0;
                prefix_max_[j] = prefix_max_[i];
            }
            return true;
        }
    }
    return false;
}

std::array<std::uint32_t, kMaxPartitionOrder> SetPartitions::block_masks() const {
    std::array<std::uint32_t, kMaxPartitionOrder> masks{};
    for (int i = 0; i < k_; ++i) {
        masks[labels_[i]] |= std::uint32_t{1} << i;
    }
    return masks;
}

} // namespace odtomo
