#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace odtomo {

/// Fixed-capacity binary vector of length ℓ ≤ 128. Bit i marks observed link i.
///
/// Equality compares both length and bits. The all-zeros vector is a valid
/// value; it only appears as the start sentinel of the lattice search.
class BitVector {
  public:
    static constexpr std::size_t kWordBits = 64;
    static constexpr std::size_t kWords = 2;
    static constexpr std::size_t kCapacity = kWordBits * kWords;

    BitVector() = default;
    explicit BitVector(std::size_t length);

    /// Parses a string of '0'/'1' characters; character i is bit i.
    static BitVector from_string(std::string_view bits);
    static BitVector from_indices(std::size_t length, const std::vector<std::size_t>& ones);
    static BitVector ones(std::size_t length);

    [[nodiscard]] std::size_t size() const { return size_; }
    [[nodiscard]] int count() const { return popcount_; }
    [[nodiscard]] bool none() const { return popcount_ == 0; }

    [[nodiscard]] bool test(std::size_t i) const {
        return (words_[i / kWordBits] >> (i % kWordBits)) & 1U;
    }
    void set(std::size_t i, bool value = true);

    /// Indices of set bits, ascending.
    [[nodiscard]] std::vector<std::size_t> indices() const;
    [[nodiscard]] std::string to_string() const;

    /// Componentwise ≤ on equal-length vectors (no length check).
    [[nodiscard]] bool subset_of(const BitVector& other) const {
        return ((words_[0] & ~other.words_[0]) | (words_[1] & ~other.words_[1])) == 0;
    }

    [[nodiscard]] const std::array<std::uint64_t, kWords>& words() const { return words_; }

    friend bool operator==(const BitVector& a, const BitVector& b) {
        return a.size_ == b.size_ && a.words_ == b.words_;
    }

  private:
    std::array<std::uint64_t, kWords> words_{};
    std::uint16_t size_ = 0;
    std::uint16_t popcount_ = 0;
};

/// Support ordering: popcount ascending, then lexicographic on the ascending
/// list of set indices. This is a linear extension of the componentwise order.
struct PopcountLexLess {
    bool operator()(const BitVector& a, const BitVector& b) const;
};

struct BitVectorHash {
    std::size_t operator()(const BitVector& v) const noexcept {
        std::uint64_t h = v.words()[0] * 0x9E3779B97F4A7C15ULL;
        h ^= (v.words()[1] + 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2));
        h ^= v.size() * 0xC2B2AE3D27D4EB4FULL;
        return static_cast<std::size_t>(h ^ (h >> 31));
    }
};

} // namespace odtomo

template <>
struct std::hash<odtomo::BitVector> : odtomo::BitVectorHash {};
