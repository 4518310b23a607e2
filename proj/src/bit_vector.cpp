#include "odtomo/bit_vector.hpp"

#include "odtomo/error.hpp"

namespace odtomo {

BitVector::BitVector(std::size_t length) : size_(static_cast<std::uint16_t>(length)) {
    if (length > kCapacity) {
        throw InvalidInput("BitVector length " + std::to_string(length) + " exceeds capacity " +
                           std::to_string(kCapacity));
    }
}

BitVector BitVector::from_string(std::string_view bits) {
    BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            v.set(i);
        } else if (bits[i] != '0') {
            throw InvalidInput("bit string may only contain '0' and '1'");
        }
    }
    return v;
}

BitVector BitVector::from_indices(std::size_t length, const std::vector<std::size_t>& ones) {
    BitVector v(length);
    for (std::size_t i : ones) {
        if (i >= length) {
            throw InvalidInput("bit index " + std::to_string(i) + " out of range");
        }
        v.set(i);
    }
    return v;
}

BitVector BitVector::ones(std::size_t length) {
    BitVector v(length);
    for (std::size_t i = 0; i < length; ++i) {
        v.set(i);
    }
    return v;
}

void BitVector::set(std::size_t i, bool value) {
    const std::uint64_t mask = std::uint64_t{1} << (i % kWordBits);
    std::uint64_t& word = words_[i / kWordBits];
    const bool was = (word & mask) != 0;
    if (value == was) {
        return;
    }
    if (value) {
        word |= mask;
        ++popcount_;
    } else {
        word &= ~mask;
        --popcount_;
    }
}

std::vector<std::size_t> BitVector::indices() const {
    std::vector<std::size_t> out;
    out.reserve(popcount_);
    for (std::size_t w = 0; w < kWords; ++w) {
        std::uint64_t bits = words_[w];
        while (bits != 0) {
            out.push_back(w * kWordBits + static_cast<std::size_t>(std::countr_zero(bits)));
            bits &= bits - 1;
        }
    }
    return out;
}

std::string BitVector::to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) {
        if (test(i)) {
            s[i] = '1';
        }
    }
    return s;
}

bool PopcountLexLess::operator()(const BitVector& a, const BitVector& b) const {
    if (a.count() != b.count()) {
        return a.count() < b.count();
    }
    for (std::size_t w = 0; w < BitVector::kWords; ++w) {
        const std::uint64_t diff = a.words()[w] ^ b.words()[w];
        if (diff != 0) {
            // The vector owning the lowest differing bit has the smaller index list.
            return (a.words()[w] & (diff & -diff)) != 0;
        }
    }
    return false;
}

} // namespace odtomo
