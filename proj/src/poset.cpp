#include "odtomo/poset.hpp"

#include <algorithm>

namespace odtomo {

bool leq(const BitVector& v, const BitVector& w) {
    if (v.size() != w.size()) {
        throw InvalidInput("leq: length mismatch (" + std::to_string(v.size()) + " vs " + std::to_string(w.size()) +
                           ")");
    }
    return v.subset_of(w);
}

std::vector<BitVector> successors(const BitVector& v) {
    std::vector<BitVector> out;
    out.reserve(v.size() - static_cast<std::size_t>(v.count()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v.test(i)) {
            BitVector w = v;
            w.set(i);
            out.push_back(w);
        }
    }
    return out;
}

std::vector<BitVector> nonzero_lattice(std::size_t length) {
    if (length == 0 || length > 24) {
        throw InvalidInput("nonzero_lattice: length must be in 1..24");
    }
    std::vector<BitVector> all;
    all.reserve((std::size_t{1} << length) - 1);
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << length); ++mask) {
        BitVector v(length);
        for (std::size_t i = 0; i < length; ++i) {
            if ((mask >> i) & 1U) {
                v.set(i);
            }
        }
        all.push_back(v);
    }
    std::sort(all.begin(), all.end(), PopcountLexLess{});
    return all;
}

OrderedSupport::OrderedSupport(std::vector<BitVector> vectors) : vectors_(std::move(vectors)) {
    for (const auto& v : vectors_) {
        if (v.size() != vectors_.front().size()) {
            throw InvalidInput("OrderedSupport: vectors have different lengths");
        }
    }
    std::sort(vectors_.begin(), vectors_.end(), PopcountLexLess{});
    if (std::adjacent_find(vectors_.begin(), vectors_.end()) != vectors_.end()) {
        throw InvalidInput("OrderedSupport: duplicate vector");
    }
    level_end_.resize(vectors_.size());
    std::size_t end = vectors_.size();
    for (std::size_t i = vectors_.size(); i-- > 0;) {
        if (i + 1 < vectors_.size() && vectors_[i].count() != vectors_[i + 1].count()) {
            end = i + 1;
        }
        level_end_[i] = end;
    }
}

std::size_t OrderedSupport::find(const BitVector& v) const {
    auto it = std::lower_bound(vectors_.begin(), vectors_.end(), v, PopcountLexLess{});
    if (it != vectors_.end() && *it == v) {
        return static_cast<std::size_t>(it - vectors_.begin());
    }
    return vectors_.size();
}

} // namespace odtomo
