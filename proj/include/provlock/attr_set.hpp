// Attribute sets as 64-bit masks over workflow attribute indices.
#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace provlock {

using AttrIndex = int;

inline constexpr int kMaxAttributes = 64;

class AttrSet {
public:
    constexpr AttrSet() = default;
    constexpr explicit AttrSet(std::uint64_t bits) : bits_(bits) {}

    static AttrSet of(const std::vector<AttrIndex>& attrs) {
        AttrSet s;
        for (AttrIndex a : attrs) s.insert(a);
        return s;
    }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    int size() const { return std::popcount(bits_); }

    constexpr bool contains(AttrIndex a) const { return (bits_ >> a) & 1u; }
    constexpr void insert(AttrIndex a) { bits_ |= std::uint64_t{1} << a; }
    constexpr void erase(AttrIndex a) { bits_ &= ~(std::uint64_t{1} << a); }

    constexpr bool subset_of(AttrSet o) const { return (bits_ & ~o.bits_) == 0; }
    constexpr bool intersects(AttrSet o) const { return (bits_ & o.bits_) != 0; }

    constexpr AttrSet operator|(AttrSet o) const { return AttrSet(bits_ | o.bits_); }
    constexpr AttrSet operator&(AttrSet o) const { return AttrSet(bits_ & o.bits_); }
    constexpr AttrSet operator-(AttrSet o) const { return AttrSet(bits_ & ~o.bits_); }
    AttrSet& operator|=(AttrSet o) { bits_ |= o.bits_; return *this; }
    AttrSet& operator&=(AttrSet o) { bits_ &= o.bits_; return *this; }

    constexpr bool operator==(const AttrSet&) const = default;

    // Members in increasing index order.
    std::vector<AttrIndex> members() const {
        std::vector<AttrIndex> out;
        for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
        return out;
    }

private:
    std::uint64_t bits_ = 0;
};

// Lexicographic order on the sorted member lists; used as the deterministic tie-break.
inline bool lex_less(AttrSet a, AttrSet b) {
    auto ma = a.members();
    auto mb = b.members();
    return ma < mb;
}

// Calls f(sub) for every subset of `universe`, in increasing mask order of the compacted index.
template <class F>
void for_each_subset(const std::vector<AttrIndex>& universe, F&& f) {
    const std::size_t n = universe.size();
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << n); ++k) {
        AttrSet s;
        for (std::size_t i = 0; i < n; ++i)
            if ((k >> i) & 1u) s.insert(universe[i]);
        f(s);
    }
}

}  // namespace provlock
