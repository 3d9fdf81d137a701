#pragma once

#include "lwo/bigint.hpp"

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lwo {

/// Multiset of arbitrary-precision integers, stored canonically as a sorted
/// value -> multiplicity map. Word concatenation is multiset union and v^k
/// scales every multiplicity by k.
class Multiset {
public:
    using Entries = std::map<BigInt, std::uint64_t>;

    Multiset() = default;
    Multiset(std::initializer_list<long> values);
    static Multiset from_values(std::span<const BigInt> values);

    void add(const BigInt& value, std::uint64_t multiplicity = 1);
    // Removes up to `multiplicity` copies; returns how many were removed.
    std::uint64_t remove(const BigInt& value, std::uint64_t multiplicity = 1);

    const Entries& entries() const { return entries_; }
    std::uint64_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    std::size_t distinct() const { return entries_.size(); }
    std::uint64_t count(const BigInt& value) const;

    Multiset concat(const Multiset& other) const;
    Multiset repeated(std::uint64_t k) const;
    Multiset without_zeros() const;

    // All elements listed with repetition, ascending.
    std::vector<BigInt> expanded() const;
    BigInt abs_sum() const;

    // True iff every copy in `sub` is available in *this.
    bool contains_submultiset(const Multiset& sub) const;

    friend bool operator==(const Multiset&, const Multiset&) = default;

private:
    Entries entries_;
    std::uint64_t size_ = 0;
};

// Text format: one `value[xmultiplicity]` token per line, e.g. `7` or `-3x12`.
// Blank lines and lines starting with '#' are ignored.
Multiset parse_multiset(std::istream& in);
Multiset parse_multiset(std::string_view text);
std::string format_multiset(const Multiset& v);

}  // namespace lwo
