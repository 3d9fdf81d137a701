#include "lwo/multiset.hpp"

#include "lwo/error.hpp"

#include <istream>
#include <sstream>

namespace lwo {

Multiset::Multiset(std::initializer_list<long> values) {
    for (long v : values) {
        add(BigInt(v));
    }
}

Multiset Multiset::from_values(std::span<const BigInt> values) {
    Multiset m;
    for (const auto& v : values) {
        m.add(v);
    }
    return m;
}

void Multiset::add(const BigInt& value, std::uint64_t multiplicity) {
    if (multiplicity == 0) {
        return;
    }
    entries_[value] += multiplicity;
    size_ += multiplicity;
}

std::uint64_t Multiset::remove(const BigInt& value, std::uint64_t multiplicity) {
    auto it = entries_.find(value);
    if (it == entries_.end()) {
        return 0;
    }
    const std::uint64_t taken = std::min(it->second, multiplicity);
    it->second -= taken;
    size_ -= taken;
    if (it->second == 0) {
        entries_.erase(it);
    }
    return taken;
}

std::uint64_t Multiset::count(const BigInt& value) const {
    auto it = entries_.find(value);
    return it == entries_.end() ? 0 : it->second;
}

Multiset Multiset::concat(const Multiset& other) const {
    Multiset r = *this;
    for (const auto& [v, m] : other.entries_) {
        r.add(v, m);
    }
    return r;
}

Multiset Multiset::repeated(std::uint64_t k) const {
    Multiset r;
    for (const auto& [v, m] : entries_) {
        r.add(v, m * k);
    }
    return r;
}

Multiset Multiset::without_zeros() const {
    Multiset r = *this;
    r.remove(BigInt(0), r.count(BigInt(0)));
    return r;
}

std::vector<BigInt> Multiset::expanded() const {
    std::vector<BigInt> out;
    out.reserve(size_);
    for (const auto& [v, m] : entries_) {
        for (std::uint64_t i = 0; i < m; ++i) {
            out.push_back(v);
        }
    }
    return out;
}

BigInt Multiset::abs_sum() const {
    BigInt s;
    for (const auto& [v, m] : entries_) {
        s += abs(v) * BigInt(static_cast<unsigned long>(m));
    }
    return s;
}

bool Multiset::contains_submultiset(const Multiset& sub) const {
    for (const auto& [v, m] : sub.entries_) {
        if (count(v) < m) {
            return false;
        }
    }
    return true;
}

Multiset parse_multiset(std::istream& in) {
    Multiset out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        const auto last = line.find_last_not_of(" \t\r");
        const std::string token = line.substr(first, last - first + 1);
        const auto x = token.find('x');
        try {
            if (x == std::string::npos) {
                out.add(parse_bigint(token));
            } else {
                const BigInt mult = parse_bigint(token.substr(x + 1));
                if (sgn(mult) <= 0 || !mult.fits_ulong_p()) {
                    throw ParseError("multiplicity must be a positive count");
                }
                out.add(parse_bigint(token.substr(0, x)), mult.get_ui());
            }
        } catch (const ParseError& e) {
            throw ParseError("multiset line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

Multiset parse_multiset(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_multiset(in);
}

std::string format_multiset(const Multiset& v) {
    std::string out;
    for (const auto& [value, m] : v.entries()) {
        out += value.get_str();
        if (m != 1) {
            out += "x" + std::to_string(m);
        }
        out += '\n';
    }
    return out;
}

}  // namespace lwo
