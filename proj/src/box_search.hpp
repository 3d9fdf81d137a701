#pragma once

// Box enumeration and membership search over integer images of a box
//   { sum m_i g_i : lo_i <= m_i <= hi_i }.

#include "int_ops.hpp"
#include "lwo/error.hpp"
#include "lwo/gap.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace lwo::detail {

// Visits every box point in mixed-radix order (coordinate 0 fastest) with the
// running sum maintained incrementally. The visitor returns true to stop.
template <class T, class Visitor>
void for_each_box(const std::vector<T>& g, const std::vector<std::int64_t>& lo,
                  const std::vector<std::int64_t>& hi, Visitor&& visit) {
    const std::size_t n = g.size();
    std::vector<std::int64_t> m = lo;
    std::vector<T> wrap(n);
    T sum = T(0);
    for (std::size_t i = 0; i < n; ++i) {
        sum += IntOps<T>::from(lo[i]) * g[i];
        wrap[i] = IntOps<T>::from(hi[i] - lo[i]) * g[i];
    }
    for (;;) {
        if (visit(static_cast<const T&>(sum), static_cast<const std::vector<std::int64_t>&>(m))) {
            return;
        }
        std::size_t j = 0;
        for (; j < n; ++j) {
            if (m[j] < hi[j]) {
                ++m[j];
                sum += g[j];
                break;
            }
            sum -= wrap[j];
            m[j] = lo[j];
        }
        if (j == n) {
            return;
        }
    }
}

inline std::uint64_t box_volume(const std::vector<std::int64_t>& lo, const std::vector<std::int64_t>& hi) {
    std::uint64_t v = 1;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        v = sat_mul(v, range_size(lo[i], hi[i]));
    }
    return v;
}

inline std::vector<std::int64_t> decode_box_index(std::uint64_t idx, const std::vector<std::int64_t>& lo,
                                                  const std::vector<std::int64_t>& hi) {
    std::vector<std::int64_t> m(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) {
        const std::uint64_t r = range_size(lo[i], hi[i]);
        m[i] = lo[i] + static_cast<std::int64_t>(idx % r);
        idx /= r;
    }
    return m;
}

template <class T>
class BoxEngine {
public:
    BoxEngine(const std::vector<T>& g, const std::vector<std::int64_t>& lo, const std::vector<std::int64_t>& hi,
              const SearchLimits& limits)
        : n_(g.size()), fixed_(g.size(), 0) {
        std::vector<std::size_t> nonzero;
        for (std::size_t i = 0; i < n_; ++i) {
            if (g[i] == T(0)) {
                fixed_[i] = std::clamp<std::int64_t>(0, lo[i], hi[i]);
            } else {
                nonzero.push_back(i);
            }
        }
        std::uint64_t volume = 1;
        for (std::size_t i : nonzero) {
            volume = sat_mul(volume, range_size(lo[i], hi[i]));
        }
        if (nonzero.empty() || volume <= limits.full_enumeration_volume) {
            full_ = true;
            add_coords(b_, nonzero, g, lo, hi);
            return;
        }
        // Widest coordinate is solved in closed form; the rest is split so the
        // stored half and the per-query half have balanced sizes.
        std::sort(nonzero.begin(), nonzero.end(), [&](std::size_t x, std::size_t y) {
            return range_size(lo[x], hi[x]) > range_size(lo[y], hi[y]);
        });
        peel_ = nonzero.front();
        peel_g_ = g[peel_];
        peel_lo_ = lo[peel_];
        peel_hi_ = hi[peel_];
        if (peel_g_ < T(0)) {
            flip_ = true;
            peel_g_ = T(0) - peel_g_;
            peel_lo_ = -hi[peel_];
            peel_hi_ = -lo[peel_];
        }
        std::vector<std::size_t> in_a;
        std::vector<std::size_t> in_b;
        std::uint64_t size_a = 1;
        std::uint64_t size_b = 1;
        for (std::size_t k = 1; k < nonzero.size(); ++k) {
            const std::size_t i = nonzero[k];
            if (size_a <= size_b) {
                in_a.push_back(i);
                size_a = sat_mul(size_a, range_size(lo[i], hi[i]));
            } else {
                in_b.push_back(i);
                size_b = sat_mul(size_b, range_size(lo[i], hi[i]));
            }
        }
        if (size_a > limits.max_stored || size_a > limits.max_states || size_b > limits.max_states) {
            throw ResourceError("gap search: meet-in-the-middle halves of " + std::to_string(size_a) + " and " +
                                std::to_string(size_b) + " states exceed the configured caps");
        }
        add_coords(a_, in_a, g, lo, hi);
        add_coords(b_, in_b, g, lo, hi);
        table_.reserve(size_a);
        std::uint64_t idx = 0;
        for_each_box<T>(a_.g, a_.lo, a_.hi, [&](const T& s, const std::vector<std::int64_t>&) {
            table_.push_back({IntOps<T>::floor_mod(s, peel_g_), s, idx++});
            return false;
        });
        std::sort(table_.begin(), table_.end(), [](const Entry& x, const Entry& y) {
            return x.res < y.res || (x.res == y.res && x.val < y.val);
        });
    }

    std::optional<std::vector<std::int64_t>> find(const T& t) const {
        std::optional<std::vector<std::int64_t>> out;
        if (full_) {
            for_each_box<T>(b_.g, b_.lo, b_.hi, [&](const T& s, const std::vector<std::int64_t>& m) {
                if (s == t) {
                    out = assemble(m, nullptr, 0);
                    return true;
                }
                return false;
            });
            return out;
        }
        const T hi_shift = IntOps<T>::from(peel_hi_) * peel_g_;
        const T lo_shift = IntOps<T>::from(peel_lo_) * peel_g_;
        for_each_box<T>(b_.g, b_.lo, b_.hi, [&](const T& s, const std::vector<std::int64_t>& m) {
            const T y = t - s;
            const T r = IntOps<T>::floor_mod(y, peel_g_);
            const T low = y - hi_shift;
            const T high = y - lo_shift;
            auto it = std::lower_bound(table_.begin(), table_.end(), std::pair<const T&, const T&>(r, low),
                                       [](const Entry& e, const std::pair<const T&, const T&>& key) {
                                           return e.res < key.first || (e.res == key.first && e.val < key.second);
                                       });
            if (it != table_.end() && it->res == r && it->val <= high) {
                const T mp = (y - it->val) / peel_g_;
                out = assemble(m, &*it, mp);
                return true;
            }
            return false;
        });
        return out;
    }

private:
    struct Coords {
        std::vector<std::size_t> index;
        std::vector<T> g;
        std::vector<std::int64_t> lo;
        std::vector<std::int64_t> hi;
    };
    struct Entry {
        T res;
        T val;
        std::uint64_t idx;
    };

    static void add_coords(Coords& c, const std::vector<std::size_t>& which, const std::vector<T>& g,
                           const std::vector<std::int64_t>& lo, const std::vector<std::int64_t>& hi) {
        for (std::size_t i : which) {
            c.index.push_back(i);
            c.g.push_back(g[i]);
            c.lo.push_back(lo[i]);
            c.hi.push_back(hi[i]);
        }
    }

    std::vector<std::int64_t> assemble(const std::vector<std::int64_t>& b_state, const Entry* a_entry,
                                       const T& peel_value) const {
        std::vector<std::int64_t> m = fixed_;
        for (std::size_t k = 0; k < b_.index.size(); ++k) {
            m[b_.index[k]] = b_state[k];
        }
        if (a_entry != nullptr) {
            const auto a_state = decode_box_index(a_entry->idx, a_.lo, a_.hi);
            for (std::size_t k = 0; k < a_.index.size(); ++k) {
                m[a_.index[k]] = a_state[k];
            }
            const auto mp = static_cast<std::int64_t>(IntOps<T>::to_big(peel_value).get_si());
            m[peel_] = flip_ ? -mp : mp;
        }
        return m;
    }

    std::size_t n_;
    std::vector<std::int64_t> fixed_;
    bool full_ = false;
    Coords a_;
    Coords b_;
    std::size_t peel_ = 0;
    T peel_g_{};
    std::int64_t peel_lo_ = 0;
    std::int64_t peel_hi_ = 0;
    bool flip_ = false;
    std::vector<Entry> table_;
};

}  // namespace lwo::detail
