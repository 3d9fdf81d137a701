#pragma once

// Arithmetic shims so search kernels can be instantiated for __int128 (fast
// path) and BigInt (fallback when magnitudes exceed ~2^120).

#include "lwo/bigint.hpp"

#include <cstdint>

namespace lwo::detail {

template <class T>
struct IntOps;

template <>
struct IntOps<__int128> {
    static __int128 from(const BigInt& x) { return *to_i128(x); }
    static __int128 from(std::int64_t x) { return x; }
    static BigInt to_big(__int128 x) { return from_i128(x); }
    static __int128 abs(__int128 x) { return x < 0 ? -x : x; }
    // floor(a / m) for m > 0
    static __int128 floor_div(__int128 a, __int128 m) {
        __int128 q = a / m;
        if ((a % m) != 0 && a < 0) {
            --q;
        }
        return q;
    }
    static __int128 floor_mod(__int128 a, __int128 m) {
        __int128 r = a % m;
        return r < 0 ? r + m : r;
    }
    static bool fits(const BigInt& bound) { return mpz_sizeinbase(bound.get_mpz_t(), 2) <= 120; }
};

template <>
struct IntOps<BigInt> {
    static BigInt from(const BigInt& x) { return x; }
    static BigInt from(std::int64_t x) { return from_i64(x); }
    static BigInt to_big(const BigInt& x) { return x; }
    static BigInt abs(const BigInt& x) { return ::abs(x); }
    static BigInt floor_div(const BigInt& a, const BigInt& m) {
        BigInt q;
        mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
        return q;
    }
    static BigInt floor_mod(const BigInt& a, const BigInt& m) {
        BigInt r;
        mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
        return r;
    }
    static bool fits(const BigInt&) { return true; }
};

// Saturating product of box sizes.
inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > UINT64_MAX / a) {
        return UINT64_MAX;
    }
    return a * b;
}

inline std::uint64_t range_size(std::int64_t lo, std::int64_t hi) {
    return static_cast<std::uint64_t>(hi - lo) + 1;
}

}  // namespace lwo::detail
