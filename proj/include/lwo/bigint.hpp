#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace lwo {

using BigInt = mpz_class;

BigInt parse_bigint(std::string_view text);

inline std::string to_string(const BigInt& x) { return x.get_str(); }

inline BigInt from_i64(std::int64_t v) {
    BigInt r;
    if (v >= 0) {
        mpz_set_ui(r.get_mpz_t(), static_cast<unsigned long>(v));
    } else {
        mpz_set_si(r.get_mpz_t(), static_cast<long>(v));
    }
    return r;
}

// Conversion that refuses values outside int64.
std::optional<std::int64_t> to_i64(const BigInt& x);

BigInt from_i128(__int128 v);
std::optional<__int128> to_i128(const BigInt& x);

BigInt binomial(unsigned long n, unsigned long k);
BigInt factorial(unsigned long n);
BigInt pow(const BigInt& base, unsigned long exp);

struct BigIntHash {
    std::size_t operator()(const BigInt& x) const noexcept;
};

}  // namespace lwo
