#include "lwo/bigint.hpp"

#include "lwo/error.hpp"

#include <string>

namespace lwo {

BigInt parse_bigint(std::string_view text) {
    std::string s(text);
    if (!s.empty() && s.front() == '+') {
        s.erase(0, 1);
    }
    const std::size_t digits_from = (!s.empty() && s.front() == '-') ? 1 : 0;
    if (s.size() == digits_from) {
        throw ParseError("empty integer literal");
    }
    for (std::size_t i = digits_from; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') {
            throw ParseError("invalid integer literal: '" + std::string(text) + "'");
        }
    }
    BigInt r;
    if (r.set_str(s, 10) != 0) {
        throw ParseError("invalid integer literal: '" + std::string(text) + "'");
    }
    return r;
}

std::optional<std::int64_t> to_i64(const BigInt& x) {
    if (!mpz_fits_slong_p(x.get_mpz_t())) {
        return std::nullopt;
    }
    return static_cast<std::int64_t>(mpz_get_si(x.get_mpz_t()));
}

BigInt from_i128(__int128 v) {
    const bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(0) - static_cast<unsigned __int128>(v)
                              : static_cast<unsigned __int128>(v);
    const auto hi = static_cast<unsigned long>(u >> 64);
    const auto lo = static_cast<unsigned long>(u);
    BigInt r = hi;
    r <<= 64;
    r += lo;
    return neg ? BigInt(-r) : r;
}

std::optional<__int128> to_i128(const BigInt& x) {
    if (mpz_sizeinbase(x.get_mpz_t(), 2) > 126) {
        return std::nullopt;
    }
    BigInt a = abs(x);
    BigInt hi = a >> 64;
    BigInt lo = a - (hi << 64);
    unsigned __int128 u = (static_cast<unsigned __int128>(hi.get_ui()) << 64) | lo.get_ui();
    auto v = static_cast<__int128>(u);
    return sgn(x) < 0 ? -v : v;
}

BigInt binomial(unsigned long n, unsigned long k) {
    BigInt r;
    if (k > n) {
        return r;
    }
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

BigInt factorial(unsigned long n) {
    BigInt r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

BigInt pow(const BigInt& base, unsigned long exp) {
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
    return r;
}

std::size_t BigIntHash::operator()(const BigInt& x) const noexcept {
    const mpz_srcptr z = x.get_mpz_t();
    std::size_t h = static_cast<std::size_t>(z->_mp_size) * 0x9E3779B97F4A7C15ULL;
    const int limbs = z->_mp_size < 0 ? -z->_mp_size : z->_mp_size;
    for (int i = 0; i < limbs; ++i) {
        h ^= static_cast<std::size_t>(z->_mp_d[i]) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

}  // namespace lwo
