#include "mev/primitives.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace mev {

namespace {

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::string_view strip_0x(std::string_view hex) {
    if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) {
        hex.remove_prefix(2);
    }
    return hex;
}

// Floor division for a positive divisor.
BigInt floor_div(const BigInt& n, const BigInt& d) {
    BigInt q = n / d;
    if (n < 0 && q * d != n) --q;
    return q;
}

BigInt round_half_even(const Rational& r) {
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    BigInt q = floor_div(num, den);
    const BigInt rem2 = (num - q * den) * 2;  // in [0, 2*den)
    if (rem2 > den || (rem2 == den && (q & 1) != 0)) ++q;
    return q;
}

std::string scaled_to_decimal(const BigInt& scaled, unsigned digits) {
    const bool neg = scaled < 0;
    std::string mag = (neg ? BigInt(-scaled) : scaled).str();
    if (digits > 0) {
        if (mag.size() <= digits) mag.insert(0, digits + 1 - mag.size(), '0');
        mag.insert(mag.size() - digits, 1, '.');
    }
    return neg ? "-" + mag : mag;
}

}  // namespace

std::string to_hex(ByteView bytes, bool prefix) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2 + 2);
    if (prefix) out += "0x";
    for (auto b : bytes) {
        out += kDigits[b >> 4];
        out += kDigits[b & 0x0f];
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    hex = strip_0x(hex);
    if (hex.size() % 2 != 0) throw std::invalid_argument("odd-length hex string");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int hi = hex_digit(hex[2 * i]);
        const int lo = hex_digit(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit");
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

Address address_from_u64(std::uint64_t n) {
    Address a;
    for (int i = 0; i < 8; ++i) a.bytes[19 - i] = static_cast<std::uint8_t>(n >> (8 * i));
    return a;
}

Hash32 hash_from_u64(std::uint64_t n) {
    Hash32 h;
    for (int i = 0; i < 8; ++i) h.bytes[31 - i] = static_cast<std::uint8_t>(n >> (8 * i));
    return h;
}

U256 u256_from_bytes(ByteView be_bytes) {
    if (be_bytes.size() > 32) throw std::invalid_argument("more than 32 bytes for a uint256");
    U256 v = 0;
    for (auto b : be_bytes) v = (v << 8) | b;
    return v;
}

std::array<std::uint8_t, 32> u256_to_word(const U256& v) {
    std::array<std::uint8_t, 32> w{};
    U256 x = v;
    for (int i = 31; i >= 0; --i) {
        w[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(x & 0xff);
        x >>= 8;
    }
    return w;
}

U256 u256_from_quantity(std::string_view hex) {
    std::string_view digits = strip_0x(hex);
    if (digits.empty() || digits.size() > 64) throw std::invalid_argument("invalid quantity: " + std::string(hex));
    U256 v = 0;
    for (char c : digits) {
        const int d = hex_digit(c);
        if (d < 0) throw std::invalid_argument("invalid quantity: " + std::string(hex));
        v = (v << 4) | d;
    }
    return v;
}

std::string u256_to_quantity(const U256& v) {
    if (v == 0) return "0x0";
    std::string s;
    U256 x = v;
    static constexpr char kDigits[] = "0123456789abcdef";
    while (x != 0) {
        s += kDigits[static_cast<unsigned>(x & 0xf)];
        x >>= 4;
    }
    std::reverse(s.begin(), s.end());
    return "0x" + s;
}

std::uint64_t u64_from_quantity(std::string_view hex) {
    const U256 v = u256_from_quantity(hex);
    if (v > std::numeric_limits<std::uint64_t>::max()) throw std::invalid_argument("quantity exceeds 64 bits");
    return static_cast<std::uint64_t>(v);
}

std::string u64_to_quantity(std::uint64_t v) { return u256_to_quantity(U256(v)); }

std::string to_dec(const U256& v) { return v.str(); }
std::string to_dec(const I256& v) { return v.str(); }

namespace {

// cpp_int's string constructor reads a leading 0 as an octal prefix.
BigInt from_decimal_digits(std::string_view digits) {
    const auto first = digits.find_first_not_of('0');
    return first == std::string_view::npos ? BigInt(0) : BigInt(std::string(digits.substr(first)));
}

}  // namespace

U256 u256_from_dec(std::string_view s) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw std::invalid_argument("invalid decimal integer: " + std::string(s));
    }
    const BigInt v = from_decimal_digits(s);
    if (v > BigInt(std::numeric_limits<U256>::max())) throw std::invalid_argument("decimal exceeds 256 bits");
    return U256(v);
}

I256 i256_from_dec(std::string_view s) {
    if (!s.empty() && s.front() == '-') return -I256(u256_from_dec(s.substr(1)));
    return I256(u256_from_dec(s));
}

BigInt pow10(unsigned exp) {
    BigInt r = 1;
    for (unsigned i = 0; i < exp; ++i) r *= 10;
    return r;
}

Fixed6 Fixed6::from_rational(const Rational& r) { return from_units(round_half_even(r * kScale)); }

Fixed6 Fixed6::parse(std::string_view s) {
    bool neg = false;
    if (!s.empty() && s.front() == '-') {
        neg = true;
        s.remove_prefix(1);
    }
    const auto dot = s.find('.');
    std::string_view whole = s.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    auto digits_only = [](std::string_view v) {
        return std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    if (whole.empty() || !digits_only(whole) || !digits_only(frac) || frac.size() > 6 ||
        (dot != std::string_view::npos && frac.empty())) {
        throw std::invalid_argument("invalid fixed-point decimal: " + std::string(s));
    }
    std::string joined(whole);
    joined += frac;
    joined.append(6 - frac.size(), '0');
    const BigInt units = from_decimal_digits(joined);
    return from_units(neg ? BigInt(-units) : units);
}

double Fixed6::to_double() const { return rational_to_double(to_rational()); }

std::string Fixed6::str() const { return scaled_to_decimal(units_, 6); }

std::string rational_to_decimal(const Rational& r, unsigned digits) {
    return scaled_to_decimal(round_half_even(r * pow10(digits)), digits);
}

std::string rational_to_trimmed_decimal(const Rational& r, unsigned max_digits) {
    std::string s = rational_to_decimal(r, max_digits);
    if (s.find('.') == std::string::npos) return s + ".0";
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s += '0';
    if (s == "-0.0") s = "0.0";
    return s;
}

double rational_to_double(const Rational& r) {
    BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    if (num == 0) return 0.0;
    const bool neg = num < 0;
    if (neg) num = -num;
    // Scale so the integer quotient carries ~64 significant bits, then shift back.
    const long shift = 64 - (static_cast<long>(boost::multiprecision::msb(num)) -
                             static_cast<long>(boost::multiprecision::msb(den)));
    BigInt q = shift >= 0 ? BigInt((num << static_cast<unsigned>(shift)) / den)
                          : BigInt(num / (den << static_cast<unsigned>(-shift)));
    const double v = std::ldexp(q.convert_to<double>(), static_cast<int>(-shift));
    return neg ? -v : v;
}

std::string utc_day(std::uint64_t unix_seconds) {
    using namespace std::chrono;
    const sys_seconds tp{seconds{static_cast<std::int64_t>(unix_seconds)}};
    const year_month_day ymd{floor<days>(tp)};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

}  // namespace mev
