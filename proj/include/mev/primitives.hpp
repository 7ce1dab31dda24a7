#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace mev {

using U256 = boost::multiprecision::uint256_t;
// Sign-magnitude with a full 256-bit magnitude, so any difference of two U256 fits.
using I256 = boost::multiprecision::int256_t;
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

// ----- hex

std::string to_hex(ByteView bytes, bool prefix = true);
/// Accepts an optional 0x prefix. Throws std::invalid_argument on odd length or bad digits.
Bytes from_hex(std::string_view hex);

/// Fixed-width byte string (addresses, hashes, ABI words).
template <std::size_t N>
struct FixedBytes {
    std::array<std::uint8_t, N> bytes{};

    static constexpr std::size_t size() { return N; }

    static FixedBytes from_hex(std::string_view hex) {
        Bytes raw = mev::from_hex(hex);
        if (raw.size() != N) {
            throw std::invalid_argument("expected " + std::to_string(N) + " bytes, got " +
                                        std::to_string(raw.size()) + ": " + std::string(hex));
        }
        FixedBytes out;
        std::copy(raw.begin(), raw.end(), out.bytes.begin());
        return out;
    }

    std::string hex() const { return to_hex(ByteView(bytes.data(), N)); }
    bool is_zero() const {
        for (auto b : bytes) {
            if (b != 0) return false;
        }
        return true;
    }
    ByteView view() const { return ByteView(bytes.data(), N); }

    auto operator<=>(const FixedBytes&) const = default;
};

using Address = FixedBytes<20>;
using Hash32 = FixedBytes<32>;

/// Deterministic test/fixture helper: an address whose last 8 bytes hold `n`.
Address address_from_u64(std::uint64_t n);
Hash32 hash_from_u64(std::uint64_t n);

// ----- 256-bit words

U256 u256_from_bytes(ByteView be_bytes);
std::array<std::uint8_t, 32> u256_to_word(const U256& v);
/// JSON-RPC quantity ("0x1a"). Empty digits after 0x are rejected.
U256 u256_from_quantity(std::string_view hex);
std::string u256_to_quantity(const U256& v);
std::uint64_t u64_from_quantity(std::string_view hex);
std::string u64_to_quantity(std::uint64_t v);

std::string to_dec(const U256& v);
std::string to_dec(const I256& v);
U256 u256_from_dec(std::string_view s);
I256 i256_from_dec(std::string_view s);

inline I256 signed_diff(const U256& end, const U256& start) {
    return I256(end) - I256(start);
}

// ----- exact decimals

/// Signed decimal with exactly six fractional digits, stored as a scaled integer.
class Fixed6 {
public:
    static constexpr std::int64_t kScale = 1'000'000;

    Fixed6() = default;
    static Fixed6 from_units(BigInt units) {
        Fixed6 f;
        f.units_ = std::move(units);
        return f;
    }
    /// Round-half-even conversion of an exact rational.
    static Fixed6 from_rational(const Rational& r);
    /// Parses "[-]digits[.digits]" with at most six fractional digits.
    static Fixed6 parse(std::string_view s);

    const BigInt& units() const { return units_; }
    Rational to_rational() const { return Rational(units_, BigInt(kScale)); }
    double to_double() const;
    /// Always six fractional digits, e.g. "-2.400000".
    std::string str() const;

    bool is_negative() const { return units_ < 0; }
    bool is_positive() const { return units_ > 0; }

    Fixed6& operator+=(const Fixed6& o) {
        units_ += o.units_;
        return *this;
    }
    friend Fixed6 operator+(Fixed6 a, const Fixed6& b) { return a += b; }
    friend Fixed6 operator-(const Fixed6& a, const Fixed6& b) { return from_units(a.units_ - b.units_); }
    friend bool operator==(const Fixed6& a, const Fixed6& b) { return a.units_ == b.units_; }
    friend std::strong_ordering operator<=>(const Fixed6& a, const Fixed6& b) {
        if (a.units_ < b.units_) return std::strong_ordering::less;
        if (a.units_ > b.units_) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

private:
    BigInt units_{0};
};

/// Round-half-even rational to a plain decimal string with `digits` fractional digits.
std::string rational_to_decimal(const Rational& r, unsigned digits);
/// Like rational_to_decimal, but trims trailing zeros while keeping at least one ("1.0").
std::string rational_to_trimmed_decimal(const Rational& r, unsigned max_digits);
double rational_to_double(const Rational& r);
BigInt pow10(unsigned exp);

// ----- time

/// "YYYY-MM-DD" of a unix timestamp in UTC.
std::string utc_day(std::uint64_t unix_seconds);

}  // namespace mev

template <std::size_t N>
struct std::hash<mev::FixedBytes<N>> {
    std::size_t operator()(const mev::FixedBytes<N>& b) const noexcept {
        std::size_t h = 1469598103934665603ULL;
        for (auto byte : b.bytes) {
            h = (h ^ byte) * 1099511628211ULL;
        }
        return h;
    }
};
