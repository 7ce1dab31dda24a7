#pragma once

// Minimal ABI helpers: 32-byte words, static arguments only.

#include <string_view>

#include "mev/primitives.hpp"

namespace mev::abi {

using Word = std::array<std::uint8_t, 32>;

inline std::size_t word_count(ByteView data) { return data.size() / 32; }

/// i-th 32-byte word; throws DecodeError if data is too short.
Word word_at(ByteView data, std::size_t index);

U256 uint_at(ByteView data, std::size_t index);
/// Two's-complement int256 word split into (negative, magnitude).
struct SignedWord {
    bool negative = false;
    U256 magnitude = 0;
};
SignedWord int_at(ByteView data, std::size_t index);
/// Address in the low 20 bytes; throws DecodeError when the high 12 bytes are not zero.
Address address_at(ByteView data, std::size_t index);
bool bool_at(ByteView data, std::size_t index);

Address address_from_word(const Word& w);
Word word_from_address(const Address& a);
Word word_from_uint(const U256& v);
Word word_from_int(bool negative, const U256& magnitude);

/// Appends words to a byte buffer.
class Encoder {
public:
    Encoder() = default;
    explicit Encoder(std::string_view function_signature);

    Encoder& address(const Address& a);
    Encoder& uint(const U256& v);
    Encoder& int_(bool negative, const U256& magnitude);
    Encoder& boolean(bool b) { return uint(b ? 1 : 0); }

    const Bytes& bytes() const { return out_; }
    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

}  // namespace mev::abi
