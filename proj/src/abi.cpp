#include "mev/abi.hpp"

#include <algorithm>

#include "mev/errors.hpp"
#include "mev/keccak.hpp"

namespace mev::abi {

Word word_at(ByteView data, std::size_t index) {
    if (data.size() < (index + 1) * 32) {
        throw DecodeError("data holds " + std::to_string(data.size() / 32) + " words, need word " +
                          std::to_string(index));
    }
    Word w;
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(index * 32), 32, w.begin());
    return w;
}

U256 uint_at(ByteView data, std::size_t index) {
    const Word w = word_at(data, index);
    return u256_from_bytes(w);
}

SignedWord int_at(ByteView data, std::size_t index) {
    const U256 raw = uint_at(data, index);
    if (raw >> 255 == 0) return {false, raw};
    return {true, U256(~raw + 1)};
}

Address address_from_word(const Word& w) {
    for (std::size_t i = 0; i < 12; ++i) {
        if (w[i] != 0) throw DecodeError("address word has nonzero high bytes");
    }
    Address a;
    std::copy_n(w.begin() + 12, 20, a.bytes.begin());
    return a;
}

Address address_at(ByteView data, std::size_t index) { return address_from_word(word_at(data, index)); }

bool bool_at(ByteView data, std::size_t index) {
    const U256 v = uint_at(data, index);
    if (v > 1) throw DecodeError("bool word out of range");
    return v == 1;
}

Word word_from_address(const Address& a) {
    Word w{};
    std::copy(a.bytes.begin(), a.bytes.end(), w.begin() + 12);
    return w;
}

Word word_from_uint(const U256& v) { return u256_to_word(v); }

Word word_from_int(bool negative, const U256& magnitude) {
    return u256_to_word(negative ? U256(~magnitude + 1) : magnitude);
}

Encoder::Encoder(std::string_view function_signature) {
    const auto sel = function_selector(function_signature);
    out_.assign(sel.begin(), sel.end());
}

Encoder& Encoder::address(const Address& a) {
    const Word w = word_from_address(a);
    out_.insert(out_.end(), w.begin(), w.end());
    return *this;
}

Encoder& Encoder::uint(const U256& v) {
    const Word w = word_from_uint(v);
    out_.insert(out_.end(), w.begin(), w.end());
    return *this;
}

Encoder& Encoder::int_(bool negative, const U256& magnitude) {
    const Word w = word_from_int(negative, magnitude);
    out_.insert(out_.end(), w.begin(), w.end());
    return *this;
}

}  // namespace mev::abi
