#pragma once

#include <string_view>

#include "mev/primitives.hpp"

namespace mev {

/// Original Keccak-256 (pad byte 0x01), as used by Ethereum; not NIST SHA3-256.
Hash32 keccak256(ByteView data);

inline Hash32 keccak256(std::string_view text) {
    return keccak256(ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

/// Topic 0 of an event: keccak-256 of its canonical signature, e.g. "Swap(address,uint256)".
inline Hash32 topic_for_signature(std::string_view signature) { return keccak256(signature); }

/// First four bytes of keccak-256 of a function signature.
std::array<std::uint8_t, 4> function_selector(std::string_view signature);

}  // namespace mev
