#pragma once

#include <tokengraph/bytes.hpp>

#include <span>
#include <string_view>

namespace tokengraph
{

// Original Keccak-256 (0x01 padding), as used by the EVM. Not NIST SHA3-256.
Hash32 keccak256(std::span<uint8_t const> data);
Hash32 keccak256(std::string_view text);

} // namespace tokengraph
