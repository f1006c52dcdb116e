#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace tokengraph
{

using Uint256 = boost::multiprecision::uint256_t;

class ParseError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Hex helpers. Input may carry a 0x prefix; output is always lowercase.
std::string to_hex(std::span<uint8_t const> bytes, bool prefix = true);
std::optional<std::vector<uint8_t>> parse_hex(std::string_view text);
bool is_hex_digit(char c);

template <std::size_t N>
struct FixedBytes
{
    std::array<uint8_t, N> bytes{};

    static constexpr std::size_t size() { return N; }

    // Accepts exactly 2*N hex digits with optional 0x prefix.
    static std::optional<FixedBytes> from_hex(std::string_view text)
    {
        auto raw = parse_hex(text);
        if (!raw || raw->size() != N) {
            return std::nullopt;
        }
        FixedBytes out;
        std::copy(raw->begin(), raw->end(), out.bytes.begin());
        return out;
    }

    static FixedBytes parse(std::string_view text)
    {
        auto v = from_hex(text);
        if (!v) {
            throw ParseError(
                "expected " + std::to_string(2 * N) + " hex digits, got '" +
                std::string(text) + "'");
        }
        return *v;
    }

    std::string hex() const { return to_hex(bytes); }

    bool is_zero() const
    {
        for (auto b : bytes) {
            if (b != 0) {
                return false;
            }
        }
        return true;
    }

    auto operator<=>(FixedBytes const &) const = default;
    bool operator==(FixedBytes const &) const = default;
};

// Token contracts, users and vaults. Ordering is byte order, which matches
// ordering of the canonical lowercase hex strings.
using Address = FixedBytes<20>;
using Hash32 = FixedBytes<32>;

inline constexpr Address zero_address{};

// First 8 hex chars including the prefix, e.g. "0xb18c87".
std::string short_address(Address const &a);

// Big-endian decode of up to 32 bytes.
Uint256 uint256_from_be(std::span<uint8_t const> bytes);
std::array<uint8_t, 32> uint256_to_be(Uint256 const &v);
std::string to_decimal(Uint256 const &v);
Uint256 parse_decimal_uint256(std::string_view text);

struct FixedBytesHash
{
    template <std::size_t N>
    std::size_t operator()(FixedBytes<N> const &v) const noexcept
    {
        // FNV-1a
        std::size_t h = 1469598103934665603ull;
        for (auto b : v.bytes) {
            h ^= b;
            h *= 1099511628211ull;
        }
        return h;
    }
};

} // namespace tokengraph
