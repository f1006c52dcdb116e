#include <tokengraph/bytes.hpp>

namespace tokengraph
{

namespace
{
    constexpr char hex_digits[] = "0123456789abcdef";

    int nibble(char c)
    {
        if (c >= '0' && c <= '9') {
            return c - '0';
        }
        if (c >= 'a' && c <= 'f') {
            return c - 'a' + 10;
        }
        if (c >= 'A' && c <= 'F') {
            return c - 'A' + 10;
        }
        return -1;
    }
}

bool is_hex_digit(char c)
{
    return nibble(c) >= 0;
}

std::string to_hex(std::span<uint8_t const> bytes, bool prefix)
{
    std::string out;
    out.reserve(bytes.size() * 2 + 2);
    if (prefix) {
        out += "0x";
    }
    for (auto b : bytes) {
        out += hex_digits[b >> 4];
        out += hex_digits[b & 0xf];
    }
    return out;
}

std::optional<std::vector<uint8_t>> parse_hex(std::string_view text)
{
    if (text.size() >= 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
        text.remove_prefix(2);
    }
    if (text.size() % 2 != 0) {
        return std::nullopt;
    }
    std::vector<uint8_t> out(text.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = nibble(text[2 * i]);
        int lo = nibble(text[2 * i + 1]);
        if (hi < 0 || lo < 0) {
            return std::nullopt;
        }
        out[i] = static_cast<uint8_t>((hi << 4) | lo);
    }
    return out;
}

std::string short_address(Address const &a)
{
    return a.hex().substr(0, 8);
}

Uint256 uint256_from_be(std::span<uint8_t const> bytes)
{
    Uint256 v = 0;
    for (auto b : bytes) {
        v <<= 8;
        v |= b;
    }
    return v;
}

std::array<uint8_t, 32> uint256_to_be(Uint256 const &v)
{
    std::array<uint8_t, 32> out{};
    Uint256 x = v;
    for (int i = 31; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = static_cast<uint8_t>(x & 0xff);
        x >>= 8;
    }
    return out;
}

std::string to_decimal(Uint256 const &v)
{
    return v.str();
}

Uint256 parse_decimal_uint256(std::string_view text)
{
    if (text.empty() || text.size() > 78) {
        throw ParseError("invalid uint256 '" + std::string(text) + "'");
    }
    using Wide = boost::multiprecision::uint512_t;
    Wide v = 0;
    for (char c : text) {
        if (c < '0' || c > '9') {
            throw ParseError("invalid uint256 '" + std::string(text) + "'");
        }
        v = v * 10 + static_cast<unsigned>(c - '0');
    }
    if (v > Wide(std::numeric_limits<Uint256>::max())) {
        throw ParseError("uint256 overflow '" + std::string(text) + "'");
    }
    return static_cast<Uint256>(v);
}

} // namespace tokengraph
