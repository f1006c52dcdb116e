#include <tokengraph/keccak.hpp>

#include <cstring>

namespace tokengraph
{

namespace
{
    constexpr uint64_t round_constants[24] = {
        0x0000000000000001ull, 0x0000000000008082ull, 0x800000000000808aull,
        0x8000000080008000ull, 0x000000000000808bull, 0x0000000080000001ull,
        0x8000000080008081ull, 0x8000000000008009ull, 0x000000000000008aull,
        0x0000000000000088ull, 0x0000000080008009ull, 0x000000008000000aull,
        0x000000008000808bull, 0x800000000000008bull, 0x8000000000008089ull,
        0x8000000000008003ull, 0x8000000000008002ull, 0x8000000000000080ull,
        0x000000000000800aull, 0x800000008000000aull, 0x8000000080008081ull,
        0x8000000000008080ull, 0x0000000080000001ull, 0x8000000080008008ull};

    constexpr int rotations[25] = {0,  1,  62, 28, 27, 36, 44, 6,  55,
                                   20, 3,  10, 43, 25, 39, 41, 45, 15,
                                   21, 8,  18, 2,  61, 56, 14};

    constexpr uint64_t rotl(uint64_t x, int n)
    {
        return n == 0 ? x : (x << n) | (x >> (64 - n));
    }

    void keccak_f1600(uint64_t (&a)[25])
    {
        for (auto rc : round_constants) {
            uint64_t c[5];
            for (int x = 0; x < 5; ++x) {
                c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
            }
            for (int x = 0; x < 5; ++x) {
                uint64_t d = c[(x + 4) % 5] ^ rotl(c[(x + 1) % 5], 1);
                for (int y = 0; y < 25; y += 5) {
                    a[y + x] ^= d;
                }
            }
            // rho + pi
            uint64_t b[25];
            for (int x = 0; x < 5; ++x) {
                for (int y = 0; y < 5; ++y) {
                    b[y + 5 * ((2 * x + 3 * y) % 5)] =
                        rotl(a[x + 5 * y], rotations[x + 5 * y]);
                }
            }
            // chi
            for (int y = 0; y < 25; y += 5) {
                for (int x = 0; x < 5; ++x) {
                    a[y + x] =
                        b[y + x] ^ (~b[y + (x + 1) % 5] & b[y + (x + 2) % 5]);
                }
            }
            a[0] ^= rc;
        }
    }

    uint64_t load_le(uint8_t const *p)
    {
        uint64_t v = 0;
        for (int i = 7; i >= 0; --i) {
            v = (v << 8) | p[i];
        }
        return v;
    }
}

Hash32 keccak256(std::span<uint8_t const> data)
{
    constexpr std::size_t rate = 136;
    uint64_t state[25] = {};

    while (data.size() >= rate) {
        for (std::size_t i = 0; i < rate / 8; ++i) {
            state[i] ^= load_le(data.data() + 8 * i);
        }
        keccak_f1600(state);
        data = data.subspan(rate);
    }

    uint8_t block[rate] = {};
    std::memcpy(block, data.data(), data.size());
    block[data.size()] ^= 0x01;
    block[rate - 1] ^= 0x80;
    for (std::size_t i = 0; i < rate / 8; ++i) {
        state[i] ^= load_le(block + 8 * i);
    }
    keccak_f1600(state);

    Hash32 out;
    for (std::size_t i = 0; i < 32; ++i) {
        out.bytes[i] = static_cast<uint8_t>(state[i / 8] >> (8 * (i % 8)));
    }
    return out;
}

Hash32 keccak256(std::string_view text)
{
    return keccak256(std::span<uint8_t const>(
        reinterpret_cast<uint8_t const *>(text.data()), text.size()));
}

} // namespace tokengraph
