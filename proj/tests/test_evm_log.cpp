#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <tokengraph/evm_log.hpp>
#include <tokengraph/keccak.hpp>

#include <random>

using namespace tokengraph;

namespace
{
    Address addr(uint8_t tag)
    {
        Address a;
        a.bytes[19] = tag;
        a.bytes[0] = 0xaa;
        return a;
    }

    Hash32 pad(Address const &a)
    {
        Hash32 h;
        std::copy(a.bytes.begin(), a.bytes.end(), h.bytes.begin() + 12);
        return h;
    }

    std::vector<uint8_t> word(uint64_t v)
    {
        std::vector<uint8_t> w(32, 0);
        for (int i = 0; i < 8; ++i) {
            w[31 - i] = static_cast<uint8_t>(v >> (8 * i));
        }
        return w;
    }

    RawLog transfer_log(Address const &from, Address const &to, uint64_t amount)
    {
        RawLog log;
        log.emitter = addr(0x70);
        log.topics = {transfer_signature(), pad(from), pad(to)};
        log.data = word(amount);
        log.block_number = 12;
        log.tx_hash = keccak256("tx");
        log.log_index = 3;
        return log;
    }
}

TEST_CASE("decode a plain transfer")
{
    auto u = addr(1), c = addr(2);
    auto ev = decode_transfer(transfer_log(u, c, 25));
    REQUIRE(ev);
    CHECK(ev->token == addr(0x70));
    CHECK(ev->from == u);
    CHECK(ev->to == c);
    CHECK(ev->amount == 25);
    CHECK(ev->block_number == 12);
    CHECK(ev->log_index == 3);
    CHECK(ev->tx_hash == keccak256("tx"));
    CHECK(ev->kind() == TransferKind::move);
}

TEST_CASE("shapes that are not ERC-20 transfers decode to nothing")
{
    auto log = transfer_log(addr(1), addr(2), 1);

    auto nft = log;
    nft.topics.push_back(pad(addr(9)));
    nft.data.clear();
    CHECK_FALSE(decode_transfer(nft));

    auto other = log;
    other.topics[0] = keccak256("Approval(address,address,uint256)");
    CHECK_FALSE(decode_transfer(other));

    auto two_topics = log;
    two_topics.topics.pop_back();
    CHECK_FALSE(decode_transfer(two_topics));

    auto long_data = log;
    long_data.data.push_back(0);
    CHECK_FALSE(decode_transfer(long_data));

    auto no_topics = log;
    no_topics.topics.clear();
    CHECK_FALSE(decode_transfer(no_topics));
}

TEST_CASE("classification")
{
    TransferEvent ev;
    ev.to = addr(1);
    CHECK(classify(ev) == TransferKind::mint);
    ev.from = addr(1);
    ev.to = zero_address;
    CHECK(classify(ev) == TransferKind::burn);
    ev.to = addr(2);
    CHECK(classify(ev) == TransferKind::move);
    ev.from = zero_address;
    ev.to = zero_address;
    CHECK(classify(ev) == TransferKind::mint);
}

TEST_CASE("dirty topic padding")
{
    auto log = transfer_log(addr(1), addr(2), 5);
    log.topics[1].bytes[0] = 0xff;

    DecodeCounters counters;
    auto ev = decode_transfer(log, {}, &counters);
    REQUIRE(ev);
    CHECK(ev->from == addr(1));
    CHECK(counters.dirty_padding == 1);

    DecodeOptions strict;
    strict.strict = true;
    CHECK_THROWS_AS(decode_transfer(log, strict), MalformedLogError);
}

TEST_CASE("encode/decode round trip")
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
        TransferEvent ev;
        for (auto *a : {&ev.token, &ev.from, &ev.to}) {
            for (auto &b : a->bytes) {
                b = static_cast<uint8_t>(rng());
            }
        }
        if (i % 5 == 0) {
            ev.from = zero_address;
        }
        if (i % 7 == 0) {
            ev.to = zero_address;
        }
        std::array<uint8_t, 32> amount;
        for (auto &b : amount) {
            b = static_cast<uint8_t>(rng());
        }
        ev.amount = uint256_from_be(amount);
        ev.block_number = rng() % 20'000'000;
        ev.log_index = rng() % 1000;
        ev.tx_hash = keccak256(std::to_string(i));

        auto log = encode_transfer(ev, 4);
        CHECK(log.tx_index == 4);
        auto back = decode_transfer(log);
        REQUIRE(back);
        CHECK(*back == ev);

        auto again = raw_log_from_json(nlohmann::json::parse(to_jsonl_line(log)));
        CHECK(again == log);
    }
}

TEST_CASE("decode is total over arbitrary logs")
{
    std::mt19937_64 rng(3);
    int decoded = 0;
    for (int i = 0; i < 2000; ++i) {
        RawLog log;
        auto ntopics = rng() % 5;
        for (uint64_t t = 0; t < ntopics; ++t) {
            Hash32 h;
            for (auto &b : h.bytes) {
                b = static_cast<uint8_t>(rng() % 3 == 0 ? rng() : 0);
            }
            log.topics.push_back(h);
        }
        if (ntopics > 0 && rng() % 2) {
            log.topics[0] = transfer_signature();
        }
        log.data.resize(rng() % 3 == 0 ? 32 : rng() % 70);
        for (auto &b : log.data) {
            b = static_cast<uint8_t>(rng());
        }
        auto ev = decode_transfer(log);
        decoded += ev ? 1 : 0;
        if (ev) {
            CHECK(log.topics.size() == 3);
            CHECK(log.data.size() == 32);
        }
    }
    CHECK(decoded > 0);
}

TEST_CASE("JSON log parsing")
{
    auto line = R"({"address":"0x00000000000000000000000000000000000000aa",
        "topics":["0xddf252ad1be2c89b69c2b068fc378daa952ba7f163c4a11628f55a4df523b3ef",
                  "0x0000000000000000000000000000000000000000000000000000000000000001",
                  "0x0000000000000000000000000000000000000000000000000000000000000002"],
        "data":"0x0000000000000000000000000000000000000000000000000000000000000019",
        "blockNumber":"0x1a","transactionHash":"0x1111111111111111111111111111111111111111111111111111111111111111",
        "logIndex":7,"transactionIndex":"0x0"})";
    auto log = raw_log_from_json(nlohmann::json::parse(line));
    CHECK(log.block_number == 26);
    CHECK(log.log_index == 7);
    auto ev = decode_transfer(log);
    REQUIRE(ev);
    CHECK(ev->amount == 25);

    CHECK(parse_quantity(nlohmann::json("0x0")) == 0);
    CHECK(to_quantity(255) == "0xff");
    CHECK_THROWS(raw_log_from_json(nlohmann::json::parse(R"({"address":"0x12"})")));
}
