#include <tokengraph/scenarios.hpp>

#include <tokengraph/keccak.hpp>

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace tokengraph
{

uint64_t uniform(std::mt19937_64 &rng, uint64_t n)
{
    return n == 0 ? 0 : rng() % n;
}

Address synthetic_address(std::string_view scenario, std::string_view label)
{
    std::string key;
    key.reserve(scenario.size() + label.size() + 1);
    key += scenario;
    key += ':';
    key += label;
    auto h = keccak256(key);
    Address a;
    std::copy(h.bytes.begin() + 12, h.bytes.end(), a.bytes.begin());
    return a;
}

Address prefixed_address(std::string_view hex_prefix, std::string_view label)
{
    auto prefix = parse_hex(hex_prefix);
    if (!prefix || prefix->size() > 20) {
        throw ScenarioError("bad address prefix " + std::string(hex_prefix));
    }
    auto a = synthetic_address("prefixed", label);
    std::copy(prefix->begin(), prefix->end(), a.bytes.begin());
    return a;
}

Hash32 prefixed_hash(std::string_view hex_prefix, std::string_view label)
{
    auto prefix = parse_hex(hex_prefix);
    if (!prefix || prefix->size() > 32) {
        throw ScenarioError("bad hash prefix " + std::string(hex_prefix));
    }
    auto h = keccak256("prefixed-tx:" + std::string(label));
    std::copy(prefix->begin(), prefix->end(), h.bytes.begin());
    return h;
}

Address Scenario::at(std::string const &label) const
{
    auto it = named.find(label);
    if (it == named.end()) {
        throw ScenarioError("scenario " + name + " has no token '" + label + "'");
    }
    return it->second;
}

std::vector<RawLog> Scenario::logs() const
{
    std::vector<RawLog> out;
    uint64_t last_block = static_cast<uint64_t>(-1);
    uint64_t tx_index = 0;
    for (auto const &b : batches) {
        tx_index = b.block_number == last_block ? tx_index + 1 : 0;
        last_block = b.block_number;
        for (auto const &ev : b.events) {
            out.push_back(encode_transfer(ev, tx_index));
        }
    }
    return out;
}

std::size_t Scenario::transfer_count() const
{
    std::size_t n = 0;
    for (auto const &b : batches) {
        n += b.events.size();
    }
    return n;
}

namespace
{
    struct Leg
    {
        Address token;
        Address from;
        Address to;
        Uint256 amount;
    };

    class ScenarioBuilder
    {
    public:
        explicit ScenarioBuilder(std::string name, uint64_t first_block = 10'000'000)
            : block_(first_block)
        {
            s_.name = std::move(name);
        }

        Address token(std::string const &label)
        {
            return name_token(label, synthetic_address(s_.name, label));
        }

        Address name_token(std::string const &label, Address const &a)
        {
            s_.named[label] = a;
            s_.labels[a] = label;
            return a;
        }

        // Users are named but not labelled as tokens.
        Address user(std::string const &label)
        {
            auto a = synthetic_address(s_.name, "user/" + label);
            s_.named[label] = a;
            return a;
        }

        // Two transactions per block; log indices run on within a block.
        TxBatch &tx(std::vector<Leg> const &legs,
                    std::optional<uint64_t> block = std::nullopt,
                    std::optional<Hash32> hash = std::nullopt)
        {
            uint64_t b;
            if (block) {
                if (*block < block_) {
                    throw ScenarioError("scenario blocks must not decrease");
                }
                if (*block != block_) {
                    block_ = *block;
                    next_log_ = 0;
                }
                b = block_;
                txs_in_block_ = 2; // force a fresh block next time
            }
            else {
                if (txs_in_block_ >= 2) {
                    ++block_;
                    next_log_ = 0;
                    txs_in_block_ = 0;
                }
                b = block_;
                ++txs_in_block_;
            }
            TxBatch batch;
            batch.block_number = b;
            batch.tx_hash = hash ? *hash
                                 : keccak256(s_.name + ":tx:" +
                                             std::to_string(s_.batches.size()));
            for (auto const &leg : legs) {
                TransferEvent ev;
                ev.token = leg.token;
                ev.from = leg.from;
                ev.to = leg.to;
                ev.amount = leg.amount;
                ev.block_number = b;
                ev.tx_hash = batch.tx_hash;
                ev.log_index = next_log_++;
                batch.events.push_back(ev);
            }
            s_.batches.push_back(std::move(batch));
            return s_.batches.back();
        }

        TokenisingMetaEvent expect(
            TxBatch const &b, std::size_t asset, std::size_t share,
            ActionKind action)
        {
            TokenisingMetaEvent m;
            m.source_token = b.events[asset].token;
            m.target_token = b.events[share].token;
            m.action = action;
            m.source_amount = b.events[asset].amount;
            m.target_amount = b.events[share].amount;
            m.tx_hash = b.tx_hash;
            m.block_number = b.block_number;
            m.asset_log_index = b.events[asset].log_index;
            m.share_log_index = b.events[share].log_index;
            s_.expected_meta_events.push_back(m);
            return m;
        }

        void deposit(Address const &asset, Address const &share, Address const &u,
                     Uint256 in = 1000, Uint256 out = 1000,
                     std::optional<uint64_t> block = std::nullopt,
                     std::optional<Hash32> hash = std::nullopt)
        {
            auto &b = tx({{asset, u, share, in}, {share, zero_address, u, out}},
                         block, hash);
            expect(b, 0, 1, ActionKind::deposit_and_mint);
        }

        void withdraw(Address const &asset, Address const &share, Address const &u,
                      Uint256 out = 1000, Uint256 burned = 1000,
                      std::optional<uint64_t> block = std::nullopt,
                      std::optional<Hash32> hash = std::nullopt)
        {
            auto &b = tx({{share, u, zero_address, burned}, {asset, share, u, out}},
                         block, hash);
            expect(b, 1, 0, ActionKind::withdraw_and_burn);
        }

        void round_trip(Address const &asset, Address const &share, Address const &u)
        {
            deposit(asset, share, u);
            withdraw(asset, share, u);
        }

        Scenario &scenario() { return s_; }
        Scenario finish() { return std::move(s_); }

    private:
        Scenario s_;
        uint64_t block_;
        uint64_t next_log_ = 0;
        int txs_in_block_ = 0;
    };

    Uint256 units(uint64_t whole)
    {
        return Uint256(whole) * Uint256("1000000000000000000");
    }
}

Scenario vault_roundtrip()
{
    ScenarioBuilder b("vault_roundtrip");
    auto asset = b.token("ASSET");
    auto vault = b.token("VAULT");
    auto u = b.user("U");
    b.deposit(asset, vault, u, 500, 480);
    b.withdraw(asset, vault, u, 510, 480);
    auto &s = b.scenario();
    s.expected.unfiltered_vertices = 2;
    s.expected.unfiltered_edges = 1;
    s.expected.filtered_vertices = 2;
    s.expected.filtered_edges = 1;
    s.expected.filtered_wcc_sizes = std::vector<std::size_t>{2};
    s.expected.filtered_nontrivial_sccs = std::vector<std::vector<Address>>{};
    s.expected.filtered_loops = std::vector<Address>{};
    s.expected.filtered_longest_path = std::vector<Address>{asset, vault};
    return b.finish();
}

Scenario one_way_upgrade()
{
    ScenarioBuilder b("one_way_upgrade");
    auto old_token = b.token("OLD");
    auto new_token = b.token("NEW");
    b.deposit(old_token, new_token, b.user("U"), 100, 100);
    b.deposit(old_token, new_token, b.user("V"), 250, 250);
    auto &s = b.scenario();
    s.expected.unfiltered_vertices = 2;
    s.expected.unfiltered_edges = 1;
    s.expected.filtered_vertices = 0;
    s.expected.filtered_edges = 0;
    s.expected.filtered_wcc_sizes = std::vector<std::size_t>{};
    return b.finish();
}

Scenario router_swap_fp()
{
    // The user pays a router, the router forwards a different token to the
    // share contract, and the share is minted to the user. Loose pairing
    // links the forwarded token to the share; strict pairing does not because
    // the depositor (router) is not the mint recipient.
    ScenarioBuilder b("router_swap_fp");
    auto usdc = b.token("USDC");
    auto adai = b.token("aDAI");
    auto router = b.user("ROUTER");
    auto u = b.user("U");
    auto &tx = b.tx({{usdc, u, router, 1000}, {usdc, router, adai, 1000},
                     {adai, zero_address, u, 990}});
    b.expect(tx, 1, 2, ActionKind::deposit_and_mint);
    auto &s = b.scenario();
    s.expected_strict_meta_events = std::vector<TokenisingMetaEvent>{};
    s.expected.unfiltered_vertices = 2;
    s.expected.unfiltered_edges = 1;
    s.expected.filtered_edges = 0;
    return b.finish();
}

Scenario cycle(uint64_t k)
{
    if (k < 1 || k > 4096) {
        throw ScenarioError("cycle length must be in [1, 4096]");
    }
    ScenarioBuilder b("cycle" + std::to_string(k));
    std::vector<Address> tokens;
    for (uint64_t i = 0; i < k; ++i) {
        tokens.push_back(b.token("T" + std::to_string(i)));
    }
    auto u = b.user("U");
    for (uint64_t i = 0; i < k; ++i) {
        b.round_trip(tokens[i], tokens[(i + 1) % k], u);
    }
    auto &s = b.scenario();
    s.expected.filtered_vertices = k;
    s.expected.filtered_edges = k;
    s.expected.filtered_wcc_sizes = std::vector<std::size_t>{k};
    auto sorted = tokens;
    std::sort(sorted.begin(), sorted.end());
    if (k == 1) {
        s.expected.filtered_nontrivial_sccs = std::vector<std::vector<Address>>{};
        s.expected.filtered_loops = tokens;
    }
    else {
        s.expected.filtered_nontrivial_sccs = std::vector<std::vector<Address>>{sorted};
        s.expected.filtered_loops = std::vector<Address>{};
    }
    return b.finish();
}

Scenario fig2()
{
    ScenarioBuilder b("fig2");
    std::vector<Address> t;
    for (int i = 0; i < 8; ++i) {
        t.push_back(b.token("t" + std::to_string(i)));
    }
    auto u = b.user("U");
    // (t0, t5, t6) is an undirected but not a directed cycle, (t1, t6) is a
    // directed 2-cycle and t7 is a loop.
    std::vector<std::pair<int, int>> const edges = {
        {0, 5}, {5, 6}, {0, 6}, {1, 6}, {6, 1}, {4, 1}, {2, 3}, {7, 7}};
    for (auto [s, d] : edges) {
        b.round_trip(t[s], t[d], u);
    }
    auto &s = b.scenario();
    s.expected.unfiltered_vertices = 8;
    s.expected.unfiltered_edges = 8;
    s.expected.filtered_vertices = 8;
    s.expected.filtered_edges = 8;
    s.expected.filtered_wcc_sizes = std::vector<std::size_t>{5, 2, 1};
    std::vector<Address> scc{t[1], t[6]};
    std::sort(scc.begin(), scc.end());
    s.expected.filtered_nontrivial_sccs = std::vector<std::vector<Address>>{scc};
    s.expected.filtered_loops = std::vector<Address>{t[7]};
    return b.finish();
}

Scenario nine_chain()
{
    ScenarioBuilder b("nine_chain");
    // Published six-hex-digit abbreviations; the remaining bytes are
    // synthetic.
    std::vector<std::pair<std::string, std::string>> const chain_tokens = {
        {"renBTC", "eb4c27"},          {"sBTC", "fe18be"},
        {"crvRenWSBTC", "075b1b"},     {"tbtc/sbtcCrv", "64eda5"},
        {"btbtc/sbtcCrv", "b9d076"},   {"ibBTC", "c4e159"},
        {"wibBTC", "8751d4"},          {"ibbtc/sbtcCRV-f", "fbdca6"},
        {"bibbtc/sbtcCRV-f", "ae96ff"},
    };
    std::vector<Address> chain;
    for (auto const &[sym, prefix] : chain_tokens) {
        chain.push_back(b.name_token(sym, prefixed_address(prefix, sym)));
    }
    auto wbtc = b.name_token("WBTC", prefixed_address("2260fa", "WBTC"));
    auto tbtc = b.token("TBTC");
    auto vault1 = b.token("sbtcVault");
    auto vault2 = b.token("sbtcVault2");
    auto wrapped = b.token("wibBTC-wrapper");
    auto upgrade = b.token("bibbtc-v2");
    auto u = b.user("U");

    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        b.round_trip(chain[i], chain[i + 1], u);
    }
    // Side branches, all strictly shorter than the main chain.
    b.round_trip(wbtc, chain[2], u);
    b.round_trip(tbtc, chain[3], u);
    b.round_trip(chain[1], vault1, u);
    b.round_trip(vault1, vault2, u);
    b.round_trip(chain[6], wrapped, u);
    // One-way upgrade at the end of the chain: extends the unfiltered path
    // to ten vertices but is absent from the filtered graph.
    b.deposit(chain[8], upgrade, u);

    auto &s = b.scenario();
    s.expected.unfiltered_vertices = 15;
    s.expected.unfiltered_edges = 14;
    s.expected.filtered_vertices = 14;
    s.expected.filtered_edges = 13;
    s.expected.filtered_wcc_sizes = std::vector<std::size_t>{14};
    s.expected.filtered_nontrivial_sccs = std::vector<std::vector<Address>>{};
    s.expected.filtered_loops = std::vector<Address>{};
    s.expected.filtered_longest_path = chain;
    return b.finish();
}

Scenario table1()
{
    // Earliest and latest deposit & mint / withdraw & burn rows. Addresses and
    // hashes keep the published prefixes; block numbers are illustrative.
    ScenarioBuilder b("table1", 2'900'000);
    auto arc = b.name_token("ARC", prefixed_address("ac709f", "ARC"));
    auto swt = b.name_token("SWT", prefixed_address("b12a3c", "SWT"));
    auto dgz = b.name_token("DGZ", prefixed_address("84178d", "DGZ"));
    auto predgz = b.name_token("preDGZ", prefixed_address("18aa6e", "preDGZ"));
    auto bone = b.name_token("BONE", prefixed_address("981303", "BONE"));
    auto tbone = b.name_token("tBONE", prefixed_address("f7a038", "tBONE"));
    auto weth = b.name_token("WETH", prefixed_address("c02aaa", "WETH"));
    auto aweth = b.name_token("aWETH", prefixed_address("030ba8", "aWETH"));
    auto u = b.user("U");

    Uint256 const dust = 1;
    b.deposit(arc, swt, u, dust, dust, 2'950'000, prefixed_hash("549a12", "row1"));
    b.withdraw(dgz, predgz, u, units(1371), units(150), 4'100'000,
               prefixed_hash("2da232", "row2"));
    b.withdraw(bone, tbone, u, units(5183), units(5160), 16'685'000,
               prefixed_hash("5dbe32", "row3"));
    b.deposit(weth, aweth, u, units(25), units(25), 16'685'090,
              prefixed_hash("b4281a", "row4"));

    auto &s = b.scenario();
    s.expected.unfiltered_vertices = 8;
    s.expected.unfiltered_edges = 4;
    s.expected.filtered_edges = 0;
    return b.finish();
}

namespace
{
    struct RandomPool
    {
        std::vector<Address> tokens;
        std::vector<Address> users;

        explicit RandomPool(std::string const &scope)
        {
            for (int i = 0; i < 3; ++i) {
                tokens.push_back(synthetic_address(scope, "T" + std::to_string(i)));
            }
            for (int i = 0; i < 2; ++i) {
                users.push_back(synthetic_address(scope, "U" + std::to_string(i)));
            }
        }

        Address party(std::mt19937_64 &rng) const
        {
            auto i = uniform(rng, tokens.size() + users.size());
            return i < tokens.size() ? tokens[i] : users[i - tokens.size()];
        }

        Leg noise(std::mt19937_64 &rng) const
        {
            Leg leg;
            leg.token = tokens[uniform(rng, tokens.size())];
            leg.amount = 1 + uniform(rng, 1000);
            switch (uniform(rng, 7)) {
            case 0:
            case 1:
                leg.from = zero_address;
                leg.to = party(rng);
                break;
            case 2:
            case 3:
                leg.from = party(rng);
                leg.to = zero_address;
                break;
            case 4:
                // degenerate zero-to-zero
                break;
            default:
                leg.from = party(rng);
                leg.to = party(rng);
            }
            return leg;
        }
    };
}

TxBatch random_batch(std::mt19937_64 &rng, std::size_t max_events)
{
    static RandomPool const pool("random_batch");
    TxBatch batch;
    batch.tx_hash = keccak256("random_batch:" + std::to_string(rng()));
    batch.block_number = 1;
    auto n = 1 + uniform(rng, max_events);
    for (uint64_t i = 0; i < n; ++i) {
        auto leg = pool.noise(rng);
        TransferEvent ev;
        ev.token = leg.token;
        ev.from = leg.from;
        ev.to = leg.to;
        ev.amount = leg.amount;
        ev.block_number = batch.block_number;
        ev.tx_hash = batch.tx_hash;
        ev.log_index = i;
        batch.events.push_back(ev);
    }
    return batch;
}

std::vector<TokenisingMetaEvent>
random_meta_events(std::mt19937_64 &rng, std::size_t count, std::size_t pairs)
{
    std::vector<Address> tokens;
    for (int i = 0; i < 6; ++i) {
        tokens.push_back(synthetic_address("random_meta", "T" + std::to_string(i)));
    }
    std::vector<std::pair<Address, Address>> pool;
    for (std::size_t i = 0; i < std::max<std::size_t>(pairs, 1); ++i) {
        pool.emplace_back(tokens[uniform(rng, tokens.size())],
                          tokens[uniform(rng, tokens.size())]);
    }
    std::vector<TokenisingMetaEvent> out;
    for (std::size_t i = 0; i < count; ++i) {
        auto const &[s, t] = pool[uniform(rng, pool.size())];
        TokenisingMetaEvent m;
        m.source_token = s;
        m.target_token = t;
        m.action = uniform(rng, 2) ? ActionKind::deposit_and_mint
                                   : ActionKind::withdraw_and_burn;
        m.source_amount = uniform(rng, 100);
        m.target_amount = uniform(rng, 100);
        m.tx_hash = keccak256("random_meta:" + std::to_string(i));
        m.block_number = i;
        out.push_back(m);
    }
    return out;
}

Scenario random_scenario(uint64_t seed, uint64_t size)
{
    if (size < 1 || size > 64) {
        throw ScenarioError("random scenario size must be in [1, 64]");
    }
    std::mt19937_64 rng(seed);
    ScenarioBuilder b("random" + std::to_string(seed));
    RandomPool pool("random/" + std::to_string(seed));
    auto &s = b.scenario();
    for (uint64_t i = 0; i < size; ++i) {
        std::vector<Leg> legs;
        auto planted = 1 + uniform(rng, 2);
        for (uint64_t p = 0; p < planted; ++p) {
            auto asset = pool.tokens[uniform(rng, pool.tokens.size())];
            auto share = pool.tokens[uniform(rng, pool.tokens.size())];
            auto u = pool.users[uniform(rng, pool.users.size())];
            if (uniform(rng, 2)) {
                legs.push_back({asset, u, share, 1 + uniform(rng, 1000)});
                legs.push_back({share, zero_address, u, 1 + uniform(rng, 1000)});
            }
            else {
                legs.push_back({share, u, zero_address, 1 + uniform(rng, 1000)});
                legs.push_back({asset, share, u, 1 + uniform(rng, 1000)});
            }
        }
        auto noise = uniform(rng, 8 - legs.size() + 1);
        for (uint64_t n = 0; n < noise; ++n) {
            legs.push_back(pool.noise(rng));
        }
        std::shuffle(legs.begin(), legs.end(), rng);
        b.tx(legs);
        s.planted_pairs.push_back(planted);
    }
    return b.finish();
}

Scenario scale(uint64_t seed, uint64_t vertices, uint64_t edges)
{
    if (vertices < 2 || edges < (vertices + 1) / 2 ||
        edges > vertices * (vertices - 1)) {
        throw ScenarioError(
            "scale scenario needs 2 <= vertices and ceil(vertices/2) <= edges "
            "<= vertices*(vertices-1)");
    }
    std::mt19937_64 rng(seed);
    ScenarioBuilder b("scale" + std::to_string(seed));
    std::vector<Address> v(vertices);
    for (uint64_t i = 0; i < vertices; ++i) {
        v[i] = synthetic_address(b.scenario().name, "v" + std::to_string(i));
    }
    std::vector<uint64_t> perm(vertices);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);

    std::set<std::pair<uint64_t, uint64_t>> chosen;
    std::vector<std::pair<uint64_t, uint64_t>> order;
    auto add = [&](uint64_t s, uint64_t t) {
        if (s == t || chosen.contains({s, t})) {
            return false;
        }
        chosen.insert({s, t});
        order.emplace_back(s, t);
        return true;
    };
    // Cover every vertex first so none is isolated.
    for (uint64_t i = 0; i + 1 < vertices; i += 2) {
        if (uniform(rng, 2)) {
            add(perm[i], perm[i + 1]);
        }
        else {
            add(perm[i + 1], perm[i]);
        }
    }
    if (vertices % 2 == 1) {
        add(perm[vertices - 1], perm[uniform(rng, vertices - 1)]);
    }
    while (order.size() < edges) {
        add(uniform(rng, vertices), uniform(rng, vertices));
    }

    std::vector<Address> users;
    for (int i = 0; i < 64; ++i) {
        users.push_back(synthetic_address(b.scenario().name, "u" + std::to_string(i)));
    }
    uint64_t two_way = 0;
    for (auto const &[s, t] : order) {
        auto const &u = users[uniform(rng, users.size())];
        b.deposit(v[s], v[t], u, 1 + uniform(rng, 1'000'000), 1 + uniform(rng, 1'000'000));
        if (uniform(rng, 2)) {
            ++two_way;
            b.withdraw(v[s], v[t], u, 1 + uniform(rng, 1'000'000),
                       1 + uniform(rng, 1'000'000));
        }
    }
    auto &s = b.scenario();
    s.expected.unfiltered_vertices = vertices;
    s.expected.unfiltered_edges = edges;
    s.expected.filtered_edges = two_way;
    return b.finish();
}

Scenario generate(std::string_view name, ScenarioParams const &params)
{
    if (name == "vault_roundtrip") {
        return vault_roundtrip();
    }
    if (name == "one_way_upgrade") {
        return one_way_upgrade();
    }
    if (name == "router_swap_fp") {
        return router_swap_fp();
    }
    if (name == "cycle") {
        return cycle(params.k);
    }
    if (name == "fig2") {
        return fig2();
    }
    if (name == "nine_chain") {
        return nine_chain();
    }
    if (name == "table1") {
        return table1();
    }
    if (name == "random") {
        return random_scenario(params.seed, params.size);
    }
    if (name == "scale") {
        return scale(params.seed, params.vertices, params.edges);
    }
    throw ScenarioError("unknown scenario '" + std::string(name) + "'");
}

std::vector<std::string> scenario_names()
{
    return {"vault_roundtrip", "one_way_upgrade", "router_swap_fp", "cycle",
            "fig2",            "nine_chain",      "table1",         "random",
            "scale"};
}

// --- brute-force oracle -----------------------------------------------------

namespace
{
    // Written against raw fields, independently of meta_events::pair_action.
    std::optional<ActionKind> oracle_pair(
        TransferEvent const &asset, TransferEvent const &share,
        PairingPolicy const &policy)
    {
        bool asset_is_plain = !asset.from.is_zero() && !asset.to.is_zero();
        if (!asset_is_plain) {
            return std::nullopt;
        }
        if (asset.token == share.token && !policy.allow_self_wrap) {
            return std::nullopt;
        }
        bool strict = policy.mode == PairingMode::strict;
        bool minted = share.from.is_zero() && !share.to.is_zero();
        bool burned = !share.from.is_zero() && share.to.is_zero();
        if (minted && asset.to == share.token &&
            (!strict || share.to == asset.from)) {
            return ActionKind::deposit_and_mint;
        }
        if (burned && asset.from == share.token &&
            (!strict || asset.to == share.from)) {
            return ActionKind::withdraw_and_burn;
        }
        return std::nullopt;
    }
}

std::vector<Pairing>
brute_force_pairings(TxBatch const &batch, PairingPolicy const &policy)
{
    auto const &ev = batch.events;
    std::size_t const n = ev.size();
    if (n > 12) {
        throw BatchTooLargeError("brute-force oracle is limited to 12 events");
    }
    // valid[i][j]: event i as asset, j as share
    std::vector<std::vector<std::optional<ActionKind>>> valid(
        n, std::vector<std::optional<ActionKind>>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) {
                valid[i][j] = oracle_pair(ev[i], ev[j], policy);
            }
        }
    }

    std::vector<Pairing> out;
    std::vector<bool> used(n, false);
    std::vector<bool> skipped(n, false);
    Pairing current;

    // Skipped events count as free for the maximality test.
    auto is_maximal = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (!used[i] && !used[j] && valid[i][j]) {
                    return false;
                }
            }
        }
        return true;
    };

    std::function<void(std::size_t)> walk = [&](std::size_t i) {
        while (i < n && (used[i] || skipped[i])) {
            ++i;
        }
        if (i == n) {
            if (is_maximal()) {
                auto p = current;
                std::sort(p.begin(), p.end());
                out.push_back(std::move(p));
            }
            return;
        }
        skipped[i] = true;
        walk(i + 1);
        skipped[i] = false;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (used[j] || skipped[j]) {
                continue;
            }
            for (int role = 0; role < 2; ++role) {
                std::size_t a = role == 0 ? i : j;
                std::size_t s = role == 0 ? j : i;
                if (!valid[a][s]) {
                    continue;
                }
                used[i] = used[j] = true;
                current.push_back({ev[a].log_index, ev[s].log_index, *valid[a][s]});
                walk(i + 1);
                current.pop_back();
                used[i] = used[j] = false;
            }
        }
    };
    walk(0);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Pairing to_pairing(std::vector<TokenisingMetaEvent> const &events)
{
    Pairing p;
    for (auto const &m : events) {
        p.push_back({m.asset_log_index, m.share_log_index, m.action});
    }
    std::sort(p.begin(), p.end());
    return p;
}

// --- published table fixture --------------------------------------------

namespace
{
    struct FixtureEdge
    {
        Address source;
        Address target;
        uint64_t deposits;
        uint64_t withdrawals;
    };

    std::vector<FixtureEdge> fixture_edges(PublishedTableFixture &f)
    {
        auto tok = [&](std::string const &sym, std::string const &prefix) {
            auto a = prefixed_address(prefix, sym);
            f.tokens[sym] = a;
            f.labels[a] = sym;
            return a;
        };
        auto usdc = tok("USDC", "a0b869");
        auto dai = tok("DAI", "6b1754");
        auto usdt = tok("USDT", "dac17f");
        auto weth = tok("WETH", "c02aaa");
        auto susd = tok("sUSD", "57ab1e");
        auto wbtc = tok("WBTC", "2260fa");
        auto chi = Address::parse("0x0000000000004946c0e9f43f4dee607b0ef1fa1c");
        f.tokens["CHI"] = chi;
        f.labels[chi] = "CHI";
        auto usdp = tok("USDP", "145668");
        auto ausdc = tok("aUSDC", "bcca60");
        auto aweth = tok("aWETH", "030ba8");
        auto adai = tok("aDAI", "028171");
        auto xdp2 = tok("XDP2", "e68c1d");
        auto xdp1 = tok("XDP1", "134fc6");
        auto cyusd = tok("cyUSD", "1d0914");
        auto idol = tok("iDOL", "7591a3");
        auto ageur = tok("agEUR", "1a7e4e");
        auto shib = tok("SHIB", "95ad61");
        auto xshib = tok("xSHIB", "b4a812");
        auto bone = tok("BONE", "981303");
        auto tbone = tok("tBONE", "f7a038");
        auto sushi = tok("SUSHI", "6b3595");
        auto xsushi = tok("xSUSHI", "879824");
        auto leash = tok("LEASH", "27c70c");
        auto xleash = tok("xLEASH", "a57d31");

        std::vector<FixtureEdge> edges;
        auto split = [](uint64_t total) {
            return std::pair<uint64_t, uint64_t>{(total + 1) / 2, total / 2};
        };
        auto big = [&](Address s, Address t, uint64_t total) {
            auto [d, w] = split(total);
            edges.push_back({s, t, d, w});
        };
        // Most significant edges, present in both graphs.
        big(shib, xshib, 402186);
        big(bone, tbone, 203734);
        big(sushi, xsushi, 120221);
        big(leash, xleash, 75180);
        big(usdc, ausdc, 69373);
        big(weth, aweth, 90);
        big(dai, adai, 100);

        uint64_t leaf_counter = 0;
        auto leaf = [&] {
            return synthetic_address("published_tables", "leaf" + std::to_string(leaf_counter++));
        };
        // Small noise counts, always <= 100.
        auto noise_count = [&](uint64_t i) { return 1 + (i * 37) % 50; };

        // Out-degree hubs: total (unfiltered) and two-way (filtered) degree,
        // counting the named edges above.
        auto out_hub = [&](Address hub, uint64_t total, uint64_t two_way,
                           uint64_t named_two_way) {
            for (uint64_t i = 0; i < total - named_two_way; ++i) {
                bool tw = i < two_way - named_two_way;
                auto c = noise_count(i);
                edges.push_back({hub, leaf(), c, tw ? c : 0});
            }
        };
        out_hub(usdc, 3587, 1037, 1);
        out_hub(dai, 1923, 752, 1);
        out_hub(usdt, 1175, 396, 0);
        out_hub(weth, 951, 281, 1);
        out_hub(susd, 548, 100, 0);
        out_hub(wbtc, 300, 211, 0);

        auto in_hub = [&](Address hub, uint64_t total, uint64_t two_way,
                          uint64_t named_two_way) {
            for (uint64_t i = 0; i < total - named_two_way; ++i) {
                bool tw = i < two_way - named_two_way;
                auto c = noise_count(i + 7);
                edges.push_back({leaf(), hub, c, tw ? c : 0});
            }
        };
        in_hub(chi, 471, 0, 0);
        in_hub(usdp, 117, 5, 0);
        in_hub(ausdc, 84, 7, 1);
        in_hub(aweth, 63, 6, 1);
        in_hub(adai, 54, 4, 1);
        in_hub(xdp2, 16, 16, 0);
        in_hub(xdp1, 15, 15, 0);
        in_hub(cyusd, 14, 14, 0);
        in_hub(idol, 13, 13, 0);
        in_hub(ageur, 8, 8, 0);
        return edges;
    }
}

PublishedTableFixture published_table_fixture()
{
    PublishedTableFixture f;
    fixture_edges(f);
    return f;
}

void PublishedTableFixture::for_each_meta_event(MetaEventSink const &sink) const
{
    PublishedTableFixture scratch;
    auto edges = fixture_edges(scratch);
    uint64_t n = 0;
    TokenisingMetaEvent m;
    m.source_amount = 1;
    m.target_amount = 1;
    for (auto const &e : edges) {
        m.source_token = e.source;
        m.target_token = e.target;
        for (uint64_t i = 0; i < e.deposits + e.withdrawals; ++i, ++n) {
            m.action = i < e.deposits ? ActionKind::deposit_and_mint
                                      : ActionKind::withdraw_and_burn;
            // Cheap unique hashes: the counter in the low bytes.
            m.tx_hash = Hash32{};
            for (int b = 0; b < 8; ++b) {
                m.tx_hash.bytes[31 - b] = static_cast<uint8_t>(n >> (8 * b));
            }
            m.block_number = 10'000'000 + n / 100;
            sink(m);
        }
    }
}

// --- expectation checks -----------------------------------------------------

std::vector<std::string> check_expectations(
    GraphExpectations const &expected, TokenGraph const &unfiltered,
    TokenGraph const &filtered)
{
    std::vector<std::string> failures;
    auto check_count = [&](char const *what, std::optional<std::size_t> const &want,
                           std::size_t got) {
        if (want && *want != got) {
            failures.push_back(
                std::string(what) + ": expected " + std::to_string(*want) +
                ", got " + std::to_string(got));
        }
    };
    check_count("unfiltered vertices", expected.unfiltered_vertices,
                unfiltered.vertex_count());
    check_count("unfiltered edges", expected.unfiltered_edges, unfiltered.edge_count());
    check_count("filtered vertices", expected.filtered_vertices, filtered.vertex_count());
    check_count("filtered edges", expected.filtered_edges, filtered.edge_count());

    if (expected.filtered_wcc_sizes) {
        std::vector<std::size_t> sizes;
        for (auto const &c : weak_components(filtered).components) {
            sizes.push_back(c.size());
        }
        if (sizes != *expected.filtered_wcc_sizes) {
            failures.push_back("filtered WCC sizes differ");
        }
    }
    if (expected.filtered_nontrivial_sccs || expected.filtered_loops) {
        auto scc = strong_components(filtered);
        if (expected.filtered_nontrivial_sccs &&
            scc.nontrivial != *expected.filtered_nontrivial_sccs) {
            failures.push_back("filtered nontrivial SCCs differ");
        }
        if (expected.filtered_loops && scc.loops != *expected.filtered_loops) {
            failures.push_back("filtered loops differ");
        }
    }
    if (expected.filtered_longest_path) {
        try {
            if (longest_path(filtered).vertices != *expected.filtered_longest_path) {
                failures.push_back("filtered longest path differs");
            }
        }
        catch (CyclicGraphError const &e) {
            failures.push_back(std::string("filtered longest path: ") + e.what());
        }
    }
    return failures;
}

} // namespace tokengraph
