#pragma once

#include <tokengraph/analytics.hpp>
#include <tokengraph/graph_io.hpp>
#include <tokengraph/meta_events.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace tokengraph
{

// Declarative checks on the graphs built from a scenario. Unset fields are
// not checked.
struct GraphExpectations
{
    std::optional<std::size_t> unfiltered_vertices;
    std::optional<std::size_t> unfiltered_edges;
    std::optional<std::size_t> filtered_vertices;
    std::optional<std::size_t> filtered_edges;
    // Sorted largest first.
    std::optional<std::vector<std::size_t>> filtered_wcc_sizes;
    // Each sorted; list sorted by first member.
    std::optional<std::vector<std::vector<Address>>> filtered_nontrivial_sccs;
    std::optional<std::vector<Address>> filtered_loops;
    std::optional<std::vector<Address>> filtered_longest_path;
};

struct Scenario
{
    std::string name;
    std::vector<TxBatch> batches;
    // Ground truth under the loose policy, in detection order.
    std::vector<TokenisingMetaEvent> expected_meta_events;
    // Set when the strict policy is expected to differ.
    std::optional<std::vector<TokenisingMetaEvent>> expected_strict_meta_events;
    // random(): disjoint valid pairs planted per batch (a lower bound).
    std::vector<std::size_t> planted_pairs;
    GraphExpectations expected;
    std::map<std::string, Address> named;
    LabelMap labels;

    Address at(std::string const &label) const;
    std::vector<RawLog> logs() const;
    std::size_t transfer_count() const;
};

struct ScenarioParams
{
    uint64_t k = 3;           // cycle length
    uint64_t seed = 0;        // random, scale
    uint64_t size = 16;       // random: batch count (<= 64)
    uint64_t vertices = 25000; // scale
    uint64_t edges = 25000;    // scale
};

class ScenarioError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Names: vault_roundtrip, one_way_upgrade, router_swap_fp, cycle, fig2,
// nine_chain, table1, random, scale.
Scenario generate(std::string_view name, ScenarioParams const &params = {});
std::vector<std::string> scenario_names();

Scenario vault_roundtrip();
Scenario one_way_upgrade();
Scenario router_swap_fp();
Scenario cycle(uint64_t k);
Scenario fig2();
Scenario nine_chain();
Scenario table1();
Scenario random_scenario(uint64_t seed, uint64_t size);
Scenario scale(uint64_t seed, uint64_t vertices, uint64_t edges);

// Address derived from keccak256("<scenario>:<label>").
Address synthetic_address(std::string_view scenario, std::string_view label);
// Keeps the first bytes of `hex_prefix` and fills the rest from
// synthetic_address, for fixtures shaped like published abbreviations.
Address prefixed_address(std::string_view hex_prefix, std::string_view label);
Hash32 prefixed_hash(std::string_view hex_prefix, std::string_view label);

struct OraclePair
{
    uint64_t asset_log_index = 0;
    uint64_t share_log_index = 0;
    ActionKind action = ActionKind::deposit_and_mint;

    auto operator<=>(OraclePair const &) const = default;
};

using Pairing = std::vector<OraclePair>; // sorted

class BatchTooLargeError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Every maximal single-use pairing of the batch, each sorted, the list
// sorted. Exhaustive; limited to 12 events.
std::vector<Pairing>
brute_force_pairings(TxBatch const &batch, PairingPolicy const &policy);

Pairing to_pairing(std::vector<TokenisingMetaEvent> const &events);

// Random transaction over a small shared pool of tokens and users so that
// overlapping candidate pairs are common. Up to `max_events` events.
TxBatch random_batch(std::mt19937_64 &rng, std::size_t max_events = 8);

// Random meta-events over `pairs` token pairs, mixing both actions.
std::vector<TokenisingMetaEvent>
random_meta_events(std::mt19937_64 &rng, std::size_t count, std::size_t pairs);

// Corpus for the significant-edge and degree tables: the top edges by
// meta-event count and the top in/out degree vertices are the published
// ones, in both the unfiltered and the filtered graph. Generated straight as
// meta-events (close to a million of them).
struct PublishedTableFixture
{
    std::map<std::string, Address> tokens; // by symbol
    LabelMap labels;

    void for_each_meta_event(MetaEventSink const &sink) const;
};

PublishedTableFixture published_table_fixture();

// Uniform in [0, n) without relying on distribution implementations.
uint64_t uniform(std::mt19937_64 &rng, uint64_t n);

// Checks a scenario's expectations against graphs built by the library.
// Returns one message per failed check.
std::vector<std::string> check_expectations(
    GraphExpectations const &expected, TokenGraph const &unfiltered,
    TokenGraph const &filtered);

} // namespace tokengraph
