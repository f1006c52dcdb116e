"""Independent ground truth for logs_fixture.jsonl: line counts, decoded
Transfers, transaction count and meta-event counts (maximum pairings found
by exhaustive search)."""
import json
import re
import sys
from collections import Counter

from Crypto.Hash import keccak

k = keccak.new(digest_bits=256)
k.update(b"Transfer(address,address,uint256)")
TRANSFER = "0x" + k.hexdigest()
ZERO = "0x" + "0" * 40

HEX = re.compile(r"^0x([0-9a-fA-F]{2})*$")


def quantity(v):
    if isinstance(v, bool):
        raise ValueError
    if isinstance(v, int):
        return v
    if isinstance(v, str) and re.match(r"^0x[0-9a-fA-F]+$", v):
        return int(v, 16)
    raise ValueError


def valid(obj):
    try:
        assert isinstance(obj, dict)
        assert re.match(r"^0x[0-9a-fA-F]{40}$", obj["address"])
        assert isinstance(obj["topics"], list) and len(obj["topics"]) <= 4
        for t in obj["topics"]:
            assert isinstance(t, str) and re.match(r"^0x[0-9a-fA-F]{64}$", t)
        assert isinstance(obj["data"], str) and HEX.match(obj["data"])
        quantity(obj["blockNumber"])
        quantity(obj["logIndex"])
        assert re.match(r"^0x[0-9a-fA-F]{64}$", obj["transactionHash"])
        return True
    except (AssertionError, KeyError, ValueError, TypeError):
        return False


def decode(obj):
    t = obj["topics"]
    data = obj["data"][2:]
    if len(t) != 3 or t[0].lower() != TRANSFER or len(data) != 64:
        return None
    return {
        "token": obj["address"].lower(),
        "from": "0x" + t[1][-40:].lower(),
        "to": "0x" + t[2][-40:].lower(),
    }


def action(a, s, strict):
    """a as the asset leg, s as the share leg."""
    if a["from"] == ZERO or a["to"] == ZERO:
        return None
    if s["from"] == ZERO and s["to"] != ZERO and a["to"] == s["token"]:
        if not strict or s["to"] == a["from"]:
            return "deposit_and_mint"
    if s["to"] == ZERO and s["from"] != ZERO and a["from"] == s["token"]:
        if not strict or a["to"] == s["from"]:
            return "withdraw_and_burn"
    return None


def best_pairings(events, strict):
    """All maximum pairings as multisets of (source, target, action)."""
    n = len(events)
    best = [0, set()]

    def rec(i, used, acc):
        while i < n and i in used:
            i += 1
        if i == n:
            key = tuple(sorted(acc))
            if len(acc) > best[0]:
                best[0], best[1] = len(acc), {key}
            elif len(acc) == best[0]:
                best[1].add(key)
            return
        rec(i + 1, used | {i}, acc)
        for j in range(i + 1, n):
            if j in used:
                continue
            for a, s in ((i, j), (j, i)):
                act = action(events[a], events[s], strict)
                if act:
                    rec(i + 1, used | {i, j},
                        acc + [(events[a]["token"], events[s]["token"], act)])

    rec(0, frozenset(), [])
    return best[1]


def main(path):
    lines = 0
    malformed = 0
    transfers = 0
    txs = {}
    order = []
    with open(path) as f:
        for raw in f:
            if not raw.strip():
                continue
            lines += 1
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError:
                malformed += 1
                continue
            if not valid(obj):
                malformed += 1
                continue
            ev = decode(obj)
            if ev is None:
                continue
            transfers += 1
            h = obj["transactionHash"].lower()
            if h not in txs:
                txs[h] = []
                order.append(h)
            txs[h].append(ev)

    out = {
        "lines": lines,
        "malformed": malformed,
        "valid_logs": lines - malformed,
        "expected_transfers": transfers,
        "expected_tx_count": len(order),
    }
    for mode in ("loose", "strict"):
        counts = Counter()
        edges = Counter()
        for h in order:
            options = best_pairings(txs[h], mode == "strict")
            if len(options) != 1:
                raise SystemExit("ambiguous pairing in " + h)
            for src, dst, act in next(iter(options)):
                counts[act] += 1
                edges[(src, dst, act)] += 1
        pairs = {(s, d) for s, d, _ in edges}
        two_way = {(s, d) for s, d in pairs
                   if edges[(s, d, "deposit_and_mint")] and edges[(s, d, "withdraw_and_burn")]}
        out[mode] = {
            "meta_events": sum(counts.values()),
            "deposit_and_mint": counts["deposit_and_mint"],
            "withdraw_and_burn": counts["withdraw_and_burn"],
            "unfiltered_edges": len(pairs),
            "filtered_edges": len(two_way),
        }
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "logs_fixture.jsonl")
