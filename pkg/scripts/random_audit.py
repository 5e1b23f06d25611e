#!/usr/bin/env python3
"""Seeded property sweeps beyond the pinned acceptance sizes.

Usage: python scripts/random_audit.py [--quivers N] [--spaces N] [--seq N]
                                      [--seed-base S] [--max-n N]

Reruns the heavy cross-checks (normality oracle agreement, realization and
reconstruction round trips, tower laws, clade formulas) on as many fresh
seeds as asked and prints a one-line verdict per family.
"""

from __future__ import annotations

import argparse

import phyloquiver as pq
from phyloquiver import clades, generators as gen


def audit_oracle(count, base, max_n):
    checked = 0
    for s in range(count):
        q = gen.gen_random_monotonous(2 + s % (max_n - 1), 0.15 + 0.03 * (s % 8),
                                      seed=base + s)
        bound = 2 * len(q.vertices)
        for v in q.vertices:
            want = pq.is_phylogenetic_vertex(q, v)
            got = all(pq.verify_universal_bounded(q, a, bound)
                      for a in pq.short_full_evolutions(q, v))
            assert want == got, (s, v)
            checked += 1
    print(f"oracle agreement          ok on {checked} vertices")


def audit_round_trips(count, base):
    for s in range(count):
        seq = gen.gen_random_esequence(1 + s % 5, 4 + s % 9, 0.35, seed=base + s)
        assert pq.esequence_isomorphic(
            pq.evolutionary_sequence(pq.realize_esequence(seq)), seq
        ), s
        seq = gen.gen_random_esequence(2 + s % 5, 3 + s % 6, 0.4, seed=base + s,
                                       single_root=True, surjective=True)
        n = seq.top
        rebuilt = pq.reconstruct(
            pq.terminal_ultrametric(seq, n), pq.induce_prec(seq, n), n
        )
        assert pq.esequence_isomorphic(rebuilt, seq), s
    print(f"E-sequence round trips    ok on {count} realizations + {count} reconstructions")


def audit_towers(count, base, max_n):
    for s in range(count):
        x = gen.gen_random_ultrametric(1 + s % max_n, depth=1 + s % 5, seed=base + s)
        t = pq.tower_u(x)
        assert len(t) == pq.n_nonzero(x), s
        y = gen.gen_random_metric(1 + s % max_n, seed=base + s)
        tv = pq.tower_v(y)
        assert pq.is_trim(tv.terminal), s
        assert all(pq.classify_map(m).is_drift for m in tv.maps), s
    print(f"towers                    ok on {count} ultrametric + {count} metric spaces")


def audit_clades(count, base, max_n):
    pairs = 0
    for s in range(count):
        q = gen.gen_random_phylogenetic(3 + s % (max_n - 2), 0.3, seed=base + s)
        for a in q.vertices:
            if not clades.is_regular(q, a):
                continue
            c = clades.clade(q, a)
            assert pq.is_phylogenetic_quiver(c.quiver), (s, a)
            direct = c.heights()
            for b in c.members:
                assert clades.clade_height(q, a, b) == direct[b], (s, a, b)
                pairs += 1
    print(f"clade formulas            ok on {pairs} apex/descendant pairs")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quivers", type=int, default=300)
    parser.add_argument("--spaces", type=int, default=200)
    parser.add_argument("--seq", type=int, default=150)
    parser.add_argument("--seed-base", type=int, default=10_000)
    parser.add_argument("--max-n", type=int, default=9)
    args = parser.parse_args()
    audit_oracle(args.quivers, args.seed_base, args.max_n)
    audit_round_trips(args.seq, args.seed_base)
    audit_towers(args.spaces, args.seed_base, args.max_n)
    audit_clades(args.quivers // 3, args.seed_base, args.max_n)


if __name__ == "__main__":
    main()
