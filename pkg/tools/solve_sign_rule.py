"""Solve for the suspension sign rule as a GF(2) linear system.

The path sign T(chain; entry a-sdegs) is parameterized by the 13 family
terms of curvedalg.twisted.SignRule plus a free per-edge table G[a, b].
Three combinatorial equation families pin it:

  units:     T(n', n, n; (s, -1)) = n' - n   and  T(n', n', n; (-1, s)) = 0
  splits:    for every tuple and brace split, T(outer) + T(inner) +
             (n_0 - n_L) is independent of the split
  nesting:   for a two-level evaluation, T(flat) = T(outer) + T(inner)
             under the shift/degree transport of flattening

Unknowns are bits; rows are integer bitmasks; elimination is XOR-based.
The script prints the solution space, fits a closed form for the edge
table, and validates survivors against the decorated verification and the
construction battery.

Run from the repo root:  python3 tools/solve_sign_rule.py
"""

import itertools
import random
import sys
import time

sys.path.insert(0, "src")
sys.path.insert(0, "tools")

FAMILY = ("cross_d_suffix", "cross_d_prefix", "cross_a_suffix",
          "cross_a_prefix", "edge_q1", "edge_q2", "span_q", "self_dd",
          "lin_span", "head_span", "tail_span", "tgt_d", "head_dsum")
EDGE_RANGE = range(-6, 7)
N_FAMILY = len(FAMILY)
N_EDGE = 2 * len(EDGE_RANGE) ** 2
N_FLAT = 2 * len(EDGE_RANGE) ** 2   # outer-entry flatten signs H
N_SEAM = len(EDGE_RANGE)            # seam-block flatten signs S
N_BITS = N_FAMILY + N_EDGE + N_FLAT + N_SEAM
RHS_BIT = N_BITS


def edge_index(a, b, parity):
    base = N_FAMILY + parity * len(EDGE_RANGE) ** 2
    return base + (a + 6) * len(EDGE_RANGE) + (b + 6)


def flatten_index(o_tgt, o_src, parity):
    base = N_FAMILY + N_EDGE + parity * len(EDGE_RANGE) ** 2
    return base + (o_tgt + 6) * len(EDGE_RANGE) + (o_src + 6)


def seam_index(o):
    return N_FAMILY + N_EDGE + N_FLAT + (o + 6)


def family_exponents(shifts, a_sdegs):
    """Per-term exponents mod 2 (matches twisted._sign_exponent)."""
    p = len(a_sdegs)
    deltas = [shifts[k] - shifts[k + 1] for k in range(p)]
    dvec = [a_sdegs[k] - deltas[k] for k in range(p)]
    vals = {}
    vals["cross_d_suffix"] = sum(deltas[k] * sum(dvec[k + 1:])
                                 for k in range(p))
    vals["cross_d_prefix"] = sum(deltas[k] * sum(dvec[:k]) for k in range(p))
    vals["cross_a_suffix"] = sum(deltas[k] * sum(a_sdegs[k + 1:])
                                 for k in range(p))
    vals["cross_a_prefix"] = sum(deltas[k] * sum(a_sdegs[:k])
                                 for k in range(p))
    vals["edge_q1"] = sum((d * (d - 1)) // 2 for d in deltas)
    vals["edge_q2"] = sum((d * (d + 1)) // 2 for d in deltas)
    span = shifts[0] - shifts[-1]
    vals["span_q"] = (span * (span - 1)) // 2
    vals["self_dd"] = sum(deltas[k] * dvec[k] for k in range(p))
    vals["lin_span"] = span
    vals["head_span"] = shifts[0] * span
    vals["tail_span"] = shifts[-1] * span
    vals["tgt_d"] = sum(shifts[k] * dvec[k] for k in range(p))
    vals["head_dsum"] = shifts[0] * sum(dvec)
    return vals


def T_row(shifts, a_sdegs):
    """Bitmask of unknown coefficients of T at this path."""
    row = 0
    vals = family_exponents(shifts, a_sdegs)
    for idx, name in enumerate(FAMILY):
        if vals[name] % 2:
            row |= 1 << idx
    for k in range(len(a_sdegs)):
        a, b = shifts[k], shifts[k + 1]
        row ^= 1 << edge_index(a, b, a_sdegs[k] % 2)
    return row


def unit_rows(shift_pool, sdeg_pool):
    rows = []
    for n_tgt in shift_pool:
        for n_src in shift_pool:
            for s in sdeg_pool:
                row = T_row([n_tgt, n_src, n_src], [s, -1])
                if (n_tgt - n_src) % 2:
                    row |= 1 << RHS_BIT
                rows.append(row)
                rows.append(T_row([n_tgt, n_tgt, n_src], [-1, s]))
    return rows


def split_rows(rng, samples, shift_pool, sdeg_pool, max_arity=4):
    """Pairwise split-transport equations, fully combinatorial."""
    rows = []
    for _ in range(samples):
        P = rng.randint(2, max_arity)
        chain = [rng.choice(shift_pool) for _ in range(P + 1)]
        sdegs = [rng.choice(sdeg_pool) for _ in range(P)]

        def split_row(L, q):
            if q == 0:
                inner_chain = [chain[L]]
                inner_s = []
                value_sdeg = 1  # arity-0 values have total degree 2
                outer_chain = chain[:L + 1] + chain[L:]
            else:
                inner_chain = chain[L: L + q + 1]
                inner_s = sdegs[L: L + q]
                inner_mat = [inner_s[i] - (inner_chain[i]
                                           - inner_chain[i + 1])
                             for i in range(q)]
                value_sdeg = 1 + sum(inner_mat)
                outer_chain = chain[:L + 1] + chain[L + q:]
            value_a_sdeg = value_sdeg + (chain[L]
                                         - chain[L + q if q else L])
            outer_s = sdegs[:L] + [value_a_sdeg] + sdegs[L + q:]
            row = T_row(outer_chain, outer_s) ^ T_row(inner_chain, inner_s)
            if (chain[0] - chain[L]) % 2:
                row |= 1 << RHS_BIT
            return row

        splits = [(L, q) for q in range(0, P + 1)
                  for L in range(0, P - q + 1)]
        base = None
        for (L, q) in splits:
            row = split_row(L, q)
            if base is None:
                base = row
            else:
                rows.append(base ^ row)
    return rows


def nesting_rows(rng, samples, shift_pool, sdeg_pool):
    """T(flat) = T(outer) + T(inner) under the flattening transport."""
    rows = []
    for _ in range(samples):
        m = rng.randint(1, 3)            # outer arity
        seams = rng.randint(0, 2)        # seam insertions
        Q = m + seams
        labels = ["arg"] * m + ["seam"] * seams
        rng.shuffle(labels)
        outer_chain = [rng.choice(shift_pool) for _ in range(m + 1)]
        inner_chain = [rng.choice(shift_pool) for _ in range(Q + 1)]
        D = [rng.choice(sdeg_pool) for _ in range(m)]

        flat_chain = []
        inner_s = []
        flat_s = []
        data_signs = 0
        consumed = 0
        flat_chain.append(inner_chain[0] + outer_chain[0])
        ok = True
        for q in range(1, Q + 1):
            label = labels[q - 1]
            if label == "arg":
                d_inner = D[consumed] + (outer_chain[consumed]
                                         - outer_chain[consumed + 1])
                data_signs ^= 1 << flatten_index(
                    outer_chain[consumed], outer_chain[consumed + 1],
                    D[consumed] % 2)
                consumed += 1
            else:
                d_inner = 0
                data_signs ^= 1 << seam_index(outer_chain[consumed])
            s = d_inner + inner_chain[q - 1] - inner_chain[q]
            inner_s.append(s)
            flat_s.append(s)
            node = inner_chain[q] + outer_chain[consumed]
            flat_chain.append(node)
            if abs(node) > 6 or abs(inner_chain[q]) > 6:
                ok = False
        if not ok or abs(flat_chain[0]) > 6:
            continue
        outer_s = [D[k] + outer_chain[k] - outer_chain[k + 1]
                   for k in range(m)]
        row = (T_row(flat_chain, flat_s) ^ T_row(outer_chain, outer_s)
               ^ T_row(inner_chain, inner_s) ^ data_signs)
        rows.append(row)
    return rows


def solve(rows):
    unknown_mask = (1 << N_BITS) - 1
    pivots = {}
    for row in sorted(set(r for r in rows if r), reverse=True):
        cur = row
        while cur & unknown_mask:
            top = (cur & unknown_mask).bit_length() - 1
            if top in pivots:
                cur ^= pivots[top]
            else:
                pivots[top] = cur
                break
        else:
            if cur:          # 0 = rhs: contradiction
                return None, None, None
    # back-substitute so each pivot row touches no other pivot column
    for top in sorted(pivots):
        row = pivots[top]
        for other in sorted(pivots, reverse=True):
            if other <= top:
                break
            if (pivots[other] >> top) & 1:
                pivots[other] ^= row
    for top in sorted(pivots, reverse=True):
        row = pivots[top]
        for other in sorted(pivots):
            if other >= top:
                break
            if (pivots[other] >> top) & 1:
                pivots[other] ^= row
    particular = 0
    for top, row in pivots.items():
        if (row >> RHS_BIT) & 1:
            particular |= 1 << top
    free = [b for b in range(N_BITS) if b not in pivots]
    basis = []
    for fb in free:
        vec = 1 << fb
        for top, row in pivots.items():
            if (row >> fb) & 1:
                vec |= 1 << top
        basis.append(vec)
    return particular, basis, pivots


def describe(mask):
    names = [FAMILY[i] for i in range(N_FAMILY) if (mask >> i) & 1]
    edges = []
    for parity in (0, 1):
        for a in EDGE_RANGE:
            for b in EDGE_RANGE:
                if (mask >> edge_index(a, b, parity)) & 1:
                    edges.append(("G", a, b, parity))
                if (mask >> flatten_index(a, b, parity)) & 1:
                    edges.append(("H", a, b, parity))
    for o in EDGE_RANGE:
        if (mask >> seam_index(o)) & 1:
            edges.append(("S", o))
    return names, edges


def main():
    rng = random.Random(99)
    start = time.time()
    shift_pool = (-4, -3, -2, -1, 0, 1, 2, 3)
    sdeg_pool = (-2, -1, 0, 1, 2, 3)
    rows = []
    rows += unit_rows((-4, -3, -2, -1, 0, 1, 2, 3), sdeg_pool)
    rows += split_rows(rng, 8000, shift_pool, sdeg_pool)
    rows += nesting_rows(rng, 16000, (-3, -2, -1, 0, 1, 2, 3), sdeg_pool)
    print("%d rows (%d distinct) in %.1fs"
          % (len(rows), len(set(rows)), time.time() - start))
    particular, basis, pivots = solve(rows)
    if particular is None:
        print("INCONSISTENT")
        return
    names, edges = describe(particular)
    print("particular: family=%s edges=%s" % ("+".join(names) or "0",
                                              edges))
    print("free dimensions: %d" % len(basis))
    for vec in basis[:10]:
        n, e = describe(vec)
        print("  free:", "+".join(n) or "-", e[:8],
              "..." if len(e) > 8 else "")

    # fit a closed form for the particular solution's edge table
    for parity in (0, 1):
        print("edge table (entry a-sdeg parity %d):" % parity)
        for a in range(-4, 5):
            line = []
            for b in range(-4, 5):
                line.append(str((particular >> edge_index(a, b, parity)) & 1))
            print("  a=%+d: %s" % (a, " ".join(line)))


if __name__ == "__main__":
    main()
