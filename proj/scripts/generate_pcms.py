#!/usr/bin/env python3
"""Regenerate the parity-check matrices shipped in codes/.

Every matrix comes from a published, deterministic construction:

  hamming_7_4    classic (7,4) Hamming code, positional form
  tree_3_1       2-check tree code, used as a BP sanity fixture
  reg_96_48      seeded (3,6)-regular LDPC fixture (socket construction)
  bch_31_16      narrow-sense BCH, t=3, GF(2^5) via x^5+x^2+1
  bch_63_45      narrow-sense BCH, t=3, GF(2^6) via x^6+x+1
  ldpc_121_70    array LDPC, q=11, 5 circulant block rows
  ldpc_121_80    array LDPC, q=11, 4 circulant block rows
  turbo_132_40   LTE turbo code (36.212), K=40, QPP(3,10), rate 1/3 + tails,
                 dense parity-check form derived from the systematic generator
  wran_384_320   rate-5/6 QC-LDPC, 802.16e-family base matrix, Z=16,
                 scale-and-floor shift adaptation

BCH and turbo matrices are emitted in systematic form [I | P^T]; the array
and QC-LDPC matrices keep their natural sparse form, including linearly
dependent rows where the construction produces them (the array codes).

Usage: python3 scripts/generate_pcms.py [out_dir]   (default: codes/)
"""

import os
import random
import sys

# --------------------------------------------------------------------------
# GF(2^m) helpers (bitmask polynomials, bit i = coefficient of x^i)
# --------------------------------------------------------------------------

def gf_mul(a, b, m, prim):
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if (a >> m) & 1:
            a ^= prim
    return r


def gf_pow(a, e, m, prim):
    r = 1
    while e:
        if e & 1:
            r = gf_mul(r, a, m, prim)
        a = gf_mul(a, a, m, prim)
        e >>= 1
    return r


def min_poly(i, m, prim):
    """Minimal polynomial of alpha^i, as a GF(2) coefficient list (low degree first)."""
    order = (1 << m) - 1
    cls, j = set(), i % order
    while j not in cls:
        cls.add(j)
        j = (j * 2) % order
    coeffs = [1]
    for j in sorted(cls):
        root = gf_pow(2, j, m, prim)
        nxt = [0] * (len(coeffs) + 1)
        for d, c in enumerate(coeffs):
            nxt[d + 1] ^= c
            nxt[d] ^= gf_mul(c, root, m, prim)
        coeffs = nxt
    assert all(c in (0, 1) for c in coeffs)
    return coeffs


def poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] ^= bj
    return out


def poly_mod(a, g):
    a = list(a)
    dg = len(g) - 1
    for i in range(len(a) - 1, dg - 1, -1):
        if a[i]:
            for j in range(len(g)):
                a[i - dg + j] ^= g[j]
    return a[:dg]


def bch_pcm(n, k, m, prim, t):
    """Systematic H = [I_{n-k} | P^T] for the narrow-sense BCH code."""
    g, seen = [1], set()
    for i in range(1, 2 * t, 2):
        order = (1 << m) - 1
        cls, j = set(), i % order
        while j not in cls:
            cls.add(j)
            j = (j * 2) % order
        rep = min(cls)
        if rep not in seen:
            seen.add(rep)
            g = poly_mul(g, min_poly(i, m, prim))
    r = n - k
    assert len(g) - 1 == r, f"generator degree {len(g)-1}, expected {r}"
    H = [[1 if c == row else 0 for c in range(r)] + [0] * k for row in range(r)]
    for i in range(k):
        rem = poly_mod([0] * (r + i) + [1], g)
        for row in range(r):
            H[row][r + i] = rem[row]
    return H


# --------------------------------------------------------------------------
# other constructions
# --------------------------------------------------------------------------

def array_pcm(q, block_rows):
    """Block matrix of circulants P^(i*j), P the q x q single-step cyclic shift."""
    H = [[0] * (q * q) for _ in range(block_rows * q)]
    for i in range(block_rows):
        for j in range(q):
            for s in range(q):
                H[i * q + s][j * q + (s + i * j) % q] = 1
    return H


def lte_turbo_pcm(K=40, f1=3, f2=10):
    """Dense PCM of the rate-1/3 LTE turbo code with trellis termination.

    Each transmitted bit is a GF(2) functional of the K message bits, so the
    encoder yields a systematic generator; H follows as [P^T | I] laid out in
    transmit order (systematic stream first).
    """
    def rsc(u_cols):
        # feedback 1 + D^2 + D^3, feedforward 1 + D + D^3
        s = [[0] * K for _ in range(3)]
        par, tail_sys, tail_par = [], [], []
        for t in range(K):
            a = [(u_cols[t][b] + s[1][b] + s[2][b]) % 2 for b in range(K)]
            z = [(a[b] + s[0][b] + s[2][b]) % 2 for b in range(K)]
            par.append(z)
            s = [a, s[0], s[1]]
        for _ in range(3):
            u = [(s[1][b] + s[2][b]) % 2 for b in range(K)]
            z = [(s[0][b] + s[2][b]) % 2 for b in range(K)]  # feedback input nulls a
            tail_sys.append(u)
            tail_par.append(z)
            s = [[0] * K, s[0], s[1]]
        return par, tail_sys, tail_par

    unit = [[1 if r == c else 0 for r in range(K)] for c in range(K)]
    pi = [(f1 * i + f2 * i * i) % K for i in range(K)]
    p1, ts1, tp1 = rsc(unit)
    p2, ts2, tp2 = rsc([unit[pi[i]] for i in range(K)])

    cols = unit + p1 + p2 + ts1 + tp1 + ts2 + tp2  # each entry: length-K functional
    n = len(cols)
    H = [[0] * n for _ in range(n - K)]
    other = list(range(K, n))
    for r, j in enumerate(other):
        H[r][j] = 1
        for b in range(K):
            H[r][b] = cols[j][b]  # parity column j depends on message bit b
    return H


WRAN_BASE = [
    [1, 25, 55, -1, 47, 4, -1, 91, 84, 8, 86, 52, 82, 33, 5, 0, 36, 20, 4, 77, 80, 0, -1, -1],
    [-1, 6, -1, 36, 40, 47, 12, 79, 47, -1, 41, 21, 12, 71, 14, 72, 0, 44, 49, 0, 0, 0, 0, -1],
    [51, 81, 83, 4, 67, -1, 21, -1, 31, 24, 91, 61, 81, 9, 86, 78, 60, 88, 67, 15, -1, -1, 0, 0],
    [50, -1, 50, 15, -1, 36, 13, 10, 11, 20, 53, 90, 29, 92, 57, 30, 84, 92, 11, 66, 80, -1, -1, 0],
]


def qc_pcm(base, z, z0=96):
    rows, cols = len(base), len(base[0])
    H = [[0] * (cols * z) for _ in range(rows * z)]
    for i in range(rows):
        for j in range(cols):
            p = base[i][j]
            if p < 0:
                continue
            sh = p * z // z0
            for r in range(z):
                H[i * z + r][j * z + (r + sh) % z] = 1
    return H


def regular_pcm(n, m, col_deg, seed):
    """Socket-model (col_deg, n*col_deg/m)-regular code with collision repair."""
    row_deg = n * col_deg // m
    assert row_deg * m == n * col_deg
    rng = random.Random(seed)
    cols = [set() for _ in range(n)]
    for _ in range(col_deg):
        order = list(range(n))
        rng.shuffle(order)
        assign = {}
        for idx, c in enumerate(order):
            assign[c] = idx * m // n  # m rows, each takes row_deg/col_deg columns per layer
        # repair columns that already touch their assigned row
        for c in range(n):
            tries = 0
            while assign[c] in cols[c] and tries < 10 * n:
                c2 = rng.randrange(n)
                if assign[c2] not in cols[c] and assign[c] not in cols[c2]:
                    assign[c], assign[c2] = assign[c2], assign[c]
                tries += 1
        for c in range(n):
            if assign[c] in cols[c]:
                raise RuntimeError("collision repair failed, pick another seed")
            cols[c].add(assign[c])
    H = [[0] * n for _ in range(m)]
    for c in range(n):
        for r in cols[c]:
            H[r][c] = 1
    assert all(sum(row) == row_deg for row in H)
    return H


# --------------------------------------------------------------------------
# emission and checks
# --------------------------------------------------------------------------

def gf2_rank(H):
    rows = []
    for r in H:
        v = 0
        for j, x in enumerate(r):
            if x:
                v |= 1 << j
        rows.append(v)
    rank = 0
    for col in range(len(H[0])):
        bit = 1 << col
        piv = next((i for i in range(rank, len(rows)) if rows[i] & bit), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i] & bit:
                rows[i] ^= rows[rank]
        rank += 1
    return rank


def write_alist(path, H):
    m, n = len(H), len(H[0])
    col_idx = [[r + 1 for r in range(m) if H[r][c]] for c in range(n)]
    row_idx = [[c + 1 for c in range(n) if H[r][c]] for r in range(m)]
    cmax = max(len(x) for x in col_idx)
    rmax = max(len(x) for x in row_idx)
    with open(path, "w") as f:
        f.write(f"{n} {m}\n{cmax} {rmax}\n")
        f.write(" ".join(str(len(x)) for x in col_idx) + "\n")
        f.write(" ".join(str(len(x)) for x in row_idx) + "\n")
        for x in col_idx:
            f.write(" ".join(str(v) for v in x + [0] * (cmax - len(x))) + "\n")
        for x in row_idx:
            f.write(" ".join(str(v) for v in x + [0] * (rmax - len(x))) + "\n")


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "codes")
    os.makedirs(out, exist_ok=True)

    codes = {
        "hamming_7_4": [[1, 0, 1, 0, 1, 0, 1],
                        [0, 1, 1, 0, 0, 1, 1],
                        [0, 0, 0, 1, 1, 1, 1]],
        "tree_3_1": [[1, 1, 0],
                     [0, 1, 1]],
        "reg_96_48": regular_pcm(96, 48, 3, seed=5),
        "bch_31_16": bch_pcm(31, 16, 5, 0b100101, 3),
        "bch_63_45": bch_pcm(63, 45, 6, 0b1000011, 3),
        "ldpc_121_70": array_pcm(11, 5),
        "ldpc_121_80": array_pcm(11, 4),
        "turbo_132_40": lte_turbo_pcm(),
        "wran_384_320": qc_pcm(WRAN_BASE, 16),
    }
    # rows, cols, rank, ones: frozen so accidental edits to the constructions fail loudly
    expect = {
        "hamming_7_4": (3, 7, 3, 12),
        "tree_3_1": (2, 3, 2, 4),
        "reg_96_48": (48, 96, 48, 288),
        "bch_31_16": (15, 31, 15, 140),
        "bch_63_45": (18, 63, 18, 368),
        "ldpc_121_70": (55, 121, 51, 605),
        "ldpc_121_80": (44, 121, 41, 484),
        "turbo_132_40": (92, 132, 92, 1388),
        "wran_384_320": (64, 384, 64, 1280),
    }
    for name, H in codes.items():
        rows, cols = len(H), len(H[0])
        rank = gf2_rank(H)
        ones = sum(sum(r) for r in H)
        want = expect[name]
        if (rows, cols, rank, ones) != want:
            raise SystemExit(f"{name}: got {(rows, cols, rank, ones)}, want {want}")
        write_alist(os.path.join(out, name + ".alist"), H)
        print(f"{name}: {rows}x{cols} rank={rank} ones={ones} -> ok")


if __name__ == "__main__":
    main()
