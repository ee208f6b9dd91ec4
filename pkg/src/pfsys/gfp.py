"""Vectorized mod-p engines behind the finite-field enumerations.

Everything here works on plain numpy integer arrays reduced mod p; the exact
(rational) layer never depends on results from this module without
re-verification.  The two workhorses are projective-space sweeps (rank-2
point counting) and Grassmannian sweeps by reduced-echelon cells (isotropic
subspace search and exhaustive counting).

Echelon cells are visited in colex order of their pivot columns and the free
entries of a cell are enumerated lexicographically, so "first hit" results
are deterministic.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .exterior import DIM, PAIRS, PAIR_INDEX, QUADS, AlternatingForm
from .scalars import BadPrime, reduce_mod

_SPLITS = []
for _q in QUADS:
    a, b, c, d = _q
    _SPLITS.append(
        (
            (PAIR_INDEX[(a, b)], PAIR_INDEX[(c, d)], 1),
            (PAIR_INDEX[(a, c)], PAIR_INDEX[(b, d)], -1),
            (PAIR_INDEX[(a, d)], PAIR_INDEX[(b, c)], 1),
        )
    )


def form_vector_mod(omega: AlternatingForm, p: int) -> np.ndarray:
    return np.array([reduce_mod(c, p).value for c in omega.coeffs], dtype=np.int64)


def form_matrix_mod(omega: AlternatingForm, p: int) -> np.ndarray:
    m = np.zeros((DIM, DIM), dtype=np.int64)
    for k, (i, j) in enumerate(PAIRS):
        v = reduce_mod(omega.coeffs[k], p).value
        m[i - 1, j - 1] = v
        m[j - 1, i - 1] = (-v) % p
    return m


def generator_matrix_mod(generators: Sequence[AlternatingForm], p: int) -> np.ndarray:
    """(n+1) x 15 coefficient matrix of the generators, reduced mod p."""
    return np.stack([form_vector_mod(w, p) for w in generators])


def plucker_zero_mask(v: np.ndarray, p: int) -> np.ndarray:
    """For an (N, 15) array of form coefficients: which rows have vanishing
    wedge square, i.e. rank <= 2."""
    ok = np.ones(v.shape[0], dtype=bool)
    for (p1, q1, s1), (p2, q2, s2), (p3, q3, s3) in _SPLITS:
        acc = (
            s1 * v[:, p1] * v[:, q1]
            + s2 * v[:, p2] * v[:, q2]
            + s3 * v[:, p3] * v[:, q3]
        ) % p
        ok &= acc == 0
        if not ok.any():
            break
    return ok


def tuples_mod_p(k: int, p: int) -> np.ndarray:
    """All p^k tuples over F_p in lexicographic order, shape (p^k, k)."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((p,) * k).reshape(k, -1).T
    return np.ascontiguousarray(grids, dtype=np.int64)


def projective_reps(n: int, p: int) -> Iterator[np.ndarray]:
    """Normalized representatives of P^n(F_p), yielded in blocks.

    Block ell holds the points whose first nonzero coordinate is at position
    ell (0-based) and normalized to 1; within a block the free coordinates
    run lexicographically.
    """
    for lead in range(n + 1):
        free = n - lead
        tail = tuples_mod_p(free, p)
        block = np.zeros((tail.shape[0], n + 1), dtype=np.int64)
        block[:, lead] = 1
        if free:
            block[:, lead + 1 :] = tail
        yield block


def count_rank_le2_points(
    gens_mod: np.ndarray, p: int, max_hits: int = 32
) -> tuple[int, list[np.ndarray]]:
    """Count points of P(A)(F_p) whose form has rank <= 2.

    Returns (count, hit coefficient vectors) with at most max_hits hits
    recorded (in enumeration order).  A zero combination (which would mean
    the generators became dependent mod p) is counted separately as a hit
    with rank 0 and excluded from the count.
    """
    count = 0
    hits: list[np.ndarray] = []
    for block in projective_reps(gens_mod.shape[0] - 1, p):
        v = (block @ gens_mod) % p
        mask = plucker_zero_mask(v, p)
        nonzero = v.any(axis=1)
        good = mask & nonzero
        count += int(good.sum())
        if len(hits) < max_hits and good.any():
            for idx in np.nonzero(good)[0]:
                hits.append(block[idx].copy())
                if len(hits) >= max_hits:
                    break
    return count, hits


def projective_point_count(n: int, p: int) -> int:
    return (p ** (n + 1) - 1) // (p - 1)


# ---------------------------------------------------------------------------
# Grassmannian echelon cells


def pivot_cells(k: int, n: int = DIM) -> list[tuple[int, ...]]:
    """Pivot-column tuples of Gr(k, n) echelon cells, in colex order."""
    return sorted(itertools.combinations(range(n), k), key=lambda t: tuple(reversed(t)))


def cell_free_columns(pivots: tuple[int, ...], n: int = DIM) -> list[list[int]]:
    """Free column positions of each row for one echelon cell."""
    return [
        [c for c in range(pc + 1, n) if c not in pivots]
        for pc in pivots
    ]


def cell_row_block(pivots: tuple[int, ...], row: int, p: int, n: int = DIM) -> np.ndarray:
    """All mod-p candidates for one echelon row of a cell, lexicographically."""
    free = cell_free_columns(pivots, n)[row]
    tail = tuples_mod_p(len(free), p)
    block = np.zeros((tail.shape[0], n), dtype=np.int64)
    block[:, pivots[row]] = 1
    if free:
        block[:, free] = tail
    return block


def _pairings(rows_a: np.ndarray, rows_b: np.ndarray, mats: Sequence[np.ndarray], p: int) -> np.ndarray:
    """omega(a, b) for every form and all (a, b) pairs; shape (m, A, B)."""
    out = np.empty((len(mats), rows_a.shape[0], rows_b.shape[0]), dtype=np.int64)
    for k, m in enumerate(mats):
        out[k] = (rows_a @ m % p) @ rows_b.T % p
    return out


def isotropic_subspaces(
    generators: Sequence[AlternatingForm],
    k: int,
    p: int,
    find_limit: int | None = None,
) -> tuple[int, list[np.ndarray]]:
    """Exhaustive sweep of Gr(k, 6)(F_p) for totally isotropic subspaces.

    Returns the exact count and, when find_limit is not None, up to that many
    echelon matrices in deterministic (cell-colex, then lex) order.  The sweep
    filters echelon row pairs (r1, r2) vectorized, then extends row by row;
    every subspace is visited through its unique reduced echelon basis.
    """
    mats = [form_matrix_mod(w, p) for w in generators]
    count = 0
    found: list[np.ndarray] = []
    for pivots in pivot_cells(k):
        if k == 1:
            block = cell_row_block(pivots, 0, p)
            # single rows are always isotropic for alternating forms
            count += block.shape[0]
            if find_limit is not None:
                for row in block:
                    if len(found) >= find_limit:
                        break
                    found.append(row[None, :].copy())
            continue
        r1 = cell_row_block(pivots, 0, p)
        r2 = cell_row_block(pivots, 1, p)
        pair_ok = np.ones((r1.shape[0], r2.shape[0]), dtype=bool)
        for vals in _pairings(r1, r2, mats, p):
            pair_ok &= vals == 0
            if not pair_ok.any():
                break
        if not pair_ok.any():
            continue
        idx1, idx2 = np.nonzero(pair_ok)
        for i1, i2 in zip(idx1, idx2):
            base = [r1[i1], r2[i2]]
            c, sols = _extend_isotropic(base, pivots, 2, k, mats, p, find_limit, len(found))
            count += c
            found.extend(sols)
            if find_limit is not None and len(found) >= find_limit:
                # keep counting exactly, but stop materializing
                find_limit = 0
    return count, found


def _extend_isotropic(base, pivots, row, k, mats, p, find_limit, already):
    """Extend a partial echelon basis by the remaining rows, exactly."""
    if row == k:
        if find_limit is not None and (find_limit == 0 or already >= find_limit):
            return 1, []
        return 1, [np.stack(base)]
    cand = cell_row_block(pivots, row, p)
    ok = np.ones(cand.shape[0], dtype=bool)
    for m in mats:
        for r in base:
            vals = (cand @ ((m @ r) % p)) % p
            ok &= vals == 0
        if not ok.any():
            return 0, []
    total = 0
    out: list[np.ndarray] = []
    for idx in np.nonzero(ok)[0]:
        c, sols = _extend_isotropic(
            base + [cand[idx]], pivots, row + 1, k, mats, p, find_limit,
            already + len(out),
        )
        total += c
        out.extend(sols)
    return total, out


def s1_rank_profile(
    generators: Sequence[AlternatingForm], p: int
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Points u of P(W)(F_p) where the covectors omega_k(u, .) span dim <= 1.

    Returns (points with span dim 0, points with span dim 1), each a list of
    normalized coordinate vectors in enumeration order.
    """
    mats = [form_matrix_mod(w, p) for w in generators]
    m = len(mats)
    dim0: list[np.ndarray] = []
    dim1: list[np.ndarray] = []
    for block in projective_reps(DIM - 1, p):
        rows = np.stack([(block @ mat) % p for mat in mats], axis=1)  # (N, m, 6)
        zero = ~rows.any(axis=(1, 2))
        low = np.ones(block.shape[0], dtype=bool)
        for k1 in range(m):
            for k2 in range(k1 + 1, m):
                a, b = rows[:, k1, :], rows[:, k2, :]
                for c1 in range(DIM):
                    for c2 in range(c1 + 1, DIM):
                        minor = (a[:, c1] * b[:, c2] - a[:, c2] * b[:, c1]) % p
                        low &= minor == 0
                    if not low.any():
                        break
                if not low.any():
                    break
            if not low.any():
                break
        # also need rank(single stacked matrix) <= 1 within each row: rows of
        # a single skew form value are one covector each, so the only missing
        # case is m == 1 handled by the pair loop being empty.
        for idx in np.nonzero(zero)[0]:
            dim0.append(block[idx].copy())
        for idx in np.nonzero(low & ~zero)[0]:
            dim1.append(block[idx].copy())
    return dim0, dim1


def s2_unstable_pairs(
    generators: Sequence[AlternatingForm], p: int, find_limit: int = 4
) -> list[np.ndarray]:
    """Echelon bases of 2-planes U with dim span{omega_k(u, .) : u in U} <= 1
    and U annihilating that span.  Deterministic order, up to find_limit."""
    mats = [form_matrix_mod(w, p) for w in generators]
    dim0, dim1 = s1_rank_profile(generators, p)
    candidates = dim0 + dim1
    if not candidates:
        return []
    cand_arr = np.stack(candidates)
    found: list[np.ndarray] = []
    for pivots in pivot_cells(2):
        r1_all = cell_row_block(pivots, 0, p)
        # restrict r1 to low-rank candidates (a necessary condition)
        cand_set = {tuple(v) for v in cand_arr.tolist()}
        keep = np.array([tuple(r) in cand_set for r in r1_all.tolist()])
        if not keep.any():
            continue
        r1s = r1_all[keep]
        r2 = cell_row_block(pivots, 1, p)
        for r1 in r1s:
            ok = np.ones(r2.shape[0], dtype=bool)
            for m in mats:
                vals = (r2 @ ((m @ r1) % p)) % p
                ok &= vals == 0
            if not ok.any():
                continue
            # joint span condition: all covectors from r1 and r2 pairwise rank <= 1
            for idx in np.nonzero(ok)[0]:
                u2 = r2[idx]
                covs = []
                for m in mats:
                    covs.append((r1 @ m) % p)
                    covs.append((u2 @ m) % p)
                if _rank_mod(np.stack(covs), p) <= 1:
                    found.append(np.stack([r1, u2]))
                    if len(found) >= find_limit:
                        return found
    return found


def _rank_mod(a: np.ndarray, p: int) -> int:
    a = a.copy() % p
    rank = 0
    rows, cols = a.shape
    for c in range(cols):
        piv = None
        for r in range(rank, rows):
            if a[r, c] % p:
                piv = r
                break
        if piv is None:
            continue
        a[[rank, piv]] = a[[piv, rank]]
        inv = pow(int(a[rank, c]), p - 2, p)
        a[rank] = a[rank] * inv % p
        for r in range(rows):
            if r != rank and a[r, c]:
                a[r] = (a[r] - a[r, c] * a[rank]) % p
        rank += 1
        if rank == rows:
            break
    return rank


def count_projective_quadric_zeros(
    coeff_rows: np.ndarray, nvars: int, p: int, chunk: int = 1 << 19
) -> int:
    """Count points of P^{nvars-1}(F_p) where 15 Pluecker quadrics vanish.

    ``coeff_rows`` is a (nvars, 15) matrix over F_p sending a coordinate
    vector X to the 15 form coefficients of sum X_i theta_i.
    """
    total = 0
    for lead in range(nvars):
        free = nvars - 1 - lead
        for tail in _tuple_chunks(free, p, chunk):
            pts = np.zeros((tail.shape[0], nvars), dtype=np.int64)
            pts[:, lead] = 1
            if free:
                pts[:, lead + 1 :] = tail
            v = (pts @ coeff_rows) % p
            total += int(plucker_zero_mask(v, p).sum())
    return total


def _tuple_chunks(k: int, p: int, chunk: int) -> Iterator[np.ndarray]:
    n = p**k
    if k == 0:
        yield np.zeros((1, 0), dtype=np.int64)
        return
    powers = p ** np.arange(k - 1, -1, -1, dtype=np.int64)
    for start in range(0, n, chunk):
        idx = np.arange(start, min(start + chunk, n), dtype=np.int64)
        yield (idx[:, None] // powers) % p
