"""GIT stability of linear systems under the group action on the 6-space.

The decision machinery has two layers.

Exact layer: a system is not stable exactly when some coordinate change makes
every generator vanish on the block 1 <= i <= s, i < j <= 6-s for some
s in {1, 2, 3} (and not semistable with 6-s replaced by 7-s); geometrically,
a pair of subspaces U inside U' of dimensions s and >= 6-s (>= 7-s) with
omega(U, U') = 0 for every generator.  Witness pairs are verified by exact
pairings, so every non-stable verdict is a certificate.

Search layer: witnesses are hunted over small prime fields by exhaustive
enumeration, lifted by rational reconstruction, and only count once they
re-verify over the rationals.  Absence of modular witnesses never certifies
stability on its own.

Stability itself is only certified along the exact route available when the
system contains the general-type plane in normal coordinates: every
3-dimensional isotropic subspace is then a solution of an explicit bilinear
system with finitely many solutions, the s = 1 case is impossible for such
systems (a minor-square certificate computed here), and the remaining cases
reduce to those two.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Literal, Optional, Sequence

import numpy as np

from . import gfp, linalg
from .exterior import (
    DIM,
    PAIR_INDEX,
    PAIRS,
    AlternatingForm,
    GroupElement,
    Subspace,
)
from .linsys import DEFAULT_PRIMES, LinearSystem, pfaffian_cubic
from .planes import PI_G_GENERATORS, NotGeneralType, isotropic_triples
from .scalars import MultiPoly, reconstruct_vector


class PreconditionError(ValueError):
    """An exact-path operation was invoked outside its normal-form setting."""


LimitClass = Literal["diverges", "bounded_nonzero_limit", "limit_zero"]
Severity = Literal["nonstable", "unstable"]


@dataclass(frozen=True)
class OnePS:
    """A diagonal one-parameter subgroup, by its non-increasing integer
    weights summing to zero."""

    weights: tuple[int, ...]

    def __post_init__(self):
        w = tuple(int(x) for x in self.weights)
        if len(w) != DIM:
            raise ValueError("expected 6 weights")
        if list(w) != sorted(w, reverse=True):
            raise ValueError("weights must be non-increasing")
        if sum(w) != 0:
            raise ValueError("weights must sum to zero")
        if all(x == 0 for x in w):
            raise ValueError("weights must not all vanish")
        object.__setattr__(self, "weights", w)

    @classmethod
    def unstable_family(cls, s: int) -> "OnePS":
        """Weights (6-s, ..., -1, ..., s-7) exhibiting the unstable pattern."""
        w = [6 - s] * s + [-1] * (7 - 2 * s) + [s - 7] * (s - 1)
        return cls(tuple(w))

    @classmethod
    def nonstable_family(cls, s: int) -> "OnePS":
        """Weights (1, ..., 0, ..., -1) exhibiting the nonstable pattern."""
        w = [1] * s + [0] * (6 - 2 * s) + [-1] * s
        return cls(tuple(w))


def one_ps_limit_class(A: LinearSystem, lam: OnePS) -> LimitClass:
    """Behavior of the diagonal action as t grows: each coefficient m_ij
    scales by t^(w_i + w_j)."""
    w = lam.weights
    top = None
    for g in A.generators:
        for k, (i, j) in enumerate(PAIRS):
            if g.coeffs[k] != 0:
                val = w[i - 1] + w[j - 1]
                top = val if top is None else max(top, val)
    if top is None:
        raise ValueError("system has no nonzero coefficient")
    if top > 0:
        return "diverges"
    if top == 0:
        return "bounded_nonzero_limit"
    return "limit_zero"


def _pattern_pairs(s: int, severity: Severity) -> list[tuple[int, int]]:
    jmax = 7 - s if severity == "unstable" else 6 - s
    return [(i, j) for i in range(1, s + 1) for j in range(i + 1, jmax + 1)]


def zero_pattern_check(A: LinearSystem, g: GroupElement, s: int) -> str:
    """Test the two block-of-zeros patterns on the transformed system;
    returns "unstable", "nonstable" or "none" (strongest match wins)."""
    if s not in (1, 2, 3):
        raise ValueError("s must be 1, 2 or 3")
    transformed = A.transformed(g)
    for severity in ("unstable", "nonstable"):
        pairs = _pattern_pairs(s, severity)
        if all(
            w.coeffs[PAIR_INDEX[pair]] == 0
            for w in transformed.generators
            for pair in pairs
        ):
            return severity
    return "none"


@dataclass(frozen=True)
class DestabilizingWitness:
    """A certified pair U inside U' with omega(U, U') = 0 for all generators.

    Severity "nonstable" needs dim U' >= 6 - s, "unstable" needs >= 7 - s.
    """

    s: int
    U: Subspace
    Uprime: Subspace
    severity: Severity

    def to_json(self) -> dict:
        return {
            "s": self.s,
            "severity": self.severity,
            "U": self.U.to_json(),
            "U_prime": self.Uprime.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "DestabilizingWitness":
        return cls(
            int(data["s"]),
            Subspace.from_json(data["U"]),
            Subspace.from_json(data["U_prime"]),
            data["severity"],
        )


def verify_witness(A: LinearSystem, w: DestabilizingWitness) -> bool:
    """Exact re-verification: dimensions, containment, and all pairings."""
    if w.s not in (1, 2, 3) or w.U.dim != w.s:
        return False
    if not w.Uprime.contains(w.U):
        return False
    needed = (7 - w.s) if w.severity == "unstable" else (6 - w.s)
    if w.Uprime.dim < needed:
        return False
    return all(
        g(u, v) == 0
        for g in A.generators
        for u in w.U.rows
        for v in w.Uprime.rows
    )


def transport_witness(w: DestabilizingWitness, g: GroupElement) -> DestabilizingWitness:
    """The witness for the transformed system g . A."""
    m = linalg.inverse(linalg.transpose(g.matrix))
    move = lambda rows: [linalg.matvec(m, r) for r in rows]
    return DestabilizingWitness(
        w.s,
        Subspace("W", move(w.U.rows)),
        Subspace("W", move(w.Uprime.rows)),
        w.severity,
    )


@dataclass
class SearchRecord:
    name: str
    prime: int | None
    fp_hits: int
    lifted: bool
    note: str = ""

    def to_json(self) -> dict:
        out = {"search": self.name, "fp_hits": self.fp_hits, "lifted": self.lifted}
        if self.prime is not None:
            out["prime"] = self.prime
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class StabilityVerdict:
    tag: Literal["Stable", "StrictlySemistable", "Unstable", "Unknown"]
    witness: Optional[DestabilizingWitness] = None
    evidence: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "tag": self.tag,
            "witness": self.witness.to_json() if self.witness else None,
            "evidence": self.evidence,
        }


def _full_space() -> Subspace:
    return Subspace("W", linalg.identity(DIM))


def common_kernel_witness(A: LinearSystem) -> Optional[DestabilizingWitness]:
    """Exact s = 1 instability: a vector killed by every generator."""
    stacked = []
    for g in A.generators:
        stacked.extend(g.matrix())
    null = linalg.nullspace(stacked, ncols=DIM)
    if not null:
        return None
    w = DestabilizingWitness(1, Subspace("W", [null[0]]), _full_space(), "unstable")
    assert verify_witness(A, w)
    return w


def permutation_pattern_witness(
    A: LinearSystem, severity: Severity
) -> Optional[DestabilizingWitness]:
    """Scan all coordinate permutations for a zero pattern of the given
    severity.  Only zeroness matters, so the scan works on the support of the
    generators; permutations run in lexicographic order and the first hit
    wins, which keeps the output deterministic."""
    support = {
        (i, j)
        for g in A.generators
        for (i, j), c in zip(PAIRS, g.coeffs)
        if c != 0
    }
    for sigma in itertools.permutations(range(1, DIM + 1)):
        for s in (1, 2, 3):
            good = True
            for i, j in _pattern_pairs(s, severity):
                a, b = sigma[i - 1], sigma[j - 1]
                if (min(a, b), max(a, b)) in support:
                    good = False
                    break
            if not good:
                continue
            basis = [
                tuple(Fraction(1 if c + 1 == sigma[r] else 0) for c in range(DIM))
                for r in range(DIM)
            ]
            span = 7 - s if severity == "unstable" else 6 - s
            w = DestabilizingWitness(
                s,
                Subspace("W", basis[:s]),
                Subspace("W", basis[:span]),
                severity,
            )
            if verify_witness(A, w):
                return w
    return None


# ---------------------------------------------------------------------------
# finite-field searches with rational lifting


@dataclass
class SearchOutcome:
    witness: Optional[DestabilizingWitness]
    record: SearchRecord


def _lift_subspace(rows: np.ndarray, p: int) -> Optional[Subspace]:
    lifted_rows = []
    for row in rows:
        lifted = reconstruct_vector([int(x) for x in row], p)
        if lifted is None:
            return None
        lifted_rows.append(lifted)
    sub = Subspace("W", lifted_rows)
    if sub.dim != len(lifted_rows):
        return None
    return sub


def search_s1(A: LinearSystem, p: int) -> SearchOutcome:
    """Sweep P(W)(F_p) for vectors whose covector family omega_k(u, .) spans
    dimension <= 1; lift hits and re-verify over the rationals."""
    dim0, dim1 = gfp.s1_rank_profile(A.generators, p)
    hits = len(dim0) + len(dim1)
    for vec in dim0 + dim1:
        lifted = reconstruct_vector([int(x) for x in vec], p)
        if lifted is None:
            continue
        covectors = [g.apply(lifted) for g in A.generators]
        span_dim = linalg.rank(covectors)
        if span_dim > 1:
            continue
        if span_dim == 0:
            uprime = _full_space()
            severity: Severity = "unstable"
        else:
            uprime = Subspace("W", linalg.nullspace(covectors, ncols=DIM))
            severity = "nonstable"
        if uprime.dim < 5:
            continue
        w = DestabilizingWitness(1, Subspace("W", [lifted]), uprime, severity)
        if verify_witness(A, w):
            return SearchOutcome(w, SearchRecord("s1", p, hits, True))
    return SearchOutcome(None, SearchRecord("s1", p, hits, False))


def search_s3(A: LinearSystem, p: int, dim_u: int = 3) -> SearchOutcome:
    """Sweep Gr(dim_u, 6)(F_p) for totally isotropic subspaces (dim_u = 3
    gives nonstable witnesses, 4 gives unstable ones); lift and re-verify."""
    if dim_u not in (3, 4):
        raise ValueError("dim_u must be 3 or 4")
    count, found = gfp.isotropic_subspaces(A.generators, dim_u, p, find_limit=16)
    name = f"s3-dim{dim_u}"
    for rows in found:
        sub = _lift_subspace(rows, p)
        if sub is None or sub.dim != dim_u:
            continue
        if not _is_isotropic_subspace(A, sub):
            continue
        if dim_u == 3:
            w = DestabilizingWitness(3, sub, sub, "nonstable")
        else:
            u3 = Subspace("W", sub.rows[:3])
            w = DestabilizingWitness(3, u3, sub, "unstable")
        if verify_witness(A, w):
            return SearchOutcome(w, SearchRecord(name, p, count, True))
    return SearchOutcome(None, SearchRecord(name, p, count, False))


def _is_isotropic_subspace(A: LinearSystem, sub: Subspace) -> bool:
    rows = sub.rows
    return all(
        g(rows[a], rows[b]) == 0
        for g in A.generators
        for a in range(len(rows))
        for b in range(a + 1, len(rows))
    )


def search_s2_unstable(A: LinearSystem, p: int) -> SearchOutcome:
    """Sweep Gr(2, 6)(F_p) for 2-planes U whose covector family spans
    dimension <= 1 with U inside the joint kernel; lift and re-verify."""
    pairs = gfp.s2_unstable_pairs(A.generators, p)
    for rows in pairs:
        sub = _lift_subspace(rows, p)
        if sub is None or sub.dim != 2:
            continue
        covectors = [g.apply(r) for g in A.generators for r in sub.rows]
        if linalg.rank(covectors) > 1:
            continue
        uprime_rows = linalg.nullspace(covectors, ncols=DIM)
        uprime = Subspace("W", uprime_rows) if uprime_rows else _full_space()
        if uprime.dim < 5 or not uprime.contains(sub):
            continue
        w = DestabilizingWitness(2, sub, uprime, "unstable")
        if verify_witness(A, w):
            return SearchOutcome(w, SearchRecord("s2-unstable", p, len(pairs), True))
    return SearchOutcome(None, SearchRecord("s2-unstable", p, len(pairs), False))


# ---------------------------------------------------------------------------
# the exact route for systems containing the general-type plane


def starts_with_pi_g(A: LinearSystem) -> bool:
    return len(A.generators) >= 3 and all(
        A.generators[k] == PI_G_GENERATORS[k] for k in range(3)
    )


def isotropic3_candidates_for_pi_g(A: LinearSystem) -> list[Subspace]:
    """All 3-dimensional totally isotropic subspaces, exactly.

    Requires the first three generators to be the normal form; its kernel
    triple system has exactly two solutions, and the remaining generators cut
    that set down by exact isotropy conditions.
    """
    if not starts_with_pi_g(A):
        raise PreconditionError("first three generators must be the pi_g normal form")
    _pi_g_s1_certificate()
    out = []
    for triple in isotropic_triples(A):
        sub = Subspace("W", triple)
        if sub.dim == 3 and _is_isotropic_subspace(A, sub):
            out.append(sub)
    return out


@lru_cache(maxsize=1)
def _pi_g_s1_certificate() -> bool:
    """No s = 1 witness pair exists for the normal-form plane.

    The 3x6 matrix of covectors omega_k(u, .) in the coordinates of u has all
    six squares u_k^2 among its 2x2 minors, so rank <= 1 forces u = 0.  This
    is checked symbolically here rather than assumed.
    """
    nvars = DIM
    rows = []
    for g in PI_G_GENERATORS:
        row = [MultiPoly.zero(nvars) for _ in range(DIM)]
        for k, (i, j) in enumerate(PAIRS):
            c = g.coeffs[k]
            if c:
                row[j - 1] = row[j - 1] + MultiPoly.variable(i - 1, nvars).scale(c)
                row[i - 1] = row[i - 1] - MultiPoly.variable(j - 1, nvars).scale(c)
        rows.append(row)
    minors = set()
    for r1 in range(3):
        for r2 in range(r1 + 1, 3):
            for c1 in range(DIM):
                for c2 in range(c1 + 1, DIM):
                    m = rows[r1][c1] * rows[r2][c2] - rows[r1][c2] * rows[r2][c1]
                    minors.add(m)
                    minors.add(-m)
    for k in range(DIM):
        square = MultiPoly.variable(k, nvars) * MultiPoly.variable(k, nvars)
        if square not in minors:
            raise AssertionError("minor-square certificate failed")
    return True


def _exact_verdict_for_pi_g_system(A: LinearSystem, trace: list[str]) -> StabilityVerdict:
    candidates = isotropic3_candidates_for_pi_g(A)
    trace.append(f"isotropic 3-space candidates solved exactly: {len(candidates)}")
    trace.append("s=1 pairs impossible (minor-square certificate)")
    trace.append("s=2 pairs reduce to 3-dimensional isotropic subspaces")
    trace.append("4-dimensional isotropic would yield infinitely many 3-dimensional ones")
    if candidates:
        w = DestabilizingWitness(3, candidates[0], candidates[0], "nonstable")
        assert verify_witness(A, w)
        return StabilityVerdict(
            "StrictlySemistable",
            w,
            {"path": "exact", "trace": trace},
        )
    return StabilityVerdict("Stable", None, {"path": "exact", "trace": trace})


def decide_stability(
    A: LinearSystem,
    primes: Sequence[int] = DEFAULT_PRIMES,
    deep_primes: Sequence[int] | None = None,
    assume_pi_g: bool = False,
) -> StabilityVerdict:
    """Full decision pipeline.

    When the system contains the general-type plane in normal coordinates (or
    its first three generators span a plane that normalizes to it), stability
    is decided exactly.  Otherwise the zero-pattern catalog and the modular
    searches run; any rationally verified witness certifies the non-stable
    verdicts, and absence of witnesses yields Unknown with the search trail
    as evidence.  ``deep_primes`` bounds the primes used for the Grassmannian
    sweeps (the projective s = 1 sweep runs at every prime).
    """
    trace: list[str] = []
    if starts_with_pi_g(A):
        trace.append("first three generators are the normal form")
        return _exact_verdict_for_pi_g_system(A, trace)
    if assume_pi_g:
        raise PreconditionError("--assume-pi-g set but the normal form is not leading")
    normalized = _try_normalize_leading_plane(A, trace)
    if normalized is not None:
        A_norm, g = normalized
        verdict = _exact_verdict_for_pi_g_system(A_norm, trace)
        if verdict.witness is not None:
            back = transport_witness(verdict.witness, g.inverse())
            assert verify_witness(A, back)
            verdict = StabilityVerdict(verdict.tag, back, verdict.evidence)
        return verdict
    return _search_verdict(A, primes, deep_primes, trace)


def _try_normalize_leading_plane(A: LinearSystem, trace: list[str]):
    from .planes import NotCR4, classify_cr4_plane, is_constant_rank4, normalize_general_plane

    if len(A.generators) < 3:
        return None
    try:
        head = LinearSystem(A.generators[:3])
    except ValueError:
        return None
    try:
        ok, _ = is_constant_rank4(head)
        if not ok or classify_cr4_plane(head) != "general":
            return None
        g = normalize_general_plane(head)
    except (NotCR4, NotGeneralType):
        return None
    transformed = A.transformed(g)
    gens = list(PI_G_GENERATORS) + list(transformed.generators[3:])
    A_norm = LinearSystem(gens)
    if not A_norm.same_span(transformed):
        return None
    trace.append("leading plane normalized to the general-type normal form")
    return A_norm, g


def _search_verdict(
    A: LinearSystem,
    primes: Sequence[int],
    deep_primes: Sequence[int] | None,
    trace: list[str],
) -> StabilityVerdict:
    primes = tuple(primes)
    deep = tuple(deep_primes) if deep_primes is not None else (min(primes),)
    records: list[dict] = []
    nonstable_witness: Optional[DestabilizingWitness] = None

    ck = common_kernel_witness(A)
    if ck is not None:
        trace.append("common kernel vector found (exact)")
        return StabilityVerdict(
            "Unstable", ck, {"path": "search", "trace": trace, "searched": records}
        )
    w = permutation_pattern_witness(A, "unstable")
    if w is not None:
        trace.append("unstable zero pattern under a coordinate permutation (exact)")
        return StabilityVerdict(
            "Unstable", w, {"path": "search", "trace": trace, "searched": records}
        )
    for p in deep:
        out = search_s3(A, p, dim_u=4)
        records.append(out.record.to_json())
        if out.witness is not None:
            return StabilityVerdict(
                "Unstable", out.witness, {"path": "search", "trace": trace, "searched": records}
            )
        out = search_s2_unstable(A, p)
        records.append(out.record.to_json())
        if out.witness is not None:
            return StabilityVerdict(
                "Unstable", out.witness, {"path": "search", "trace": trace, "searched": records}
            )
    w = permutation_pattern_witness(A, "nonstable")
    if w is not None:
        trace.append("nonstable zero pattern under a coordinate permutation (exact)")
        nonstable_witness = w
    if nonstable_witness is None:
        for p in primes:
            out = search_s1(A, p)
            records.append(out.record.to_json())
            if out.witness is not None:
                nonstable_witness = out.witness
                break
        else:
            for p in deep:
                out = search_s3(A, p, dim_u=3)
                records.append(out.record.to_json())
                if out.witness is not None:
                    nonstable_witness = out.witness
                    break
    if nonstable_witness is not None:
        trace.append("instability searches found nothing; severity stays nonstable")
        return StabilityVerdict(
            "StrictlySemistable",
            nonstable_witness,
            {"path": "search", "trace": trace, "searched": records},
        )
    if not pfaffian_cubic(A).is_zero():
        trace.append("Pfaffian cubic nonzero: semistability certified exactly")
    trace.append("no witness at any searched prime; stability not certified")
    return StabilityVerdict(
        "Unknown", None, {"path": "search", "trace": trace, "searched": records}
    )
