"""Hereditary rigidity of a nonempty relation.

A nonempty h-ary relation rho on {0..k-1} is hereditarily ell-rigid when
its unary partial polymorphisms are exactly the functions below the
identity together with those whose image has fewer than ell values.
Deciding that reduces to two one-sided checks: the small functions must
all preserve rho, and no injective partial function with domain size ell
that moves a point may preserve it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from .kernel import (
    CapacityError,
    DomainMismatchError,
    PartialUnaryFn,
    Relation,
    all_partial_unary,
    beta,
    image_size,
    mask_bits,
    subsets_colex,
    tuple_rank,
)
from .preserve import ppol1, unary_preserves


class EmptyRelationError(ValueError):
    """Rigidity is only defined for nonempty relations."""


def _require_usable(rho: Relation, ell: int) -> None:
    if rho.is_empty:
        raise EmptyRelationError("rigidity needs a nonempty relation")
    if not 1 <= ell <= rho.k:
        raise ValueError(f"need 1 <= ell <= k, got ell={ell}, k={rho.k}")


@dataclass(frozen=True)
class OmegaClass:
    """Unary partial functions below the identity or with small image."""

    k: int
    ell: int

    def __post_init__(self):
        if not 1 <= self.ell <= self.k:
            raise ValueError(f"need 1 <= ell <= k, got ell={self.ell}, k={self.k}")

    def member(self, f: PartialUnaryFn) -> bool:
        if f.k != self.k:
            raise DomainMismatchError("function lives on a different base set")
        return f.below_identity or len(f.img) < self.ell

    def __contains__(self, f: PartialUnaryFn) -> bool:
        return self.member(f)


def omega_member(f: PartialUnaryFn, ell: int) -> bool:
    return OmegaClass(f.k, ell).member(f)


def enumerate_psi(k: int, ell: int):
    """Injective unary partial functions with |dom| = ell not below identity.

    Domains come in increasing subset-rank order, values in lexicographic
    order; there are C(k, ell) * (falling_factorial(k, ell) - 1) of them.
    """
    if not 1 <= ell <= k:
        raise ValueError(f"need 1 <= ell <= k, got ell={ell}, k={k}")
    out = []
    for dmask in subsets_colex(k, ell):
        points = mask_bits(dmask)
        for vals in itertools.permutations(range(k), ell):
            if vals == points:
                continue
            out.append(PartialUnaryFn.from_pairs(k, zip(points, vals)))
    return out


@dataclass(frozen=True)
class RigidityReport:
    """Outcome of the rigidity decision, with a replayable failure when negative.

    failing_side is "omega" when some small function fails to preserve
    (witness is then a member tuple whose image escapes), and "psi" when
    some injective domain-ell function preserving the relation was found.
    """

    verdict: bool
    failing_function: Optional[PartialUnaryFn] = None
    failing_side: Optional[str] = None
    witness: Optional[tuple] = None

    def __post_init__(self):
        if self.verdict and self.failing_function is not None:
            raise ValueError("positive report cannot carry a failing function")
        if not self.verdict and self.failing_side not in ("omega", "psi"):
            raise ValueError("negative report needs a failing side")


def verify_report(rho: Relation, ell: int, report: RigidityReport) -> bool:
    """Replay a negative report against the definitions."""
    if report.verdict:
        return True
    f = report.failing_function
    if f is None:
        return False
    if report.failing_side == "omega":
        if not omega_member(f, ell):
            return False
        res = unary_preserves(f, rho)
        if res.preserved:
            return False
        if report.witness is not None:
            img = f.apply_tuple(report.witness)
            return report.witness in rho and img is not None and img not in rho
        return True
    # psi side: f must be a genuine Psi_ell member that preserves rho
    if len(f.dom) != ell or not f.is_injective or f.below_identity:
        return False
    return unary_preserves(f, rho).preserved


def omega_contained(rho: Relation, ell: int) -> RigidityReport:
    """Check that every small function preserves rho.

    Support-local: it suffices that for every member tuple and every map
    g on its entries with fewer than ell distinct values, the collapsed
    tuple stays in the relation.  For ell = 2 this degenerates to the
    diagonal being contained in rho.  The verdict field means
    "containment holds".
    """
    _require_usable(rho, ell)
    k, h = rho.k, rho.h
    if ell == 2:
        for c in range(k):
            if not rho.contains_rank(tuple_rank((c,) * h, k)):
                u = rho.members[0]
                g = PartialUnaryFn.constant_map(k, c, set(u))
                return RigidityReport(False, g, "omega", u)
        return RigidityReport(True)
    for u in rho.members:
        support = sorted(set(u))
        for vals in itertools.product(range(k), repeat=len(support)):
            if len(set(vals)) >= ell:
                continue
            g = PartialUnaryFn.from_pairs(k, zip(support, vals))
            image = g.apply_tuple(u)
            if image not in rho:
                return RigidityReport(False, g, "omega", u)
    return RigidityReport(True)


def orbit_closure(rho: Relation, ell: int) -> Relation:
    """Close rho under all unary images of its low-diversity members.

    Members with fewer than ell distinct entries are pushed through every
    unary partial function defined on their entries; the result contains
    rho and is a fixed point for hereditarily ell-rigid relations.
    """
    _require_usable(rho, ell)
    k, h = rho.k, rho.h
    buf = bytearray(rho.mask)
    for u in rho.members:
        if image_size(u) >= ell:
            continue
        support = sorted(set(u))
        positions = tuple(support.index(e) for e in u)
        for vals in itertools.product(range(k), repeat=len(support)):
            r = 0
            for p in positions:
                r = r * k + vals[p]
            buf[r >> 3] |= 1 << (r & 7)
    return Relation(k, h, bytes(buf))


def _report_no_one_rigid(rho: Relation) -> RigidityReport:
    """For ell = 1 a one-point constant always preserves, so never rigid."""
    k, h = rho.k, rho.h
    for a in range(k):
        if not rho.contains_rank(tuple_rank((a,) * h, k)):
            b = 0 if a else 1
            f = PartialUnaryFn.constant_map(k, b, (a,))
            break
    else:
        f = PartialUnaryFn.constant_map(k, 1, (0,))
    assert unary_preserves(f, rho).preserved
    return RigidityReport(False, f, "psi", None)


def _psi_scan(rho: Relation, ell: int) -> Optional[PartialUnaryFn]:
    """First injective |dom| = ell function (moving a point) that preserves rho.

    Assumes the omega containment check already passed, so members with
    fewer than ell distinct entries cannot witness a violation and only
    exact-support buckets are scanned.  Domains are visited in increasing
    subset-rank order, value assignments lexicographically.
    """
    k = rho.k
    index = rho.support_index
    mask = rho.mask
    if ell == 2:
        for dmask in subsets_colex(k, 2):
            points = mask_bits(dmask)
            bucket = index.get(dmask, ())
            coeffs = [(e[2][0], e[2][1]) for e in bucket]
            for vals in itertools.permutations(range(k), 2):
                if vals == points:
                    continue
                c, d = vals
                for a, b in coeffs:
                    r = c * a + d * b
                    if not mask[r >> 3] >> (r & 7) & 1:
                        break
                else:
                    return PartialUnaryFn.from_pairs(k, zip(points, vals))
        return None
    for dmask in subsets_colex(k, ell):
        points = mask_bits(dmask)
        bucket = index.get(dmask, ())
        coeffs = [e[2] for e in bucket]
        for vals in itertools.permutations(range(k), ell):
            if vals == points:
                continue
            for cs in coeffs:
                r = 0
                for v, c in zip(vals, cs):
                    r += v * c
                if not mask[r >> 3] >> (r & 7) & 1:
                    break
            else:
                return PartialUnaryFn.from_pairs(k, zip(points, vals))
    return None


def is_hereditarily_ell_rigid(rho: Relation, ell: int) -> RigidityReport:
    """Decide hereditary ell-rigidity.

    Checks omega containment first, then scans for an unexpected
    preserving function among the injective domain-ell ones.  No
    relation is hereditarily 1-rigid, and arities below ell fail through
    the ordinary scan.
    """
    _require_usable(rho, ell)
    if ell == 1:
        return _report_no_one_rigid(rho)
    contained = omega_contained(rho, ell)
    if not contained.verdict:
        return contained
    offender = _psi_scan(rho, ell)
    if offender is not None:
        return RigidityReport(False, offender, "psi", None)
    return RigidityReport(True)


def brute_force_rigidity(rho: Relation, ell: int) -> bool:
    """Definition-level oracle: compare ppol1(rho) with the omega class.

    Enumerates all (k+1)**k unary partial functions twice over, so it is
    guarded to k <= 5.
    """
    _require_usable(rho, ell)
    if rho.k > 5:
        raise CapacityError(
            f"brute_force_rigidity requires k <= 5, got k={rho.k}"
        )
    expected = frozenset(
        f for f in all_partial_unary(rho.k) if omega_member(f, ell)
    )
    return ppol1(rho) == expected


@dataclass(frozen=True)
class TraceMap:
    """For each injective ell-tuple, the index patterns it realizes in rho.

    Patterns are h-tuples over range(ell) using every value; pattern p
    belongs to the trace of x exactly when composing x with p lands in
    the relation.
    """

    ell: int
    h: int
    k: int
    items: tuple  # sorted tuple of (x, frozenset of patterns)

    @cached_property
    def as_dict(self) -> dict:
        return dict(self.items)

    def __getitem__(self, x):
        return self.as_dict[tuple(x)]

    def keys(self):
        return [x for x, _ in self.items]


def trace(rho: Relation, ell: int) -> TraceMap:
    _require_usable(rho, ell)
    k, h = rho.k, rho.h
    patterns = sorted(beta(ell, h, range(ell))) if ell <= h else []
    items = []
    for x in sorted(beta(ell, ell, range(k))):
        hits = frozenset(
            p for p in patterns if tuple(x[i] for i in p) in rho
        )
        items.append((x, hits))
    return TraceMap(ell, h, k, tuple(items))


def f_arrow(x, y, k: int) -> PartialUnaryFn:
    """The partial function sending the injective tuple x pointwise to y."""
    x, y = tuple(x), tuple(y)
    if len(x) != len(y):
        raise ValueError("tuples must have equal length")
    if len(set(x)) != len(x) or len(set(y)) != len(y):
        raise ValueError("both tuples must be injective")
    return PartialUnaryFn.from_pairs(k, zip(x, y))


def trace_incomparability(rho: Relation, ell: int) -> bool:
    """Strict pairwise incomparability of all traces.

    Fails as soon as one trace is contained in (or equal to) another
    trace at a different tuple.
    """
    tm = trace(rho, ell)
    entries = tm.items
    for x, tx in entries:
        for y, ty in entries:
            if x != y and tx <= ty:
                return False
    return True
