"""Building hereditarily rigid relations from antichains of index patterns.

An abstract trace assigns to every injective ell-tuple a set of
surjective index patterns, equivariantly under permutations of the
pattern alphabet.  When the assigned sets are pairwise strictly
incomparable, the relation they generate (all low-diversity tuples plus
the realized patterns) is hereditarily ell-rigid.  Sperner's theorem
bounds how large the base set can get; the constructors draw the sets
from a middle layer of the pattern power set and verify the result.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

from .kernel import (
    CapacityError,
    Relation,
    beta,
    beta_lt,
    mask_bits,
    subsets_colex,
    tuple_rank,
)
from .rigidity import RigidityReport, TraceMap, is_hereditarily_ell_rigid


class BoundError(ValueError):
    """A counting precondition for the requested construction fails."""


class TraceError(ValueError):
    """An abstract trace violates a structural requirement."""


class ConstructionError(RuntimeError):
    """A constructed relation failed its post-verification."""

    def __init__(self, message: str, report: RigidityReport | None = None):
        super().__init__(message)
        self.report = report


def binomial(n: int, r: int) -> int:
    return math.comb(n, r)


def falling_factorial(n: int, r: int) -> int:
    """n (n-1) ... (n-r+1); zero when r exceeds n."""
    return math.perm(n, r)


def surjection_count(n: int, ell: int) -> int:
    """Number of surjections from an n-set onto an ell-set, by inclusion-exclusion."""
    if n < 1 or ell < 1:
        raise ValueError(f"need n, ell >= 1, got n={n}, ell={ell}")
    return sum(
        (-1) ** (ell - j) * math.comb(ell, j) * j**n for j in range(1, ell + 1)
    )


def sperner_bound_holds(k: int, ell: int, h: int) -> bool:
    """Necessary condition for existence: injective ell-tuples must fit
    into the widest antichain over the surjective index patterns."""
    if k < 2 or ell < 1 or h < 1:
        raise ValueError("need k >= 2, ell >= 1, h >= 1")
    s = surjection_count(h, ell)
    return falling_factorial(k, ell) <= math.comb(s, s // 2)


def exists_2rigid(k: int, h: int) -> bool:
    """Exact existence criterion at ell = 2: k(k-1) <= C(2**h - 2, 2**(h-1) - 1)."""
    if k < 2 or h < 1:
        raise ValueError("need k >= 2, h >= 1")
    return k * (k - 1) <= math.comb(2**h - 2, 2 ** (h - 1) - 1)


def max_k_2rigid(h: int) -> int:
    """Largest base-set size admitting a hereditarily 2-rigid h-ary relation,
    or 0 when none exists."""
    if h < 1:
        raise ValueError(f"need h >= 1, got {h}")
    bound = math.comb(2**h - 2, 2 ** (h - 1) - 1)
    k = (1 + math.isqrt(1 + 4 * bound)) // 2
    while k * (k - 1) > bound:
        k -= 1
    return k if k >= 2 else 0


def r_bounds(ell: int, h: int) -> tuple:
    """Lower and upper bounds for the largest ell-tuple count supported at
    arity h: the middle layer with an orbit removed, and the full middle layer."""
    if ell < 2:
        raise ValueError(f"need ell >= 2, got {ell}")
    if not ell < h:
        raise ValueError(f"need ell < h, got ell={ell}, h={h}")
    s = surjection_count(h, ell)
    fe = math.factorial(ell)
    lower = math.comb(s - fe, (s - fe) // 2)
    upper = math.comb(s, s // 2)
    return lower, upper


@dataclass(frozen=True)
class IndexAntichain:
    """A family of pattern sets intended to be pairwise incomparable."""

    ell: int
    h: int
    members: tuple  # frozensets of index patterns

    def validate_antichain(self) -> bool:
        sizes = {len(m) for m in self.members}
        if len(sizes) <= 1:
            return len(set(self.members)) == len(self.members)
        for a, b in itertools.permutations(self.members, 2):
            if a <= b:
                return False
        return True


def middle_layer(ground, forbidden=()) -> IndexAntichain:
    """All floor(m/2)-subsets of ground minus forbidden, in colex order of
    the sorted-ground index masks.  An empty remaining ground yields no
    members.  Materializes the layer, so it is guarded in size."""
    forbidden = set(forbidden)
    ground = set(ground)
    if not forbidden <= ground:
        raise ValueError("forbidden elements must come from the ground set")
    elems = sorted(ground - forbidden)
    m = len(elems)
    if m == 0:
        return IndexAntichain(0, 0, ())
    first = next(iter(elems))
    h = len(first)
    ell = max(max(p) for p in elems) + 1
    c = m // 2
    if math.comb(m, c) > 5_000_000:
        raise CapacityError(
            f"middle_layer materializes C({m},{c}) sets; guard is 5e6"
        )
    members = tuple(
        frozenset(elems[i] for i in mask_bits(bm)) for bm in subsets_colex(m, c)
    )
    return IndexAntichain(ell, h, members)


def dual_2(x_set) -> frozenset:
    """Swap the two pattern symbols in every member pattern."""
    out = set()
    for p in x_set:
        if any(e not in (0, 1) for e in p):
            raise ValueError("dual is defined for two-symbol patterns only")
        out.add(tuple(1 - e for e in p))
    dual = frozenset(out)
    if len(out) % 2 == 1:
        assert dual != frozenset(x_set), "odd-size sets are never self-dual"
    return dual


@dataclass(frozen=True)
class AbstractTrace:
    """A synthetic trace assignment, to be validated before use."""

    ell: int
    h: int
    k: int
    items: tuple  # sorted tuple of (x, frozenset of patterns)

    @classmethod
    def from_dict(cls, ell: int, h: int, k: int, mapping) -> "AbstractTrace":
        items = tuple(sorted((tuple(x), frozenset(v)) for x, v in mapping.items()))
        return cls(ell, h, k, items)

    @classmethod
    def from_trace_map(cls, tm: TraceMap) -> "AbstractTrace":
        return cls(tm.ell, tm.h, tm.k, tm.items)

    @cached_property
    def as_dict(self) -> dict:
        return dict(self.items)

    def validate(self) -> None:
        """Raise TraceError unless the assignment is total over the
        injective ell-tuples, draws from the surjective patterns, and is
        equivariant under permutations of the pattern alphabet."""
        ell, h, k = self.ell, self.h, self.k
        expected_keys = sorted(beta(ell, ell, range(k)))
        if [x for x, _ in self.items] != expected_keys:
            raise TraceError("assignment must cover exactly the injective tuples")
        patterns = frozenset(beta(ell, h, range(ell))) if ell <= h else frozenset()
        table = self.as_dict
        for x, tx in self.items:
            if not tx <= patterns:
                raise TraceError(f"trace at {x} uses non-surjective patterns")
        for x, tx in self.items:
            for perm in itertools.permutations(range(ell)):
                inv = [0] * ell
                for i, pi in enumerate(perm):
                    inv[pi] = i
                xp = tuple(x[pi] for pi in perm)
                moved = frozenset(tuple(inv[e] for e in p) for p in tx)
                if table[xp] != moved:
                    raise TraceError(
                        f"not equivariant at {x} under permutation {perm}"
                    )

    def values_strictly_incomparable(self) -> bool:
        """No trace contained in (or equal to) another trace's set."""
        patterns = sorted({p for _, tx in self.items for p in tx})
        idx = {p: i for i, p in enumerate(patterns)}
        masks = []
        for _, tx in self.items:
            m = 0
            for p in tx:
                m |= 1 << idx[p]
            masks.append(m)
        by_size: dict[int, list] = {}
        for m in masks:
            by_size.setdefault(m.bit_count(), []).append(m)
        for size, group in by_size.items():
            if len(set(group)) != len(group):
                return False
        sizes = sorted(by_size)
        for i, s1 in enumerate(sizes):
            for s2 in sizes[i + 1 :]:
                for m1 in by_size[s1]:
                    for m2 in by_size[s2]:
                        if m1 & ~m2 == 0:
                            return False
        return True


def rho_from_trace(tr: AbstractTrace) -> Relation:
    """Relation generated by an abstract trace: every tuple with fewer
    than ell distinct entries, plus each trace pattern composed with its
    tuple.  Non-equivariant assignments are rejected."""
    tr.validate()
    ell, h, k = tr.ell, tr.h, tr.k
    total = k**h
    buf = bytearray((total + 7) // 8)

    def set_tuple(t):
        r = tuple_rank(t, k)
        buf[r >> 3] |= 1 << (r & 7)

    for t in beta_lt(ell, h, range(k)):
        set_tuple(t)
    for x, tx in tr.items:
        for p in tx:
            set_tuple(tuple(x[e] for e in p))
    return Relation(k, h, bytes(buf))


def _verified(rho: Relation, ell: int) -> Relation:
    report = is_hereditarily_ell_rigid(rho, ell)
    if not report.verdict:
        raise ConstructionError(
            f"constructed relation failed verification on side "
            f"{report.failing_side}",
            report,
        )
    return rho


def construct_2rigid(k: int, h: int) -> Relation:
    """Build and verify a hereditarily 2-rigid h-ary relation on k points.

    Walks the middle layer over the two-symbol surjective patterns in
    colex order, assigning to each unordered pair {a, b} (in
    lexicographic order) the first set whose dual is also fresh; the
    reversed pair gets the dual.  The counting criterion is checked up
    front and the result is re-verified before being returned.
    """
    if k < 2 or h < 1:
        raise ValueError("need k >= 2, h >= 1")
    s = 2**h - 2
    c = 2 ** (h - 1) - 1
    if not exists_2rigid(k, h):
        raise BoundError(
            f"no hereditarily 2-rigid relation at k={k}, h={h}: "
            f"k(k-1) = {k * (k - 1)} > C({s},{c}) = {math.comb(s, c)}"
        )
    patterns = sorted(beta(2, h, (0, 1)))
    assert len(patterns) == s
    stream = (
        frozenset(patterns[i] for i in mask_bits(bm))
        for bm in subsets_colex(s, c)
    )
    used = set()
    assignment = {}
    for a, b in itertools.combinations(range(k), 2):
        for x_set in stream:
            if x_set in used:
                continue
            x_dual = dual_2(x_set)
            assert x_dual not in used, "used sets stay closed under duals"
            assignment[(a, b)] = x_set
            assignment[(b, a)] = x_dual
            used.add(x_set)
            used.add(x_dual)
            break
        else:
            raise ConstructionError(
                f"middle layer exhausted at pair ({a},{b})"
            )
    tr = AbstractTrace.from_dict(2, h, k, assignment)
    tr.validate()
    if not tr.values_strictly_incomparable():
        raise ConstructionError("assigned trace sets are not an antichain")
    return _verified(rho_from_trace(tr), 2)


def _pattern_orbit(x_set, perms):
    return frozenset(
        frozenset(tuple(perm[e] for e in p) for p in x_set) for perm in perms
    )


def construct_ellrigid(k: int, ell: int, h: int) -> Relation:
    """Build and verify a hereditarily ell-rigid relation for ell >= 3.

    One free orbit of patterns is reserved to tag each alphabet
    permutation; the remaining ground's middle layer supplies, for each
    increasing ell-subset of the base set, a set with a free orbit under
    alphabet permutations (stabilized sets are skipped, with a bounded
    backtracking fallback).  The equivariant extension then generates the
    relation, which is re-verified before being returned.
    """
    if ell < 3:
        raise ValueError("construct_ellrigid needs ell >= 3 (ell = 2 has its own constructor)")
    if not ell <= k:
        raise ValueError(f"need ell <= k, got ell={ell}, k={k}")
    if not ell < h:
        raise BoundError(f"construction requires ell < h, got ell={ell}, h={h}")
    s = surjection_count(h, ell)
    fe = math.factorial(ell)
    lower = math.comb(s - fe, (s - fe) // 2)
    need = falling_factorial(k, ell)
    if need > lower:
        raise BoundError(
            f"counting criterion fails at k={k}, ell={ell}, h={h}: "
            f"{need} > C({s - fe},{(s - fe) // 2}) = {lower}"
        )
    patterns = sorted(beta(ell, h, range(ell)))
    perms = list(itertools.permutations(range(ell)))
    y = patterns[0]
    y_orbit = {tuple(perm[e] for e in y) for perm in perms}
    assert len(y_orbit) == fe, "a surjective pattern has a free orbit"
    ground = [p for p in patterns if p not in y_orbit]
    m = len(ground)
    c = m // 2

    reps = list(itertools.combinations(range(k), ell))
    stream = (
        frozenset(ground[i] for i in mask_bits(bm))
        for bm in subsets_colex(m, c)
    )
    chosen = _assign_orbit_disjoint(reps, stream, perms, fe)

    assignment = {}
    for rep, x_set in chosen.items():
        for perm in perms:
            inv = [0] * ell
            for i, pi in enumerate(perm):
                inv[pi] = i
            xp = tuple(rep[pi] for pi in perm)
            moved = frozenset(tuple(inv[e] for e in p) for p in x_set)
            assignment[xp] = moved | {tuple(inv[e] for e in y)}
    tr = AbstractTrace.from_dict(ell, h, k, assignment)
    tr.validate()
    if not tr.values_strictly_incomparable():
        raise ConstructionError("assigned trace sets are not an antichain")
    return _verified(rho_from_trace(tr), ell)


def _assign_orbit_disjoint(reps, stream, perms, orbit_size, node_budget=200_000):
    """Give each representative a candidate whose alphabet orbit is free
    and disjoint from earlier choices.

    Greedy in stream order; the depth-first fallback only backtracks when
    the greedy pass would fail, and gives up deterministically once the
    node budget is spent.
    """
    candidates = []  # (set, orbit) pairs with free orbits, in stream order
    pull_budget = 64 * len(reps) + 256

    def ensure(idx) -> bool:
        while len(candidates) <= idx:
            if len(candidates) >= pull_budget:
                return False
            x_set = next(stream, None)
            if x_set is None:
                return False
            orbit = _pattern_orbit(x_set, perms)
            if len(orbit) == orbit_size:
                candidates.append((x_set, orbit))
        return True

    nodes = 0
    chosen: dict = {}
    used: list = []

    def dfs(i, start) -> bool:
        nonlocal nodes
        if i == len(reps):
            return True
        pos = start
        while True:
            nodes += 1
            if nodes > node_budget:
                return False
            if not ensure(pos):
                return False
            x_set, orbit = candidates[pos]
            if all(not (orbit & prev) for prev in used):
                chosen[reps[i]] = x_set
                used.append(orbit)
                if dfs(i + 1, pos + 1):
                    return True
                used.pop()
                del chosen[reps[i]]
            pos += 1

    if not dfs(0, 0):
        raise ConstructionError(
            "could not pick orbit-disjoint antichain members within budget"
        )
    return chosen
