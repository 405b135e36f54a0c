"""Near-full relations on a two-element base set and the clones they cut out.

delta(t, h) is the h-ary relation on {0, 1} missing exactly the tuple of
t ones followed by h - t zeros.  Intersecting the unary-to-h families of
these relations yields a strictly descending chain of clones whose limit
is exactly the trivial partial functions (projections and constants),
while each finite stage still contains a nontrivial member.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .kernel import (
    CapacityError,
    DomainMismatchError,
    PartialFn,
    Relation,
    all_partial_fns,
    is_trivial,
    tuple_rank,
)
from .preserve import (
    PreservationVerdict,
    ViolationCertificate,
    check_certificate,
    preserves,
)


class NoWitnessError(ValueError):
    """Trivial functions admit no nontriviality witness."""


def excluded_tuple(t: int, h: int) -> tuple:
    """t ones followed by h - t zeros."""
    if not 1 <= t < h:
        raise ValueError(f"need 1 <= t < h, got t={t}, h={h}")
    return (1,) * t + (0,) * (h - t)


def delta(t: int, h: int) -> Relation:
    """All h-tuples over {0, 1} except the excluded one; size 2**h - 1."""
    v = excluded_tuple(t, h)
    skip = tuple_rank(v, 2)
    return Relation.from_ranks(2, h, (r for r in range(2**h) if r != skip))


def delta_family(h: int):
    """The h-ary family: delta(t, h) for t = 1 .. h-1."""
    if h < 2:
        raise ValueError(f"need h >= 2, got {h}")
    return [delta(t, h) for t in range(1, h)]


def phi(n: int) -> PartialFn:
    """The n-ary separating function, defined on n inputs.

    Its domain is the row (0, 1, ..., 1) plus the rows with a zero first
    entry and a single one in position i for i = 2..n; only the first row
    maps to 1.  Nontrivial, yet it preserves every relation of arity
    below n.
    """
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    rows = {(0,) + (1,) * (n - 1): 1}
    for i in range(1, n):
        row = [0] * n
        row[i] = 1
        rows[tuple(row)] = 0
    return PartialFn.from_mapping(2, n, rows)


def phi_preserves_all(n: int, h: int) -> bool:
    """Check phi(n) against every h-ary relation on {0, 1}.

    There are 2**(2**h) relations, so the check is guarded to h <= 4.
    """
    if not h < n:
        raise ValueError(f"need h < n, got h={h}, n={n}")
    if h < 1:
        raise ValueError(f"need h >= 1, got {h}")
    if h > 4:
        raise CapacityError(
            f"phi_preserves_all sweeps 2**(2**h) relations and requires h <= 4"
        )
    f = phi(n)
    total = 2**h
    nbytes = (total + 7) // 8
    for m in range(2 ** total):
        rho = Relation(2, h, m.to_bytes(nbytes, "little"))
        if not preserves(f, rho).preserved:
            return False
    return True


def delta_preserves(f: PartialFn, t: int, h: int) -> PreservationVerdict:
    """Exact preservation check against delta(t, h), complement driven.

    A violating matrix must have its image equal to the single excluded
    tuple, so rows i <= t come from f's ones and the rest from its zeros,
    and the only constraint left is that no column matches the excluded
    tuple everywhere.  A forward pass over the set of still-matching
    column masks decides this in O(h * 2**n * |dom|) instead of scanning
    all |delta|**n column tuples; verdicts agree with preserves().
    """
    if f.k != 2:
        raise DomainMismatchError("delta relations live on a two-element base set")
    v = excluded_tuple(t, h)
    n = f.n
    full = (1 << n) - 1
    ones = []
    zeros = []
    for args, val in f.graph:
        bm = 0
        for j, e in enumerate(args):
            bm |= e << j
        (ones if val == 1 else zeros).append(bm)
    if not ones or not zeros:
        return PreservationVerdict(True)
    levels = [{full: None}]
    for i in range(1, h + 1):
        rows = ones if i <= t else zeros
        prev = levels[-1]
        nxt: dict = {}
        for state in sorted(prev):
            for bm in rows:
                match = bm if i <= t else ~bm & full
                ns = state & match
                if ns not in nxt:
                    nxt[ns] = (state, bm)
        levels.append(nxt)
    if 0 not in levels[-1]:
        return PreservationVerdict(True)
    picked = []
    state = 0
    for i in range(h, 0, -1):
        state, bm = levels[i][state]
        picked.append(bm)
    picked.reverse()
    columns = tuple(
        tuple(bm >> j & 1 for bm in picked) for j in range(n)
    )
    return PreservationVerdict(False, ViolationCertificate(columns, v))


@dataclass(frozen=True)
class NontrivialityWitness:
    """Row ordering of dom(f) exhibiting a violated delta relation.

    The rows mapping to one come first, so the image column is exactly
    the excluded tuple of delta(t, h) with h = |dom(f)|, and no matrix
    column can equal it unless f were a projection.
    """

    h: int
    t: int
    rows: tuple

    def to_json(self) -> dict:
        return {
            "h": self.h,
            "t": self.t,
            "rows": [list(r) for r in self.rows],
            "violated": f"delta({self.t},{self.h})",
        }


def witness_nontrivial(f: PartialFn) -> NontrivialityWitness:
    """Construct the canonical witness that a nontrivial f escapes
    delta(t, h) at h = |dom(f)| and t = number of one-values."""
    if f.k != 2:
        raise DomainMismatchError("witnesses live on a two-element base set")
    if is_trivial(f):
        raise NoWitnessError("trivial functions preserve every delta relation")
    ones = sorted(args for args, val in f.graph if val == 1)
    zeros = sorted(args for args, val in f.graph if val == 0)
    rows = tuple(ones + zeros)
    t, h = len(ones), len(rows)
    v = excluded_tuple(t, h)
    for j in range(f.n):
        assert tuple(r[j] for r in rows) != v, "f would be a projection"
    return NontrivialityWitness(h, t, rows)


def verify_witness(f: PartialFn, w: NontrivialityWitness) -> bool:
    """Replay a witness through the general matrix definition."""
    if w.h != len(w.rows) or sorted(w.rows) != sorted(f.dom):
        return False
    mapping = f.mapping
    v = excluded_tuple(w.t, w.h)
    if tuple(mapping[r] for r in w.rows) != v:
        return False
    columns = tuple(tuple(r[j] for r in w.rows) for j in range(f.n))
    cert = ViolationCertificate(columns, v)
    return check_certificate(cert, f, delta(w.t, w.h))


def _in_family(f: PartialFn, h: int) -> bool:
    return all(delta_preserves(f, t, h).preserved for t in range(1, h))


def chain_inclusion(h: int, arity_cap: int, dom_cap=None) -> bool:
    """Preserving the (h+1)-ary family implies preserving the h-ary one,
    swept over all partial functions on {0, 1} up to the caps, and the
    inclusion is strict: phi(h+1) separates the two stages."""
    if h < 2:
        raise ValueError(f"need h >= 2, got {h}")
    if arity_cap > 3:
        raise CapacityError("chain_inclusion sweeps 3**(2**n) functions, arity_cap <= 3")
    for n in range(1, arity_cap + 1):
        for f in all_partial_fns(2, n):
            if dom_cap is not None and len(f.graph) > dom_cap:
                continue
            if _in_family(f, h + 1) and not _in_family(f, h):
                return False
    sep = phi(h + 1)
    if is_trivial(sep):
        return False
    return _in_family(sep, h) and not _in_family(sep, h + 1)


def repeat_identifies(t: int, h: int) -> bool:
    """Does delta(t, h) arise from delta(t, h+1) by repeating the last
    coordinate?"""
    if not 1 <= t < h:
        raise ValueError(f"need 1 <= t < h, got t={t}, h={h}")
    bigger = delta(t, h + 1)
    derived = Relation.from_tuples(
        2,
        h,
        (
            x
            for x in itertools.product((0, 1), repeat=h)
            if x + (x[-1],) in bigger
        ),
    )
    return derived == delta(t, h)


def prefix_escape(h0: int) -> PartialFn:
    """A certified nontrivial function preserving every family up to h0.

    Returns phi(h0 + 1) after checking both properties; this is why no
    finite prefix of the chain pins down the trivial functions.
    """
    if h0 < 2:
        raise ValueError(f"need h0 >= 2, got {h0}")
    f = phi(h0 + 1)
    if is_trivial(f):
        raise RuntimeError("separating function unexpectedly trivial")
    for h in range(2, h0 + 1):
        if not _in_family(f, h):
            raise RuntimeError(f"separating function escapes the {h}-ary family")
    return f


def limit_is_trivial_clone(arity_cap: int) -> bool:
    """Equivalence sweep: a partial function on {0, 1} with arity at most
    arity_cap is trivial iff it preserves every delta family up to arity
    2**arity_cap.

    Trivial functions are checked by direct preservation against every
    family member; nontrivial ones must carry a replayable witness within
    the arity bound and must also escape the sparse sub-family
    delta(n, 2n).
    """
    if arity_cap > 3:
        raise CapacityError("limit sweep covers 3**(2**n) functions, arity_cap <= 3")
    h_max = 2**arity_cap
    for n in range(1, arity_cap + 1):
        for f in all_partial_fns(2, n):
            if is_trivial(f):
                for h in range(2, h_max + 1):
                    if not _in_family(f, h):
                        return False
            else:
                w = witness_nontrivial(f)
                if w.h > h_max or not verify_witness(f, w):
                    return False
                if all(
                    delta_preserves(f, m, 2 * m).preserved
                    for m in range(1, h_max // 2 + 1)
                ):
                    return False
    return True
