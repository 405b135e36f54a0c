"""Deciding whether a partial function preserves a relation.

A function f of arity n preserves an h-ary relation rho when every h x n
matrix whose columns lie in rho and whose rows lie in dom(f) has its
row-wise image column back in rho.  A violating matrix is returned as a
re-checkable certificate; with no eligible matrix the answer is
vacuously yes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .kernel import (
    CapacityError,
    DomainMismatchError,
    PartialFn,
    PartialUnaryFn,
    Relation,
    all_partial_unary,
    tuple_rank,
)


@dataclass(frozen=True)
class ViolationCertificate:
    """An h x n matrix given by its columns, plus the escaping image column."""

    columns: tuple  # n columns, each an h-tuple that is a member of rho
    image: tuple  # h-tuple outside rho


@dataclass(frozen=True)
class PreservationVerdict:
    preserved: bool
    certificate: Optional[ViolationCertificate] = None

    def __post_init__(self):
        if self.preserved == (self.certificate is not None):
            raise ValueError("certificate present iff the verdict is negative")


def check_certificate(cert: ViolationCertificate, f, rho: Relation) -> bool:
    """Replay a certificate through the definition.

    Accepts an n-ary PartialFn or a PartialUnaryFn.  True iff all columns
    are in rho, all rows are in dom(f), f maps the rows to the stated
    image, and the image is outside rho.
    """
    if isinstance(f, PartialUnaryFn):
        f = f.as_partial_fn()
    n, h = f.n, rho.h
    if len(cert.columns) != n or len(cert.image) != h:
        return False
    if any(len(c) != h for c in cert.columns):
        return False
    if any(c not in rho for c in cert.columns):
        return False
    mapping = f.mapping
    for i in range(h):
        row = tuple(c[i] for c in cert.columns)
        if row not in mapping or mapping[row] != cert.image[i]:
            return False
    return cert.image not in rho


def unary_preserves(f: PartialUnaryFn, rho: Relation) -> PreservationVerdict:
    """Preservation check for a unary partial function.

    Only members of rho whose support sits inside dom(f) can witness a
    violation, so the scan walks the relation's support index rather than
    the whole member list.  The certificate is the rank-least violating
    tuple.
    """
    if f.k != rho.k:
        raise DomainMismatchError("function and relation use different base sets")
    index = rho.support_index
    dmask = f.dom_mask
    ndom = len(f.dom)
    buckets = []
    if ndom and (1 << ndom) <= 4 * len(index) + 4:
        sub = dmask
        while True:
            if sub in index:
                buckets.append(index[sub])
            if sub == 0:
                break
            sub = (sub - 1) & dmask
    else:
        for smask, bucket in index.items():
            if smask & ~dmask == 0:
                buckets.append(bucket)
    candidates = sorted(
        (entry for bucket in buckets for entry in bucket), key=lambda e: e[0]
    )
    table = f.table
    k, h = rho.k, rho.h
    mask = rho.mask
    for _, entries, _ in candidates:
        r = 0
        for e in entries:
            r = r * k + table[e]
        if not mask[r >> 3] >> (r & 7) & 1:
            image = tuple(table[e] for e in entries)
            return PreservationVerdict(
                False, ViolationCertificate((entries,), image)
            )
    return PreservationVerdict(True)


def preserves(f: PartialFn, rho: Relation) -> PreservationVerdict:
    """Preservation check for an n-ary partial function.

    Searches n-tuples of rho-columns depth first in rank order, pruning
    any branch where some partial row already falls outside the prefixes
    of dom(f).  The first violation found is therefore the
    lexicographically least one (columns compared by rank, left to
    right).
    """
    if f.k != rho.k:
        raise DomainMismatchError("function and relation use different base sets")
    if not f.graph:
        return PreservationVerdict(True)
    n, h = f.n, rho.h
    members = rho.members
    prefixes = tuple(
        frozenset(args[:j] for args in f.dom) for j in range(n + 1)
    )
    mapping = f.mapping

    def search(j, rows, cols):
        if j == n:
            image = tuple(mapping[row] for row in rows)
            if image not in rho:
                return ViolationCertificate(cols, image)
            return None
        allowed = prefixes[j + 1]
        for col in members:
            new_rows = tuple(row + (col[i],) for i, row in enumerate(rows))
            if all(row in allowed for row in new_rows):
                found = search(j + 1, new_rows, cols + (col,))
                if found is not None:
                    return found
        return None

    cert = search(0, ((),) * h, ())
    if cert is None:
        return PreservationVerdict(True)
    return PreservationVerdict(False, cert)


def ppol1(rho: Relation) -> frozenset:
    """All unary partial functions preserving rho.

    Enumerates every table directly from the definition; guarded to
    k <= 7 since there are (k+1)**k unary partial functions.
    """
    if rho.k > 7:
        raise CapacityError(
            f"ppol1 enumerates (k+1)**k functions and requires k <= 7, got k={rho.k}"
        )
    members = rho.members
    k = rho.k
    out = []
    for f in all_partial_unary(k):
        table = f.table
        ok = True
        for entries in members:
            image = []
            for e in entries:
                v = table[e]
                if v is None:
                    image = None
                    break
                image.append(v)
            if image is not None and tuple(image) not in rho:
                ok = False
                break
        if ok:
            out.append(f)
    return frozenset(out)
