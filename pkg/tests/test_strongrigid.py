"""Near-total Boolean relations, the escape functions, and the chain."""
from __future__ import annotations

import itertools

import pytest

from rigidrel.kernel import CapacityError, PartialFn, Relation, all_partial_fns, is_trivial
from rigidrel.preserve import check_certificate, preserves
from rigidrel.strongrigid import (
    NoWitnessError,
    chain_inclusion,
    delta,
    delta_family,
    delta_preserves,
    excluded_tuple,
    limit_is_trivial_clone,
    phi,
    phi_preserves_all,
    prefix_escape,
    repeat_identifies,
    verify_witness,
    witness_nontrivial,
)

NEG = PartialFn.from_mapping(2, 1, {(0,): 1, (1,): 0})
XOR = PartialFn.from_mapping(
    2, 2, {t: (t[0] + t[1]) % 2 for t in itertools.product(range(2), repeat=2)}
)


# -- the relations ------------------------------------------------------------


def test_excluded_tuple():
    assert excluded_tuple(1, 2) == (1, 0)
    assert excluded_tuple(2, 5) == (1, 1, 0, 0, 0)
    with pytest.raises(ValueError):
        excluded_tuple(0, 2)
    with pytest.raises(ValueError):
        excluded_tuple(2, 2)


def test_delta_misses_exactly_one_tuple():
    for h in range(2, 6):
        for t in range(1, h):
            rel = delta(t, h)
            assert rel.k == 2 and rel.h == h
            assert rel.size == 2**h - 1
            assert excluded_tuple(t, h) not in rel
    assert delta(1, 2).members == ((0, 0), (0, 1), (1, 1))


def test_delta_family():
    fam = delta_family(4)
    assert len(fam) == 3
    assert [f.size for f in fam] == [15, 15, 15]
    assert list(delta_family(2)) == [delta(1, 2)]
    with pytest.raises(ValueError):
        delta_family(1)


# -- delta_preserves against the generic checker -------------------------------


def test_delta_preserves_cross_validated():
    for h in (2, 3):
        for t in range(1, h):
            rel = delta(t, h)
            for n in (1, 2):
                for f in all_partial_fns(2, n):
                    fast = delta_preserves(f, t, h)
                    slow = preserves(f, rel)
                    assert fast.preserved == slow.preserved, (f, t, h)
                    if not fast.preserved:
                        assert check_certificate(fast.certificate, f, rel)


def test_delta_preserves_identity_and_constants():
    ident = PartialFn.from_mapping(2, 1, {(0,): 0, (1,): 1})
    zero = PartialFn.from_mapping(2, 1, {(0,): 0, (1,): 0})
    one = PartialFn.from_mapping(2, 1, {(0,): 1, (1,): 1})
    for t, h in ((1, 2), (1, 3), (2, 3), (2, 4)):
        assert delta_preserves(ident, t, h).preserved
        assert delta_preserves(zero, t, h).preserved
        assert delta_preserves(one, t, h).preserved


def test_negation_breaks_every_delta():
    for h in (2, 3, 4):
        for t in range(1, h):
            verdict = delta_preserves(NEG, t, h)
            assert not verdict.preserved
            assert check_certificate(verdict.certificate, NEG, delta(t, h))


# -- the escape functions -------------------------------------------------------


def test_phi_shape():
    f = phi(3)
    assert f.n == 3
    assert f.mapping == {(0, 1, 1): 1, (0, 1, 0): 0, (0, 0, 1): 0}
    assert phi(4).mapping == {
        (0, 1, 1, 1): 1,
        (0, 1, 0, 0): 0,
        (0, 0, 1, 0): 0,
        (0, 0, 0, 1): 0,
    }
    with pytest.raises(ValueError):
        phi(2)


def test_phi_is_nontrivial_yet_preserves_all_lower_arities():
    for n in (3, 4):
        f = phi(n)
        assert not is_trivial(f)
        for h in range(1, n):
            assert phi_preserves_all(n, h)
        assert not preserves(f, delta(1, n)).preserved


def test_phi_preserves_all_rejects_h_not_below_n():
    with pytest.raises(ValueError):
        phi_preserves_all(3, 3)
    with pytest.raises(CapacityError):
        phi_preserves_all(6, 5)


# -- nontriviality witnesses ------------------------------------------------------


def test_witness_for_negation():
    w = witness_nontrivial(NEG)
    assert (w.h, w.t) == (2, 1)
    assert verify_witness(NEG, w)
    data = w.to_json()
    assert data["violated"] == "delta(1,2)"


def test_witness_for_xor():
    w = witness_nontrivial(XOR)
    assert (w.h, w.t) == (4, 2)
    assert verify_witness(XOR, w)


def test_witness_for_phi():
    w = witness_nontrivial(phi(3))
    assert (w.h, w.t) == (3, 1)
    assert verify_witness(phi(3), w)


def test_witness_all_nontrivial_binary_functions():
    for f in all_partial_fns(2, 2):
        if is_trivial(f):
            with pytest.raises(NoWitnessError):
                witness_nontrivial(f)
        else:
            w = witness_nontrivial(f)
            assert verify_witness(f, w)
            assert not delta_preserves(f, w.t, w.h).preserved


def test_verify_witness_rejects_wrong_shape():
    w = witness_nontrivial(NEG)
    assert not verify_witness(XOR, w)


# -- chain, coordinate-repetition identification, limit ----------------------------


def test_chain_inclusion_small():
    assert chain_inclusion(2, 2)
    assert chain_inclusion(2, 3)
    assert chain_inclusion(3, 2)


def test_chain_inclusion_guard():
    with pytest.raises(CapacityError):
        chain_inclusion(2, 4)


def test_repeat_identification():
    for h in range(3, 6):
        for t in range(2, h):
            assert repeat_identifies(t, h)
    # the identification holds at t = 1 too under this formulation
    assert repeat_identifies(1, 2)
    with pytest.raises(ValueError):
        repeat_identifies(0, 2)
    with pytest.raises(ValueError):
        repeat_identifies(2, 2)


def test_prefix_escape():
    for h0 in (2, 3):
        f = prefix_escape(h0)
        assert f.n == h0 + 1
        assert not is_trivial(f)


def test_limit_is_trivial_clone_arity_two():
    assert limit_is_trivial_clone(2)


def test_limit_capacity_guard():
    with pytest.raises(CapacityError):
        limit_is_trivial_clone(4)
