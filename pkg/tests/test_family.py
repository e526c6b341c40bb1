from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsrgkron import matcore as mc
from dsrgkron.dsrg import DsrgParams, verify_algebraic
from dsrgkron.errors import CapacityError, SeedContractError, UnsupportedParametersError
from dsrgkron.family import (
    EQUATIONS,
    FamilySpec,
    build_A,
    build_B,
    build_C,
    build_P,
    build_P_recursive,
    check_block_system,
    check_structure,
    family_order,
    family_params,
    iter_family,
)

from oracles import p_entry_matrix


# --- P_n ---------------------------------------------------------------------


def test_build_P_hand_example():
    expected = np.array([[0, 0, 1, 1], [1, 1, 0, 0], [0, 0, 1, 1], [1, 1, 0, 0]])
    assert np.array_equal(build_P(1, 1).to_array(), expected)


@pytest.mark.parametrize("n,t", [(1, 1), (1, 3), (2, 1), (2, 2), (3, 1), (3, 2), (2, 5)])
def test_build_P_matches_entry_rule(n, t):
    assert np.array_equal(build_P(n, t).to_array(), p_entry_matrix(n, t))


@given(st.integers(1, 3), st.integers(1, 4))
@settings(max_examples=12, deadline=None)
def test_P_square_is_tJ_and_regular(n, t):
    p = build_P(n, t)
    assert p.shape == (t * 4**n, t * 4**n)
    assert (p.row_sums() == t * 2**n).all() and (p.col_sums() == t * 2**n).all()
    assert mc.mul(p, p).is_constant(t)


@given(st.integers(1, 4), st.integers(1, 3))
@settings(max_examples=12, deadline=None)
def test_recursive_P_is_bit_identical(n, t):
    assert build_P_recursive(n, t) == build_P(n, t)


# --- parameters --------------------------------------------------------------


def test_family_params_examples():
    seed = DsrgParams(6, 3, 2, 1, 2)
    assert family_params(seed, 1) == seed
    assert family_params(seed, 2).as_tuple() == (28, 7, 2, 1, 2)
    for n in range(1, 8):
        assert family_params(seed, n).as_tuple() == (2**n * (2 ** (n + 1) - 1), 2 ** (n + 1) - 1, 2, 1, 2)
    with pytest.raises(UnsupportedParametersError):
        family_params(DsrgParams(6, 3, 2, 1, 1), 2)


@given(st.integers(1, 6), st.integers(0, 5), st.integers(1, 10))
def test_order_recurrence(t, lam, n):
    # v_{n+1} = 2 v_n + 2 * (size of P_n) and k_{n+1} = k_n + 2^n t
    k = t + lam
    seed = DsrgParams(2 * k, k, t, lam, t)
    pn, pn1 = family_params(seed, n), family_params(seed, n + 1)
    assert pn1.v == 2 * pn.v + 2 * t * 4**n
    assert pn1.k == pn.k + t * 2**n
    assert family_order(seed.v, t, n) == pn.v


# --- B_n, C_n ----------------------------------------------------------------


def test_B2_C2_shapes(spec_t2):
    assert build_B(spec_t2, 2).shape == (28, 32)
    assert build_C(spec_t2, 2).shape == (32, 28)
    assert build_B(spec_t2, 1) == spec_t2.b1 and build_C(spec_t2, 1) == spec_t2.c1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_structure_holds(spec_t2, spec_t3, n):
    for spec in (spec_t2, spec_t3):
        rep = check_structure(spec, n)
        assert rep.ok, rep.failures


def test_structure_detects_broken_B():
    # a seed triple whose B1 rows are not blocky
    spec = _t2_spec_with(b_flip=(0, 0))
    rep = check_structure(spec, 2)
    assert not rep.ok
    assert not rep.details["B row sums"] and not rep.details["B row blocks"]


def test_other_C_block_choice_gives_same_family(spec_t2):
    # every row block of C_{n-1} is identical, so the kept block does not matter
    for n in (2, 3):
        assert build_C(spec_t2, n, 0) == build_C(spec_t2, n, 1)


# --- A_n ---------------------------------------------------------------------


def test_build_A_orders(spec_t2):
    orders = [term.v_n for term in iter_family(spec_t2, 4)]
    assert orders == [6, 28, 120, 496]
    term = build_A(spec_t2, 2)
    assert term.a_n.shape == (28, 28) and term.params_n.as_tuple() == (28, 7, 2, 1, 2)


@pytest.mark.parametrize("n", [2, 3])
def test_family_terms_verify(spec_t2, spec_t3, n):
    for spec in (spec_t2, spec_t3):
        term = build_A(spec, n)
        assert verify_algebraic(term.a_n, term.params_n).ok


def test_iter_family_capacity_is_checked_first(spec_t2):
    old = mc.set_capacity_limit(1000)
    try:
        with pytest.raises(CapacityError, match="A_3"):
            list(iter_family(spec_t2, 3))
    finally:
        mc.set_capacity_limit(old)


# --- block system ------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 3])
def test_block_system(spec_t2, n):
    rep = check_block_system(spec_t2, n)
    assert rep.ok and set(rep.details) == set(EQUATIONS)


def _t2_spec_with(b_flip=None, c_flip=None):
    from dsrgkron import catalog

    good = catalog.load_fixture(1)
    b1 = good.b1.with_flipped(*b_flip) if b_flip else good.b1
    c1 = good.c1.with_flipped(*c_flip) if c_flip else good.c1
    return FamilySpec(good.seed_params, good.a1, b1, c1, check=False)


def test_block_system_detects_b1_bit_flip():
    rep = check_block_system(_t2_spec_with(b_flip=(2, 5)), 1)
    assert not rep.ok and rep.failure_count > 0
    assert rep.failures[0].kind in EQUATIONS


def test_validate_seed_rejects_flip():
    spec = _t2_spec_with(b_flip=(2, 5))
    with pytest.raises(SeedContractError) as info:
        FamilySpec(spec.seed_params, spec.a1, spec.b1, spec.c1)
    assert info.value.condition == "blockiness"


def test_block_system_capacity(spec_t2):
    with pytest.raises(CapacityError, match="sampled"):
        check_block_system(spec_t2, 7)
