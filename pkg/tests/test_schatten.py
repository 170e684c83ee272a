import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from src.errors import InvalidExponent
from src.linalg.schatten import (
    INF,
    conjugate_exponent,
    norm_from_singular_values,
    schatten_norm,
    trace,
    validate_open_exponent,
)
from src.states.generator import ginibre, make_rng, random_density_matrix, random_unitary
from tests.oracles import singular_values_via_gram

P_VALUES = st.sampled_from([1.0, 1.25, 1.5, 2.0, 3.0, 7.0, INF])


def test_diagonal_norms():
    D = np.diag([3.0, 4.0])
    assert schatten_norm(D, 2) == pytest.approx(5.0)
    assert schatten_norm(D, 1) == pytest.approx(7.0)
    assert schatten_norm(D, INF) == pytest.approx(4.0)


def test_p3_matches_gram_oracle(random_matrix):
    M = random_matrix(5, 11)
    sigma = singular_values_via_gram(M)
    expected = math.fsum(sigma**3) ** (1.0 / 3.0)
    assert schatten_norm(M, 3) == pytest.approx(expected, abs=1e-9)


def test_zero_matrix_has_zero_norm():
    assert schatten_norm(np.zeros((3, 3)), 2) == 0.0


def test_large_p_does_not_overflow():
    assert schatten_norm(np.diag([1e200, 1e200]), 4) == pytest.approx(1e200 * 2**0.25)


def test_exponent_validation():
    with pytest.raises(InvalidExponent):
        schatten_norm(np.eye(2), 0.5)
    with pytest.raises(InvalidExponent, match=r"p must satisfy 1 < p < ∞"):
        validate_open_exponent(1.0)
    with pytest.raises(InvalidExponent):
        validate_open_exponent(INF)
    assert validate_open_exponent(2) == 2.0


def test_conjugate_exponent():
    assert conjugate_exponent(2.0) == 2.0
    assert conjugate_exponent(3.0) == pytest.approx(1.5)
    assert conjugate_exponent(1.0) == INF
    assert conjugate_exponent(INF) == 1.0


def test_trace():
    assert trace(np.eye(4)) == 4
    rho = random_density_matrix(6, 0).matrix
    assert abs(trace(rho) - 1.0) <= 1e-12


def test_trace_of_commutator_vanishes(random_matrix):
    A = random_matrix(5, 5)
    B = random_matrix(5, 6)
    assert abs(trace(A @ B - B @ A)) <= 1e-10


@settings(max_examples=60, deadline=None)
@given(
    s=arrays(np.float64, (6,), elements=st.floats(0.0, 1e3)),
    p=P_VALUES,
    q=P_VALUES,
)
def test_norm_decreasing_in_p(s, p, q):
    low, high = sorted([p, q])
    assert norm_from_singular_values(s, high) <= norm_from_singular_values(s, low) * (1 + 1e-12) + 1e-300


@settings(max_examples=40, deadline=None)
@given(dim=st.integers(1, 6), seed=st.integers(0, 2**31 - 1), p=P_VALUES)
def test_triangle_and_holder(dim, seed, p):
    rng = make_rng(seed)
    A = ginibre(dim, rng)
    B = ginibre(dim, rng)
    na, nb = schatten_norm(A, p), schatten_norm(B, p)
    assert schatten_norm(A + B, p) <= (na + nb) * (1 + 1e-10)
    holder = na * schatten_norm(B, conjugate_exponent(p))
    assert schatten_norm(A @ B, 1) <= holder * (1 + 1e-10)


@settings(max_examples=40, deadline=None)
@given(dim=st.integers(1, 6), seed=st.integers(0, 2**31 - 1), p=P_VALUES)
def test_unitary_invariance(dim, seed, p):
    rng = make_rng(seed)
    M = ginibre(dim, rng)
    U = random_unitary(dim, rng)
    V = random_unitary(dim, rng)
    assert schatten_norm(U @ M @ V, p) == pytest.approx(schatten_norm(M, p), rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(dim=st.integers(1, 6), seed=st.integers(0, 2**31 - 1), p=P_VALUES)
def test_rank_one_norms_coincide(dim, seed, p):
    rng = make_rng(seed)
    u = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    R = np.outer(u, v.conj())
    assert schatten_norm(R, p) == pytest.approx(np.linalg.norm(u) * np.linalg.norm(v), rel=1e-10)
