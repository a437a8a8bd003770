import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from samples import diag_pair, random_pairs
from sdiv.errors import DomainError
from sdiv.linalg import positive_part_trace
from sdiv.oneshot import (
    ErrorPoint,
    ExtremalFamily,
    beta_epsilon,
    error_pair,
    np_boundary,
    p_err_bayes,
    p_err_s_c,
    q_min,
    q_s_c,
)
from sdiv.oracles import (
    ClassicalPair,
    classical_beta_epsilon,
    classical_boundary,
    classical_p_err_bayes,
    classical_p_err_s_c,
    classical_q_s,
    helstrom_check,
    random_test_search,
)
from sdiv.states import pure_qubit, random_state

GOLDEN = (math.sqrt(5) - 1) / 2
# mpmath root of 0.1 + 0.9u = (0.5 - 0.5u)^2 on the second hull edge
Q2_DIAG = 0.445362404707371
WITNESS = (0.3 * np.diag([1.0, 0.0]) + 0.7 * np.diag([0.0, 1.0]), np.diag([1.0, 0.0]))

seeds = st.integers(min_value=0, max_value=2**31)
S_VALUES = [0.3, 0.5, 1.0, 2.0, 3.0]
C_VALUES = [0.5, 1.0, 2.0]


def quantum_pairs():
    pairs = random_pairs(4)
    pairs.append((random_state(3, rank=2, seed=40), random_state(3, seed=41)))
    pairs.append((random_state(3, seed=42), random_state(3, rank=1, seed=43)))
    pairs.append((np.array([[0.8, 0.1], [0.1, 0.2]]), 0.5 * pure_qubit(1.0, 0.3) + np.eye(2) / 4))
    return pairs


@pytest.mark.parametrize(
    "test, expected",
    [(np.eye(2), (0.0, 1.0)), (np.zeros((2, 2)), (1.0, 0.0)), (np.diag([1.0, 0.0]), (0.1, 0.5))],
)
def test_error_pair(test, expected):
    pt = error_pair(*diag_pair(), test)
    assert (pt.alpha, pt.beta) == pytest.approx(expected, abs=1e-15)
    assert pt.mu is None


def test_error_pair_dimension_mismatch():
    with pytest.raises(DomainError):
        error_pair(np.eye(2) / 2, np.eye(2) / 2, np.eye(3))


def test_boundary_examples():
    bd = np_boundary(*diag_pair())
    assert np.allclose(bd.alphas, [0.0, 0.1, 1.0], atol=1e-15)
    assert np.allclose(bd.betas, [1.0, 0.5, 0.0], atol=1e-15)
    assert np.allclose(bd.mus, [0.2, 1.8], atol=1e-14)

    same = np_boundary(np.eye(2) / 2, np.eye(2) / 2)
    assert np.allclose(same.alphas, [0.0, 1.0]) and np.allclose(same.betas, [1.0, 0.0])

    ortho = np_boundary(pure_qubit(0.0), pure_qubit(np.pi))
    assert len(ortho) == 1 and ortho.alphas[0] == pytest.approx(0.0) and ortho.betas[0] == pytest.approx(0.0)


@pytest.mark.parametrize("k, pair", list(enumerate(quantum_pairs())))
def test_boundary_shape_and_certificates(k, pair):
    rho, sigma = pair
    bd = np_boundary(rho, sigma, max_vertices=400)
    assert bd.alphas[0] == 0.0 and bd.betas[-1] == 0.0
    assert np.all(np.diff(bd.alphas) > 0) and np.all(np.diff(bd.betas) < 0)
    slopes = np.diff(bd.betas) / np.diff(bd.alphas)
    assert np.all(np.diff(slopes) > 0)
    for pt in bd.vertices:
        assert abs(pt.certificate_gap(rho, sigma)) <= 1e-7


def test_boundary_csv(tmp_path):
    bd = np_boundary(*diag_pair())
    path = tmp_path / "b.csv"
    bd.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "mu,alpha,beta" and len(lines) == 4


@pytest.mark.parametrize("eps, expected", [(1.0, 0.0), (0.1, 0.5), (0.0, 1.0), (0.55, 0.25)])
def test_beta_epsilon_diagonal(eps, expected):
    assert beta_epsilon(*diag_pair(), eps) == pytest.approx(expected, abs=1e-12)


def test_beta_epsilon_witness():
    rho, sigma = WITNESS
    assert beta_epsilon(rho, sigma, 0.3) == 0.0
    assert beta_epsilon(rho, sigma, 0.1) == pytest.approx(2 / 3, abs=1e-9)


def test_beta_epsilon_domain():
    with pytest.raises(DomainError):
        beta_epsilon(*diag_pair(), 1.5)


@pytest.mark.parametrize(
    "pair, s, expected",
    [
        ((np.eye(2) / 2, np.eye(2) / 2), 1.0, 0.5),
        ((np.eye(2) / 2, np.eye(2) / 2), 2.0, GOLDEN),
        (diag_pair(), 1.0, 5 / 14),
        (diag_pair(), 2.0, Q2_DIAG),
    ],
)
def test_q_s_c_examples(pair, s, expected):
    assert q_s_c(*pair, s) == pytest.approx(expected, abs=1e-12)


def test_q_s_c_domain():
    for s, C in ((0.0, 1.0), (-1.0, 1.0), (1.0, 0.0)):
        with pytest.raises(DomainError):
            q_s_c(*diag_pair(), s, C)


def test_q_min_symmetric():
    rho, sigma = diag_pair()
    assert q_min(rho, sigma) == pytest.approx(5 / 14, abs=1e-12)
    assert q_min(sigma, rho) == pytest.approx(5 / 14, abs=1e-12)
    for rho, sigma in quantum_pairs():
        assert q_min(rho, sigma) == pytest.approx(q_min(sigma, rho), abs=1e-9)


@pytest.mark.parametrize(
    "pair, p, expected",
    [
        ((np.eye(2) / 2, np.eye(2) / 2), 0.3, 0.3),
        ((np.eye(2) / 2, np.eye(2) / 2), 0.8, 0.2),
        ((pure_qubit(0.0), pure_qubit(np.pi)), 0.5, 0.0),
        (diag_pair(), 0.5, 0.3),
    ],
)
def test_p_err_bayes_examples(pair, p, expected):
    assert p_err_bayes(p, *pair) == pytest.approx(expected, abs=1e-12)


def test_p_err_bayes_domain():
    for p in (0.0, 1.0):
        with pytest.raises(DomainError):
            p_err_bayes(p, *diag_pair())


@pytest.mark.parametrize("k, pair", list(enumerate(quantum_pairs())))
@pytest.mark.parametrize("p", [0.2, 0.5, 0.9])
def test_p_err_bayes_is_helstrom(k, pair, p):
    assert p_err_bayes(p, *pair) == pytest.approx(helstrom_check(p, *pair), abs=1e-12)


@pytest.mark.parametrize(
    "pair, s, expected",
    [
        ((np.eye(2) / 2, np.eye(2) / 2), 1.0, 1.0),
        (diag_pair(), 1.0, 0.6),
        (diag_pair(), 0.5, (5 / 18) ** 2 + 0.5 - (5 / 18 - 0.1) / 1.8),
        (diag_pair(), 2.0, math.sqrt(0.1) + 0.5),
    ],
)
def test_p_err_s_c_examples(pair, s, expected):
    assert p_err_s_c(*pair, s) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("k, pair", list(enumerate(quantum_pairs())))
@pytest.mark.parametrize("s", S_VALUES)
@pytest.mark.parametrize("C", C_VALUES)
def test_certificates(k, pair, s, C):
    rho, sigma = pair
    fam = ExtremalFamily(rho, sigma)
    q_pt = fam.solve_q_s_c(s, C)
    assert abs(q_pt.certificate_gap(rho, sigma)) <= 1e-7
    assert abs(q_pt.alpha - C * q_pt.beta**s) <= 1e-9
    _, p_pt = fam.solve_p_err_s_c(s, C)
    assert p_pt.certificate_gap(rho, sigma) <= 1e-7
    # the attached test reproduces the reported errors
    for pt in (q_pt, p_pt):
        again = error_pair(rho, sigma, pt.test)
        assert (again.alpha, again.beta) == pytest.approx((pt.alpha, pt.beta), abs=1e-12)


@pytest.mark.parametrize("k, pair", list(enumerate(quantum_pairs())))
@pytest.mark.parametrize("s", S_VALUES)
@pytest.mark.parametrize("C", C_VALUES)
def test_duality(k, pair, s, C):
    rho, sigma = pair
    lhs = q_s_c(rho, sigma, s, C)
    rhs = (q_s_c(sigma, rho, 1 / s, C ** (-1 / s)) / C) ** (1 / s)
    assert abs(lhs - rhs) <= 1e-7


@pytest.mark.parametrize("k, pair", list(enumerate(quantum_pairs())))
@pytest.mark.parametrize("s", S_VALUES)
@pytest.mark.parametrize("C", C_VALUES)
def test_sandwich(k, pair, s, C):
    rho, sigma = pair
    q = q_s_c(rho, sigma, s, C)
    scale = C ** (1 / s)
    p = p_err_s_c(rho, sigma, s, scale)
    assert scale * q <= p + 1e-9
    assert p <= 2 * scale * q + 1e-9


@pytest.mark.parametrize("k, pair", list(enumerate(quantum_pairs())))
@pytest.mark.parametrize("s", S_VALUES)
@pytest.mark.parametrize("C", [0.25, 0.5, 2.0, 4.0])
def test_scaling_sandwich(k, pair, s, C):
    base = p_err_s_c(*pair, s, 1.0)
    value = p_err_s_c(*pair, s, C)
    assert min(C, 1) * base <= value + 1e-12
    assert value <= max(C, 1) * base + 1e-12


@pytest.mark.parametrize("k, pair", list(enumerate(quantum_pairs())))
def test_monotone_in_eps_and_c(k, pair):
    fam = ExtremalFamily(*pair)
    betas = [fam.beta_epsilon(e) for e in np.linspace(0, 1, 41)]
    assert all(a >= b - 1e-12 for a, b in zip(betas, betas[1:]))
    for s in (0.5, 2.0):
        qs = [fam.q_s_c(s, C) for C in np.geomspace(0.05, 20, 25)]
        assert all(a >= b - 1e-12 for a, b in zip(qs, qs[1:]))


@pytest.mark.parametrize("k, pair", list(enumerate(quantum_pairs())))
@pytest.mark.parametrize("s", [0.5, 2.0])
def test_random_tests_never_beat_the_optimum(k, pair, s):
    rho, sigma = pair
    found = random_test_search(rho, sigma, s, 1.0, trials=500, seed=k, include_optimum=False)
    assert found >= q_s_c(rho, sigma, s) - 1e-9


@pytest.mark.parametrize("k, pair", list(enumerate(quantum_pairs())))
@pytest.mark.parametrize("s", [0.3, 0.5, 2.0, 3.0])
def test_p_err_no_better_on_dense_curve(k, pair, s):
    # sweep extremal tests densely: none beats the reported minimum
    rho, sigma = pair
    fam = ExtremalFamily(rho, sigma)
    best = fam.p_err_s_c(s, 1.0)
    for t in np.linspace(0, 1, 801):
        pt = fam.at(t)
        assert pt.alpha ** (1 / s) + pt.beta >= best - 1e-10


def _classical(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 6))
    p, q = rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(k))
    if seed % 5 == 0:
        p[0], q[1] = 0.0, 0.0  # disjoint atoms on both sides
        p, q = p / p.sum(), q / q.sum()
    return ClassicalPair(p, q)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, s=st.sampled_from([0.5, 1.0, 2.0]), C=st.sampled_from(C_VALUES),
       eps=st.floats(0, 1), prior=st.floats(0.01, 0.99))
def test_oracle_equivalence(seed, s, C, eps, prior):
    pair = _classical(seed)
    rho, sigma = pair.states()
    assert abs(q_s_c(rho, sigma, s, C) - classical_q_s(pair, s, C)) <= 1e-9
    assert abs(beta_epsilon(rho, sigma, eps) - classical_beta_epsilon(pair, eps)) <= 1e-9
    assert abs(q_min(rho, sigma) - classical_q_s(pair, 1.0, 1.0)) <= 1e-9
    assert abs(p_err_bayes(prior, rho, sigma) - classical_p_err_bayes(prior, pair)) <= 1e-9
    assert abs(p_err_s_c(rho, sigma, s, C) - classical_p_err_s_c(pair, s, C)) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_boundary_matches_classical_vertices(seed):
    pair = _classical(seed)
    bd = np_boundary(*pair.states())
    ref = classical_boundary(pair)
    assert len(bd) == len(ref)
    assert np.allclose(bd.alphas, ref.alphas, atol=1e-10)
    assert np.allclose(bd.betas, ref.betas, atol=1e-10)


def test_certificate_at_infinity():
    pt = ErrorPoint(0.3, 0.0, math.inf)
    assert pt.certificate_gap(*WITNESS) == 0.0
    with pytest.raises(ValueError):
        ErrorPoint(0.1, 0.2).certificate_gap(*WITNESS)


def test_lagrangian_identity():
    rho, sigma = random_state(3, seed=1), random_state(3, seed=2)
    fam = ExtremalFamily(rho, sigma)
    for t in (0.1, 0.5, 0.8):
        pt = fam.at(t)
        mu = t / (1 - t)
        assert pt.alpha + mu * pt.beta == pytest.approx(1 - positive_part_trace(rho - mu * sigma), abs=1e-12)
