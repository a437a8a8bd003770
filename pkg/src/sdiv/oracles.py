"""Independent reference solvers used to check :mod:`sdiv.oneshot`.

None of these share code with the boundary tracer: the classical solvers sort
atoms by likelihood ratio, the i.i.d. solver works on type classes in the log
domain, and the Helstrom check is a closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import DomainError, ValidationError
from .linalg import density_matrix, positive_part_trace
from .oneshot import ExtremalFamily, NPBoundary

_MODULE = "oracles"
_TIE_TOL = 1e-12


@dataclass(frozen=True)
class ClassicalPair:
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        q = np.asarray(self.q, dtype=np.float64)
        if p.ndim != 1 or p.shape != q.shape or p.size == 0:
            raise ValidationError(f"probability vectors need equal 1-D shapes, got {p.shape}, {q.shape}", _MODULE)
        for name, v in (("p", p), ("q", q)):
            if np.any(v < 0) or abs(v.sum() - 1.0) > 1e-12:
                raise ValidationError(f"{name} is not a probability vector: {v}", _MODULE)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    def states(self):
        return np.diag(self.p).astype(complex), np.diag(self.q).astype(complex)


def _ratio_groups(log_p, log_q):
    """Merge atoms of equal likelihood ratio; return groups by decreasing ratio.

    Returns arrays (log P, log Q) per group. Atoms null under both
    hypotheses are dropped.
    """
    keep = np.isfinite(log_p) | np.isfinite(log_q)
    log_p, log_q = log_p[keep], log_q[keep]
    with np.errstate(invalid="ignore"):
        llr = log_p - log_q  # +inf where q = 0, -inf where p = 0
    order = np.argsort(-llr, kind="stable")
    groups_p, groups_q = [], []
    prev = None
    for i in order:
        if prev is not None and (llr[i] == prev or abs(llr[i] - prev) <= _TIE_TOL):
            groups_p[-1].append(log_p[i])
            groups_q[-1].append(log_q[i])
        else:
            groups_p.append([log_p[i]])
            groups_q.append([log_q[i]])
        prev = llr[i]
    gp = np.array([logsumexp(g) for g in groups_p])
    gq = np.array([logsumexp(g) for g in groups_q])
    return gp, gq


def _log(x):
    with np.errstate(divide="ignore"):
        return np.log(x)


def classical_boundary(pair: ClassicalPair) -> NPBoundary:
    """Exact boundary: include atoms in order of decreasing ``p_i / q_i``."""
    gp, gq = _ratio_groups(_log(pair.p), _log(pair.q))
    P, Q = np.exp(gp), np.exp(gq)
    # vertex k = test accepting the first k groups; groups with P = 0 never help
    useful = P > 0
    P, Q = P[useful], Q[useful]
    alphas = 1.0 - np.concatenate([[0.0], np.cumsum(P)])
    betas = np.concatenate([[0.0], np.cumsum(Q)])
    mus = np.full(P.size, np.inf)
    np.divide(P, Q, out=mus, where=Q > 0)
    # the q = 0 group only lowers alpha at beta = 0: not a Pareto vertex
    if P.size and Q[0] == 0:
        alphas, betas, mus = alphas[1:], betas[1:], mus[1:]
    alphas = np.clip(alphas, 0.0, 1.0)
    alphas[-1] = 0.0
    return NPBoundary(alphas[::-1].copy(), betas[::-1].copy(), mus[::-1].copy())


def _crossing_log(log_a, log_b, gp, gq, s, C):
    """Log of min beta with alpha <= C beta^s along the group sequence.

    ``log_a[k]``/``log_b[k]`` are the log errors after accepting ``k`` groups.
    """
    log_c = math.log(C)
    with np.errstate(invalid="ignore"):
        g = log_a - log_c - s * log_b
    # nan only where alpha = beta = 0, which is feasible
    g = np.where(np.isnan(g), -np.inf, g)
    hits = np.nonzero(g <= 0)[0]
    k = int(hits[0])
    if k == 0:
        return log_b[0]
    lp, lq = gp[k - 1], gq[k - 1]

    def parts(t):
        la = np.logaddexp(log_a[k], math.log1p(-t) + lp if t < 1 else -np.inf)
        lb = np.logaddexp(log_b[k - 1], math.log(t) + lq if t > 0 else -np.inf)
        return la, lb

    lo, hi = 0.0, 1.0
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        la, lb = parts(mid)
        if la - log_c - s * lb > 0:
            lo = mid
        else:
            hi = mid
    return float(parts(hi)[1])


def _group_errors_log(gp, gq):
    useful = np.isfinite(gp)
    gp, gq = gp[useful], gq[useful]
    suffix = np.concatenate([np.logaddexp.accumulate(gp[::-1])[::-1], [-np.inf]])
    prefix = np.concatenate([[-np.inf], np.logaddexp.accumulate(gq)])
    return suffix, prefix, gp, gq


def classical_q_s(pair: ClassicalPair, s: float, C: float = 1.0) -> float:
    """Q_C^(s) of a commuting pair, solved on the likelihood-ratio ordering."""
    if not s > 0 or not C > 0:
        raise DomainError(f"need s > 0 and C > 0, got s={s}, C={C}", _MODULE)
    gp, gq = _ratio_groups(_log(pair.p), _log(pair.q))
    log_a, log_b, gp, gq = _group_errors_log(gp, gq)
    return float(np.exp(_crossing_log(log_a, log_b, gp, gq, s, C)))


def classical_beta_epsilon(pair: ClassicalPair, eps: float) -> float:
    return classical_boundary(pair).beta_epsilon(eps)


def classical_p_err_bayes(p: float, pair: ClassicalPair) -> float:
    """Bayes error of a commuting pair: ``sum_i min(p*p_i, (1-p)*q_i)``."""
    if not 0 < p < 1:
        raise DomainError(f"prior p={p} outside (0, 1)", _MODULE)
    return float(np.sum(np.minimum(p * pair.p, (1.0 - p) * pair.q)))


def classical_p_err_s_c(pair: ClassicalPair, s: float, C: float = 1.0) -> float:
    if not s > 0 or not C > 0:
        raise DomainError(f"need s > 0 and C > 0, got s={s}, C={C}", _MODULE)
    return classical_boundary(pair).p_err_s_c(s, C)


def iid_type_q_s(pair: ClassicalPair, n: int, s: float, C: float = 1.0) -> float:
    """``log Q_C^(s)(p^n || q^n)`` for a binary pair via the ``n + 1`` type classes."""
    if pair.p.size != 2:
        raise DomainError(f"type-class oracle needs a binary alphabet, got k={pair.p.size}", _MODULE)
    if not 1 <= n <= 100_000:
        raise DomainError(f"n={n} outside [1, 1e5]", _MODULE)
    if not s > 0 or not C > 0:
        raise DomainError(f"need s > 0 and C > 0, got s={s}, C={C}", _MODULE)
    j = np.arange(n + 1)
    log_binom = gammaln(n + 1) - gammaln(j + 1) - gammaln(n - j + 1)
    lp, lq = _log(pair.p), _log(pair.q)
    with np.errstate(invalid="ignore"):
        log_p = log_binom + np.where(j > 0, j * lp[0], 0.0) + np.where(j < n, (n - j) * lp[1], 0.0)
        log_q = log_binom + np.where(j > 0, j * lq[0], 0.0) + np.where(j < n, (n - j) * lq[1], 0.0)
    gp, gq = _ratio_groups(log_p, log_q)
    log_a, log_b, gp, gq = _group_errors_log(gp, gq)
    return float(_crossing_log(log_a, log_b, gp, gq, s, C))


def random_test_search(rho, sigma, s: float, C: float = 1.0, trials: int = 1000, seed=0,
                       include_optimum: bool = True, extra_tests=()) -> float:
    """Smallest feasible type II error found among random tests.

    Each random test ``L`` (Gaussian Hermitian, spectrum mapped affinely onto
    [0, 1]) is shrunk to ``t*L`` with the smallest feasible ``t``. The result
    is an upper bound on ``Q_C^(s)``.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1", _MODULE)
    rho = density_matrix(rho)
    sigma = density_matrix(sigma)
    d = rho.shape[0]
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(trials, d, d)) + 1j * rng.normal(size=(trials, d, d))
    w, v = np.linalg.eigh(0.5 * (g + np.conj(np.swapaxes(g, 1, 2))))
    span = w[:, -1:] - w[:, :1]
    w = (w - w[:, :1]) / np.where(span > 0, span, 1.0)
    tests = np.einsum("tij,tj,tkj->tik", v, w, v.conj())
    extra = [np.asarray(t, dtype=complex) for t in extra_tests]
    if include_optimum:
        extra.append(ExtremalFamily(rho, sigma).solve_q_s_c(s, C).test)
    if extra:
        tests = np.concatenate([tests, np.stack(extra)])
    a = np.einsum("tij,ji->t", tests, rho).real  # Tr(L rho)
    b = np.einsum("tij,ji->t", tests, sigma).real  # Tr(L sigma)

    def slack(t):
        return 1.0 - t * a - C * np.maximum(t * b, 0.0) ** s

    # feasible at t = 1 (with rounding slack); h is decreasing in t
    feasible = slack(np.ones_like(a)) <= 1e-12
    lo, hi = np.zeros_like(a), np.ones_like(a)
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        ok = slack(mid) <= 0
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    # keep t = 1 where only the slack made the test feasible
    t_star = np.where(slack(hi) <= 0, hi, 1.0)
    betas = np.where(feasible, t_star * b, np.inf)
    best = float(np.min(betas))
    return min(1.0, best)


def helstrom_check(p: float, rho, sigma) -> float:
    """Bayes error ``p - Tr(p*rho - (1-p)*sigma)_+`` in closed form."""
    if not 0 < p < 1:
        raise DomainError(f"prior p={p} outside (0, 1)", _MODULE)
    rho, sigma = np.asarray(rho), np.asarray(sigma)
    return p - positive_part_trace(p * rho - (1.0 - p) * sigma)


__all__ = [
    "ClassicalPair",
    "classical_boundary",
    "classical_q_s",
    "classical_beta_epsilon",
    "classical_p_err_bayes",
    "classical_p_err_s_c",
    "iid_type_q_s",
    "random_test_search",
    "helstrom_check",
]
