"""Scalar divergences built on q(a) = Tr(rho^a sigma^(1-a)).

Every quantity here is a functional of the single curve ``a -> log q(a)`` on
[0, 1]. :class:`RenyiProfile` diagonalizes both states once and evaluates the
curve through the overlap weights ``W[i, j] = |<r_i|s_j>|^2``::

    q(a) = sum_ij W[i, j] * r_i**a * s_j**(1 - a)

with the sum restricted to the supports, which gives ``q(0) = Tr(P_rho sigma)``
and ``q(1) = Tr(rho P_sigma)``. Infinite results are returned as ``math.inf``.
All logarithms are natural.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateInputError, DomainError
from .linalg import density_matrix
from .optimize import grid_golden_max, refine_grid_max
from .policy import resolve

_MODULE = "divergences"
_OVERLAP_FLOOR = 1e-20
# cap on (alphas x overlap pairs) evaluated in one vectorized block
_BLOCK = 2_000_000
# smallest exponent used where a formula divides by alpha
HOEFFDING_ALPHA_MIN = 1e-6


class RenyiProfile:
    """Cached spectral data of a state pair; evaluates ``log q(a)``.

    >>> prof = RenyiProfile(np.diag([0.9, 0.1]), np.diag([0.5, 0.5]))
    >>> round(prof.q(0.5), 6)
    0.894427
    """

    def __init__(self, rho, sigma, policy=None):
        self.policy = policy = resolve(policy)
        self.rho = density_matrix(rho, policy)
        self.sigma = density_matrix(sigma, policy)
        if self.rho.shape != self.sigma.shape:
            raise DomainError(f"state dimensions differ: {self.rho.shape} vs {self.sigma.shape}", _MODULE)
        r, u = np.linalg.eigh(self.rho)
        t, v = np.linalg.eigh(self.sigma)
        overlap = np.abs(u.conj().T @ v) ** 2
        in_r = r > policy.support_tol
        in_t = t > policy.support_tol
        # Tr((1 - P_sigma) rho)
        self.support_leak = float(np.sum(r[in_r] * overlap[np.ix_(in_r, ~in_t)].sum(axis=1)))

        w = overlap[np.ix_(in_r, in_t)]
        ii, jj = np.nonzero(w > _OVERLAP_FLOOR)
        rr, tt = r[in_r], t[in_t]
        self._log_w = np.log(w[ii, jj])
        self._log_r = np.log(rr[ii])
        self._log_t = np.log(tt[jj])
        self._r_w = rr[ii] * w[ii, jj]
        self.orthogonal = self._log_w.size == 0
        self._entropy_rho = float(np.sum(rr * np.log(rr)))
        self._hoeffding_grid = None

    def log_q(self, a):
        """``log q(a)`` for scalar or array ``a`` in [0, 1]; ``-inf`` if orthogonal."""
        a = np.asarray(a, dtype=np.float64)
        flat = np.atleast_1d(a).ravel()
        if self.orthogonal:
            out = np.full(flat.shape, -np.inf)
        else:
            out = np.empty(flat.shape)
            step = max(1, _BLOCK // self._log_w.size)
            for k in range(0, flat.size, step):
                blk = flat[k:k + step, None]
                terms = self._log_w + blk * self._log_r + (1.0 - blk) * self._log_t
                out[k:k + step] = np.logaddexp.reduce(terms, axis=1)
            np.minimum(out, 0.0, out=out)
        return out.reshape(a.shape) if a.ndim else float(out[0])

    def q(self, a):
        return np.exp(self.log_q(a))

    # -- divergences --

    def d_min(self) -> float:
        return math.inf if self.orthogonal else max(0.0, -self.log_q(0.0))

    def umegaki(self) -> float:
        if self.support_leak > self.policy.trace_tol:
            return math.inf
        cross = float(np.sum(self._r_w * self._log_t))
        return max(0.0, self._entropy_rho - cross)

    def petz_renyi(self, a: float) -> float:
        if not 0.0 < a < 1.0:
            raise DomainError(f"Petz-Renyi order {a} outside (0, 1)", _MODULE)
        if self.orthogonal:
            return math.inf
        return max(0.0, self.log_q(a) / (a - 1.0))

    def _xi_objective(self, s):
        def f(a):
            return self.log_q(a) / (a * (1.0 - s) - 1.0)
        return f

    def xi_s(self, s: float) -> float:
        if s < 0:
            raise DomainError(f"xi_s needs s >= 0, got {s}", _MODULE)
        if s == 0:
            return self.umegaki()
        if self.orthogonal:
            return math.inf
        best = grid_golden_max(self._xi_objective(s), 0.0, 1.0, self.policy.grid_points, self.policy.alpha_tol)
        return max(0.0, best.value)

    def xi_s_grid_sup(self, s: float) -> float:
        """Plain grid supremum of the xi_s objective (alpha = 1 excluded when s = 0)."""
        if self.orthogonal:
            return math.inf
        hi = 1.0 if s > 0 else 1.0 - 1.0 / (self.policy.grid_points - 1)
        xs = np.linspace(0.0, hi, self.policy.grid_points)
        return float(np.max(self._xi_objective(s)(xs)))

    def chernoff(self) -> float:
        if self.orthogonal:
            return math.inf
        best = grid_golden_max(lambda a: -self.log_q(a), 0.0, 1.0, self.policy.grid_points, self.policy.alpha_tol)
        return max(0.0, best.value)

    def hoeffding_b(self, r: float) -> float:
        """Hoeffding exponent ``sup_a (a-1)/a * (r - D_a)``; infinite iff ``r <= D_min``."""
        if not r > 0:
            raise DomainError(f"Hoeffding bound needs r > 0, got {r}", _MODULE)
        if r <= self.d_min():
            return math.inf

        def f(a):
            return ((a - 1.0) * r - self.log_q(a)) / a

        # log q on the grid does not depend on r, so it is computed once
        if self._hoeffding_grid is None:
            xs = np.linspace(HOEFFDING_ALPHA_MIN, 1.0, self.policy.grid_points)
            self._hoeffding_grid = (xs, self.log_q(xs))
        xs, lq = self._hoeffding_grid
        best = refine_grid_max(f, xs, ((xs - 1.0) * r - lq) / xs, self.policy.alpha_tol)
        return max(0.0, best.value)

    def states_equal(self, tol: float = 1e-9) -> bool:
        return float(np.max(np.abs(self.rho - self.sigma))) <= tol

    def solve_fixed_point(self, s: float, tol: float = 1e-12) -> float:
        """Root of ``B(r) - s*r`` found by Brent's method; equals ``xi_s``."""
        if not s > 0:
            raise DomainError(f"fixed point needs s > 0, got {s}", _MODULE)
        if self.states_equal():
            raise DegenerateInputError(
                "rho == sigma: B(r) = s*r has no isolated root (xi_s = 0 is only an infimum)", _MODULE
            )
        if self.orthogonal:
            return math.inf

        def g(r):
            return self.hoeffding_b(r) - s * r

        d_min = self.d_min()
        lo = d_min + 1e-9 * max(1.0, d_min)
        if g(lo) <= 0:
            return d_min
        hi = self.umegaki()
        if not math.isfinite(hi) or g(hi) >= 0:
            hi = 2.0 * max(lo, 1.0)
            while g(hi) >= 0:
                hi *= 2.0
        return brentq(g, lo, hi, xtol=tol * max(1.0, hi))

    def lipschitz_constant(self, c: float) -> float:
        """Constant bounding ``|xi_s1 - xi_s2| / |s1 - s2|`` for ``s1, s2 >= c``."""
        if not c > 0:
            raise DomainError(f"Lipschitz constant needs c > 0, got {c}", _MODULE)
        if self.orthogonal:
            return math.inf

        def f(a):
            return np.abs(a * self.log_q(a)) / (a * (1.0 - c) - 1.0) ** 2

        points = 4 * (self.policy.grid_points - 1) + 1
        return grid_golden_max(f, 0.0, 1.0, points, self.policy.alpha_tol).value


def q_alpha(profile: RenyiProfile, a: float) -> float:
    if not 0.0 <= a <= 1.0:
        raise DomainError(f"alpha {a} outside [0, 1]", _MODULE)
    return float(min(1.0, max(0.0, profile.q(a))))


def petz_renyi(profile: RenyiProfile, a: float) -> float:
    return profile.petz_renyi(a)


def umegaki(rho, sigma, policy=None) -> float:
    return RenyiProfile(rho, sigma, policy).umegaki()


def d_min(rho, sigma, policy=None) -> float:
    return RenyiProfile(rho, sigma, policy).d_min()


def chernoff(rho, sigma, policy=None) -> float:
    return RenyiProfile(rho, sigma, policy).chernoff()


def xi_s(rho, sigma, s: float, policy=None) -> float:
    return RenyiProfile(rho, sigma, policy).xi_s(s)


def hoeffding_b(rho, sigma, r: float, policy=None) -> float:
    return RenyiProfile(rho, sigma, policy).hoeffding_b(r)


def solve_fixed_point(rho, sigma, s: float, policy=None) -> float:
    return RenyiProfile(rho, sigma, policy).solve_fixed_point(s)


def lipschitz_constant(rho, sigma, c: float, policy=None) -> float:
    return RenyiProfile(rho, sigma, policy).lipschitz_constant(c)
