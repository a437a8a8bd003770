"""Exact one-shot error probabilities via the Neyman-Pearson boundary.

The set of achievable (type I, type II) pairs ``(Tr((1-L)rho), Tr(L sigma))``
over tests ``0 <= L <= 1`` is convex. Its lower-left boundary is swept by the
extremal tests ``P_+(t)``, the projectors onto the positive eigenspace of
``(1-t)*rho - t*sigma`` for ``t`` in [0, 1] (multiplier ``mu = t/(1-t)``).
``alpha`` is non-decreasing and ``beta`` non-increasing along ``t``, and a jump
between the left and right limits at some ``t`` is a flat face reached by
mixing the two limiting tests.

Every objective below is therefore a one-dimensional monotone search in ``t``
followed by an exact solve on the final chord. For commuting states the
boundary is a polyline; for non-commuting ones it is curved between the
points where the eigenvalue signature changes, and the same search applies.
:func:`np_boundary` traces an explicit polyline for export and plotting.
"""

from __future__ import annotations

import csv
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError
from .linalg import density_matrix, positive_part_trace
from .optimize import golden_max
from .policy import resolve

_MODULE = "oneshot"
# eigenvalues of (1-t) rho - t sigma at or below this count as zero
_KERNEL_TOL = 1e-12
# edge-detection slack, relative to 1 + mu
_LINE_TOL = 1e-13
# vertices closer than this in both coordinates are merged
_VERTEX_TOL = 1e-14
# collinearity slack of the hull cleanup
_HULL_TOL = 1e-16
# chords shorter than this are curve pieces, not flat faces
_FACE_TOL = 1e-9
_MAX_BISECT = 200
# polyline size used to seed the non-convex p_err^(s,C) search
_SEED_VERTICES = 256


@dataclass(frozen=True)
class ErrorPoint:
    """Error pair of a test.

    ``mu`` is the multiplier for which the test minimizes ``alpha + mu*beta``
    (``None`` when no certificate is attached, ``inf`` for the ``beta = 0``
    end). ``mix`` is the weight of the larger of the two adjacent extremal
    tests in the randomized test. ``test`` holds the achieving operator when
    the solver built it.
    """

    alpha: float
    beta: float
    mu: float | None = None
    mix: float = 0.0
    test: np.ndarray | None = field(default=None, repr=False, compare=False)

    def certificate_gap(self, rho, sigma) -> float:
        """``alpha + mu*beta - (1 - Tr(rho - mu*sigma)_+)``; zero for optimal points.

        At ``mu = inf`` the gap is ``beta`` itself.
        """
        if self.mu is None:
            raise ValueError("point carries no multiplier")
        if math.isinf(self.mu):
            return self.beta
        lagrangian = 1.0 - positive_part_trace(np.asarray(rho) - self.mu * np.asarray(sigma))
        return self.alpha + self.mu * self.beta - lagrangian

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "mu": self.mu, "mix": self.mix}


def _clamp01(x):
    return min(1.0, max(0.0, float(x)))


def _check_pair(rho, sigma, policy):
    rho = density_matrix(rho, policy)
    sigma = density_matrix(sigma, policy)
    if rho.shape != sigma.shape:
        raise DomainError(f"state dimensions differ: {rho.shape} vs {sigma.shape}", _MODULE)
    return rho, sigma


def _check_s_c(s, C, what):
    if not s > 0 or not C > 0:
        raise DomainError(f"{what} needs s > 0 and C > 0, got s={s}, C={C}", _MODULE)


def error_pair(rho, sigma, test) -> ErrorPoint:
    rho, sigma, test = (np.asarray(m, dtype=np.complex128) for m in (rho, sigma, test))
    if not rho.shape == sigma.shape == test.shape:
        raise DomainError(f"dimension mismatch: {rho.shape}, {sigma.shape}, {test.shape}", _MODULE)
    alpha = 1.0 - np.trace(test @ rho).real
    beta = np.trace(test @ sigma).real
    return ErrorPoint(_clamp01(alpha), _clamp01(beta))


def _projector_errors(rho, sigma, vecs):
    """(alpha, beta) of the projector onto the span of orthonormal ``vecs``."""
    if vecs.shape[1] == 0:
        return 1.0, 0.0
    a = 1.0 - np.einsum("ij,ik,kj->", vecs.conj(), rho, vecs).real
    b = np.einsum("ij,ik,kj->", vecs.conj(), sigma, vecs).real
    return _clamp01(a), _clamp01(b)


def _split(rho, sigma, mu):
    w, v = np.linalg.eigh(rho - mu * sigma)
    zt = _KERNEL_TOL * (1.0 + mu)
    return w, v[:, w > zt], v[:, np.abs(w) <= zt]


def _mu_of(t):
    return math.inf if t >= 1.0 else t / (1.0 - t)


def _t_of(mu):
    return 1.0 if math.isinf(mu) else mu / (1.0 + mu)


@dataclass(frozen=True)
class _Probe:
    t: float
    alpha: float
    beta: float
    vecs: np.ndarray

    @property
    def mu(self):
        return _mu_of(self.t)

    def projector(self):
        return self.vecs @ self.vecs.conj().T


class ExtremalFamily:
    """The extremal tests of a state pair and the exact solvers built on them.

    >>> fam = ExtremalFamily(np.diag([0.9, 0.1]), np.diag([0.5, 0.5]))
    >>> round(fam.q_s_c(1.0, 1.0), 6)
    0.357143
    """

    def __init__(self, rho, sigma, policy=None):
        self.policy = policy = resolve(policy)
        self.rho, self.sigma = _check_pair(rho, sigma, policy)
        self.dim = self.rho.shape[0]
        ws, vs = np.linalg.eigh(self.sigma)
        self._ker_sigma = vs[:, ws <= policy.support_tol]
        self.evaluations = 0

    def at(self, t: float) -> _Probe:
        """Extremal test at ``t``; ``t = 1`` gives the kernel of ``sigma`` (largest test with beta = 0)."""
        self.evaluations += 1
        if t >= 1.0:
            vecs = self._ker_sigma
        else:
            w, v = np.linalg.eigh((1.0 - t) * self.rho - t * self.sigma)
            vecs = v[:, w > _KERNEL_TOL]
        a, b = _projector_errors(self.rho, self.sigma, vecs)
        # exact by construction: P_+(rho) is the support of rho, ker(sigma) has beta 0
        if t <= 0.0:
            a = 0.0
        elif t >= 1.0:
            b = 0.0
        return _Probe(float(t), a, b, vecs)

    def _bisect(self, reached):
        """Bracket the first ``t`` where the monotone predicate ``reached`` turns true.

        Returns ``(lo, hi)`` probes with ``reached(hi)`` true and ``lo`` the last
        probe before it; both are the same probe when ``t = 0`` already qualifies.
        """
        lo = self.at(0.0)
        if reached(lo):
            return lo, lo
        hi = self.at(1.0)
        for _ in range(_MAX_BISECT):
            mid = 0.5 * (lo.t + hi.t)
            if not lo.t < mid < hi.t:
                break
            p = self.at(mid)
            if reached(p):
                hi = p
            else:
                lo = p
        return lo, hi

    def _chord_point(self, lo: _Probe, hi: _Probe, u: float) -> ErrorPoint:
        """Point at fraction ``u`` from ``lo`` to ``hi``, with its test and multiplier."""
        u = min(1.0, max(0.0, float(u)))
        da, db = hi.alpha - lo.alpha, hi.beta - lo.beta
        a = lo.alpha + u * da
        b = lo.beta + u * db
        if max(abs(da), abs(db)) > _FACE_TOL:
            # flat face: its slope is the multiplier
            mu = da / -db if db < 0 else math.inf
        elif hi.t >= 1.0:
            mu = math.inf
        else:
            mu = _mu_of(0.5 * (lo.t + hi.t))
        test = (1.0 - u) * lo.projector() + u * hi.projector()
        return ErrorPoint(_clamp01(a), _clamp01(b), mu, 1.0 - u, test)

    def _vertex(self, p: _Probe) -> ErrorPoint:
        return ErrorPoint(p.alpha, p.beta, p.mu, 0.0, p.projector())

    # -- objectives --

    @property
    def alpha_max(self) -> float:
        """Smallest type I error among tests with zero type II error."""
        return self.at(1.0).alpha

    def point_at_alpha(self, eps: float) -> ErrorPoint:
        """Boundary point with ``alpha = min(eps, alpha_max)``."""
        if not 0.0 <= eps <= 1.0:
            raise DomainError(f"eps={eps} outside [0, 1]", _MODULE)
        end = self.at(1.0)
        if eps >= end.alpha - _VERTEX_TOL:
            return self._vertex(end)
        lo, hi = self._bisect(lambda p: p.alpha >= eps)
        if lo is hi:
            return self._vertex(lo)
        u = (eps - lo.alpha) / (hi.alpha - lo.alpha)
        return self._chord_point(lo, hi, u)

    def beta_epsilon(self, eps: float) -> float:
        return self.point_at_alpha(eps).beta

    def solve_q_s_c(self, s: float, C: float = 1.0) -> ErrorPoint:
        """Optimal point of ``min beta s.t. alpha <= C*beta**s``; the constraint is tight."""
        _check_s_c(s, C, "Q_C^(s)")

        def g(a, b):
            return a - C * max(b, 0.0) ** s

        lo, hi = self._bisect(lambda p: g(p.alpha, p.beta) >= 0)
        if lo is hi:
            return self._vertex(lo)
        g_lo, g_hi = g(lo.alpha, lo.beta), g(hi.alpha, hi.beta)
        if g_hi == 0:
            return self._vertex(hi)

        def gu(u):
            return g(lo.alpha + u * (hi.alpha - lo.alpha), lo.beta + u * (hi.beta - lo.beta))

        if g_lo < 0 < g_hi:
            u = brentq(gu, 0.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
        else:
            u = 1.0
        return self._chord_point(lo, hi, u)

    def q_s_c(self, s: float, C: float = 1.0) -> float:
        return self.solve_q_s_c(s, C).beta

    def q_min(self) -> float:
        return self.q_s_c(1.0, 1.0)

    def solve_p_err_bayes(self, p: float) -> ErrorPoint:
        if not 0 < p < 1:
            raise DomainError(f"prior p={p} outside (0, 1)", _MODULE)
        # the linear objective p*alpha + (1-p)*beta is minimized at mu = (1-p)/p
        return self._vertex(self.at(1.0 - p))

    def p_err_bayes(self, p: float) -> float:
        pt = self.solve_p_err_bayes(p)
        return p * pt.alpha + (1.0 - p) * pt.beta

    def solve_p_err_s_c(self, s: float, C: float = 1.0) -> tuple[float, ErrorPoint]:
        """Minimum of ``alpha**(1/s) + C*beta`` and a point attaining it."""
        _check_s_c(s, C, "p_err^(s,C)")
        inv = 1.0 / s

        def h(a, b):
            return a ** inv + C * b

        if s == 1.0:
            pt = self._vertex(self.at(_t_of(C)))
            return h(pt.alpha, pt.beta), pt
        if inv > 1.0:
            return self._p_err_convex(s, C, h)
        return self._p_err_concave(s, C, h)

    def _p_err_convex(self, s, C, h):
        # h is convex along the boundary; its slope condition is monotone in t
        inv = 1.0 / s

        def past_minimum(p):
            if p.alpha <= 0.0:
                return False
            return math.isinf(p.mu) or inv * p.alpha ** (inv - 1.0) * p.mu >= C

        lo, hi = self._bisect(past_minimum)
        candidates = [self._vertex(lo)]
        if hi is not lo:
            candidates.append(self._vertex(hi))
            da, db = hi.alpha - lo.alpha, hi.beta - lo.beta
            if da > 0 and db < 0:
                a_star = (-C * db * s / da) ** (s / (1.0 - s))
                if lo.alpha < a_star < hi.alpha:
                    candidates.append(self._chord_point(lo, hi, (a_star - lo.alpha) / da))
        values = [h(pt.alpha, pt.beta) for pt in candidates]
        i = int(np.argmin(values))
        return float(values[i]), candidates[i]

    def _p_err_concave(self, s, C, h):
        # h is concave on flat faces, so only extremal tests matter, but it can
        # have several local minima along a curved boundary: seed with a traced
        # polyline and refine around the best vertex
        bd = _trace(self, _SEED_VERTICES)
        vals = h(bd.alphas, bd.betas)
        k = int(np.argmin(vals))
        best_val, best = float(vals[k]), self._vertex(self.at(_t_of(bd.vertex_mus[k])))
        t_lo = _t_of(bd.mus[k - 1]) if k > 0 else 0.0
        t_hi = _t_of(bd.mus[k]) if k < len(bd.mus) else 1.0
        if t_hi - t_lo > 1e-15:
            t_star, _ = golden_max(lambda t: -self._h_at(t, h), t_lo, t_hi, tol=1e-13)
            p = self.at(t_star)
            v = h(p.alpha, p.beta)
            if v < best_val:
                best_val, best = v, self._vertex(p)
        return float(best_val), best

    def _h_at(self, t, h):
        p = self.at(t)
        return h(p.alpha, p.beta)

    def p_err_s_c(self, s: float, C: float = 1.0) -> float:
        return self.solve_p_err_s_c(s, C)[0]


@dataclass(frozen=True)
class NPBoundary:
    """Traced Pareto frontier of the achievable error region.

    ``alphas`` strictly increase from 0, ``betas`` strictly decrease to 0.
    ``mus[k]`` is the multiplier of the edge joining vertices ``k`` and ``k+1``
    (its slope is ``-1/mus[k]``) and ``vertex_mus[k]`` certifies vertex ``k``.
    For commuting states the polyline is exact; for non-commuting ones its
    vertices are exact boundary points and its edges are chords.
    """

    alphas: np.ndarray
    betas: np.ndarray
    mus: np.ndarray
    vertex_mus: np.ndarray | None = None
    rho: np.ndarray | None = field(default=None, repr=False)
    sigma: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.vertex_mus is None:
            n = len(self.alphas)
            vm = np.concatenate([[0.0], self.mus[: max(n - 2, 0)], [math.inf]]) if n > 1 else np.zeros(1)
            object.__setattr__(self, "vertex_mus", vm)
        for name in ("alphas", "betas", "mus", "vertex_mus"):
            getattr(self, name).setflags(write=False)

    def __len__(self):
        return len(self.alphas)

    @property
    def vertices(self) -> list[ErrorPoint]:
        return [ErrorPoint(float(a), float(b), float(m), 0.0)
                for a, b, m in zip(self.alphas, self.betas, self.vertex_mus)]

    @property
    def alpha_max(self) -> float:
        return float(self.alphas[-1])

    def _edge_point(self, k: int, u: float) -> ErrorPoint:
        """Point at fraction ``u`` along edge ``k`` (u=0 left vertex, u=1 right vertex)."""
        a = self.alphas[k] + u * (self.alphas[k + 1] - self.alphas[k])
        b = self.betas[k] + u * (self.betas[k + 1] - self.betas[k])
        return ErrorPoint(_clamp01(a), _clamp01(b), float(self.mus[k]), 1.0 - u)

    def point_at_alpha(self, eps: float) -> ErrorPoint:
        if eps >= self.alpha_max - _VERTEX_TOL:
            return self.vertices[-1]
        if eps <= 0:
            return self.vertices[0]
        k = int(np.searchsorted(self.alphas, eps, side="right")) - 1
        u = (eps - self.alphas[k]) / (self.alphas[k + 1] - self.alphas[k])
        return self._edge_point(k, u)

    def beta_epsilon(self, eps: float) -> float:
        return self.point_at_alpha(eps).beta

    def solve_q_s_c(self, s: float, C: float = 1.0) -> ErrorPoint:
        """Crossing of ``alpha = C * beta**s`` with the polyline."""
        _check_s_c(s, C, "Q_C^(s)")
        g = self.alphas - C * self.betas ** s
        if g[0] >= 0:
            return self.vertices[0]
        k = int(np.argmax(g >= 0))
        if g[k] == 0:
            return self.vertices[k]
        k -= 1

        def gu(u):
            a = self.alphas[k] + u * (self.alphas[k + 1] - self.alphas[k])
            b = self.betas[k] + u * (self.betas[k + 1] - self.betas[k])
            return a - C * max(b, 0.0) ** s

        u = brentq(gu, 0.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
        return self._edge_point(k, u)

    def q_s_c(self, s: float, C: float = 1.0) -> float:
        return self.solve_q_s_c(s, C).beta

    def p_err_bayes(self, p: float) -> float:
        if not 0 < p < 1:
            raise DomainError(f"prior p={p} outside (0, 1)", _MODULE)
        return float(np.min(p * self.alphas + (1.0 - p) * self.betas))

    def p_err_s_c(self, s: float, C: float = 1.0) -> float:
        """Minimum of ``alpha**(1/s) + C*beta`` over the polyline."""
        _check_s_c(s, C, "p_err^(s,C)")
        inv = 1.0 / s
        values = list(self.alphas ** inv + C * self.betas)
        if inv > 1.0:
            # convex along each edge: closed-form stationary point
            for k in range(len(self) - 1):
                da = self.alphas[k + 1] - self.alphas[k]
                db = self.betas[k + 1] - self.betas[k]
                a_star = (-C * db * s / da) ** (s / (1.0 - s))
                if self.alphas[k] < a_star < self.alphas[k + 1]:
                    pt = self._edge_point(k, (a_star - self.alphas[k]) / da)
                    values.append(pt.alpha ** inv + C * pt.beta)
        return float(min(values))

    def test_for(self, point: ErrorPoint) -> np.ndarray:
        """Reconstruct the test operator of a certified point from its multiplier."""
        if self.rho is None or point.mu is None:
            raise ValueError("boundary has no states attached or point has no multiplier")
        if math.isinf(point.mu):
            ws, vs = np.linalg.eigh(self.sigma)
            ker = vs[:, ws <= _KERNEL_TOL]
            return ker @ ker.conj().T
        _, pos, ker = _split(self.rho, self.sigma, point.mu)
        return pos @ pos.conj().T + point.mix * (ker @ ker.conj().T)

    def rows(self):
        return [(float(m), float(a), float(b)) for m, a, b in zip(self.vertex_mus, self.alphas, self.betas)]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["mu", "alpha", "beta"])
            for row in self.rows():
                w.writerow([repr(x) for x in row])


def _trace(fam: ExtremalFamily, max_vertices: int) -> NPBoundary:
    first, last = fam.at(0.0), fam.at(1.0)

    def key(p):
        return (p.alpha, p.beta)

    def strictly_between(p, a, b):
        return (a.alpha + _VERTEX_TOL < p.alpha < b.alpha - _VERTEX_TOL
                and a.beta - _VERTEX_TOL > p.beta > b.beta + _VERTEX_TOL)

    if abs(first.alpha - last.alpha) <= _VERTEX_TOL and abs(first.beta - last.beta) <= _VERTEX_TOL:
        return NPBoundary(np.array([first.alpha]), np.array([first.beta]), np.zeros(0), np.zeros(1),
                          fam.rho, fam.sigma)

    # breadth first, so a vertex cap still leaves an evenly refined curve
    edges = []  # (left probe, right probe, mu)
    tasks = deque([(first, last)])
    while tasks:
        a, b = tasks.popleft()
        mu = (b.alpha - a.alpha) / (a.beta - b.beta)
        if len(edges) + 2 * len(tasks) + 2 > max_vertices:
            edges.append((a, b, mu))
            continue
        line = a.alpha + mu * a.beta
        w, pos, ker = _split(fam.rho, fam.sigma, mu)
        lagrangian = 1.0 - float(np.sum(w[w > 0]))
        if not lagrangian < line - _LINE_TOL * (1.0 + mu):
            edges.append((a, b, mu))
            continue
        t = _t_of(mu)
        right = _Probe(t, *_projector_errors(fam.rho, fam.sigma, pos), pos)
        both = np.hstack([pos, ker])
        left = _Probe(t, *_projector_errors(fam.rho, fam.sigma, both), both)
        inside = [p for p in {key(p): p for p in (left, right)}.values() if strictly_between(p, a, b)]
        if not inside:
            edges.append((a, b, mu))
        elif len(inside) == 1:
            tasks += [(a, inside[0]), (inside[0], b)]
        else:
            tasks += [(a, left), (right, b)]
            edges.append((left, right, mu))
    probes = [e[0] for e in edges] + [e[1] for e in edges]
    return _hull(probes, fam)


def _hull(probes, fam) -> NPBoundary:
    """Lower-left convex hull of traced probes, near-duplicates merged."""
    probes = sorted(probes, key=lambda p: (p.alpha, p.beta))
    hull = []
    for p in probes:
        if hull and p.alpha - hull[-1].alpha <= _VERTEX_TOL:
            # same alpha up to rounding: keep the lower beta
            if p.beta < hull[-1].beta:
                hull.pop()
            else:
                continue
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (b.alpha - a.alpha) * (p.beta - a.beta) - (b.beta - a.beta) * (p.alpha - a.alpha)
            if cross > _HULL_TOL and b.beta - p.beta > _VERTEX_TOL:
                break
            hull.pop()
        hull.append(p)
    alphas = np.array([v.alpha for v in hull])
    betas = np.array([v.beta for v in hull])
    mus = np.diff(alphas) / -np.diff(betas)
    # interior vertices are certified by the multiplier they were probed at
    vmus = np.array([0.0] + [v.mu for v in hull[1:-1]] + [math.inf])
    return NPBoundary(alphas, betas, mus, vmus, fam.rho, fam.sigma)


def np_boundary(rho, sigma, policy=None, max_vertices: int | None = None) -> NPBoundary:
    """Trace the Neyman-Pearson boundary of ``(rho, sigma)`` as a polyline.

    The endpoints come from the support projector of ``rho`` (alpha = 0) and
    the kernel projector of ``sigma`` (beta = 0). Between two known vertices,
    the multiplier ``mu`` whose supporting line passes through both is probed:
    if ``1 - Tr(rho - mu*sigma)_+`` lies on that line the vertices are
    adjacent, otherwise the probe yields one or two new vertices strictly
    below it and both halves are refined. Curved boundaries stop at
    ``max_vertices`` (default from the numeric policy).
    """
    fam = ExtremalFamily(rho, sigma, policy)
    return _trace(fam, max_vertices or fam.policy.max_vertices)


def beta_epsilon(rho, sigma, eps: float, policy=None) -> float:
    return ExtremalFamily(rho, sigma, policy).beta_epsilon(eps)


def q_s_c(rho, sigma, s: float, C: float = 1.0, policy=None) -> float:
    if not s > 0:
        raise DomainError(f"Q_C^(s) needs s > 0 (use beta_epsilon for s = 0), got {s}", _MODULE)
    return ExtremalFamily(rho, sigma, policy).q_s_c(s, C)


def q_min(rho, sigma, policy=None) -> float:
    return q_s_c(rho, sigma, 1.0, 1.0, policy)


def p_err_bayes(p: float, rho, sigma, policy=None) -> float:
    return ExtremalFamily(rho, sigma, policy).p_err_bayes(p)


def p_err_s_c(rho, sigma, s: float, C: float = 1.0, policy=None) -> float:
    return ExtremalFamily(rho, sigma, policy).p_err_s_c(s, C)


__all__ = [
    "ErrorPoint",
    "ExtremalFamily",
    "NPBoundary",
    "error_pair",
    "np_boundary",
    "beta_epsilon",
    "q_s_c",
    "q_min",
    "p_err_bayes",
    "p_err_s_c",
]
