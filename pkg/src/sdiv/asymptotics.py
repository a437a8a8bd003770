"""Finite-n exponent traces and the data behind the two figures."""

from __future__ import annotations

import csv
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .divergences import RenyiProfile
from .errors import DegenerateInputError, DomainError
from .linalg import tensor_power
from .oneshot import ExtremalFamily
from .oracles import ClassicalPair, iid_type_q_s
from .policy import resolve

_MODULE = "asymptotics"
QUANTUM_N_MAX = 8


class TracePoint(NamedTuple):
    n: int
    log_q: float
    exponent: float


@dataclass
class ExponentTrace:
    s: float
    C: float
    target: float
    points: list[TracePoint] = field(default_factory=list)

    def exponent(self, n: int) -> float:
        for pt in self.points:
            if pt.n == n:
                return pt.exponent
        raise KeyError(n)

    def gap(self, n: int) -> float:
        return abs(self.exponent(n) - self.target)

    def rows(self):
        return [(pt.n, pt.log_q, pt.exponent, self.target) for pt in self.points]


def _point(n, log_q):
    # Q <= 1, so the exponent is never negative
    return TracePoint(n, log_q, max(0.0, -log_q / n))


def quantum_exponent_trace(rho, sigma, s: float, C: float = 1.0, n_max: int = QUANTUM_N_MAX, policy=None) -> ExponentTrace:
    """Exact ``-log Q_C^(s)(rho^n || sigma^n) / n`` for ``n = 1..n_max``."""
    policy = resolve(policy)
    if not 1 <= n_max <= QUANTUM_N_MAX:
        raise DomainError(f"n_max must lie in [1, {QUANTUM_N_MAX}], got {n_max}", _MODULE)
    target = RenyiProfile(rho, sigma, policy).xi_s(s)
    trace = ExponentTrace(s, C, target)
    for n in range(1, n_max + 1):
        fam = ExtremalFamily(tensor_power(rho, n, policy), tensor_power(sigma, n, policy), policy)
        q = fam.q_s_c(s, C)
        trace.points.append(_point(n, math.log(q) if q > 0 else -math.inf))
    return trace


def classical_exponent_trace(pair: ClassicalPair, s: float, C: float = 1.0, n_list=(1, 10, 100, 1000)) -> ExponentTrace:
    """Type-class exponents for a binary pair at each ``n`` of ``n_list``."""
    rho, sigma = pair.states()
    target = RenyiProfile(rho, sigma).xi_s(s)
    trace = ExponentTrace(s, C, target)
    for n in sorted(set(int(n) for n in n_list)):
        trace.points.append(_point(n, iid_type_q_s(pair, n, s, C)))
    return trace


def _first_crossing(xs, ys):
    """Abscissa where ``ys`` first drops from positive to non-positive, by linear interpolation."""
    for k in range(len(xs) - 1):
        y0, y1 = ys[k], ys[k + 1]
        if math.isfinite(y0) and y0 > 0 >= y1:
            return xs[k] + (xs[k + 1] - xs[k]) * y0 / (y0 - y1)
    return math.nan


@dataclass
class Fig1Data:
    s: float
    rows: list  # (r, B(r), r, s*r)
    chernoff_crossing: float
    xi_s_crossing: float


def default_r_grid(profile: RenyiProfile, points: int = 1000) -> np.ndarray:
    lo = profile.d_min()
    hi = 1.25 * max(profile.umegaki(), profile.xi_s(1.0))
    if not math.isfinite(hi):
        hi = 4.0 * max(lo, 1.0)
    return np.linspace(lo, hi, points + 1)[1:]


def fig1_data(rho, sigma, s: float, r_grid=None, policy=None) -> Fig1Data:
    """Hoeffding curve ``B(r)`` with the lines ``r`` and ``s*r``.

    The crossings are read off the table itself, so they check the curve
    against ``xi`` (slope 1) and ``xi_s`` (slope ``s``).
    """
    prof = RenyiProfile(rho, sigma, policy)
    if prof.states_equal():
        raise DegenerateInputError("rho == sigma: the Hoeffding curve is identically zero", _MODULE)
    if prof.orthogonal:
        raise DegenerateInputError("orthogonal supports: B(r) is infinite everywhere", _MODULE)
    if r_grid is None:
        r_grid = default_r_grid(prof)
    rows = []
    for r in np.asarray(r_grid, dtype=float):
        rows.append((float(r), prof.hoeffding_b(float(r)), float(r), s * float(r)))
    rs = [row[0] for row in rows]
    b = [row[1] for row in rows]
    return Fig1Data(
        s,
        rows,
        _first_crossing(rs, [bi - r for bi, r in zip(b, rs)]),
        _first_crossing(rs, [bi - s * r for bi, r in zip(b, rs)]),
    )


@dataclass
class Fig2Data:
    rows: list  # (s, xi_s, label)

    def values(self):
        return [row[1] for row in self.rows]


def fig2_data(rho, sigma, s_grid, policy=None) -> Fig2Data:
    """``xi_s`` over ``s_grid`` with an ``s = 0`` row labelled ``D`` and ``s = 1`` labelled ``xi``."""
    prof = RenyiProfile(rho, sigma, policy)
    if prof.orthogonal:
        raise DegenerateInputError("orthogonal supports: xi_s is infinite", _MODULE)
    grid = sorted(set(float(s) for s in s_grid) | {0.0})
    if grid[0] < 0:
        raise DomainError("s_grid must be non-negative", _MODULE)
    rows = []
    for s in grid:
        label = "D" if s == 0 else ("xi" if s == 1 else "")
        rows.append((s, prof.xi_s(s), label))
    return Fig2Data(rows)


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:step`` (inclusive of ``stop`` up to rounding) or a comma list."""
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return np.round(start + step * np.arange(n), 12)
    return np.array([float(x) for x in text.split(",")])


def write_csv(path, header, rows) -> None:
    """Write rows atomically: a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(x) for x in row])
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _fmt(x):
    if isinstance(x, float):
        return "inf" if x == math.inf else f"{x:.12g}"
    return x


FIG1_HEADER = ("r", "B", "line1", "line_s")
FIG2_HEADER = ("s", "xi_s", "label")
TRACE_HEADER = ("n", "logQ", "exponent", "target")
