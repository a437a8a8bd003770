"""Hermitian linear algebra on small dense complex matrices.

States are plain read-only ``complex128`` arrays. The validating constructors
(:func:`density_matrix`, :func:`test_operator`) copy their input, check the
invariants of the policy and freeze the copy.
"""

from __future__ import annotations

import json
from functools import reduce
from typing import NamedTuple

import numpy as np

from .errors import ResourceError, ValidationError
from .policy import resolve

_MODULE = "matrix-core"


class EigenSystem(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_square_matrix(a) -> np.ndarray:
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValidationError(f"expected a non-empty square matrix, got shape {m.shape}", _MODULE)
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix has non-finite entries", _MODULE)
    return m


def hermitian_asymmetry(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T)))


def _check_hermitian(m, tol):
    asym = hermitian_asymmetry(m)
    if asym > tol:
        raise ValidationError(f"matrix is not Hermitian: max |H - H^dag| = {asym:.3e} > {tol:.1e}", _MODULE)


def _freeze(m):
    m.setflags(write=False)
    return m


def density_matrix(a, policy=None) -> np.ndarray:
    """Validate ``a`` as a density matrix and return a frozen Hermitian copy."""
    policy = resolve(policy)
    m = as_square_matrix(a)
    _check_hermitian(m, policy.hermitian_tol)
    m = 0.5 * (m + m.conj().T)
    evals = np.linalg.eigvalsh(m)
    if evals[0] < -policy.psd_tol:
        raise ValidationError(f"density matrix has negative eigenvalue {evals[0]:.3e}", _MODULE)
    tr = np.trace(m).real
    if abs(tr - 1.0) > policy.trace_tol:
        raise ValidationError(f"density matrix has trace {float(tr)!r}, expected 1", _MODULE)
    return _freeze(m)


def test_operator(a, policy=None) -> np.ndarray:
    """Validate ``a`` as a test 0 <= L <= I and return a frozen copy."""
    policy = resolve(policy)
    m = as_square_matrix(a)
    _check_hermitian(m, policy.hermitian_tol)
    m = 0.5 * (m + m.conj().T)
    evals = np.linalg.eigvalsh(m)
    if evals[0] < -policy.psd_tol or evals[-1] > 1.0 + policy.psd_tol:
        raise ValidationError(
            f"test operator spectrum [{evals[0]:.3e}, {evals[-1]:.3e}] not inside [0, 1]", _MODULE
        )
    return _freeze(m)


test_operator.__test__ = False  # keep pytest from collecting it


def hermitian_eigensystem(h, policy=None) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    policy = resolve(policy)
    m = as_square_matrix(h)
    _check_hermitian(m, policy.eig_hermitian_tol)
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return EigenSystem(w, v)


def fractional_power(rho, a: float, policy=None) -> np.ndarray:
    """``rho**a`` for PSD ``rho`` and ``0 <= a <= 1``.

    Eigenvalues at or below ``policy.support_tol`` map to 0 for every exponent,
    so ``fractional_power(rho, 0)`` is the support projector.
    """
    policy = resolve(policy)
    if not 0.0 <= a <= 1.0:
        raise ValidationError(f"exponent {a} outside [0, 1]", _MODULE)
    w, v = hermitian_eigensystem(rho, policy)
    if w[0] < -policy.negative_tol:
        raise ValidationError(f"matrix is not PSD: eigenvalue {w[0]:.3e}", _MODULE)
    keep = w > policy.support_tol
    powered = np.zeros_like(w)
    powered[keep] = w[keep] ** a
    return (v * powered) @ v.conj().T


def support_projector(rho, policy=None) -> np.ndarray:
    return fractional_power(rho, 0.0, policy)


def tensor_power(rho, n: int, policy=None) -> np.ndarray:
    policy = resolve(policy)
    if n < 1:
        raise ValidationError(f"tensor power needs n >= 1, got {n}", _MODULE)
    m = as_square_matrix(rho)
    dim = m.shape[0] ** n
    if dim > policy.dim_cap:
        raise ResourceError(
            f"tensor power needs dimension {dim}, above the cap {policy.dim_cap}", _MODULE
        )
    out = reduce(np.kron, [m] * n)
    return _freeze(out)


def positive_part_trace(a, policy=None) -> float:
    """Sum of the positive eigenvalues of a Hermitian matrix."""
    w, _ = hermitian_eigensystem(a, policy)
    return float(np.sum(w[w > 0]))


def trace_norm(a, policy=None) -> float:
    w, _ = hermitian_eigensystem(a, policy)
    return float(np.sum(np.abs(w)))


# -- JSON state format: {"dim": d, "matrix": [[[re, im], ...], ...]} --

def state_to_dict(rho) -> dict:
    m = np.asarray(rho, dtype=np.complex128)
    return {
        "dim": int(m.shape[0]),
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def matrix_from_dict(d: dict) -> np.ndarray:
    try:
        raw = np.asarray(d["matrix"], dtype=np.float64)
        dim = int(d["dim"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed matrix record: {exc}", _MODULE) from exc
    if raw.shape != (dim, dim, 2):
        raise ValidationError(f"matrix record has shape {raw.shape}, expected ({dim}, {dim}, 2)", _MODULE)
    return raw[..., 0] + 1j * raw[..., 1]


def state_from_dict(d: dict, policy=None) -> np.ndarray:
    return density_matrix(matrix_from_dict(d), policy)


def save_state(path, rho) -> None:
    with open(path, "w") as fh:
        json.dump(state_to_dict(rho), fh)


def load_state(path, policy=None) -> np.ndarray:
    with open(path) as fh:
        return state_from_dict(json.load(fh), policy)
