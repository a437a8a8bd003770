"""State generators addressed by short text specs (``diag:``, ``pure:``, ``random:``)."""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .linalg import density_matrix

_MODULE = "cli"


def random_state(dim: int, rank: int | None = None, seed=None) -> np.ndarray:
    """Normalized Wishart state ``G G^dag / Tr``; full rank unless ``rank`` is given."""
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise ValidationError(f"rank {rank} outside [1, {dim}]", _MODULE)
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    return density_matrix(m / np.trace(m).real)


def pure_qubit(theta: float, phi: float = 0.0) -> np.ndarray:
    psi = np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
    return density_matrix(np.outer(psi, psi.conj()))


def generate_state(spec: str, seed=0, policy=None) -> np.ndarray:
    """Build a state from a spec string.

    ``diag:0.9,0.1``     diagonal state with the given eigenvalues
    ``pure:theta[,phi]`` qubit pure state at Bloch angles (``pure:0`` is |0><0|)
    ``random:d[:rank]``  seeded random state of dimension d
    """
    kind, _, body = spec.partition(":")
    try:
        if kind == "diag":
            return density_matrix(np.diag([float(x) for x in body.split(",")]), policy)
        if kind == "pure":
            angles = [float(x) for x in body.split(",")]
            if not 1 <= len(angles) <= 2:
                raise ValueError("expected theta[,phi]")
            return pure_qubit(*angles)
        if kind == "random":
            parts = [int(x) for x in body.split(":")]
            if not 1 <= len(parts) <= 2:
                raise ValueError("expected d[:rank]")
            return random_state(parts[0], parts[1] if len(parts) == 2 else None, seed)
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed state spec {spec!r}: {exc}", _MODULE) from exc
    raise ValidationError(f"unknown state spec {spec!r}; expected diag:, pure: or random:", _MODULE)
