"""CPTP maps in Kraus form."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .linalg import density_matrix, state_to_dict

_MODULE = "channels"
COMPLETENESS_TOL = 1e-10


@dataclass(frozen=True)
class KrausChannel:
    d_in: int
    d_out: int
    kraus: tuple

    def __post_init__(self):
        ks = tuple(np.array(k, dtype=np.complex128) for k in self.kraus)
        if not ks:
            raise ValidationError("channel needs at least one Kraus operator", _MODULE)
        for k in ks:
            if k.shape != (self.d_out, self.d_in):
                raise ValidationError(f"Kraus operator has shape {k.shape}, expected {(self.d_out, self.d_in)}", _MODULE)
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ks)
        resid = self.completeness_residual()
        if resid > COMPLETENESS_TOL:
            raise ValidationError(f"Kraus family is not trace preserving: residual {resid:.3e}", _MODULE)

    def completeness_residual(self) -> float:
        total = sum(k.conj().T @ k for k in self.kraus)
        return float(np.max(np.abs(total - np.eye(self.d_in))))

    def apply(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=np.complex128)
        if rho.shape != (self.d_in, self.d_in):
            raise DomainError(f"state of shape {rho.shape} does not fit channel input dimension {self.d_in}", _MODULE)
        out = sum(k @ rho @ k.conj().T for k in self.kraus)
        return density_matrix(0.5 * (out + out.conj().T))

    __call__ = apply

    def to_dict(self) -> dict:
        return {
            "d_in": self.d_in,
            "d_out": self.d_out,
            "kraus": [state_to_dict(k)["matrix"] for k in self.kraus],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KrausChannel":
        d_in, d_out = int(d["d_in"]), int(d["d_out"])
        ks = []
        for m in d["kraus"]:
            raw = np.asarray(m, dtype=np.float64)
            if raw.shape != (d_out, d_in, 2):
                raise ValidationError(f"Kraus record has shape {raw.shape}", _MODULE)
            ks.append(raw[..., 0] + 1j * raw[..., 1])
        return cls(d_in, d_out, tuple(ks))


def apply(ch: KrausChannel, rho) -> np.ndarray:
    return ch.apply(rho)


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel(d, d, (np.eye(d),))


def replacement_channel(tau) -> KrausChannel:
    """``X -> Tr(X) tau`` with Kraus operators ``sqrt(w_i) |t_i><j|``."""
    tau = density_matrix(tau)
    d = tau.shape[0]
    w, v = np.linalg.eigh(tau)
    ks = []
    for i in range(d):
        if w[i] <= 0:
            continue
        for j in range(d):
            k = np.zeros((d, d), dtype=complex)
            k[:, j] = np.sqrt(w[i]) * v[:, i]
            ks.append(k)
    return KrausChannel(d, d, tuple(ks))


def dephasing_channel(d: int) -> KrausChannel:
    ks = []
    for i in range(d):
        k = np.zeros((d, d))
        k[i, i] = 1.0
        ks.append(k)
    return KrausChannel(d, d, tuple(ks))


def random_channel(d_in: int, d_out: int, kraus_count: int, seed=None) -> KrausChannel:
    """Random channel from a Gaussian isometry ``C^d_in -> C^(kraus_count*d_out)``."""
    if kraus_count < 1:
        raise DomainError("kraus_count must be >= 1", _MODULE)
    if kraus_count * d_out < d_in:
        raise DomainError(
            f"no isometry from dimension {d_in} into {kraus_count}x{d_out}; need kraus_count*d_out >= d_in", _MODULE
        )
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(kraus_count * d_out, d_in)) + 1j * rng.normal(size=(kraus_count * d_out, d_in))
    v, r = np.linalg.qr(g)
    # fix the phase of R's diagonal so the law is Haar on isometries
    v = v * (np.diag(r) / np.abs(np.diag(r)))
    return KrausChannel(d_in, d_out, tuple(v[i * d_out:(i + 1) * d_out] for i in range(kraus_count)))


def save_channel(path, ch: KrausChannel) -> None:
    with open(path, "w") as fh:
        json.dump(ch.to_dict(), fh)


def load_channel(path) -> KrausChannel:
    with open(path) as fh:
        return KrausChannel.from_dict(json.load(fh))


__all__ = [
    "KrausChannel",
    "apply",
    "identity_channel",
    "replacement_channel",
    "dephasing_channel",
    "random_channel",
    "save_channel",
    "load_channel",
]
