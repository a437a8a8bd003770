"""Numeric tolerances shared by all modules."""

import dataclasses
import os
from dataclasses import dataclass

ENV_PREFIX = "SDIV_"


@dataclass(frozen=True)
class NumericPolicy:
    hermitian_tol: float = 1e-10
    psd_tol: float = 1e-10
    trace_tol: float = 1e-10
    # eigenvalues at or below this are treated as zero ("outside the support")
    support_tol: float = 1e-12
    # hard floor for eigenvalues of inputs to fractional powers
    negative_tol: float = 1e-8
    eig_hermitian_tol: float = 1e-8
    dim_cap: int = 4096
    grid_points: int = 1025
    alpha_tol: float = 1e-10
    max_vertices: int = 10_000

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_env(cls, environ=None):
        """Build a policy, overriding fields from ``SDIV_<FIELD>`` variables."""
        environ = os.environ if environ is None else environ
        changes = {}
        for field in dataclasses.fields(cls):
            raw = environ.get(ENV_PREFIX + field.name.upper())
            if raw is None:
                continue
            conv = int if field.type in (int, "int") else float
            changes[field.name] = conv(raw)
        return cls(**changes)


DEFAULT_POLICY = NumericPolicy()


def resolve(policy):
    return DEFAULT_POLICY if policy is None else policy
