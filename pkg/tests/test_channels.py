import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdiv.channels import (
    KrausChannel,
    apply,
    dephasing_channel,
    identity_channel,
    load_channel,
    random_channel,
    replacement_channel,
    save_channel,
)
from sdiv.divergences import chernoff, umegaki, xi_s
from sdiv.errors import DomainError, ValidationError
from sdiv.oneshot import p_err_s_c
from sdiv.states import random_state

seeds = st.integers(min_value=0, max_value=2**31)


def test_identity_and_replacement():
    rho, tau = random_state(3, seed=1), random_state(3, seed=2)
    assert np.allclose(apply(identity_channel(3), rho), rho, atol=1e-15)
    assert np.allclose(replacement_channel(tau)(rho), tau, atol=1e-14)


def test_dephasing_zeroes_off_diagonals():
    rho = random_state(2, seed=3)
    out = dephasing_channel(2)(rho)
    assert np.allclose(out, np.diag(np.diag(rho)), atol=1e-15)


def test_single_kraus_is_unitary():
    ch = random_channel(2, 2, 1, seed=5)
    u = ch.kraus[0]
    assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-12)


def test_random_channel_valid_and_deterministic():
    ch = random_channel(2, 3, 4, seed=9)
    assert ch.completeness_residual() <= 1e-10
    again = random_channel(2, 3, 4, seed=9)
    assert all(np.array_equal(a, b) for a, b in zip(ch.kraus, again.kraus))
    out = ch(random_state(2, seed=1))
    assert out.shape == (3, 3)


def test_channel_rejections():
    with pytest.raises(ValidationError, match="trace preserving"):
        KrausChannel(2, 2, (0.5 * np.eye(2),))
    with pytest.raises(ValidationError, match="shape"):
        KrausChannel(2, 2, (np.eye(3),))
    with pytest.raises(ValidationError):
        KrausChannel(2, 2, ())
    with pytest.raises(DomainError):
        random_channel(4, 1, 2)
    with pytest.raises(DomainError):
        identity_channel(2)(random_state(3, seed=0))


def test_channel_json_round_trip(tmp_path):
    ch = random_channel(2, 3, 2, seed=4)
    path = tmp_path / "ch.json"
    save_channel(path, ch)
    back = load_channel(path)
    assert all(a.tobytes() == b.tobytes() for a, b in zip(ch.kraus, back.kraus))
    with pytest.raises(ValidationError):
        KrausChannel.from_dict({"d_in": 2, "d_out": 2, "kraus": [[[1, 0]]]})


@settings(max_examples=30, deadline=None)
@given(seed=seeds, d_in=st.integers(2, 3), d_out=st.integers(2, 3), k=st.integers(1, 3),
       s=st.sampled_from([0.3, 1.0, 3.0]))
def test_data_processing(seed, d_in, d_out, k, s):
    if k * d_out < d_in:
        k = d_in
    rho, sigma = random_state(d_in, seed=seed), random_state(d_in, seed=seed + 1)
    ch = random_channel(d_in, d_out, k, seed=seed + 2)
    r2, s2 = ch(rho), ch(sigma)
    assert xi_s(r2, s2, s) <= xi_s(rho, sigma, s) + 1e-7
    assert p_err_s_c(r2, s2, s, 1.0) >= p_err_s_c(rho, sigma, s, 1.0) - 1e-9
    assert chernoff(r2, s2) <= chernoff(rho, sigma) + 1e-7
    assert umegaki(r2, s2) <= umegaki(rho, sigma) + 1e-7
