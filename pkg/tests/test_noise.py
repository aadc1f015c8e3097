"""Loss channel and teleportation through loss.  The m=1 protocol is
re-simulated end to end with dense density matrices in the number basis,
including the environment trace, as a fully independent check."""

import math

import numpy as np
import pytest

from ecs_teleport import fock
from ecs_teleport.algebra import (
    CoherentOperator,
    operator_fidelity,
    superposition,
)
from ecs_teleport.channels import ChannelSpec, build_channel, build_input
from ecs_teleport.noise import (
    LossModel,
    adjudicate_teleported_fidelity,
    apply_loss,
    channel_fidelity,
    lossy_channel_operator,
    teleport_through_noise,
    teleported_fidelity_closed_form,
    teleported_fidelity_exact,
)
from ecs_teleport.teleport import run_protocol
from conftest import random_state


def test_loss_model_bounds():
    with pytest.raises(ValueError):
        LossModel(-0.1)
    with pytest.raises(ValueError):
        LossModel(1.1)


def test_lossless_limit_is_projector(rng):
    x = random_state(rng, 2, 2)
    rho = apply_loss(x, LossModel(1.0))
    ref = CoherentOperator.from_pure(x)
    assert abs(operator_fidelity(ref, rho) - 1.0) < 1e-10


def test_full_loss_gives_vacuum():
    x = build_channel(ChannelSpec(3, 1.0, "minus"))
    rho = apply_loss(x, LossModel(0.0))
    assert len(rho.labels) == 1
    assert all(abs(a) < 1e-12 for a in rho.labels[0].amps)
    assert abs(rho.trace() - 1.0) < 1e-10


def test_loss_preserves_trace_and_hermiticity(rng):
    for eta in (0.2, 0.7):
        x = random_state(rng, 3, 3)
        rho = apply_loss(x, LossModel(eta))
        assert abs(rho.trace() - 1.0) < 1e-10
        assert rho.is_hermitian(1e-10)


def test_loss_scales_amplitudes():
    x = build_channel(ChannelSpec(3, 1.0, "minus"))
    rho = apply_loss(x, LossModel(0.49))
    expected = tuple(0.7 * a for a in (2.0, math.sqrt(2), 1.0, 1.0))
    mags = sorted(max(abs(a) for a in lab.amps) for lab in rho.labels)
    assert abs(mags[-1] - expected[0]) < 1e-12


def test_loss_cross_term_damping_factor():
    # four-mode minus channel: off-branch coefficients damped by
    # exp(-16 (1-eta) alpha^2) relative to the diagonal
    alpha, eta = 0.9, 0.6
    rho = apply_loss(build_channel(ChannelSpec(3, alpha, "minus")), LossModel(eta))
    i, j = 0, 1
    ratio = abs(rho.coeffs[i, j]) / abs(rho.coeffs[i, i])
    assert abs(ratio - math.exp(-16 * (1 - eta) * alpha**2)) < 1e-12


def test_loss_semigroup_composition(rng):
    x = random_state(rng, 2, 2)
    twice = apply_loss(apply_loss(x, LossModel(0.8)), LossModel(0.75))
    once = apply_loss(x, LossModel(0.6))
    assert len(twice.labels) == len(once.labels)
    for la, lb in zip(twice.labels, once.labels):
        assert la.close_to(lb, 1e-10)
    assert np.max(np.abs(twice.coeffs - once.coeffs)) < 1e-10


def test_partial_mode_loss():
    x = superposition([(1.0, (0.5, 0.8))])
    rho = apply_loss(x, LossModel(0.5), modes=(1,))
    assert abs(rho.labels[0].amps[0] - 0.5) < 1e-12
    assert abs(rho.labels[0].amps[1] - 0.8 * math.sqrt(0.5)) < 1e-12


# --- channel fidelity -----------------------------------------------------------

def test_channel_fidelity_lossless():
    assert abs(channel_fidelity(1.3, 1.0) - 1.0) < 1e-12


def test_channel_fidelity_half_transmissivity_is_half():
    for alpha in (0.2, 0.9, 1.7, 3.0):
        assert abs(channel_fidelity(alpha, 0.5) - 0.5) < 1e-12


def test_channel_fidelity_matches_operator_trace():
    for alpha in (0.4, 1.0, 2.2):
        for eta in (0.15, 0.5, 0.85):
            rho_pe = lossy_channel_operator(3, alpha, eta)
            ref = CoherentOperator.from_pure(
                build_channel(ChannelSpec(3, math.sqrt(eta) * alpha, "minus"))
            )
            assert abs(operator_fidelity(ref, rho_pe) - channel_fidelity(alpha, eta)) < 1e-9


def test_channel_fidelity_against_fock_gram():
    # rebuild the trace from truncated number-basis overlaps only
    alpha, eta = 1.0, 0.35
    amps = (2 * alpha, math.sqrt(2) * alpha, alpha, alpha)
    damped = tuple(math.sqrt(eta) * a for a in amps)
    total = sum(a**2 for a in amps)
    d = math.exp(-2 * (1 - eta) * total)
    m_pe = np.array([[1, -d], [-d, 1]]) / (2 * (1 - math.exp(-2 * total)))
    m_ref = np.array([[1, -1], [-1, 1]]) / (2 * (1 - math.exp(-2 * eta * total)))
    labs = [damped, tuple(-a for a in damped)]
    g = np.array(
        [[fock.product_overlap(a, b) for b in labs] for a in labs]
    )
    trace = np.trace(m_ref @ g @ m_pe @ g).real
    assert abs(trace - channel_fidelity(alpha, eta)) < 1e-6


def test_channel_fidelity_domain_errors():
    with pytest.raises(ValueError):
        channel_fidelity(0.0, 0.5)
    with pytest.raises(ValueError):
        channel_fidelity(1.0, 1.2)


# --- teleportation through loss ---------------------------------------------------

def test_lossless_noisy_run_matches_noiseless_protocol():
    k1, k2 = 0.6, -0.5 + 0.3j
    noisy = teleport_through_noise(3, 1.0, 1.0, k1, k2, n_max=10)
    clean = run_protocol(3, 1.0, k1, k2, "minus", n_max=10)
    for a, b in zip(noisy.outcomes, clean.outcomes):
        assert (a.l, a.n) == (b.l, b.n)
        assert abs(a.probability - b.probability) < 1e-10
        if a.is_success:
            assert abs(a.fidelity - 1.0) < 1e-9
            assert abs(b.fidelity - 1.0) < 1e-9


def test_noisy_outcome_fidelities_match_exact_closed_form():
    for m, alpha, eta in ((1, 0.8, 0.6), (2, 1.1, 0.4), (3, 1.0, 0.6), (3, 1.5, 0.85)):
        rep = teleport_through_noise(m, alpha, eta, 1.0, -1.0, n_max=8)
        expected = teleported_fidelity_exact(m, alpha, eta)
        for o in rep.outcomes:
            if o.is_success:
                assert abs(o.fidelity - expected) < 1e-9
        assert abs(rep.mean_fidelity - expected) < 1e-9


def test_noisy_fidelity_depends_on_input_branch_combination():
    # the closed form covers the odd-cat input; the even-cat value differs
    minus_cat = teleport_through_noise(3, 1.0, 0.6, 1.0, -1.0, n_max=6)
    plus_cat = teleport_through_noise(3, 1.0, 0.6, 1.0, 1.0, n_max=6)
    assert abs(minus_cat.mean_fidelity - plus_cat.mean_fidelity) > 1e-3


def test_noisy_probabilities_still_complete():
    rep = teleport_through_noise(3, 1.0, 0.7, 0.8, 0.6, n_max=60)
    assert abs(rep.total_probability - 1.0) < 1e-9


def test_small_amplitude_loses_fidelity():
    for eta in (0.3, 0.5, 0.7):
        rep = teleport_through_noise(3, 0.3, eta, 1.0, -1.0, n_max=6)
        assert rep.mean_fidelity < 0.6


def test_fidelity_increases_with_transmissivity():
    values = [
        teleport_through_noise(3, 1.0, eta, 1.0, -1.0, n_max=6).mean_fidelity
        for eta in (0.3, 0.5, 0.7, 0.9, 1.0)
    ]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert abs(values[-1] - 1.0) < 1e-9


def test_noise_run_rejects_degenerate_parameters():
    with pytest.raises(ValueError):
        teleport_through_noise(3, 1.0, 0.0, 1.0, -1.0)
    with pytest.raises(ValueError):
        teleport_through_noise(3, 1.0, 1.5, 1.0, -1.0)


# --- independent dense simulation of the m=1 lossy protocol ------------------------


def _dense_lossy_protocol(alpha, eta, k1, k2, n_outcomes, dim=16):
    """Full density-matrix run in the number basis: explicit environment
    modes for the loss, dense beam splitter, projective measurement, parity
    correction, and branch-sign flip built from the encoded branch vectors."""
    beta = math.sqrt(eta) * alpha
    col = fock.coherent_column
    se, sr = math.sqrt(eta), math.sqrt(1 - eta)

    # channel + environments as a pure 4-mode vector, then trace environments
    a_minus = 1 / math.sqrt(2 * (1 - math.exp(-4 * alpha**2)))
    terms = [(a_minus, 1.0), (-a_minus, -1.0)]
    vec = np.zeros((dim,) * 4, dtype=complex)
    for coeff, s in terms:
        v = coeff * np.multiply.outer(
            np.multiply.outer(col(s * se * alpha, dim), col(s * se * alpha, dim)),
            np.multiply.outer(col(s * sr * alpha, dim), col(s * sr * alpha, dim)),
        )
        vec = vec + v
    mat = vec.reshape(dim * dim, dim * dim)
    rho_pe = np.einsum("ae,be->ab", mat, mat.conj())

    nrm = abs(k1) ** 2 + abs(k2) ** 2 + 2 * math.exp(-2 * beta**2) * (k2.conjugate() * k1).real
    k1n, k2n = k1 / math.sqrt(nrm), k2 / math.sqrt(nrm)
    vin = k1n * col(beta, dim) + k2n * col(-beta, dim)
    rho = np.kron(np.outer(vin, vin.conj()), rho_pe)

    u2 = fock._bs_block(dim, dim)
    u = np.kron(u2, np.eye(dim))
    rho = u @ rho @ u.conj().T
    rho6 = rho.reshape((dim,) * 3 + (dim,) * 3)

    par = np.array([(-1.0) ** k for k in range(dim)])
    plus, minus = col(beta, dim), col(-beta, dim)
    basis = np.stack([plus, minus], axis=1)
    flip = basis @ np.diag([1.0, -1.0]) @ np.linalg.pinv(basis)

    results = {}
    for l, n in n_outcomes:
        bob = rho6[l, n, :, l, n, :]
        p = np.trace(bob).real
        bob = bob / p
        if l == 0 and n > 0:
            bob = (par[:, None] * bob) * par[None, :]
            if n % 2 == 0:
                bob = flip @ bob @ flip.conj().T
                bob = bob / np.trace(bob).real
        elif n == 0 and l > 0 and l % 2 == 0:
            bob = flip @ bob @ flip.conj().T
            bob = bob / np.trace(bob).real
        fid = float(np.real(np.vdot(vin, bob @ vin)))
        results[(l, n)] = (p, fid)
    return results


def test_dense_simulation_confirms_noisy_engine():
    alpha, eta = 0.8, 0.6
    k1, k2 = 0.7, -0.55 + 0.2j
    outcomes = [(0, 1), (0, 2), (0, 3), (1, 0), (2, 0)]
    dense = _dense_lossy_protocol(alpha, eta, k1, k2, outcomes)
    rep = teleport_through_noise(1, alpha, eta, k1, k2, n_max=6)
    for (l, n), (p, fid) in dense.items():
        o = rep.outcome(l, n)
        assert abs(o.probability - p) < 1e-6
        assert abs(o.fidelity - fid) < 1e-6


def test_dense_simulation_confirms_exact_closed_form():
    alpha, eta = 0.8, 0.6
    dense = _dense_lossy_protocol(alpha, eta, 1.0 + 0j, -1.0 + 0j, [(0, 1), (0, 2), (3, 0)])
    expected = teleported_fidelity_exact(1, alpha, eta)
    for _, fid in dense.values():
        assert abs(fid - expected) < 1e-6


# --- closed-form candidates and adjudication ---------------------------------------

def test_closed_form_candidates_at_unit_transmissivity():
    forms = teleported_fidelity_closed_form(3, 1.2, 1.0)
    assert abs(forms.flat - 1.0) < 1e-12
    assert abs(forms.alpha_scaled - 1.0) < 1e-12
    assert abs(forms.exact - 1.0) < 1e-12


def test_candidates_differ_away_from_unit_alpha():
    forms = teleported_fidelity_closed_form(3, 2.0, 0.6)
    assert abs(forms.flat - forms.alpha_scaled) > 1e-3
    assert forms.closest == "alpha_scaled"


def test_adjudication_selects_alpha_scaled_variant():
    adj = adjudicate_teleported_fidelity()
    assert adj.winner == "alpha_scaled"
    assert adj.max_dev_alpha_scaled < 1e-6
    assert adj.max_dev_flat > 1e-3


def test_exact_form_tracks_engine_outside_adjudication_grid():
    worst = 0.0
    for alpha in (1.0, 2.0):
        for eta in (0.35, 0.75):
            rep = teleport_through_noise(3, alpha, eta, 1.0, -1.0, n_max=8)
            worst = max(worst, abs(rep.mean_fidelity - teleported_fidelity_exact(3, alpha, eta)))
    assert worst < 1e-9
