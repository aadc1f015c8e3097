"""Entangled-coherent-state channels and their entanglement analytics.

A channel for teleporting m modes lives on m+1 modes with the amplitude
ladder (2^{(m-1)/2}, 2^{(m-2)/2}, ..., sqrt2, 1, 1) * alpha; the state is the
normalized sum or difference of that product label and its negative.  The
m-mode input states use the same ladder one rung shorter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .algebra import (
    MIN_AMPLITUDE,
    CoherentSuperposition,
    UnsupportedStructureError,
    normalized,
    overlap,
    superposition,
)
from . import fock


@dataclass(frozen=True)
class ChannelSpec:
    """Channel parameters: m teleported modes, amplitude alpha, branch sign."""

    m: int
    alpha: complex
    sign: str = "minus"

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if abs(self.alpha) < MIN_AMPLITUDE:
            raise ValueError(
                f"|alpha| must be >= {MIN_AMPLITUDE}; the channel degenerates at alpha = 0"
            )
        if self.sign not in ("plus", "minus"):
            raise ValueError("sign must be 'plus' or 'minus'")

    @property
    def relative_sign(self) -> float:
        return 1.0 if self.sign == "plus" else -1.0


def channel_amplitudes(m: int, alpha: complex) -> tuple[complex, ...]:
    """(2^{(m-1)/2}, ..., sqrt2, 1, 1) * alpha over m+1 modes."""
    if m < 1:
        raise ValueError("m must be >= 1")
    ladder = [2.0 ** ((m - 1 - k) / 2.0) for k in range(m)] + [1.0]
    return tuple(complex(alpha) * r for r in ladder)


def input_amplitudes(m: int, alpha: complex) -> tuple[complex, ...]:
    """Amplitude ladder of the m-mode states the channel can carry."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if m == 1:
        return (complex(alpha),)
    return channel_amplitudes(m - 1, alpha)


def norm_constant(m: int, alpha: complex, sign: str) -> float:
    """1 / sqrt(2 (1 +- exp(-2^{m+1} |alpha|^2))), the channel normalization."""
    s = 1.0 if sign == "plus" else -1.0
    return 1.0 / math.sqrt(2.0 * (1.0 + s * math.exp(-(2.0 ** (m + 1)) * abs(alpha) ** 2)))


def build_channel(spec: ChannelSpec) -> CoherentSuperposition:
    """Normalized (m+1)-mode channel state A (|+branch> +- |-branch>)."""
    amps = channel_amplitudes(spec.m, spec.alpha)
    neg = tuple(-a for a in amps)
    raw = superposition([(1.0, amps), (spec.relative_sign, neg)])
    return normalized(raw)


def build_input(
    m: int, alpha: complex, kappa1: complex, kappa2: complex
) -> CoherentSuperposition:
    """Normalized m-mode state kappa1 |+branch> + kappa2 |-branch>."""
    if abs(alpha) < MIN_AMPLITUDE:
        raise ValueError(f"|alpha| must be >= {MIN_AMPLITUDE}")
    if kappa1 == 0 and kappa2 == 0:
        raise ValueError("kappa1 and kappa2 must not both vanish")
    amps = input_amplitudes(m, alpha)
    neg = tuple(-a for a in amps)
    raw = superposition([(kappa1, amps), (kappa2, neg)])
    return normalized(raw)


def _partition_energy(spec: ChannelSpec, part_a) -> tuple[float, float]:
    amps = channel_amplitudes(spec.m, spec.alpha)
    part_a = sorted(set(part_a))
    for k in part_a:
        if not 0 <= k <= spec.m:
            raise ValueError(f"mode {k} outside the channel's 0..{spec.m} range")
    if not part_a or len(part_a) == spec.m + 1:
        raise ValueError("bipartition must leave modes on both sides")
    e_a = sum(abs(amps[k]) ** 2 for k in part_a)
    e_total = sum(abs(a) ** 2 for a in amps)
    return e_a, e_total - e_a


def concurrence_closed_form(spec: ChannelSpec, partition) -> float:
    """Concurrence of the channel across a bipartition, in closed form.

    `partition` is a lone channel-mode index or a set of them (the A side).
    With branch overlaps t_x = exp(-2 E_x) on side x (E_x the summed squared
    amplitudes) the two-branch state has concurrence

        C = 2 A^2 sqrt(1 - t_A^2) sqrt(1 - t_B^2),

    which is 1 for the minus branch across the 0|(rest) cut and tanh of the
    total energy for the plus branch.
    """
    if isinstance(partition, int):
        partition = (partition,)
    e_a, e_b = _partition_energy(spec, partition)
    t_a = math.exp(-2.0 * e_a)
    t_b = math.exp(-2.0 * e_b)
    a2 = norm_constant(spec.m, spec.alpha, spec.sign) ** 2
    return 2.0 * a2 * math.sqrt(1.0 - t_a**2) * math.sqrt(1.0 - t_b**2)


@dataclass(frozen=True)
class SchmidtPair:
    """Coefficients of a two-branch state in the Gram-Schmidt qubit basis."""

    x00: complex
    x01: complex
    x10: complex
    x11: complex

    def as_vector(self):
        return (self.x00, self.x01, self.x10, self.x11)

    @property
    def concurrence(self) -> float:
        return 2.0 * abs(self.x00 * self.x11 - self.x01 * self.x10)


def schmidt_coefficients(
    state: CoherentSuperposition, bipartition: tuple[tuple[int, ...], tuple[int, ...]]
) -> SchmidtPair:
    """Express a normalized two-branch state in the orthonormal basis built by
    Gram-Schmidt from its two branch products on each side of the cut.

    |0>_x is the first branch restricted to side x, |1>_x the second branch
    orthogonalized against it.
    """
    side_a, side_b = tuple(bipartition[0]), tuple(bipartition[1])
    if sorted(side_a + side_b) != list(range(state.mode_count)):
        raise ValueError("bipartition must split the modes exactly")
    terms = [(c, lab) for c, lab in state.terms if c != 0]
    if len(terms) != 2:
        raise UnsupportedStructureError("state must have exactly two branches")
    (c1, lab1), (c2, lab2) = terms

    def gs(side):
        t = 1.0 + 0j
        for m in side:
            t *= overlap(lab1.amps[m], lab2.amps[m])
        usq = 1.0 - abs(t) ** 2
        if usq < 1e-14:
            raise UnsupportedStructureError(
                "branches are not linearly independent on one side of the cut"
            )
        return t, math.sqrt(usq)

    t_a, u_a = gs(side_a)
    t_b, u_b = gs(side_b)
    return SchmidtPair(
        x00=c1 + c2 * t_a * t_b,
        x01=c2 * t_a * u_b,
        x10=c2 * u_a * t_b,
        x11=c2 * u_a * u_b,
    )


def channel_concurrence_oracle(spec: ChannelSpec, partition) -> float:
    """Wootters concurrence of the channel via the numeric qubit reduction."""
    if isinstance(partition, int):
        partition = (partition,)
    part_a = tuple(sorted(set(partition)))
    part_b = tuple(k for k in range(spec.m + 1) if k not in part_a)
    state = build_channel(spec)
    rho2 = fock.reduce_to_qubits(state, (part_a, part_b))
    return fock.wootters_concurrence(rho2)
