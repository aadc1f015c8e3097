"""Exact linear algebra over finite superpositions of multimode coherent states.

Every pure state handled here is a finite complex-weighted sum of multimode
coherent product states |g_1, ..., g_M>, and every mixed state is a complex
coefficient matrix over a dictionary of such labels.  All inner products,
beam-splitter actions, photon-number projections, partial traces and
fidelities then have closed forms built from the single-mode overlap

    <a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b),

so the whole calculus is exact up to floating point.  Coherent states carry
the standard normalization exp(-|a|^2/2) in the photon-number basis; this is
the only convention consistent with the overlap above.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

# Tolerance hierarchy: exact algebra identities hold to 1e-12, quantities that
# pass through a Gram matrix of non-orthogonal labels to 1e-10.
LABEL_TOL = 1e-12
TRACE_TOL = 1e-10
MIN_AMPLITUDE = 1e-8


class DimensionMismatchError(ValueError):
    """Operands are defined on different numbers of modes."""


class UnsupportedStructureError(ValueError):
    """The state lacks the structure (e.g. two independent branches) an operation needs."""


def overlap(a: complex, b: complex) -> complex:
    """Single-mode coherent overlap <a|b>; |result| <= 1 for finite inputs."""
    a = complex(a)
    b = complex(b)
    return cmath.exp(-0.5 * abs(a) ** 2 - 0.5 * abs(b) ** 2 + a.conjugate() * b)


def number_amplitude(beta: complex, n: int) -> complex:
    """Photon-number amplitude <n|beta> = exp(-|beta|^2/2) beta^n / sqrt(n!)."""
    if n < 0:
        raise ValueError(f"photon number must be nonnegative, got {n}")
    beta = complex(beta)
    if beta == 0:
        return 1.0 + 0j if n == 0 else 0.0 + 0j
    # beta**n / sqrt(n!) via logs so large n never overflows
    return cmath.exp(-0.5 * abs(beta) ** 2 + n * cmath.log(beta) - 0.5 * math.lgamma(n + 1))


@dataclass(frozen=True)
class CoherentLabel:
    """One multimode coherent product state, identified by its mode amplitudes."""

    amps: tuple[complex, ...]

    def __post_init__(self):
        amps = tuple(complex(a) for a in self.amps)
        for a in amps:
            if not (math.isfinite(a.real) and math.isfinite(a.imag)):
                raise ValueError("coherent amplitudes must be finite")
        object.__setattr__(self, "amps", amps)

    @property
    def mode_count(self) -> int:
        return len(self.amps)

    def close_to(self, other: "CoherentLabel", tol: float = LABEL_TOL) -> bool:
        if len(self.amps) != len(other.amps):
            return False
        return all(abs(a - b) <= tol for a, b in zip(self.amps, other.amps))

    def negated(self) -> "CoherentLabel":
        return CoherentLabel(tuple(-a for a in self.amps))


def label_overlap(bra: CoherentLabel, ket: CoherentLabel) -> complex:
    """<bra|ket> as a product of per-mode overlaps."""
    if bra.mode_count != ket.mode_count:
        raise DimensionMismatchError("labels have different mode counts")
    out = 1.0 + 0j
    for a, b in zip(bra.amps, ket.amps):
        out *= overlap(a, b)
    return out


@dataclass(frozen=True)
class CoherentSuperposition:
    """Finite sum sum_t c_t |label_t> over a common number of modes."""

    terms: tuple[tuple[complex, CoherentLabel], ...]

    def __post_init__(self):
        terms = tuple((complex(c), lab) for c, lab in self.terms)
        if not terms:
            raise ValueError("superposition needs at least one term")
        n = terms[0][1].mode_count
        for _, lab in terms:
            if lab.mode_count != n:
                raise DimensionMismatchError("all labels must share the mode count")
        object.__setattr__(self, "terms", terms)

    @property
    def mode_count(self) -> int:
        return self.terms[0][1].mode_count

    def scaled(self, factor: complex) -> "CoherentSuperposition":
        return CoherentSuperposition(tuple((c * factor, lab) for c, lab in self.terms))


def superposition(pairs: Iterable[tuple[complex, Sequence[complex]]]) -> CoherentSuperposition:
    """Convenience constructor from (coefficient, amplitude-sequence) pairs."""
    return CoherentSuperposition(tuple((c, CoherentLabel(tuple(a))) for c, a in pairs))


def dedupe(state: CoherentSuperposition, tol: float = LABEL_TOL) -> CoherentSuperposition:
    """Merge terms whose labels agree within `tol` per mode; drop exact zeros."""
    reps: list[CoherentLabel] = []
    coeffs: list[complex] = []
    for c, lab in state.terms:
        for i, rep in enumerate(reps):
            if lab.close_to(rep, tol):
                coeffs[i] += c
                break
        else:
            reps.append(lab)
            coeffs.append(c)
    kept = tuple((c, lab) for c, lab in zip(coeffs, reps) if c != 0)
    if not kept:
        # keep a single zero term so the mode count survives
        kept = ((0j, reps[0]),)
    return CoherentSuperposition(kept)


def inner_product(x: CoherentSuperposition, y: CoherentSuperposition) -> complex:
    """<x|y>, the bilinear extension of the per-mode overlap."""
    if x.mode_count != y.mode_count:
        raise DimensionMismatchError(
            f"mode counts differ: {x.mode_count} vs {y.mode_count}"
        )
    out = 0j
    for cx, lx in x.terms:
        for cy, ly in y.terms:
            out += cx.conjugate() * cy * label_overlap(lx, ly)
    return out


def norm(x: CoherentSuperposition) -> float:
    return math.sqrt(max(inner_product(x, x).real, 0.0))


def normalized(x: CoherentSuperposition) -> CoherentSuperposition:
    n = norm(x)
    if n < 1e-150:
        raise ValueError("cannot normalize a null superposition")
    return x.scaled(1.0 / n)


def tensor(x: CoherentSuperposition, y: CoherentSuperposition) -> CoherentSuperposition:
    terms = tuple(
        (cx * cy, CoherentLabel(lx.amps + ly.amps))
        for cx, lx in x.terms
        for cy, ly in y.terms
    )
    return CoherentSuperposition(terms)


def _check_mode(state_modes: int, mode: int) -> None:
    if not 0 <= mode < state_modes:
        raise IndexError(f"mode {mode} out of range for {state_modes} modes")


def _bs_label(lab: CoherentLabel, i: int, j: int) -> CoherentLabel:
    amps = list(lab.amps)
    mu, nu = amps[i], amps[j]
    s = math.sqrt(0.5)
    amps[i] = (mu + nu) * s
    amps[j] = (mu - nu) * s
    return CoherentLabel(tuple(amps))


def beam_splitter(state, i: int, j: int):
    """50/50 beam splitter on modes (i, j): (mu, nu) -> ((mu+nu)/sqrt2, (mu-nu)/sqrt2).

    Acts on a CoherentSuperposition or a CoherentOperator; coefficients are
    untouched, only the labels move, so norms and traces are preserved exactly.
    """
    if i == j:
        raise IndexError("beam splitter needs two distinct modes")
    if isinstance(state, CoherentOperator):
        _check_mode(state.mode_count, i)
        _check_mode(state.mode_count, j)
        labels = tuple(_bs_label(lab, i, j) for lab in state.labels)
        return CoherentOperator(labels, state.coeffs)
    _check_mode(state.mode_count, i)
    _check_mode(state.mode_count, j)
    return CoherentSuperposition(tuple((c, _bs_label(lab, i, j)) for c, lab in state.terms))


def _phase_label(lab: CoherentLabel, modes: Iterable[int]) -> CoherentLabel:
    amps = list(lab.amps)
    for m in modes:
        amps[m] = -amps[m]
    return CoherentLabel(tuple(amps))


def phase_shift_pi(state, modes: Iterable[int]):
    """Pi phase shift on the listed modes: every amplitude there is negated."""
    modes = sorted(set(modes))
    if isinstance(state, CoherentOperator):
        for m in modes:
            _check_mode(state.mode_count, m)
        labels = tuple(_phase_label(lab, modes) for lab in state.labels)
        return CoherentOperator(labels, state.coeffs)
    for m in modes:
        _check_mode(state.mode_count, m)
    return CoherentSuperposition(
        tuple((c, _phase_label(lab, modes)) for c, lab in state.terms)
    )


def project_photon_number(
    state: CoherentSuperposition, mode: int, n: int
) -> tuple[CoherentSuperposition, float]:
    """Project mode `mode` onto the n-photon state.

    Returns the unnormalized conditional state on the remaining modes and the
    outcome probability (its squared norm).
    """
    if n < 0:
        raise ValueError("photon number must be nonnegative")
    _check_mode(state.mode_count, mode)
    new_terms = []
    for c, lab in state.terms:
        amp = c * number_amplitude(lab.amps[mode], n)
        rest = lab.amps[:mode] + lab.amps[mode + 1 :]
        new_terms.append((amp, CoherentLabel(rest)))
    reduced = dedupe(CoherentSuperposition(tuple(new_terms)))
    prob = inner_product(reduced, reduced).real
    return reduced, max(prob, 0.0)


# ---------------------------------------------------------------------------
# density operators over coherent-label dictionaries


class CoherentOperator:
    """Operator sum_{jk} coeffs[j, k] |label_j><label_k| over one dictionary."""

    def __init__(self, labels: Sequence[CoherentLabel], coeffs: np.ndarray):
        labels = tuple(labels)
        coeffs = np.array(coeffs, dtype=complex)
        if coeffs.shape != (len(labels), len(labels)):
            raise ValueError("coefficient matrix must be square over the dictionary")
        if labels:
            n = labels[0].mode_count
            for lab in labels:
                if lab.mode_count != n:
                    raise DimensionMismatchError("all labels must share the mode count")
        self.labels = labels
        self.coeffs = coeffs

    @property
    def mode_count(self) -> int:
        return self.labels[0].mode_count

    @classmethod
    def from_pure(cls, state: CoherentSuperposition) -> "CoherentOperator":
        state = dedupe(state)
        labels = tuple(lab for _, lab in state.terms)
        c = np.array([cf for cf, _ in state.terms], dtype=complex)
        return cls(labels, np.outer(c, c.conjugate()))

    def gram(self) -> np.ndarray:
        """G[j, k] = <label_j|label_k>."""
        k = len(self.labels)
        g = np.empty((k, k), dtype=complex)
        for a in range(k):
            g[a, a] = 1.0
            for b in range(a + 1, k):
                v = label_overlap(self.labels[a], self.labels[b])
                g[a, b] = v
                g[b, a] = v.conjugate()
        return g

    def trace(self) -> complex:
        # tr(|j><k|) = <k|j>, i.e. G[k, j]
        return complex(np.trace(self.coeffs @ self.gram()))

    def scaled(self, factor: complex) -> "CoherentOperator":
        return CoherentOperator(self.labels, self.coeffs * factor)

    def normalized(self) -> "CoherentOperator":
        t = self.trace().real
        if abs(t) < 1e-300:
            raise ValueError("cannot normalize an operator with zero trace")
        return self.scaled(1.0 / t)

    def is_hermitian(self, tol: float = LABEL_TOL) -> bool:
        return bool(np.max(np.abs(self.coeffs - self.coeffs.conj().T)) <= tol)

    def dedupe(self, tol: float = LABEL_TOL) -> "CoherentOperator":
        """Merge dictionary entries that coincide within `tol` per mode."""
        reps: list[CoherentLabel] = []
        index: list[int] = []
        for lab in self.labels:
            for i, rep in enumerate(reps):
                if lab.close_to(rep, tol):
                    index.append(i)
                    break
            else:
                index.append(len(reps))
                reps.append(lab)
        k = len(reps)
        out = np.zeros((k, k), dtype=complex)
        for j in range(len(self.labels)):
            for l in range(len(self.labels)):
                out[index[j], index[l]] += self.coeffs[j, l]
        return CoherentOperator(tuple(reps), out)


def op_tensor(a: CoherentOperator, b: CoherentOperator) -> CoherentOperator:
    labels = tuple(
        CoherentLabel(la.amps + lb.amps) for la in a.labels for lb in b.labels
    )
    return CoherentOperator(labels, np.kron(a.coeffs, b.coeffs))


def trace_out(op: CoherentOperator, modes: Iterable[int]) -> CoherentOperator:
    """Partial trace over `modes`, in closed form via per-mode overlap factors.

    tr_m(|a><b|) = <b_m|a_m> |a_rest><b_rest|; tracing every mode leaves a
    dictionary with a single empty label whose coefficient is the trace.
    """
    modes = sorted(set(modes))
    for m in modes:
        _check_mode(op.mode_count, m)
    keep = [m for m in range(op.mode_count) if m not in modes]
    k = len(op.labels)
    factors = np.ones((k, k), dtype=complex)
    for j in range(k):
        for l in range(k):
            f = 1.0 + 0j
            for m in modes:
                f *= overlap(op.labels[l].amps[m], op.labels[j].amps[m])
            factors[j, l] = f
    new_labels = tuple(
        CoherentLabel(tuple(lab.amps[m] for m in keep)) for lab in op.labels
    )
    return CoherentOperator(new_labels, op.coeffs * factors).dedupe()


def project_photon_number_op(
    op: CoherentOperator, mode: int, n: int
) -> tuple[CoherentOperator, float]:
    """Photon-number projection of an operator; returns (conditional, probability)."""
    if n < 0:
        raise ValueError("photon number must be nonnegative")
    _check_mode(op.mode_count, mode)
    f = np.array([number_amplitude(lab.amps[mode], n) for lab in op.labels])
    coeffs = op.coeffs * np.outer(f, f.conjugate())
    labels = tuple(
        CoherentLabel(lab.amps[:mode] + lab.amps[mode + 1 :]) for lab in op.labels
    )
    reduced = CoherentOperator(labels, coeffs).dedupe()
    return reduced, max(reduced.trace().real, 0.0)


def operator_fidelity(a: CoherentOperator, b: CoherentOperator) -> float:
    """tr(a b) for Hermitian unit-trace operators; real in [0, 1]."""
    if a.mode_count != b.mode_count:
        raise DimensionMismatchError("operators live on different mode counts")
    gab = np.empty((len(a.labels), len(b.labels)), dtype=complex)
    for j, la in enumerate(a.labels):
        for p, lb in enumerate(b.labels):
            gab[j, p] = label_overlap(la, lb)
    value = np.trace(a.coeffs @ gab @ b.coeffs @ gab.conj().T)
    return float(value.real)


def pure_fidelity(x: CoherentSuperposition, rho: Union[CoherentOperator, CoherentSuperposition]) -> float:
    """<x|rho|x> for a normalized pure reference x."""
    if isinstance(rho, CoherentSuperposition):
        if x.mode_count != rho.mode_count:
            raise DimensionMismatchError("states live on different mode counts")
        return abs(inner_product(x, rho)) ** 2
    if x.mode_count != rho.mode_count:
        raise DimensionMismatchError("states live on different mode counts")
    w = np.empty(len(rho.labels), dtype=complex)
    for j, lab in enumerate(rho.labels):
        v = 0j
        for c, xl in x.terms:
            v += c.conjugate() * label_overlap(xl, lab)
        w[j] = v
    return float((w @ rho.coeffs @ w.conjugate()).real)
