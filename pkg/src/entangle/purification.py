"""Two-pair entanglement purification.

The round is available twice: as the closed recurrence on the four Bell
weights (:func:`qpa_map`) and as an explicit sixteen-dimensional gate
simulation (:func:`qpa_gate_round`).  The recurrence drives the Phi+ weight
``A`` to one whenever ``A > 1/2``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import (
    BELL_STATES,
    I2,
    X,
    Z,
    ZERO_PROB,
    BellCoefficients,
    DensityMatrix,
    as_density,
    bell_coefficients,
    embed,
)

_S = 1 / np.sqrt(2)
# Magic basis: real combinations of these columns are exactly the maximally
# entangled states (up to a global phase).
MAGIC = np.column_stack([
    BELL_STATES["phi+"].amplitudes,
    1j * BELL_STATES["phi-"].amplitudes,
    1j * BELL_STATES["psi+"].amplitudes,
    BELL_STATES["psi-"].amplitudes,
])

# Alice's rotation |0> -> (|0> - i|1>)/sqrt2, |1> -> (|1> - i|0>)/sqrt2; Bob uses the inverse.
ROTATION = _S * np.array([[1, -1j], [-1j, 1]])
ROTATION_INV = ROTATION.conj().T
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)

# Qubit layout of the joint state: pair 1 = (0 Alice, 1 Bob), pair 2 = (2 Alice, 3 Bob).
_ROUND_UNITARY = (
    embed(CNOT, [0, 2], 4) @ embed(CNOT, [1, 3], 4)
    @ embed(np.kron(ROTATION, ROTATION), [0, 2], 4)
    @ embed(np.kron(ROTATION_INV, ROTATION_INV), [1, 3], 4)
)

# Bob-side unitary taking each Bell state to Phi+ (up to phase), and the
# permutation it induces on the (A, B, C, D) slots.
_TO_PHI_PLUS = {"phi+": I2, "phi-": Z, "psi+": X, "psi-": Z @ X}
_SLOT_PERMUTATION = {
    "phi+": (0, 1, 2, 3),
    "phi-": (3, 2, 1, 0),
    "psi+": (2, 3, 0, 1),
    "psi-": (1, 0, 3, 2),
}


def fidelity_max_entangled(rho) -> float:
    """Largest overlap of ``rho`` with any maximally entangled state.

    Equal to the top eigenvalue of the real part of ``rho`` written in the
    magic basis.
    """
    rho = as_density(rho)
    if rho.n_qubits != 2:
        raise ValueError("fidelity is defined here for two-qubit states")
    m = MAGIC.conj().T @ rho.data @ MAGIC
    return float(np.linalg.eigvalsh(np.real(m))[-1])


def purifiability(rho) -> tuple[bool, float]:
    """``(F > 1/2, F)``; the inequality is strict, with 1e-12 slack for rounding."""
    f = fidelity_max_entangled(rho)
    return f > 0.5 + 1e-12, f


def qpa_map(c: BellCoefficients) -> tuple[BellCoefficients, float]:
    """One round of the recurrence; returns the kept-pair weights and ``N``."""
    A, B, C, D = c
    n = (A + B) ** 2 + (C + D) ** 2
    if n <= ZERO_PROB:
        raise ValueError(f"success probability {n!r} is zero; round cannot be applied")
    out = np.array([A * A + B * B, 2 * C * D, C * C + D * D, 2 * A * B]) / n
    return BellCoefficients(*out), float(n)


class GateOutcome(NamedTuple):
    """Measurement pattern on pair 2 (Alice bit, Bob bit).

    ``kept`` is the renormalized pair-1 state for coinciding bits, else None.
    """

    pattern: tuple[int, int]
    probability: float
    kept: DensityMatrix | None


def qpa_gate_round(pair1, pair2) -> list[GateOutcome]:
    """Simulate rotations, bilateral CNOT and the pair-2 measurement."""
    p1, p2 = as_density(pair1), as_density(pair2)
    if p1.n_qubits != 2 or p2.n_qubits != 2:
        raise ValueError("both pairs must be two-qubit states")
    joint = np.kron(p1.data, p2.data)
    joint = _ROUND_UNITARY @ joint @ _ROUND_UNITARY.conj().T
    t = joint.reshape((2,) * 8)
    out = []
    for a in (0, 1):
        for b in (0, 1):
            block = t[:, :, a, b, :, :, a, b].reshape(4, 4)
            p = float(np.real(np.trace(block)))
            kept = None
            if a == b and p >= ZERO_PROB:
                block = block / p
                kept = DensityMatrix(0.5 * (block + block.conj().T))
            out.append(GateOutcome((a, b), max(p, 0.0), kept))
    return out


def qpa_gate_kept(pair1, pair2) -> tuple[DensityMatrix, float]:
    """Kept pair averaged over both coinciding patterns, and its probability."""
    outcomes = [o for o in qpa_gate_round(pair1, pair2) if o.kept is not None]
    n = sum(o.probability for o in outcomes)
    if n < ZERO_PROB:
        raise ValueError("the pairs never give coinciding results")
    kept = sum(o.probability * o.kept.data for o in outcomes) / n
    return DensityMatrix(kept), n


def to_phi_plus_frame(rho, source: str) -> DensityMatrix:
    """Apply the Bob-side unitary that turns Bell state ``source`` into Phi+."""
    rho = as_density(rho)
    u = np.kron(I2, _TO_PHI_PLUS[source])
    return DensityMatrix(u @ rho.data @ u.conj().T, rho.cut)


def relabel(c: BellCoefficients, source: str) -> BellCoefficients:
    """Bell weights after :func:`to_phi_plus_frame` with the same ``source``."""
    vals = c.as_array()
    return BellCoefficients(*vals[list(_SLOT_PERMUTATION[source])])


class Round(NamedTuple):
    coefficients: BellCoefficients
    success_probability: float
    surviving_fraction: float


@dataclass
class PurificationTrace:
    """Round 0 is the input (``N = 1``, fraction 1); each later round halves
    the pair count and keeps a fraction ``N`` of what remains."""

    target: float
    rounds: list[Round] = field(default_factory=list)
    converged: bool = False
    monotone: bool = True

    @property
    def final(self) -> BellCoefficients:
        return self.rounds[-1].coefficients

    @property
    def n_rounds(self) -> int:
        return len(self.rounds) - 1

    @property
    def surviving_fraction(self) -> float:
        return self.rounds[-1].surviving_fraction

    def rows(self):
        for k, r in enumerate(self.rounds):
            yield (k, *r.coefficients, r.success_probability, r.surviving_fraction)


def iterate(c0, target_A: float = 1 - 1e-6, max_rounds: int = 200) -> PurificationTrace:
    """Apply :func:`qpa_map` until ``A >= target_A`` or ``max_rounds`` is spent.

    A density matrix input is reduced to its Bell weights; off-diagonal terms
    are dropped with a warning.
    """
    if not 0.5 < target_A <= 1.0:
        raise ValueError("target_A must lie in (0.5, 1]")
    if max_rounds < 1:
        raise ValueError("max_rounds must be at least 1")
    if not isinstance(c0, BellCoefficients):
        rho = as_density(c0)
        c0 = bell_coefficients(rho)
        if np.max(np.abs(rho.data - c0.density().data)) > 1e-10:
            warnings.warn("input is not Bell diagonal; the recurrence keeps only its Bell weights",
                          stacklevel=2)
    trace = PurificationTrace(target_A, [Round(c0, 1.0, 1.0)])
    c, frac = c0, 1.0
    for _ in range(max_rounds):
        if c.A >= target_A:
            break
        nxt, n = qpa_map(c)
        if c.A > 0.5 and not nxt.A > 0.5:
            trace.monotone = False
        frac *= n / 2
        c = nxt
        trace.rounds.append(Round(c, n, frac))
    trace.converged = c.A >= target_A
    return trace
