"""One-qubit teleportation over an arbitrary shared two-qubit channel.

Qubit layout for the three-qubit run: qubit 0 is the state Alice wants to
send, qubit 1 is Alice's half of the channel and qubit 2 is Bob's half.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .core import (
    BELL_LABELS,
    BELL_STATES,
    I2,
    STATE_TOL,
    X,
    Z,
    ZERO_PROB,
    DensityMatrix,
    PureState,
    as_density,
    as_pure,
    partial_trace,
    tensor,
    von_neumann_entropy,
)

# Bob's correction for each Bell outcome when the channel is Phi+.
PHI_PLUS_TABLE = {"phi+": I2, "phi-": Z, "psi+": X, "psi-": Z @ X}

# Bob-side Pauli P with (1 (x) P)|Phi+> equal to the keyed Bell state.
_CHANNEL_PAULI = {"phi+": I2, "phi-": Z, "psi+": X, "psi-": X @ Z}

# the six Pauli-axis pure states
AXIS_STATES = (
    np.array([1, 0], dtype=complex),
    np.array([0, 1], dtype=complex),
    np.array([1, 1], dtype=complex) / np.sqrt(2),
    np.array([1, -1], dtype=complex) / np.sqrt(2),
    np.array([1, 1j], dtype=complex) / np.sqrt(2),
    np.array([1, -1j], dtype=complex) / np.sqrt(2),
)


class TeleportOutcome(NamedTuple):
    """One Bell-measurement branch.

    Bob's states are 2x2 arrays; a branch with probability below
    ``ZERO_PROB`` carries zero matrices, fidelity 0 and ``degenerate=True``.
    """

    bell_result: str
    probability: float
    bob_state_pre_correction: np.ndarray
    bob_state_post_correction: np.ndarray
    fidelity_to_input: float
    degenerate: bool = False


def bell_channel_label(channel) -> str | None:
    """Label of the Bell state ``channel`` equals, or None if it is none of them."""
    rho = as_density(channel).data
    for label, bell in BELL_STATES.items():
        if np.max(np.abs(rho - np.outer(bell.amplitudes, bell.amplitudes.conj()))) <= STATE_TOL:
            return label
    return None


def correction_table(channel) -> dict[str, np.ndarray]:
    """Corrections keyed by outcome, fixed before any input is seen.

    For a Bell-state channel ``(1 (x) P)|Phi+>`` the Phi+ table is composed
    with ``P^dag``; any other channel falls back to the Phi+ table.
    """
    label = bell_channel_label(channel) or "phi+"
    p = _CHANNEL_PAULI[label]
    return {o: u @ p.conj().T for o, u in PHI_PLUS_TABLE.items()}


def correction_for(outcome: str, channel) -> np.ndarray:
    if outcome not in PHI_PLUS_TABLE:
        raise KeyError(f"unknown Bell outcome {outcome!r}; expected one of {BELL_LABELS}")
    return correction_table(channel)[outcome]


def state_fidelity(target, rho) -> float:
    """Overlap fidelity of two one-qubit states.

    A 1-D ``target`` is treated as a pure state, giving ``<psi|rho|psi>``;
    otherwise the qubit closed form ``tr(s r) + 2 sqrt(det s det r)`` is used.
    """
    r = np.asarray(rho, dtype=complex)
    t = np.asarray(target, dtype=complex)
    if t.ndim == 1:
        return float(np.clip(np.real(t.conj() @ r @ t), 0.0, 1.0))
    dets = max(np.linalg.det(t).real, 0.0) * max(np.linalg.det(r).real, 0.0)
    return float(np.clip(np.real(np.trace(t @ r)) + 2 * np.sqrt(dets), 0.0, 1.0))


def teleport(state, channel) -> list[TeleportOutcome]:
    """Run the protocol and return all four measurement branches."""
    pure_input = None
    if isinstance(state, PureState) or np.asarray(state).ndim == 1:
        pure_input = as_pure(state).amplitudes
    inp = as_density(state)
    chan = as_density(channel)
    if inp.n_qubits != 1:
        raise ValueError("teleport sends a single qubit")
    if chan.n_qubits != 2:
        raise ValueError("the channel must be a two-qubit state")
    table = correction_table(chan)
    joint = np.kron(inp.data, chan.data).reshape(4, 2, 4, 2)
    target = pure_input if pure_input is not None else inp.data

    out = []
    for label in BELL_LABELS:
        bell = BELL_STATES[label].amplitudes
        # <bell|_{01} joint |bell>_{01}, leaving Bob's 2x2 block
        bob = np.einsum("a,aibj,b->ij", bell.conj(), joint, bell)
        p = float(np.real(np.trace(bob)))
        if p < ZERO_PROB:
            zero = np.zeros((2, 2), dtype=complex)
            out.append(TeleportOutcome(label, max(p, 0.0), zero, zero, 0.0, True))
            continue
        pre = bob / p
        u = table[label]
        post = u @ pre @ u.conj().T
        out.append(TeleportOutcome(label, p, pre, post, state_fidelity(target, post)))
    return out


def average_fidelity(channel) -> float:
    """Mean over the six axis states of the probability-weighted fidelity."""
    chan = as_density(channel)
    total = 0.0
    for psi in AXIS_STATES:
        total += sum(o.probability * o.fidelity_to_input for o in teleport(PureState(psi), chan))
    return total / len(AXIS_STATES)


class EntangledHalfResult(NamedTuple):
    """Outcome of teleporting one half of a two-qubit carrier.

    Qubit order in ``state`` and in each branch: 0 carrier reference (Alice),
    1 carrier qubit being sent (Alice), 2 Alice's channel half, 3 Bob's
    channel half.  ``state`` averages the corrected branches.
    """

    state: DensityMatrix
    branches: list  # (bell_result, probability, DensityMatrix)


def teleport_entangled_half(channel, carrier) -> EntangledHalfResult:
    """Teleport the second qubit of ``carrier`` while its partner stays with Alice."""
    chan = as_density(channel)
    carrier = as_density(carrier)
    if chan.n_qubits != 2 or carrier.n_qubits != 2:
        raise ValueError("channel and carrier must both be two-qubit states")
    carrier = DensityMatrix(carrier.data, cut=(0, 1))
    joint = tensor(carrier, chan)  # cut (0, 1, 2)
    table = correction_table(chan)
    branches = []
    avg = np.zeros((16, 16), dtype=complex)
    for label in BELL_LABELS:
        bell = BELL_STATES[label].amplitudes
        proj = np.kron(np.kron(I2, np.outer(bell, bell.conj())), I2)
        u = np.kron(np.eye(8), table[label])
        m = u @ proj
        new = m @ joint.data @ m.conj().T
        p = float(np.real(np.trace(new)))
        if p < ZERO_PROB:
            continue
        new = new / p
        new = 0.5 * (new + new.conj().T)
        branches.append((label, p, DensityMatrix(new, cut=(0, 1, 2))))
        avg += p * new
    return EntangledHalfResult(DensityMatrix(avg, cut=(0, 1, 2)), branches)


def cross_cut_entropy(state) -> float:
    """Entropy of entanglement across the Alice:Bob cut of a pure state."""
    rho = as_density(state)
    if rho.purity() < 1.0 - 1e-9:
        raise ValueError("cross-cut entropy needs a pure state")
    return von_neumann_entropy(partial_trace(rho, rho.cut))
