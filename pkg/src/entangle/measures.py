"""Entropy of entanglement, entanglement of formation and relative entropy of
entanglement for two-qubit states, plus the Werner family.

Values are in nats; ``MeasureValue.ebits`` divides by ``ln 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import (
    LN2,
    PSI_MINUS,
    Y,
    CheckFailed,
    DensityMatrix,
    as_density,
    as_pure,
    entropy_of_spectrum,
    partial_trace,
    partial_transpose,
)
from .purification import fidelity_max_entangled
from .separable import RelEntOptions, SeparableMixture, minimize_relative_entropy

_YY = np.kron(Y, Y)


@dataclass(frozen=True)
class MeasureValue:
    value: float
    method: str
    unit: str = "nats"
    diagnostics: dict = field(default_factory=dict)

    @property
    def ebits(self) -> float:
        return self.value / LN2 if self.unit == "nats" else self.value

    @property
    def nats(self) -> float:
        return self.value if self.unit == "nats" else self.value * LN2

    def to(self, unit: str) -> "MeasureValue":
        if unit not in ("nats", "ebits"):
            raise ValueError(f"unknown unit {unit!r}")
        v = self.nats if unit == "nats" else self.ebits
        return MeasureValue(v, self.method, unit, self.diagnostics)

    def __float__(self):
        return float(self.value)


def werner(F: float) -> DensityMatrix:
    """``F |psi-><psi-| + (1 - F)/3 (1 - |psi-><psi-|)`` for ``F`` in [1/4, 1]."""
    if not 0.25 <= F <= 1.0:
        raise ValueError(f"Werner fidelity must lie in [1/4, 1], got {F!r}")
    p = np.outer(PSI_MINUS.amplitudes, PSI_MINUS.amplitudes.conj())
    return DensityMatrix(F * p + (1 - F) / 3 * (np.eye(4) - p))


def werner_relative_entropy_exact(F: float) -> float:
    """Known closed form of E_RE for Werner states, used as a reference."""
    if F <= 0.5:
        return 0.0
    return LN2 + F * math.log(F) + (1 - F) * math.log(1 - F) if F < 1 else LN2


def entropy_of_entanglement(psi) -> MeasureValue:
    """Entropy of the reduced state of a pure bipartite state.

    Raises ``ValueError`` if the input is not pure.
    """
    try:
        psi = as_pure(psi)
    except ValueError as err:
        raise ValueError("entropy of entanglement needs a pure state") from err
    rho = psi.density()
    bob = [q for q in range(psi.n_qubits) if q not in psi.cut]
    s_a = entropy_of_spectrum(np.linalg.eigvalsh(partial_trace(rho, psi.cut).data))
    s_b = entropy_of_spectrum(np.linalg.eigvalsh(partial_trace(rho, bob).data))
    return MeasureValue(s_a, "entropy", diagnostics={"side_gap": abs(s_a - s_b)})


def concurrence(rho) -> float:
    """Two-qubit concurrence ``max(0, l1 - l2 - l3 - l4)``.

    The ``l_i`` are the singular values of ``W^T (Y (x) Y) W`` with
    ``rho = W W^dag``, which equal the square roots of the spectrum of
    ``rho (Y (x) Y) rho* (Y (x) Y)`` but stay accurate for low-rank input.
    """
    rho = as_density(rho)
    if rho.n_qubits != 2:
        raise ValueError("concurrence is defined for two-qubit states")
    lam, v = np.linalg.eigh(rho.data)
    w = v * np.sqrt(np.clip(lam, 0.0, None))
    sv = np.linalg.svd(w.T @ _YY @ w, compute_uv=False)
    return float(max(0.0, sv[0] - sv[1] - sv[2] - sv[3]))


def formation_from_concurrence(c: float) -> float:
    x = (1 + math.sqrt(max(0.0, 1 - c * c))) / 2
    return entropy_of_spectrum([x, 1 - x])


def entanglement_of_formation(rho) -> MeasureValue:
    c = concurrence(rho)
    return MeasureValue(formation_from_concurrence(c), "formation", diagnostics={"concurrence": c})


def relative_entropy(sigma, rho) -> float:
    """``S(sigma || rho) = tr(sigma ln sigma) - tr(sigma ln rho)``.

    Returns ``inf`` when sigma has weight above 1e-12 on the kernel of rho
    (eigenvalues below 1e-14).
    """
    s = np.asarray(as_density(sigma).data)
    r = np.asarray(as_density(rho).data)
    if s.shape != r.shape:
        raise ValueError("states act on different spaces")
    ls, vs = np.linalg.eigh(s)
    lr, vr = np.linalg.eigh(r)
    # weight of sigma along each eigenvector of rho
    overlap = np.real(np.einsum("ia,ij,ja->a", vr.conj(), s, vr))
    kernel = lr < 1e-14
    if np.any(overlap[kernel] > 1e-12):
        return math.inf
    ls = np.clip(ls, 0.0, None)
    first = float(np.sum(ls[ls > 0] * np.log(ls[ls > 0])))
    second = float(np.sum(overlap[~kernel] * np.log(lr[~kernel])))
    return max(first - second, 0.0)


def relative_entropy_of_entanglement(rho, opts: RelEntOptions | None = None
                                     ) -> tuple[MeasureValue, SeparableMixture]:
    """Distance in relative entropy to the nearest mixture of product states.

    The value belongs to a feasible separable state, so it never lies below
    the true minimum.  ``diagnostics["converged"]`` is False if the budget
    ran out before the stopping rule held.
    """
    res = minimize_relative_entropy(rho, opts)
    diag = {
        "converged": res.converged,
        "iterations": res.iterations,
        "improvement": res.improvement,
        "restarts": res.restarts,
    }
    return MeasureValue(res.value, "relative-entropy", diagnostics=diag), res.closest


def ppt_witness(rho) -> float:
    """Smallest eigenvalue of the partial transpose."""
    return float(np.linalg.eigvalsh(partial_transpose(rho, 1))[0])


def is_separable(rho) -> tuple[bool, float]:
    """Positive-partial-transpose test, exact for two qubits: ``(witness >= -1e-10, witness)``."""
    rho = as_density(rho)
    if rho.n_qubits != 2:
        raise ValueError("the PPT decision is exact only for two qubits")
    w = ppt_witness(rho)
    return w >= -1e-10, w


class WernerRow(NamedTuple):
    F: float
    E_F: float
    E_RE: float
    fidelity: float
    ppt_witness: float
    ere_converged: bool


def werner_point(F: float, opts: RelEntOptions | None = None) -> WernerRow:
    rho = werner(F)
    e_re, _ = relative_entropy_of_entanglement(rho, opts)
    return WernerRow(
        F,
        entanglement_of_formation(rho).value,
        e_re.value,
        fidelity_max_entangled(rho),
        ppt_witness(rho),
        bool(e_re.diagnostics["converged"]),
    )


def point_options(base: RelEntOptions, index: int) -> RelEntOptions:
    """Options for grid point ``index`` with a seed derived from the base seed."""
    seed = int(np.random.SeedSequence([base.seed, index]).generate_state(1)[0])
    return RelEntOptions(**{**base.__dict__, "seed": seed})


def werner_sweep(F_grid, opts: RelEntOptions | None = None, check: bool = True,
                 jobs: int = 1) -> list[WernerRow]:
    """Both mixed-state measures along a grid of Werner fidelities.

    With ``check`` set, raises :class:`CheckFailed` unless
    ``E_RE <= E_F + 1e-6`` on every row.  Rows follow the grid order for any
    ``jobs``.
    """
    grid = [float(F) for F in F_grid]
    for F in grid:
        if not 0.25 <= F <= 1.0:
            raise ValueError(f"grid value {F!r} outside [1/4, 1]")
    base = opts or RelEntOptions()
    point_opts = [point_options(base, i) for i in range(len(grid))]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(jobs) as pool:
            rows = list(pool.map(werner_point, grid, point_opts))
    else:
        rows = [werner_point(F, o) for F, o in zip(grid, point_opts)]
    if check:
        bad = [r.F for r in rows if r.E_RE > r.E_F + 1e-6]
        if bad:
            raise CheckFailed(f"E_RE exceeds E_F at F = {bad}")
    return rows
