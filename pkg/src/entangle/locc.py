"""Randomized audits of entanglement monotonicity under local operations.

A trial draws a two-qubit state and a short protocol of random local
operations, applies every step to every surviving branch, and compares the
ensemble-averaged entanglement of the leaves with that of the input.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .concentration import asymptotic_rate
from .core import (
    PHI_PLUS,
    DensityMatrix,
    LocalOperator,
    PureState,
    apply_local,
    as_density,
    as_pure,
    partial_trace,
    random_density_matrix,
    random_pure_state,
    random_unitary,
    tensor_pure,
)
from .measures import (
    entanglement_of_formation,
    entropy_of_entanglement,
    ppt_witness,
    relative_entropy_of_entanglement,
    werner,
)
from .purification import PurificationTrace
from .separable import RelEntOptions, SeparableMixture
from .teleportation import cross_cut_entropy, teleport_entangled_half

TOLERANCE = {"formation": 1e-6, "relative-entropy": 5e-3}
MAX_STEPS = 3
MAX_OUTCOMES = 4


def _measure_name(measure: str) -> str:
    name = {"relent": "relative-entropy"}.get(measure, measure)
    if name not in TOLERANCE:
        raise ValueError(f"unknown measure {measure!r}; use 'formation' or 'relative-entropy'")
    return name


def random_local_operation(seed, side: str, n_outcomes: int) -> LocalOperator:
    """Haar unitary on qubit (x) ancilla, ancilla prepared in |0>, then measured.

    Element ``i`` is ``(1 (x) <i|) U (1 (x) |0>)``, so the elements always
    sum to the identity; one outcome gives a plain local unitary.
    """
    if not 1 <= n_outcomes <= MAX_OUTCOMES:
        raise ValueError(f"n_outcomes must lie in [1, {MAX_OUTCOMES}]")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    u = random_unitary(2 * n_outcomes, rng).reshape(2, n_outcomes, 2, n_outcomes)
    return LocalOperator(side, tuple(u[:, i, :, 0] for i in range(n_outcomes)))


@dataclass(frozen=True)
class LoccProtocol:
    steps: tuple
    seed: int | None = None
    description: str = ""

    def __post_init__(self):
        for s in self.steps:
            if not isinstance(s, LocalOperator):
                raise TypeError("protocol steps must be LocalOperator instances")


def random_protocol(seed, max_steps: int = MAX_STEPS, max_outcomes: int = MAX_OUTCOMES
                    ) -> LoccProtocol:
    rng = np.random.default_rng(seed)
    depth = int(rng.integers(1, max_steps + 1))
    side = ("alice", "bob")[int(rng.integers(2))]
    steps = []
    for _ in range(depth):
        steps.append(random_local_operation(rng, side, int(rng.integers(1, max_outcomes + 1))))
        side = "bob" if side == "alice" else "alice"
    desc = " -> ".join(f"{s.side}[{len(s.elements)}]" for s in steps)
    return LoccProtocol(tuple(steps), seed, desc)


def run_protocol(rho, protocol: LoccProtocol, keep_intermediate: bool = False):
    """Leaves ``[(probability, state)]``; zero-probability branches are dropped."""
    layer = [(1.0, as_density(rho))]
    seen = list(layer)
    for step in protocol.steps:
        nxt = []
        for p, state in layer:
            for br in apply_local(state, step):
                if br.state is not None:
                    nxt.append((p * br.probability, br.state))
        layer = nxt
        seen.extend(nxt)
    return seen if keep_intermediate else layer


def _evaluate(measure: str, rho, opts: RelEntOptions | None):
    if measure == "formation":
        return entanglement_of_formation(rho).value, True
    value, _ = relative_entropy_of_entanglement(rho, opts)
    return value.value, bool(value.diagnostics["converged"])


class MonotonicityCheck(NamedTuple):
    margin: float
    converged: bool
    n_branches: int


def check_monotonicity(measure: str, rho, protocol: LoccProtocol,
                       opts: RelEntOptions | None = None) -> MonotonicityCheck:
    """``sum_i p_i E(rho_i) - E(rho)``; positive values beyond tolerance are violations."""
    measure = _measure_name(measure)
    rho = as_density(rho)
    if rho.n_qubits != 2:
        raise ValueError("monotonicity checks use two-qubit states")
    before, ok = _evaluate(measure, rho, opts)
    after = 0.0
    leaves = run_protocol(rho, protocol)
    for p, state in leaves:
        e, conv = _evaluate(measure, state, opts)
        after += p * e
        ok = ok and conv
    return MonotonicityCheck(after - before, ok, len(leaves))


def random_trial_state(rng: np.random.Generator) -> DensityMatrix:
    kind = int(rng.integers(4))
    if kind == 0:
        return random_pure_state(2, rng).density()
    if kind == 1:
        return random_density_matrix(2, rng)
    if kind == 2:
        return random_density_matrix(2, rng, rank=2)
    return werner(float(rng.uniform(0.25, 1.0)))


def trial_seeds(seed: int, trials: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(trials)]


@dataclass
class AuditReport:
    measure: str
    seed: int
    trials: int
    tolerance: float
    worst_margin: float | None  # None when every trial was discarded
    violations: list = field(default_factory=list)   # [trial_seed, margin]
    discarded: list = field(default_factory=list)    # [trial_seed, margin]

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


def audit_monotonicity(measure: str = "formation", trials: int = 1000, seed: int = 0,
                       tolerance: float | None = None,
                       opts: RelEntOptions | None = None) -> AuditReport:
    """Run ``trials`` random (state, protocol) pairs.

    For the relative entropy, trials whose optimizer did not converge are
    set aside in ``discarded``, and a margin above tolerance is re-measured
    at a high budget before it counts as a violation.
    """
    measure = _measure_name(measure)
    tol = TOLERANCE[measure] if tolerance is None else tolerance
    worst = -np.inf
    violations, discarded = [], []
    for ts in trial_seeds(seed, trials):
        rng = np.random.default_rng(ts)
        rho = random_trial_state(rng)
        protocol = random_protocol(rng)
        run_opts = None
        if measure == "relative-entropy":
            run_opts = opts or RelEntOptions.reduced(seed=ts)
        chk = check_monotonicity(measure, rho, protocol, run_opts)
        if measure == "relative-entropy" and chk.margin > tol:
            chk = check_monotonicity(measure, rho, protocol, RelEntOptions.high(seed=ts))
        if not chk.converged:
            discarded.append([ts, chk.margin])
            continue
        worst = max(worst, chk.margin)
        if chk.margin > tol:
            violations.append([ts, chk.margin])
    worst = None if worst == -np.inf else float(worst)
    return AuditReport(measure, seed, trials, tol, worst, violations, discarded)


class FundamentalLawReport(NamedTuple):
    trials: int
    branches: int
    min_witness: float
    failures: list  # trial seeds with a branch below the threshold


def audit_separable_closure(trials: int = 200, seed: int = 0, threshold: float = -1e-9
                            ) -> FundamentalLawReport:
    """Random protocols on random separable states must never produce an NPT branch."""
    n_branches, lowest, failures = 0, np.inf, []
    for ts in trial_seeds(seed, trials):
        rng = np.random.default_rng(ts)
        rho = SeparableMixture.random(rng, int(rng.integers(1, 6))).density()
        protocol = random_protocol(rng)
        wit = [ppt_witness(s) for _, s in run_protocol(rho, protocol, keep_intermediate=True)]
        n_branches += len(wit)
        lowest = min(lowest, min(wit))
        if min(wit) < threshold:
            failures.append(ts)
    return FundamentalLawReport(trials, n_branches, float(lowest), failures)


class PurificationBound(NamedTuple):
    holds: bool
    output: float  # surviving fraction times E_F of the final pair
    input: float   # E_F of one input pair
    slack: float


def check_purification_bound(trace: PurificationTrace, initial, tol: float = 1e-6
                             ) -> PurificationBound:
    """Entanglement delivered per input pair cannot exceed what each pair carried.

    Reads the yield bound as ``f_k E_F(rho_k) <= E_F(rho_0)``, with ``f_k``
    the surviving fraction after ``k`` rounds.
    """
    e_in = entanglement_of_formation(initial).value
    e_out = trace.surviving_fraction * entanglement_of_formation(trace.final.density()).value
    return PurificationBound(e_out <= e_in + tol, e_out, e_in, e_in - e_out)


class AccountingReport(NamedTuple):
    carrier_a2: float
    carrier_entropy: float
    initial_cross_cut: float
    final_cross_cut: float
    channel_after: float
    passed: bool


def carrier_state(a2: float) -> PureState:
    if not 0.0 <= a2 <= 1.0:
        raise ValueError("carrier_a2 must lie in [0, 1]")
    return PureState([np.sqrt(a2), 0, 0, np.sqrt(1.0 - a2)])


def check_teleport_accounting(carrier_a2: float, tol: float = 1e-10) -> AccountingReport:
    """Teleport half of ``sqrt(a2)|00> + sqrt(1-a2)|11>`` over Phi+ and audit the cut.

    Passes when the teleported pair ends with exactly the carrier's
    entanglement, the channel pair ends with none, and the expected
    cross-cut entanglement never exceeds its initial value.
    """
    carrier = carrier_state(carrier_a2)
    s_carrier = asymptotic_rate(carrier_a2)
    initial = tensor_pure(PureState(carrier.amplitudes, cut=(0, 1)), PHI_PLUS)
    e_initial = cross_cut_entropy(initial)

    result = teleport_entangled_half(PHI_PLUS, carrier)
    e_final = sum(p * cross_cut_entropy(s) for _, p, s in result.branches)
    channel = max(entanglement_of_formation(partial_trace(s, [2, 3])).value
                  for _, _, s in result.branches)
    channel = max(channel, entanglement_of_formation(partial_trace(result.state, [2, 3])).value)
    passed = (abs(e_final - s_carrier) <= tol and channel <= tol
              and e_final <= e_initial + tol)
    return AccountingReport(carrier_a2, s_carrier, e_initial, e_final, channel, passed)


def check_additivity_pure(psi1, psi2) -> float:
    """``E(psi1 (x) psi2) - E(psi1) - E(psi2)`` across the joint Alice:Bob cut."""
    p1 = as_pure(psi1)
    p2 = as_pure(psi2)
    if p1.n_qubits != 2 or p2.n_qubits != 2:
        raise ValueError("additivity check takes two-qubit pure states")
    joint = tensor_pure(p1, p2)  # cut (0, 2)
    return (entropy_of_entanglement(joint).value
            - entropy_of_entanglement(p1).value - entropy_of_entanglement(p2).value)
