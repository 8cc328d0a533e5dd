"""Dense linear algebra for states of one to four qubits.

Qubit ordering is big-endian: the leftmost ket symbol is qubit 0, the most
significant bit of the basis index.  Every state carries a *cut*, the tuple
of qubit indices held by Alice; all remaining qubits belong to Bob.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

MAX_QUBITS = 4
STATE_TOL = 1e-10
NORM_TOL = 1e-12
ZERO_PROB = 1e-14

LN2 = float(np.log(2.0))

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)


class InvalidStateError(ValueError):
    """A matrix or vector violates a state invariant beyond tolerance."""


class CheckFailed(RuntimeError):
    """An internal consistency check (ordering, monotonicity) did not hold."""


def _n_qubits(dim: int) -> int:
    n = int(round(np.log2(dim))) if dim > 0 else -1
    if n < 1 or 2**n != dim:
        raise InvalidStateError(f"dimension {dim} is not 2^n for n >= 1")
    if n > MAX_QUBITS:
        raise InvalidStateError(f"{n} qubits exceeds the supported maximum of {MAX_QUBITS}")
    return n


def _default_cut(n: int) -> tuple[int, ...]:
    return tuple(range(max(1, n // 2))) if n != 3 else (0, 1)


def _check_cut(cut, n):
    cut = tuple(sorted(int(q) for q in cut))
    if len(set(cut)) != len(cut) or any(q < 0 or q >= n for q in cut):
        raise InvalidStateError(f"cut {cut} is not a subset of qubits 0..{n - 1}")
    return cut


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector on ``n_qubits`` qubits."""

    amplitudes: np.ndarray
    cut: tuple[int, ...] = None
    n_qubits: int = field(init=False)

    def __post_init__(self):
        psi = np.array(self.amplitudes, dtype=complex).reshape(-1)
        n = _n_qubits(psi.size)
        norm = np.vdot(psi, psi).real
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidStateError(f"squared norm {norm!r} differs from 1")
        psi.setflags(write=False)
        object.__setattr__(self, "amplitudes", psi)
        object.__setattr__(self, "n_qubits", n)
        cut = _default_cut(n) if self.cut is None else _check_cut(self.cut, n)
        object.__setattr__(self, "cut", cut)

    @classmethod
    def normalized(cls, amplitudes, cut=None) -> "PureState":
        psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(psi / np.linalg.norm(psi), cut)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.cut)

    def __array__(self, dtype=None, copy=None):
        return self.amplitudes if dtype is None else self.amplitudes.astype(dtype)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix.

    Construction validates the invariants and raises
    :class:`InvalidStateError` instead of projecting a bad matrix back onto
    the state space.
    """

    data: np.ndarray
    cut: tuple[int, ...] = None
    n_qubits: int = field(init=False)

    def __post_init__(self):
        rho = np.array(self.data, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvalidStateError(f"expected a square matrix, got shape {rho.shape}")
        n = _n_qubits(rho.shape[0])
        if np.max(np.abs(rho - rho.conj().T)) > STATE_TOL:
            raise InvalidStateError("matrix is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > STATE_TOL:
            raise InvalidStateError(f"trace {tr!r} differs from 1")
        if np.linalg.eigvalsh(rho).min() < -STATE_TOL:
            raise InvalidStateError("matrix has a negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "data", rho)
        object.__setattr__(self, "n_qubits", n)
        cut = _default_cut(n) if self.cut is None else _check_cut(self.cut, n)
        object.__setattr__(self, "cut", cut)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.data @ self.data)))

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)


def as_density(state, cut=None) -> DensityMatrix:
    """Coerce a PureState, DensityMatrix, vector or matrix to a DensityMatrix."""
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, PureState):
        return state.density()
    arr = np.asarray(state, dtype=complex)
    if arr.ndim == 1:
        return PureState(arr, cut).density()
    return DensityMatrix(arr, cut)


def as_pure(state, cut=None) -> PureState:
    if isinstance(state, PureState):
        return state
    if isinstance(state, DensityMatrix):
        lam, vecs = np.linalg.eigh(state.data)
        if lam[-1] < 1.0 - STATE_TOL:
            raise InvalidStateError("state is not pure within tolerance")
        return PureState.normalized(vecs[:, -1], state.cut)
    return PureState(state, cut)


def ket(bits: str, cut=None) -> PureState:
    """Computational basis state, e.g. ``ket("01")``."""
    psi = np.zeros(2 ** len(bits), dtype=complex)
    psi[int(bits, 2)] = 1.0
    return PureState(psi, cut)


# Bell basis, in the order used for the four Bell coefficients (A, B, C, D).
_S = 1 / np.sqrt(2)
PHI_PLUS = PureState(np.array([_S, 0, 0, _S]))
PSI_MINUS = PureState(np.array([0, _S, -_S, 0]))
PSI_PLUS = PureState(np.array([0, _S, _S, 0]))
PHI_MINUS = PureState(np.array([_S, 0, 0, -_S]))

BELL_STATES = {"phi+": PHI_PLUS, "psi-": PSI_MINUS, "psi+": PSI_PLUS, "phi-": PHI_MINUS}
BELL_LABELS = tuple(BELL_STATES)
# columns are the Bell vectors in (A, B, C, D) slot order
BELL_MATRIX = np.column_stack([s.amplitudes for s in BELL_STATES.values()])


@dataclass(frozen=True)
class BellCoefficients:
    """Weights of Phi+, Psi-, Psi+ and Phi- (slots A, B, C, D)."""

    A: float
    B: float
    C: float
    D: float

    def __post_init__(self):
        vals = self.as_array()
        if np.any(vals < -NORM_TOL) or np.any(vals > 1 + NORM_TOL):
            raise ValueError(f"Bell coefficients out of [0, 1]: {tuple(float(v) for v in vals)}")
        if abs(vals.sum() - 1.0) > STATE_TOL:
            raise ValueError(f"Bell coefficients sum to {float(vals.sum())!r}, not 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.A, self.B, self.C, self.D], dtype=float)

    def density(self) -> DensityMatrix:
        """The Bell-diagonal state with these weights."""
        w = np.clip(self.as_array(), 0.0, None)
        return DensityMatrix((BELL_MATRIX * w) @ BELL_MATRIX.conj().T)

    def __iter__(self):
        return iter((self.A, self.B, self.C, self.D))


@dataclass(frozen=True, eq=False)
class LocalOperator:
    """Operation elements ``{M_i}`` acting on one party's qubits.

    ``side`` is ``"alice"`` or ``"bob"``.  The elements must satisfy
    ``sum_i M_i^dag M_i <= 1``.
    """

    side: str
    elements: tuple

    def __post_init__(self):
        if self.side not in ("alice", "bob"):
            raise ValueError(f"side must be 'alice' or 'bob', not {self.side!r}")
        mats = tuple(np.array(m, dtype=complex) for m in self.elements)
        if not mats:
            raise ValueError("a local operation needs at least one element")
        d = mats[0].shape[0]
        if any(m.shape != (d, d) for m in mats):
            raise ValueError("operation elements must be square and of equal size")
        _n_qubits(d)
        for m in mats:
            m.setflags(write=False)
        object.__setattr__(self, "elements", mats)
        gap = np.linalg.eigvalsh(np.eye(d) - self.completeness())
        if gap.min() < -STATE_TOL:
            raise ValueError("operation elements are not trace non-increasing")

    def completeness(self) -> np.ndarray:
        return sum(m.conj().T @ m for m in self.elements)

    @property
    def trace_preserving(self) -> bool:
        d = self.elements[0].shape[0]
        return bool(np.max(np.abs(self.completeness() - np.eye(d))) <= STATE_TOL)

    @classmethod
    def unitary(cls, side: str, u) -> "LocalOperator":
        return cls(side, (u,))


def embed(op: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Lift an operator on ``qubits`` (in the listed order) to ``n`` qubits."""
    qubits = list(qubits)
    k = len(qubits)
    rest = [q for q in range(n) if q not in qubits]
    full = np.kron(op, np.eye(2 ** (n - k)))
    order = qubits + rest
    perm = [order.index(q) for q in range(n)]
    full = full.reshape((2,) * (2 * n)).transpose(perm + [p + n for p in perm])
    return full.reshape(2**n, 2**n)


def tensor(a, b) -> DensityMatrix:
    """Kronecker product; Alice's qubits of both factors form the new cut."""
    a, b = as_density(a), as_density(b)
    n = a.n_qubits + b.n_qubits
    if n > MAX_QUBITS:
        raise InvalidStateError(f"tensor product would have {n} qubits (max {MAX_QUBITS})")
    cut = a.cut + tuple(q + a.n_qubits for q in b.cut)
    return DensityMatrix(np.kron(a.data, b.data), cut)


def tensor_pure(a: PureState, b: PureState) -> PureState:
    n = a.n_qubits + b.n_qubits
    if n > MAX_QUBITS:
        raise InvalidStateError(f"tensor product would have {n} qubits (max {MAX_QUBITS})")
    cut = a.cut + tuple(q + a.n_qubits for q in b.cut)
    return PureState(np.kron(a.amplitudes, b.amplitudes), cut)


def _reduce(rho: np.ndarray, keep: Sequence[int], n: int) -> np.ndarray:
    traced = [q for q in range(n) if q not in keep]
    t = rho.reshape((2,) * (2 * n))
    t = t.transpose(list(keep) + traced + [q + n for q in keep] + [q + n for q in traced])
    dk, dt = 2 ** len(keep), 2 ** len(traced)
    return np.einsum("ijkj->ik", t.reshape(dk, dt, dk, dt))


def partial_trace(rho, keep) -> DensityMatrix:
    """Reduced state on the qubits in ``keep``; all others are traced out."""
    rho = as_density(rho)
    keep = sorted(set(int(q) for q in keep))
    if not keep:
        raise ValueError("keep must name at least one qubit")
    if keep[0] < 0 or keep[-1] >= rho.n_qubits:
        raise ValueError(f"keep {keep} is not a subset of qubits 0..{rho.n_qubits - 1}")
    red = _reduce(rho.data, keep, rho.n_qubits)
    cut = tuple(i for i, q in enumerate(keep) if q in rho.cut)
    return DensityMatrix(red, cut or None)


def side_qubits(state, side: str) -> tuple[int, ...]:
    if side == "alice":
        return state.cut
    return tuple(q for q in range(state.n_qubits) if q not in state.cut)


class Branch(NamedTuple):
    """One outcome of a local operation.

    ``state`` is ``None`` when the probability is below ``ZERO_PROB``; such a
    branch is dropped from any ensemble average.
    """

    index: int
    probability: float
    state: DensityMatrix | None


def apply_local(rho, op: LocalOperator) -> list[Branch]:
    rho = as_density(rho)
    qubits = side_qubits(rho, op.side)
    if 2 ** len(qubits) != op.elements[0].shape[0]:
        raise ValueError(f"operation acts on {op.elements[0].shape[0]}-dim space, "
                         f"{op.side} holds {len(qubits)} qubit(s)")
    out = []
    for i, m in enumerate(op.elements):
        full = embed(m, qubits, rho.n_qubits)
        new = full @ rho.data @ full.conj().T
        p = float(np.trace(new).real)
        if p < ZERO_PROB:
            out.append(Branch(i, max(p, 0.0), None))
            continue
        new = new / p
        out.append(Branch(i, p, DensityMatrix(0.5 * (new + new.conj().T), rho.cut)))
    return out


def bell_coefficients(rho) -> BellCoefficients:
    rho = as_density(rho)
    if rho.n_qubits != 2:
        raise ValueError("Bell coefficients are defined for two-qubit states")
    diag = np.real(np.einsum("ia,ij,ja->a", BELL_MATRIX.conj(), rho.data, BELL_MATRIX))
    return BellCoefficients(*np.clip(diag, 0.0, None))


def entropy_of_spectrum(lam) -> float:
    """-sum p ln p in nats, with 0 ln 0 = 0 and tiny negatives clipped."""
    lam = np.clip(np.real(np.asarray(lam, dtype=float)), 0.0, None)
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log(lam))) + 0.0 if lam.size else 0.0  # no -0.0


def von_neumann_entropy(rho) -> float:
    """Nonnegative von Neumann entropy ``-tr rho ln rho`` in nats."""
    rho = as_density(rho)
    return max(entropy_of_spectrum(np.linalg.eigvalsh(rho.data)), 0.0)


def _canonical_phase(v: np.ndarray) -> np.ndarray:
    """Rotate ``v`` so its first non-negligible component is real positive."""
    idx = np.flatnonzero(np.abs(v) > 1e-12)
    if idx.size == 0:
        return v
    c = v[idx[0]]
    return v * (abs(c) / c)


class Schmidt(NamedTuple):
    a: float
    b: float
    alice_basis: np.ndarray  # columns |e_0>, |e_1>
    bob_basis: np.ndarray    # columns |f_0>, |f_1>


def schmidt(psi) -> Schmidt:
    """Schmidt form ``a|e0 f0> + b|e1 f1>`` of a two-qubit pure state, ``a >= b``.

    Columns of each basis are fixed up to the SVD by requiring the first
    nonzero component of every Alice vector to be real positive.
    """
    psi = as_pure(psi)
    if psi.n_qubits != 2:
        raise ValueError("schmidt expects a two-qubit pure state")
    m = psi.amplitudes.reshape(2, 2)
    if psi.cut == (1,):
        m = m.T
    u, s, vh = np.linalg.svd(m)
    e = np.empty((2, 2), dtype=complex)
    f = np.empty((2, 2), dtype=complex)
    for k in range(2):
        e[:, k] = _canonical_phase(u[:, k])
        # the phase taken out of |e_k> goes into |f_k>
        phase = e[:, k] @ u[:, k].conj()
        f[:, k] = vh[k] * phase.conj()
    a, b = float(s[0]), float(s[1])
    norm = np.hypot(a, b)
    return Schmidt(a / norm, b / norm, e, f)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_pure_state(n_qubits: int, rng: np.random.Generator, cut=None) -> PureState:
    d = 2**n_qubits
    return PureState.normalized(rng.standard_normal(d) + 1j * rng.standard_normal(d), cut)


def random_density_matrix(n_qubits: int, rng: np.random.Generator, rank: int | None = None,
                          cut=None) -> DensityMatrix:
    """Hilbert-Schmidt random state (Ginibre of the given rank)."""
    d = 2**n_qubits
    g = rng.standard_normal((d, rank or d)) + 1j * rng.standard_normal((d, rank or d))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real, cut)


def random_local_unitary(rng: np.random.Generator) -> np.ndarray:
    return np.kron(random_unitary(2, rng), random_unitary(2, rng))


def partial_transpose(rho, qubit: int = 1) -> np.ndarray:
    """Transpose of the given qubit's indices for a two-qubit matrix."""
    t = np.asarray(as_density(rho).data).reshape(2, 2, 2, 2)
    t = t.transpose(2, 1, 0, 3) if qubit == 0 else t.transpose(0, 3, 2, 1)
    return t.reshape(4, 4)
