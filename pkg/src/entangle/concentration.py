"""Entanglement concentration for ``n`` copies of ``a|00> + b|11>``.

Alice projects onto the subspace with ``k`` of her qubits in ``|1>``; the
outcome has binomial statistics and leaves a maximally entangled state of
Schmidt rank ``C(n, k)``, credited as ``ln C(n, k)`` nats.  All sums run in
the log domain so ``n`` can reach 10^6.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln, logsumexp

from .core import LN2, entropy_of_spectrum


def _check_a2(a2, closed=False):
    ok = 0.0 <= a2 <= 1.0 if closed else 0.0 < a2 < 1.0
    if not ok:
        raise ValueError(f"a2 must lie in {'[0, 1]' if closed else '(0, 1)'}, got {a2!r}")


def log_binomial(n: int, k):
    k = np.minimum(np.asarray(k), n - np.asarray(k))
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def projection_probability(a2: float, n: int, k: int) -> float:
    """Probability ``C(n,k) a2^(n-k) (1-a2)^k`` of projecting onto ``k`` excitations."""
    _check_a2(a2)
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in [0, {n}], got {k}")
    if n <= 60:
        return math.comb(n, k) * a2 ** (n - k) * (1 - a2) ** k
    return float(np.exp(log_binomial(n, k) + (n - k) * np.log(a2) + k * np.log1p(-a2)))


def _log_probabilities(a2: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    k = np.arange(n + 1)
    lb = log_binomial(n, k)
    logp = lb + (n - k) * np.log(a2) + k * np.log1p(-a2)
    # log-gamma rounding at large n shifts every term alike; renormalize it away
    return logp - logsumexp(logp), lb


def projection_probabilities(a2: float, n: int) -> np.ndarray:
    _check_a2(a2)
    logp, _ = _log_probabilities(a2, n)
    return np.exp(logp)


def expected_entanglement(a2: float, n: int) -> float:
    """Expected concentrated entanglement in nats, ``sum_k p_k ln C(n, k)``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    _check_a2(a2, closed=True)
    if a2 in (0.0, 1.0):
        return 0.0
    logp, lb = _log_probabilities(a2, n)
    terms = np.exp(logp) * lb
    return float(math.fsum(np.sort(terms)))


def asymptotic_rate(a2: float) -> float:
    """Entropy ``-a2 ln a2 - b2 ln b2`` of either reduced state, in nats."""
    _check_a2(a2, closed=True)
    return entropy_of_spectrum([a2, 1.0 - a2])


def singlets(nats: float) -> float:
    return nats / LN2


class ConvergenceRow(NamedTuple):
    n: int
    rate: float
    ratio: float


class ConcentrationReport(NamedTuple):
    n: int
    a2: float
    probabilities: np.ndarray
    expected_entanglement: float
    rate: float
    asymptotic_rate: float


def report(a2: float, n: int) -> ConcentrationReport:
    e = expected_entanglement(a2, n)
    return ConcentrationReport(n, a2, projection_probabilities(a2, n), e, e / n, asymptotic_rate(a2))


def convergence_table(a2: float, ns) -> list[ConvergenceRow]:
    """Per-pair yield and its ratio to the entropy for each ``n`` in ``ns``.

    Raises ``ValueError`` if ``ns`` is empty or not strictly ascending.  The
    ratio column is not assumed monotone; use :func:`is_monotone` to check it.
    """
    ns = [int(n) for n in ns]
    if not ns or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("ns must be a nonempty ascending sequence")
    s = asymptotic_rate(a2)
    rows = []
    for n in ns:
        rate = expected_entanglement(a2, n) / n
        rows.append(ConvergenceRow(n, rate, rate / s if s > 0 else 0.0))
    return rows


def is_monotone(rows) -> bool:
    return all(b.ratio >= a.ratio for a, b in zip(rows, rows[1:]))
