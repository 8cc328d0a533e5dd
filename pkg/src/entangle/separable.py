"""Separable two-qubit states and relative-entropy minimization over them.

A candidate closest separable state is a mixture of ``K`` product pure
states, each factor given by Bloch angles ``(theta, phi)``.  The minimizer
alternates an exponentiated-gradient step on the mixture weights with a
gradient step on the angles, both with backtracking.  All restarts run as
one batch; after a short probe phase only the best few keep iterating, and
those are finally polished jointly in all parameters by L-BFGS.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from scipy.optimize import minimize
from scipy.special import softmax

from .core import DensityMatrix, as_density, partial_trace

_FLOOR = 1e-16  # eigenvalue floor inside the optimizer only


@dataclass(frozen=True, eq=False)
class SeparableMixture:
    """``sum_k w_k |a_k><a_k| (x) |b_k><b_k|``."""

    weights: np.ndarray
    alice: np.ndarray  # (K, 2) unit vectors
    bob: np.ndarray    # (K, 2) unit vectors

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        a = np.asarray(self.alice, dtype=complex).reshape(-1, 2)
        b = np.asarray(self.bob, dtype=complex).reshape(-1, 2)
        if not (len(w) == len(a) == len(b)):
            raise ValueError("weights and factor lists differ in length")
        if np.any(w < -1e-12) or abs(w.sum() - 1.0) > 1e-10:
            raise ValueError("weights must be a probability vector")
        a = a / np.linalg.norm(a, axis=1, keepdims=True)
        b = b / np.linalg.norm(b, axis=1, keepdims=True)
        object.__setattr__(self, "weights", np.clip(w, 0.0, None))
        object.__setattr__(self, "alice", a)
        object.__setattr__(self, "bob", b)

    @property
    def product_factors(self):
        return list(zip(self.alice, self.bob))

    def matrix(self) -> np.ndarray:
        x = (self.alice[:, :, None] * self.bob[:, None, :]).reshape(-1, 4)
        return (x.T * self.weights) @ x.conj()

    def density(self) -> DensityMatrix:
        m = self.matrix()
        return DensityMatrix(0.5 * (m + m.conj().T) / np.trace(m).real)

    @classmethod
    def random(cls, rng: np.random.Generator, n_terms: int = 4) -> "SeparableMixture":
        def unit(k):
            v = rng.standard_normal((k, 2)) + 1j * rng.standard_normal((k, 2))
            return v / np.linalg.norm(v, axis=1, keepdims=True)

        return cls(rng.dirichlet(np.ones(n_terms)), unit(n_terms), unit(n_terms))


@dataclass(frozen=True)
class RelEntOptions:
    """Budget and stopping rule for :func:`minimize_relative_entropy`.

    A restart has converged once its objective improved by no more than
    ``rel_tol * |f| + abs_tol`` over the last ``window`` iterations, or
    once ``f <= zero_tol``: the minimum is nonnegative, so such a point is
    already certified to within ``zero_tol``.  The surviving restarts are
    then refined by L-BFGS for up to ``polish_iter`` iterations; its own
    convergence test also counts as converged.
    """

    n_products: int = 32
    restarts: int = 8
    max_iter: int = 600
    probe_iter: int = 150
    keep: int = 2
    rel_tol: float = 1e-8
    abs_tol: float = 1e-14
    zero_tol: float = 1e-10
    window: int = 50
    polish_iter: int = 3000
    seed: int = 0

    @classmethod
    def reduced(cls, seed: int = 0) -> "RelEntOptions":
        return cls(n_products=16, restarts=2, max_iter=100, probe_iter=100, keep=1, seed=seed)

    @classmethod
    def high(cls, seed: int = 0) -> "RelEntOptions":
        return cls(restarts=50, max_iter=6000, probe_iter=200, keep=4, seed=seed)


@dataclass
class MinimizerResult:
    value: float
    closest: SeparableMixture
    converged: bool
    iterations: int
    improvement: float
    restarts: int
    history: list = field(default_factory=list, repr=False)


def _bloch(v: np.ndarray) -> np.ndarray:
    """Angles (theta, phi) of unit vectors ``v`` of shape (..., 2)."""
    theta = 2 * np.arctan2(np.abs(v[..., 1]), np.abs(v[..., 0]))
    phi = np.angle(v[..., 1]) - np.angle(v[..., 0])
    return np.stack([theta, phi], axis=-1)


def _spinor(theta, phi):
    return np.stack([np.cos(theta / 2) + 0j, np.exp(1j * phi) * np.sin(theta / 2)], axis=-1)


def _products(ang):
    a = _spinor(ang[..., 0], ang[..., 1])
    b = _spinor(ang[..., 2], ang[..., 3])
    x = (a[..., :, None] * b[..., None, :]).reshape(*ang.shape[:-1], 4)
    return a, b, x


class _Objective:
    """Batched ``f(w, x) = tr(s ln s) - tr(s ln rho)`` and its gradients."""

    def __init__(self, sigma: np.ndarray):
        self.sigma = sigma
        lam = np.linalg.eigvalsh(sigma)
        lam = lam[lam > 0]
        self.neg_entropy = float(np.sum(lam * np.log(lam)))

    def __call__(self, w, x):
        rho = (x.transpose(0, 2, 1) * w[:, None, :]) @ x.conj()
        lam, u = np.linalg.eigh(rho)
        lam = np.maximum(lam, _FLOOR)
        ln = np.log(lam)
        s = u.conj().transpose(0, 2, 1) @ self.sigma @ u
        f = self.neg_entropy - np.einsum("rii,ri->r", s, ln).real
        return f, (lam, u, ln, s)

    @staticmethod
    def gradient_matrix(cache):
        """``G`` with ``df = -tr(G drho)``: the derivative of ``tr(s ln rho)``."""
        lam, u, ln, s = cache
        d = lam[:, :, None] - lam[:, None, :]
        top = np.maximum(lam[:, :, None], lam[:, None, :])
        close = np.abs(d) <= 1e-10 * top
        with np.errstate(divide="ignore", invalid="ignore"):
            div = np.where(close, 1.0 / top, (ln[:, :, None] - ln[:, None, :]) / np.where(close, 1.0, d))
        return u @ (div * s) @ u.conj().transpose(0, 2, 1)


def _weight_gradient(x, g_mat):
    gx = x @ g_mat.transpose(0, 2, 1)  # rows are G x_k
    return -np.einsum("rki,rki->rk", x.conj(), gx).real, gx


def _angle_gradient(ang, w, gx):
    ta, pa, tb, pb = (ang[..., i] for i in range(4))
    a = _spinor(ta, pa)
    b = _spinor(tb, pb)
    zero = np.zeros_like(ta)
    da_t = np.stack([-np.sin(ta / 2) / 2 + 0j, np.exp(1j * pa) * np.cos(ta / 2) / 2], -1)
    da_p = np.stack([zero + 0j, 1j * np.exp(1j * pa) * np.sin(ta / 2)], -1)
    db_t = np.stack([-np.sin(tb / 2) / 2 + 0j, np.exp(1j * pb) * np.cos(tb / 2) / 2], -1)
    db_p = np.stack([zero + 0j, 1j * np.exp(1j * pb) * np.sin(tb / 2)], -1)

    def kron(u, v):
        return (u[..., :, None] * v[..., None, :]).reshape(*u.shape[:-1], 4)

    grads = [kron(da_t, b), kron(da_p, b), kron(a, db_t), kron(a, db_p)]
    return np.stack([-2 * w * np.einsum("rki,rki->rk", gx.conj(), dx).real for dx in grads], -1)


def _random_angles(rng, shape):
    theta = np.arccos(1 - 2 * rng.random(shape))
    phi = 2 * np.pi * rng.random(shape)
    return theta, phi


def _seed_products(sigma: np.ndarray):
    """Two structured starting mixtures.

    The first is ``sigma_A (x) sigma_B`` in the eigenbases of the marginals.
    The second dephases the leading eigenvector of ``sigma`` in its Schmidt
    basis, which is already optimal for pure inputs.
    """
    rho = DensityMatrix(sigma)
    pa, va = np.linalg.eigh(partial_trace(rho, [0]).data)
    pb, vb = np.linalg.eigh(partial_trace(rho, [1]).data)
    seeds = []
    w = np.clip(np.outer(pa, pb).ravel(), 0.0, None)
    alice = np.repeat(va.T, 2, axis=0)
    bob = np.tile(vb.T, (2, 1))
    seeds.append((w, alice, bob))

    lam, vecs = np.linalg.eigh(sigma)
    u, s, vh = np.linalg.svd(vecs[:, -1].reshape(2, 2))
    seeds.append((s**2, u.T, vh))
    return seeds


def _initial_batch(sigma, opts: RelEntOptions, rng):
    k = opts.n_products
    seeds = _seed_products(sigma)
    r = opts.restarts + len(seeds)
    ta, pa = _random_angles(rng, (r, k))
    tb, pb = _random_angles(rng, (r, k))
    ang = np.stack([ta, pa, tb, pb], -1)
    w = np.full((r, k), 1.0 / k)
    eps = 1e-4
    for i, (sw, sa, sb) in enumerate(seeds):
        m = len(sw)
        ang[i, :m, 0:2] = _bloch(sa)
        ang[i, :m, 2:4] = _bloch(sb)
        w[i, :m] = (1 - eps) * sw / sw.sum()
        w[i, m:] = eps / (k - m)
    return ang, w


def _polish(obj: _Objective, w, ang, max_iter: int):
    """Joint L-BFGS over softmax logits and angles of one mixture."""
    k = len(w)

    def fg(p):
        ww = softmax(p[:k])[None]
        an = p[k:].reshape(1, k, 4)
        _, _, x = _products(an)
        f, cache = obj(ww, x)
        gw, gx = _weight_gradient(x, obj.gradient_matrix(cache))
        ga = _angle_gradient(an, ww, gx)
        gz = ww[0] * (gw[0] - ww[0] @ gw[0])
        return f[0], np.concatenate([gz, ga[0].ravel()])

    p0 = np.concatenate([np.log(np.maximum(w, 1e-300)), ang.ravel()])
    res = minimize(fg, p0, jac=True, method="L-BFGS-B",
                   options={"maxiter": max_iter, "ftol": 1e-13, "gtol": 1e-10, "maxcor": 20})
    return softmax(res.x[:k]), res.x[k:].reshape(k, 4), float(res.fun), bool(res.success), int(res.nit)


def minimize_relative_entropy(sigma, opts: RelEntOptions | None = None) -> MinimizerResult:
    """Minimize ``S(sigma || rho)`` over mixtures of product states.

    The returned value is the exact relative entropy of the returned mixture,
    so it is always an upper bound on the true minimum.
    """
    from .measures import relative_entropy

    opts = opts or RelEntOptions()
    sigma = as_density(sigma)
    if sigma.n_qubits != 2:
        raise ValueError("the separable minimizer handles two-qubit states")
    rng = np.random.default_rng(opts.seed)
    obj = _Objective(np.asarray(sigma.data))
    ang, w = _initial_batch(sigma.data, opts, rng)
    n_restarts = len(w)
    _, _, x = _products(ang)
    f, cache = obj(w, x)

    eta = np.ones(n_restarts)
    step = np.full(n_restarts, 0.1)
    hist = [f.copy()]
    active = np.ones(n_restarts, dtype=bool)
    done_at = np.full(n_restarts, -1)

    for it in range(1, opts.max_iter + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        fa, xa, wa, anga = f[idx], x[idx], w[idx], ang[idx]
        cache_a = tuple(c[idx] for c in cache)

        # exponentiated-gradient step on the weights
        g, _ = _weight_gradient(xa, obj.gradient_matrix(cache_a))
        g = g - g.min(axis=1, keepdims=True)
        pending = np.ones(idx.size, dtype=bool)
        eta_a = eta[idx]
        for _ in range(60):
            wn = wa * np.exp(-np.minimum(eta_a[:, None] * g, 700.0))
            wn /= wn.sum(axis=1, keepdims=True)
            fn, cn = obj(wn, xa)
            ok = pending & (fn <= fa)
            wa[ok], fa[ok] = wn[ok], fn[ok]
            cache_a = tuple(np.where(ok.reshape((-1,) + (1,) * (c.ndim - 1)), cn_, c)
                            for c, cn_ in zip(cache_a, cn))
            eta_a[ok] *= 1.5
            pending &= ~ok
            if not pending.any():
                break
            eta_a[pending] *= 0.5
            pending &= eta_a > 1e-14
        eta_a = np.clip(eta_a, 1e-14, 1e6)

        # backtracking gradient step on the Bloch angles
        _, gx = _weight_gradient(xa, obj.gradient_matrix(cache_a))
        ga = _angle_gradient(anga, wa, gx)
        gn = np.einsum("rkj,rkj->r", ga, ga)
        pending = gn > 0
        step_a = step[idx]
        for _ in range(60):
            an = anga - step_a[:, None, None] * ga
            _, _, xn = _products(an)
            fn, cn = obj(wa, xn)
            ok = pending & (fn <= fa - 1e-4 * step_a * gn)
            anga[ok], xa[ok], fa[ok] = an[ok], xn[ok], fn[ok]
            cache_a = tuple(np.where(ok.reshape((-1,) + (1,) * (c.ndim - 1)), cn_, c)
                            for c, cn_ in zip(cache_a, cn))
            step_a[ok] *= 1.5
            pending &= ~ok
            if not pending.any():
                break
            step_a[pending] *= 0.5
            pending &= step_a > 1e-14
        step_a = np.clip(step_a, 1e-14, 1e3)

        f[idx], w[idx], x[idx], ang[idx] = fa, wa, xa, anga
        eta[idx], step[idx] = eta_a, step_a
        cache = tuple(c.copy() for c in cache)
        for c, ca in zip(cache, cache_a):
            c[idx] = ca
        hist.append(f.copy())

        certified = f <= opts.zero_tol
        if certified.any():
            done_at[active & certified] = it
            break
        if it >= opts.window:
            old = hist[-1 - opts.window]
            stalled = (old - f) <= opts.rel_tol * np.abs(f) + opts.abs_tol
            newly = active & stalled
            done_at[newly] = it
            active &= ~stalled
        if it == opts.probe_iter:
            order = np.argsort(f)
            pruned = np.ones(n_restarts, dtype=bool)
            pruned[order[: opts.keep]] = False
            active &= ~pruned

    hist = np.array(hist)
    last = len(hist) - 1
    iters = np.where(done_at > 0, done_at, last)
    improvement = hist[np.maximum(iters - opts.window, 0), np.arange(n_restarts)] - f
    converged = done_at > 0
    if opts.polish_iter > 0 and not np.any(f <= opts.zero_tol):
        for r in np.argsort(f)[: opts.keep]:
            wr, ar, fr, ok, nit = _polish(obj, w[r], ang[r], opts.polish_iter)
            if fr <= f[r]:
                improvement[r] = f[r] - fr
                w[r], ang[r], f[r] = wr, ar, fr
            converged[r] |= ok
            iters[r] += nit

    best = int(np.argmin(f))
    a = _spinor(ang[best, :, 0], ang[best, :, 1])
    b = _spinor(ang[best, :, 2], ang[best, :, 3])
    wb = w[best] / w[best].sum()
    mixture = SeparableMixture(wb, a, b)
    value = relative_entropy(sigma, mixture.density())
    return MinimizerResult(
        value=float(value),
        closest=mixture,
        converged=bool(converged[best]),
        iterations=int(iters[best]),
        improvement=float(improvement[best]),
        restarts=n_restarts,
        history=list(hist[: last + 1, best]),
    )
