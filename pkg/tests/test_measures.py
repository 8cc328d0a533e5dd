import math

import numpy as np
import pytest
from scipy.linalg import expm
from scipy.optimize import minimize

from entangle.core import (
    LN2,
    PHI_PLUS,
    PSI_MINUS,
    BellCoefficients,
    CheckFailed,
    DensityMatrix,
    PureState,
    ket,
    random_density_matrix,
    random_local_unitary,
    random_pure_state,
)
from entangle.measures import (
    MeasureValue,
    concurrence,
    entanglement_of_formation,
    entropy_of_entanglement,
    formation_from_concurrence,
    is_separable,
    point_options,
    ppt_witness,
    relative_entropy,
    relative_entropy_of_entanglement,
    werner,
    werner_relative_entropy_exact,
    werner_sweep,
)
from entangle.separable import RelEntOptions, SeparableMixture


def bell_diagonal_ree(c):
    """Known closed form for Bell-diagonal states: depends only on the largest weight."""
    f = max(c)
    return 0.0 if f <= 0.5 else LN2 + f * math.log(f) + (1 - f) * math.log(1 - f)


def pure_entropy(amps):
    s = np.linalg.svd(np.asarray(amps).reshape(2, 2), compute_uv=False) ** 2
    s = s[s > 0]
    return float(-np.sum(s * np.log(s)))


def decomposition_average(w, h_params):
    """Average pure-state entropy of the decomposition rho = sum |(W V)_i><(W V)_i|."""
    h = np.zeros((4, 4), dtype=complex)
    iu = np.triu_indices(4, 1)
    h[np.diag_indices(4)] = h_params[:4]
    h[iu] = h_params[4:10] + 1j * h_params[10:16]
    h = h + np.triu(h, 1).conj().T
    vecs = w @ expm(1j * h)
    total = 0.0
    for k in range(4):
        p = np.vdot(vecs[:, k], vecs[:, k]).real
        if p > 1e-15:
            total += p * pure_entropy(vecs[:, k] / math.sqrt(p))
    return total


class TestMeasureValue:
    def test_units(self):
        v = MeasureValue(LN2, "entropy")
        assert v.ebits == pytest.approx(1)
        assert v.to("ebits").value == pytest.approx(1)
        assert v.to("ebits").nats == pytest.approx(LN2)
        assert float(v) == LN2
        with pytest.raises(ValueError):
            v.to("bits")


class TestWerner:
    def test_endpoints(self):
        assert np.allclose(werner(1.0).data, PSI_MINUS.density().data, atol=1e-15)
        assert np.allclose(werner(0.25).data, np.eye(4) / 4, atol=1e-15)

    def test_out_of_range(self):
        for f in (0.2, 1.01):
            with pytest.raises(ValueError):
                werner(f)


class TestEntropyOfEntanglement:
    def test_values(self):
        assert entropy_of_entanglement(PHI_PLUS).value == pytest.approx(LN2, abs=1e-14)
        assert entropy_of_entanglement(ket("00")).value == pytest.approx(0, abs=1e-14)
        psi = PureState([math.sqrt(0.3), 0, 0, math.sqrt(0.7)])
        assert entropy_of_entanglement(psi).value == pytest.approx(0.610864302054894, abs=1e-14)

    def test_sides_agree(self, rng):
        for _ in range(20):
            assert entropy_of_entanglement(random_pure_state(2, rng)).diagnostics["side_gap"] < 1e-12

    def test_rejects_mixed(self, rng):
        with pytest.raises(ValueError):
            entropy_of_entanglement(random_density_matrix(2, rng))


class TestFormation:
    def test_werner_values(self):
        assert entanglement_of_formation(werner(1.0)).value == pytest.approx(LN2, abs=1e-12)
        # concurrence 2F - 1 = 0.6
        assert concurrence(werner(0.8)) == pytest.approx(0.6, abs=1e-12)
        x = (1 + math.sqrt(1 - 0.36)) / 2
        expected = -x * math.log(x) - (1 - x) * math.log(1 - x)
        assert entanglement_of_formation(werner(0.8)).value == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.325083, abs=1e-6)

    def test_separable_zero(self, rng):
        for _ in range(50):
            mix = SeparableMixture.random(rng, int(rng.integers(1, 6)))
            assert entanglement_of_formation(mix.density()).value <= 1e-10

    def test_pure_agreement(self, rng):
        for _ in range(100):
            psi = random_pure_state(2, rng)
            assert entanglement_of_formation(psi).value == pytest.approx(
                entropy_of_entanglement(psi).value, abs=1e-10)

    def test_never_above_decompositions(self, rng):
        # every decomposition gives an upper bound on E_F
        for _ in range(3):
            rho = random_density_matrix(2, rng)
            ef = entanglement_of_formation(rho).value
            lam, v = np.linalg.eigh(rho.data)
            w = v * np.sqrt(np.clip(lam, 0, None))
            starts = rng.normal(size=(200, 16))
            vals = [decomposition_average(w, s) for s in starts]
            assert min(vals) >= ef - 1e-6
            res = minimize(lambda s: decomposition_average(w, s), starts[int(np.argmin(vals))],
                           method="Powell", options={"maxiter": 20000, "xtol": 1e-8, "ftol": 1e-12})
            assert res.fun >= ef - 1e-6
            assert res.fun <= ef + 5e-2  # the search gets close from above

    def test_bounds(self, rng):
        for _ in range(100):
            v = entanglement_of_formation(random_density_matrix(2, rng)).value
            assert -1e-9 <= v <= LN2 + 1e-9

    def test_formation_curve(self):
        assert formation_from_concurrence(0) == 0
        assert formation_from_concurrence(1) == pytest.approx(LN2)


class TestRelativeEntropy:
    def test_self(self, rng):
        rho = random_density_matrix(2, rng)
        assert relative_entropy(rho, rho) == pytest.approx(0, abs=1e-12)

    def test_pure_against_mixed(self):
        assert relative_entropy(ket("0").density(), DensityMatrix(np.eye(2) / 2)) == pytest.approx(LN2)

    def test_werner_against_maximally_mixed(self):
        lam = np.array([0.8, 0.2 / 3, 0.2 / 3, 0.2 / 3])
        expected = float(np.sum(lam * np.log(lam)) + math.log(4))
        got = relative_entropy(werner(0.8), DensityMatrix(np.eye(4) / 4))
        assert got == pytest.approx(expected, abs=1e-12)

    def test_support_violation_is_infinite(self):
        assert relative_entropy(ket("1").density(), ket("0").density()) == math.inf

    def test_nonnegative_and_faithful(self, rng):
        for _ in range(100):
            a, b = random_density_matrix(2, rng), random_density_matrix(2, rng)
            assert relative_entropy(a, b) > 1e-10
            assert relative_entropy(a, a) <= 1e-10

    def test_not_symmetric(self, rng):
        a, b = random_density_matrix(2, rng), random_density_matrix(2, rng)
        assert relative_entropy(a, b) != pytest.approx(relative_entropy(b, a), abs=1e-6)


class TestRelativeEntropyOfEntanglement:
    def test_singlet(self):
        v, _ = relative_entropy_of_entanglement(PSI_MINUS)
        assert v.value == pytest.approx(LN2, abs=1e-3)
        assert v.method == "relative-entropy"

    def test_werner_point(self):
        v, closest = relative_entropy_of_entanglement(werner(0.8))
        assert v.value == pytest.approx(0.192745, abs=2e-3)
        assert v.value == pytest.approx(werner_relative_entropy_exact(0.8), abs=1e-8)
        high, _ = relative_entropy_of_entanglement(werner(0.8), RelEntOptions.high())
        assert v.value == pytest.approx(high.value, abs=2e-3)
        assert v.value >= high.value - 2e-3
        # the reported value is the divergence to the returned feasible state
        assert relative_entropy(werner(0.8), closest.density()) == pytest.approx(v.value, abs=1e-12)

    def test_diagnostics(self):
        v, _ = relative_entropy_of_entanglement(werner(0.9))
        assert set(v.diagnostics) >= {"converged", "iterations", "improvement", "restarts"}
        assert v.diagnostics["converged"]

    def test_budget_exhaustion_is_flagged(self):
        opts = RelEntOptions(restarts=1, max_iter=5, probe_iter=5, polish_iter=0)
        v, _ = relative_entropy_of_entanglement(werner(0.8), opts)
        assert not v.diagnostics["converged"]
        assert v.value >= werner_relative_entropy_exact(0.8) - 1e-9

    def test_bell_diagonal_closed_form(self, rng):
        for _ in range(8):
            c = rng.dirichlet(np.full(4, 0.7))
            u = random_local_unitary(rng)
            rho = DensityMatrix(u @ BellCoefficients(*c).density().data @ u.conj().T)
            v, _ = relative_entropy_of_entanglement(rho)
            assert v.value == pytest.approx(bell_diagonal_ree(c), abs=1e-6)
            assert v.value >= bell_diagonal_ree(c) - 1e-9

    def test_deterministic(self, rng):
        rho = random_density_matrix(2, rng)
        a, _ = relative_entropy_of_entanglement(rho, RelEntOptions(seed=4))
        b, _ = relative_entropy_of_entanglement(rho, RelEntOptions(seed=4))
        assert a.value == b.value

    def test_rejects_three_qubits(self, rng):
        with pytest.raises(ValueError):
            relative_entropy_of_entanglement(random_density_matrix(3, rng))

    @pytest.mark.slow
    def test_condition_one(self, rng):
        for _ in range(200):
            rho = SeparableMixture.random(rng, int(rng.integers(1, 6))).density()
            v, _ = relative_entropy_of_entanglement(rho)
            assert v.value <= 1e-6
            assert entanglement_of_formation(rho).value <= 1e-6
            assert is_separable(rho)[0]

    @pytest.mark.slow
    def test_condition_two(self, rng):
        for _ in range(200):
            rho = random_density_matrix(2, rng, rank=int(rng.integers(1, 5)))
            u = random_local_unitary(rng)
            moved = DensityMatrix(u @ rho.data @ u.conj().T)
            ef = entanglement_of_formation
            assert abs(ef(moved).value - ef(rho).value) <= 1e-6
            seed = int(rng.integers(2**31))
            a, _ = relative_entropy_of_entanglement(rho, RelEntOptions.reduced(seed))
            b, _ = relative_entropy_of_entanglement(moved, RelEntOptions.reduced(seed))
            assert abs(a.value - b.value) <= 5e-3

    @pytest.mark.slow
    def test_pure_state_consensus(self, rng):
        for _ in range(100):
            psi = random_pure_state(2, rng)
            e = entropy_of_entanglement(psi).value
            assert entanglement_of_formation(psi).value == pytest.approx(e, abs=1e-10)
            v, _ = relative_entropy_of_entanglement(psi)
            assert v.value == pytest.approx(e, abs=1e-3)

    def test_zero_value_implies_ppt(self, rng):
        for _ in range(20):
            rho = random_density_matrix(2, rng, rank=4)
            v, _ = relative_entropy_of_entanglement(rho, RelEntOptions.reduced())
            if v.value < 1e-6:
                assert ppt_witness(rho) >= -1e-10


class TestSeparability:
    def test_maximally_mixed(self):
        ok, w = is_separable(DensityMatrix(np.eye(4) / 4))
        assert ok and w == pytest.approx(0.25)

    def test_bell(self):
        ok, w = is_separable(PHI_PLUS)
        assert not ok and w == pytest.approx(-0.5)

    def test_werner_threshold_by_bisection(self):
        lo, hi = 0.25, 1.0
        for _ in range(60):
            mid = (lo + hi) / 2
            lo, hi = (mid, hi) if is_separable(werner(mid))[0] else (lo, mid)
        assert lo == pytest.approx(0.5, abs=1e-9)

    def test_random_separable(self, rng):
        for _ in range(100):
            assert is_separable(SeparableMixture.random(rng, 3).density())[0]

    def test_rejects_three_qubits(self, rng):
        with pytest.raises(ValueError):
            is_separable(random_density_matrix(3, rng))


class TestSweep:
    def test_small_grid(self):
        rows = werner_sweep([0.3, 0.5, 0.8, 1.0])
        by_f = {r.F: r for r in rows}
        assert by_f[0.3].E_F <= 2e-3 and by_f[0.3].E_RE <= 2e-3
        assert by_f[0.5].E_F <= 2e-3 and by_f[0.5].E_RE <= 2e-3
        assert by_f[0.8].E_F == pytest.approx(0.325083, abs=2e-3)
        assert by_f[0.8].E_RE == pytest.approx(0.192745, abs=2e-3)
        assert by_f[0.8].E_F - by_f[0.8].E_RE > 5e-3
        assert by_f[1.0].E_F == pytest.approx(by_f[1.0].E_RE, abs=2e-3)
        for r in rows:
            assert r.E_RE <= r.E_F + 1e-6
            assert r.fidelity == pytest.approx(r.F, abs=1e-12)

    def test_monotone_in_f(self):
        rows = werner_sweep(np.linspace(0.5, 1.0, 6))
        for a, b in zip(rows, rows[1:]):
            assert b.E_F >= a.E_F - 1e-9
            assert b.E_RE >= a.E_RE - 1e-6

    def test_out_of_range_grid(self):
        with pytest.raises(ValueError):
            werner_sweep([0.1])

    def test_check_raises_on_violation(self, monkeypatch):
        import entangle.measures as m

        def broken(F, opts=None):
            return m.WernerRow(F, 0.0, 1.0, F, 0.0, True)

        monkeypatch.setattr(m, "werner_point", broken)
        with pytest.raises(CheckFailed):
            werner_sweep([0.6])
        assert werner_sweep([0.6], check=False)[0].E_RE == 1.0

    def test_point_seeds_are_distinct_and_stable(self):
        base = RelEntOptions(seed=7)
        seeds = [point_options(base, i).seed for i in range(5)]
        assert len(set(seeds)) == 5
        assert seeds == [point_options(base, i).seed for i in range(5)]
