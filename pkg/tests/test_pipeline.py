import math
from dataclasses import replace

import numpy as np
import pytest

from dqdgain.errors import DomainError
from dqdgain.meanfield import SolverOptions
from dqdgain.pipeline import (FIG2_SMOOTHING_WIDTH, SweepSpec, fig2_bath,
                              fig2_system, gaussian_smooth, run_fig2,
                              run_gain_sweep, run_high_temperature_compare,
                              run_rate_landscape, sweep_rows, write_csv,
                              SWEEP_HEADER)
from dqdgain.rates import SystemParams, Variant, effective_kappa
from dqdgain.spectral import OhmicBath, PiezoBath


class TestSmoothing:
    def test_zero_width_is_identity(self):
        x = np.linspace(-3, 3, 21)
        y = np.sin(x)
        assert np.array_equal(gaussian_smooth(x, y, 0.0), y)

    def test_flat_curve_preserved(self):
        x = np.linspace(-5, 5, 41)
        y = np.full_like(x, 1.0)
        out = gaussian_smooth(x, y, 1.7)
        assert np.allclose(out, 1.0, atol=1e-14)

    def test_positive_in_positive_out(self):
        rng = np.random.default_rng(0)
        x = np.linspace(-5, 5, 41)
        y = rng.uniform(0.1, 2.0, size=x.size)
        out = gaussian_smooth(x, y, 0.8)
        assert np.all(out > 0.0)

    def test_kernel_fwhm(self):
        # smooth a delta spike: the result is the kernel itself, whose FWHM
        # must be sqrt(8 ln 2) w
        w = 1.3
        x = np.linspace(-12, 12, 4801)
        y = np.zeros_like(x)
        y[x.size // 2] = 1.0
        out = gaussian_smooth(x, y, w)
        half = out >= 0.5 * out.max()
        fwhm = x[half][-1] - x[half][0]
        assert fwhm == pytest.approx(math.sqrt(8 * math.log(2)) * w, rel=5e-3)

    def test_masked_points_excluded(self):
        x = np.linspace(-2, 2, 17)
        y = np.full_like(x, 2.0)
        y[5] = np.nan
        mask = np.isfinite(y)
        out = gaussian_smooth(x, y, 0.5, mask)
        assert np.allclose(out, 2.0, atol=1e-12)


class TestSweepSpec:
    def test_validation(self):
        with pytest.raises(DomainError):
            SweepSpec(count=1)
        with pytest.raises(DomainError):
            SweepSpec(eps_min=2.0, eps_max=-2.0)
        with pytest.raises(DomainError):
            SweepSpec(smoothing_width=-0.1)

    def test_edge_flag(self):
        assert SweepSpec(eps_min=-5, eps_max=5, smoothing_width=1.7).edges_clipped
        assert not SweepSpec(eps_min=-10, eps_max=10, smoothing_width=1.7).edges_clipped


class TestGainSweep:
    def test_points_near_resonance_masked(self):
        # delta_q < w_r: the sweep crosses w_q = w_r at eps = +-0.8
        p = SystemParams(epsilon_q=0.0, delta_q=0.6, g=1e-3, kappa_minus_r=0.01,
                         drive_amplitude=1e-4, drive_frequency=1.0)
        bath = OhmicBath(amplitude=1.0, temperature=0.2)
        eps = 0.8  # w_q = 1 exactly
        spec = SweepSpec(eps_min=eps - 0.002, eps_max=eps + 0.002, count=5,
                         variant=Variant.DOMINANT6, smoothing_width=0.0)
        res = run_gain_sweep(spec, p, bath)
        assert res.n_failed >= 1
        assert any("Resonance" in e for e in res.errors if e)
        assert np.isnan(res.gain_raw[~res.ok]).all()

    def test_decoupled_sweep_is_unity(self):
        p = SystemParams(epsilon_q=0.0, delta_q=3.0, g=0.0, kappa_minus_r=0.01,
                         drive_amplitude=1e-4, drive_frequency=1.0)
        bath = OhmicBath(amplitude=1.0, temperature=0.2)
        res = run_gain_sweep(SweepSpec(-5, 5, 11, Variant.FULL21, 1.0), p, bath)
        assert res.n_failed == 0
        assert np.allclose(res.gain_raw, 1.0, atol=1e-12)
        assert np.allclose(res.gain_smoothed, 1.0, atol=1e-12)

    def test_process_pool_matches_serial(self):
        p = fig2_system()
        bath = fig2_bath()
        spec = SweepSpec(-4, 4, 9, Variant.DOMINANT6, 1.7)
        serial = run_gain_sweep(spec, p, bath, jobs=1)
        parallel = run_gain_sweep(spec, p, bath, jobs=2)
        assert np.array_equal(serial.gain_raw, parallel.gain_raw)


class TestLandscape:
    def setup_method(self):
        self.p = SystemParams(epsilon_q=1.0, delta_q=1.0, g=0.01)
        self.bath = OhmicBath(amplitude=1.0, temperature=0.2)
        self.x = np.linspace(1.2, 3.0, 7)
        self.y = np.linspace(0.1 * math.pi, 0.9 * math.pi, 7)

    def test_g2_normalization_invariance(self):
        a = run_rate_landscape(self.p, self.bath, "omega_q", self.x, "theta",
                               self.y, which="kappa", p_excited=1.0)
        b = run_rate_landscape(replace(self.p, g=0.02), self.bath, "omega_q",
                               self.x, "theta", self.y, which="kappa",
                               p_excited=1.0)
        for name in a.panels:
            assert np.allclose(a.panels[name], b.panels[name], rtol=1e-12)

    def test_epsilon_delta_axes_and_resonance_curve(self):
        x = np.linspace(-1.5, 1.5, 5)
        y = np.linspace(0.4, 2.0, 5)
        r = run_rate_landscape(self.p, self.bath, "epsilon_q", x, "delta_q", y,
                               which="gamma", alpha_sq=0.0)
        assert set(r.panels) == {"gamma_down4", "gamma_up4", "gamma_phi4"}
        # resonance line delta = sqrt(w_r^2 - eps^2) exists for |eps| <= 1
        inside = np.abs(x) <= 1.0
        assert np.all(np.isfinite(r.resonance_curve[inside]))
        assert np.all(np.isnan(r.resonance_curve[~inside]))

    def test_masked_inside_guard(self):
        x = np.array([0.999999975, 1.2])
        r = run_rate_landscape(self.p, self.bath, "omega_q", x, "theta",
                               np.array([0.5 * math.pi]), which="kappa")
        assert not r.ok[0, 0] and r.ok[0, 1]
        assert math.isnan(r.panels["kappa_minus4"][0, 0])

    def test_gamma_slope_scenario(self):
        r = run_rate_landscape(self.p, self.bath, "omega_q", self.x, "theta",
                               self.y, which="gamma", alpha_slope=True)
        assert r.ok.all()
        assert np.isfinite(r.panels["gamma_phi4"]).all()

    def test_requires_coupling(self):
        with pytest.raises(DomainError):
            run_rate_landscape(SystemParams(1.0, 1.0, g=0.0), self.bath,
                               "omega_q", self.x, "theta", self.y)


class TestVariantNesting:
    def test_polaron_equals_dominant6_minus_dephasing(self):
        from dqdgain.rates import dominant_rates
        p = SystemParams(epsilon_q=2.0, delta_q=1.5, g=0.0125)
        bath = PiezoBath(weight_1d=2.9, weight_3d=0.25, temperature=7.8)
        dom = dominant_rates(p, bath)
        for pe in (0.0, 0.4, 1.0):
            k6 = effective_kappa(p, bath, pe, 1 - pe, 0.0, variant=Variant.DOMINANT6)
            kp = effective_kappa(p, bath, pe, 1 - pe, 0.0, variant=Variant.POLARON)
            assert k6[0] - kp[0] == pytest.approx(dom.phi_minus, rel=1e-12)
            assert k6[1] - kp[1] == pytest.approx(dom.phi_plus, rel=1e-12)


class TestFig2:
    def test_structure_and_thermal_curve(self):
        res = run_fig2(count=7, eps_min=-6.0, eps_max=6.0, jobs=1,
                       variants=(Variant.DOMINANT6, Variant.FULL21))
        assert set(res.sweeps) == {"dominant6", "full21"}
        for i, eps in enumerate(res.epsilon):
            wq = math.hypot(eps, 3.0)
            assert res.sigma_z_thermal[i] == pytest.approx(
                math.tanh(wq / (2 * 7.8)), rel=1e-12)
        # at eps = 0 the qubit-flip correlated rates vanish exactly
        mid = np.argmin(np.abs(res.epsilon))
        assert res.rates["down_plus"][mid] == 0.0
        assert res.rates["down_minus"][mid] == 0.0
        assert res.rates["phi_minus"][mid] > 0.0

    def test_deterministic_rows(self, tmp_path):
        spec = SweepSpec(-3, 3, 5, Variant.DOMINANT6, 1.0)
        p, bath = fig2_system(), fig2_bath()
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (out1, out2):
            res = run_gain_sweep(spec, p, bath)
            write_csv(out, ["meta"], SWEEP_HEADER, sweep_rows(res))
        assert out1.read_bytes() == out2.read_bytes()


class TestHighTemperature:
    def test_pointwise_bath_monotonicity(self):
        cold = fig2_bath(7.8)
        hot = fig2_bath(23.4)
        for w in np.linspace(0.1, 6.0, 25):
            assert hot.value(float(w)) > cold.value(float(w))

    def test_broadening(self):
        pair = run_high_temperature_compare(count=41, eps_min=-12.0, eps_max=8.0)
        lo, hi = pair.loss_edge(threshold=0.9)
        assert hi < lo
        # more loss everywhere in the negative wing
        sel = (pair.low.epsilon < -3) & pair.low.ok & pair.high.ok
        assert np.all(pair.high.gain_smoothed[sel] < pair.low.gain_smoothed[sel])
