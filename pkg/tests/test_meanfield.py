import cmath
import math
import warnings

import numpy as np
import pytest
from scipy.linalg import null_space

from dqdgain.errors import MasingInstabilityError, UndefinedGainError
from dqdgain.meanfield import (NegativeRateWarning, QubitState, ResonatorField,
                               SolverOptions, alpha_update, gain,
                               meanfield_vs_exact, qubit_steady_state,
                               solve_coupled)
from dqdgain.rates import (SystemParams, Variant, dominant_rates,
                           effective_gamma, second_order_rates)
from dqdgain.spectral import OhmicBath, PiezoBath, spike_bath


def _lead_only_oracle(p):
    """Brute-force steady state of the two lead dissipators on (g, e, empty),
    written independently of the package's operator machinery."""
    th = p.theta
    ch, sh = math.cos(th / 2), math.sin(th / 2)
    src = np.array([-sh, ch, 0.0])       # raised position state
    drn = np.array([ch, sh, 0.0])        # lowered position state
    empty = np.array([0.0, 0.0, 1.0])
    fill = np.outer(src, empty)
    drain = np.outer(empty, drn)
    h = np.diag([-p.omega_q / 2, p.omega_q / 2, 0.0])

    def diss(o):
        eye = np.eye(3)
        odo = o.conj().T @ o
        return (np.kron(eye, o) @ np.kron(o.conj(), eye)
                - 0.5 * (np.kron(eye, odo) + np.kron(odo.T, eye)))

    liou = -1j * (np.kron(np.eye(3), h) - np.kron(h.T, np.eye(3)))
    liou = liou + p.gamma_left * diss(fill) + p.gamma_right * diss(drain)
    ns = null_space(liou, rcond=1e-12)
    assert ns.shape[1] == 1
    rho = ns[:, 0].reshape(3, 3, order="F")
    rho = rho / np.trace(rho)
    return 0.5 * (rho + rho.conj().T)


class TestQubitSteadyState:
    def test_cold_undriven_ground_state(self):
        p = SystemParams(epsilon_q=1.0, delta_q=2.0, g=0.0125)
        bath = OhmicBath(amplitude=1.0, temperature=0.0)
        # dominant-six rates vanish upward at T = 0: exact ground state
        qs6 = qubit_steady_state(p, bath, options=SolverOptions(variant=Variant.DOMINANT6))
        assert qs6.p_ground == pytest.approx(1.0, abs=1e-12)
        # the full table keeps an O(g^2) virtual excitation channel open
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NegativeRateWarning)
            qs = qubit_steady_state(p, bath)
        assert qs.p_ground == pytest.approx(1.0, abs=1e-4)
        assert 0.0 <= qs.p_excited < 1e-4

    def test_lead_only_matches_independent_oracle(self):
        p = SystemParams(epsilon_q=3.0, delta_q=3.0, g=0.0,
                         gamma_left=0.3, gamma_right=0.45)
        bath = OhmicBath(amplitude=0.0, temperature=0.0)
        qs = qubit_steady_state(p, bath)
        ref = _lead_only_oracle(p)
        assert np.abs(qs.rho - ref).max() < 1e-10

    def test_inversion_for_positive_bias(self):
        p = SystemParams(epsilon_q=3.0, delta_q=3.0, g=0.0,
                         gamma_left=0.34, gamma_right=0.34)
        bath = OhmicBath(amplitude=0.0, temperature=0.0)
        qs = qubit_steady_state(p, bath)
        assert qs.p_excited > qs.p_ground
        p_neg = SystemParams(epsilon_q=-3.0, delta_q=3.0, g=0.0,
                             gamma_left=0.34, gamma_right=0.34)
        qs_neg = qubit_steady_state(p_neg, bath)
        assert qs_neg.p_excited < qs_neg.p_ground

    def test_state_is_physical(self):
        p = SystemParams(epsilon_q=1.0, delta_q=3.0, g=0.0125,
                         gamma_left=0.34, gamma_right=0.34)
        bath = PiezoBath(weight_1d=2.9, weight_3d=0.25, temperature=7.8)
        qs = qubit_steady_state(p, bath, alpha_sq=0.5)
        assert qs.is_physical()
        assert qs.p_ground + qs.p_excited + qs.p_empty == pytest.approx(1.0)

    def test_sigma_z_accessor(self):
        qs = QubitState(np.diag([0.6, 0.3, 0.1]).astype(complex))
        assert qs.sigma_z == pytest.approx(0.3)
        assert qs.p_empty == pytest.approx(0.1)


class TestAlphaUpdate:
    def test_undressed_response(self):
        p = SystemParams(epsilon_q=1.0, delta_q=3.0, g=0.0, kappa_minus_r=0.1,
                         drive_amplitude=0.05, drive_frequency=0.98)
        alpha = alpha_update(p, 0.0, p.kappa_r, 0.0)
        assert alpha == -0.05 / (2 * p.detuning - 0.1j)

    def test_resonant_modulus(self):
        p = SystemParams(epsilon_q=1.0, delta_q=3.0, g=0.0, kappa_minus_r=0.1,
                         drive_amplitude=0.05, drive_frequency=1.0)
        alpha = alpha_update(p, 0.0, 0.1, 0.0)
        assert abs(alpha) == pytest.approx(0.05 / 0.1, rel=1e-15)
        assert abs(alpha_update(p, 0.0, 0.2, 0.0)) == pytest.approx(
            0.5 * abs(alpha), rel=1e-15)

    def test_masing_instability(self):
        p = SystemParams(epsilon_q=1.0, delta_q=3.0, g=0.0,
                         drive_amplitude=0.05, drive_frequency=1.0)
        with pytest.raises(MasingInstabilityError):
            alpha_update(p, 0.0, 0.0, 0.0)
        with pytest.raises(MasingInstabilityError):
            alpha_update(p, 0.0, -0.01, 0.0)


class TestGain:
    def test_unity_for_equal_amplitudes(self):
        assert gain(0.3 - 0.2j, 0.3 - 0.2j) == 1.0

    def test_undefined_for_zero_reference(self):
        with pytest.raises(UndefinedGainError):
            gain(0.1, 0.0)

    def test_resonant_linewidth_ratio(self):
        # at dw_r = 0: G = (kappa / kappa')^2
        p = SystemParams(epsilon_q=1.0, delta_q=3.0, g=0.0, kappa_minus_r=0.1,
                         drive_amplitude=0.05, drive_frequency=1.0)
        a0 = alpha_update(p, 0.0, 0.1, 0.0)
        a1 = alpha_update(p, 0.0, 0.08, 0.0)
        assert gain(a1, a0) == pytest.approx((0.1 / 0.08) ** 2, rel=1e-12)


class TestSolveCoupled:
    def test_decoupled_limit(self):
        p = SystemParams(epsilon_q=2.0, delta_q=3.0, g=0.0, kappa_minus_r=0.05,
                         drive_amplitude=0.02, drive_frequency=1.0)
        bath = OhmicBath(amplitude=1.0, temperature=0.5)
        rep = solve_coupled(p, bath)
        assert rep.converged and rep.iterations == 1
        assert rep.gain == 1.0
        a0 = -0.02 / (-0.05j)
        assert rep.resonator.alpha == pytest.approx(a0, rel=1e-14)

    def test_fixed_point_property(self):
        p = SystemParams(epsilon_q=3.0, delta_q=3.0, g=0.0125, kappa_minus_r=52e-6,
                         gamma_left=0.34, gamma_right=0.34,
                         drive_amplitude=5.2e-6, drive_frequency=1.0)
        bath = PiezoBath(weight_1d=2.9, weight_3d=0.25, temperature=7.8)
        rep = solve_coupled(p, bath)
        assert rep.converged
        again = alpha_update(p, rep.qubit.sigma_z, rep.resonator.kappa_prime)
        assert abs(again - rep.resonator.alpha) <= 1e-10 * (1 + abs(rep.resonator.alpha))
        assert rep.residual <= 1e-10 * (1 + abs(rep.resonator.alpha))

    def test_qubit_state_valid_at_solution(self):
        p = SystemParams(epsilon_q=-2.0, delta_q=3.0, g=0.0125, kappa_minus_r=52e-6,
                         gamma_left=0.34, gamma_right=0.34,
                         drive_amplitude=5.2e-6, drive_frequency=1.0)
        bath = PiezoBath(weight_1d=2.9, weight_3d=0.25, temperature=7.8)
        rep = solve_coupled(p, bath)
        assert rep.converged and rep.qubit.is_physical()

    def test_boltzmann_fixed_point(self):
        # leads off, drive off: P_e / P_g = gamma_up / gamma_down exactly
        p = SystemParams(epsilon_q=1.2, delta_q=0.9, g=0.0125, kappa_minus_r=0.05)
        bath = OhmicBath(amplitude=1.0, temperature=0.5)
        rep = solve_coupled(p, bath)
        so = second_order_rates(p, bath)
        g4 = effective_gamma(p, bath, 0.0)
        ratio = (so.gamma_up + g4.gamma_up) / (so.gamma_down + g4.gamma_down)
        assert abs(rep.qubit.p_excited / rep.qubit.p_ground - ratio) <= 1e-8

    def test_monotone_link_dephasing_lowers_gain(self):
        # raising gamma_phi-(w_r) raises kappa_- and strictly lowers G at
        # resonant drive; realized with resonator-frequency spike baths
        p = SystemParams(epsilon_q=3.0, delta_q=3.0, g=0.0125, kappa_minus_r=1e-4,
                         gamma_left=0.34, gamma_right=0.34,
                         drive_amplitude=1e-5, drive_frequency=1.0)
        gains = []
        kappas = []
        for weight in (0.5, 1.0, 2.0):
            bath = spike_bath(center=1.0, weight=weight, temperature=0.0)
            rep = solve_coupled(p, bath, SolverOptions(variant=Variant.DOMINANT6))
            gains.append(rep.gain)
            kappas.append(rep.resonator.kappa_minus)
        assert kappas[0] < kappas[1] < kappas[2]
        assert gains[0] > gains[1] > gains[2]

    def test_continuity_under_small_perturbation(self):
        p = SystemParams(epsilon_q=3.0, delta_q=3.0, g=0.0125, kappa_minus_r=52e-6,
                         gamma_left=0.34, gamma_right=0.34,
                         drive_amplitude=5.2e-6, drive_frequency=1.0)
        bath = PiezoBath(weight_1d=2.9, weight_3d=0.25, temperature=7.8)
        base = solve_coupled(p, bath)
        from dataclasses import replace
        bumped = solve_coupled(replace(p, epsilon_q=3.03), bath)
        assert base.converged and bumped.converged
        change = abs(bumped.resonator.alpha - base.resonator.alpha) / abs(base.resonator.alpha)
        assert change < 0.10

    def test_resonator_occupation_feedback(self):
        # with the flag on, the reported n_res is the displaced-mode thermal
        # occupation kappa_+ / (kappa_- - kappa_+) at the fixed point, and
        # it feeds back into the qubit rates
        p = SystemParams(epsilon_q=3.0, delta_q=3.0, g=0.0125, kappa_minus_r=52e-6,
                         gamma_left=0.34, gamma_right=0.34,
                         drive_amplitude=5.2e-6, drive_frequency=1.0)
        bath = PiezoBath(weight_1d=2.9, weight_3d=0.25, temperature=7.8)
        off = solve_coupled(p, bath)
        on = solve_coupled(p, bath, SolverOptions(include_resonator_occupation=True))
        assert on.converged and off.converged
        assert off.resonator.n_res == 0.0
        assert on.resonator.n_res == pytest.approx(on.resonator.occupation, rel=1e-6)
        assert on.resonator.n_res > 0.0
        assert on.gain != off.gain  # the correction reaches the observables

    def test_negative_rate_flagged_not_fatal(self):
        # close-ish to resonance the effective qubit rates can go negative
        p = SystemParams(epsilon_q=0.0, delta_q=1.15, g=0.01, kappa_minus_r=0.01,
                         drive_amplitude=1e-4, drive_frequency=1.0)
        bath = OhmicBath(amplitude=1.0, temperature=0.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rep = solve_coupled(p, bath)
        assert rep.converged


class TestMeanfieldVsExact:
    def test_decoupled_exact(self):
        p = SystemParams(epsilon_q=2.0, delta_q=3.0, g=0.0, kappa_minus_r=0.05,
                         drive_amplitude=0.02, drive_frequency=1.0)
        bath = OhmicBath(amplitude=1.0, temperature=0.2)
        rep = meanfield_vs_exact(p, bath, n_fock=10)
        assert rep.alpha_deviation < 1e-8
        assert rep.p_excited_deviation < 1e-10

    @pytest.mark.filterwarnings("ignore::dqdgain.liouville.PositivityWarning")
    def test_weak_coupling_agreement(self):
        p = SystemParams(epsilon_q=1.0, delta_q=3.0, g=0.0125, kappa_minus_r=0.05,
                         drive_amplitude=0.04, drive_frequency=1.0)
        bath = OhmicBath(amplitude=1.0, temperature=1.0)
        rep = meanfield_vs_exact(p, bath, n_fock=12)
        assert rep.alpha_deviation < 0.05
        assert rep.p_excited_deviation < 0.02

    @pytest.mark.filterwarnings("ignore::dqdgain.liouville.PositivityWarning")
    def test_dispersive_pull_consistent_at_finite_detuning(self):
        # drive detuned by an amount comparable to 2 chi_eff <sz>: a sign
        # mismatch of the dispersive term between the exact Hamiltonian and
        # the mean-field detuning would show as an O(1) amplitude error
        bath = OhmicBath(amplitude=1.0, temperature=0.0)
        from dqdgain.rates import dispersive_shifts
        for sign in (+1.0, -1.0):
            p = SystemParams(epsilon_q=1.0, delta_q=3.0, g=0.05,
                             kappa_minus_r=5e-4, drive_amplitude=5e-5,
                             drive_frequency=1.0 - sign * 5e-4)
            assert 2 * dispersive_shifts(p)[1] > 0.5 * abs(p.detuning)
            rep = meanfield_vs_exact(p, bath, n_fock=10)
            assert rep.alpha_deviation < 1e-3

    @pytest.mark.filterwarnings("ignore::dqdgain.liouville.PositivityWarning")
    def test_leads_on_charged_sector_weights(self):
        # transport bias on: P_empty ~ 0.3 exercises the (1 - P_empty) and
        # 4 P_g weights of the traced resonator rates, and the displaced
        # mode picks up a real thermal occupation that must match
        # kappa_+ / (kappa_- - kappa_+)
        p = SystemParams(epsilon_q=3.0, delta_q=3.0, g=0.0125, kappa_minus_r=5e-4,
                         gamma_left=0.34, gamma_right=0.34,
                         drive_amplitude=5e-5, drive_frequency=1.0)
        bath = PiezoBath(weight_1d=2.9, weight_3d=0.25, temperature=7.8)
        rep = meanfield_vs_exact(p, bath, n_fock=12,
                                 options=SolverOptions(include_resonator_occupation=True))
        assert rep.meanfield.qubit.p_empty > 0.2
        assert rep.alpha_deviation < 1e-4
        assert rep.p_excited_deviation < 1e-6
        n_excess = rep.photon_number_exact - abs(rep.alpha_exact) ** 2
        assert rep.meanfield.resonator.n_res == pytest.approx(n_excess, rel=1e-2)

    @pytest.mark.filterwarnings("ignore::dqdgain.liouville.PositivityWarning")
    def test_deviation_grows_with_coupling(self):
        bath = OhmicBath(amplitude=1.0, temperature=0.5)
        devs = []
        for g in (0.01, 0.05, 0.2):
            p = SystemParams(epsilon_q=1.0, delta_q=3.0, g=g, kappa_minus_r=0.05,
                             drive_amplitude=0.02, drive_frequency=1.0)
            rep = meanfield_vs_exact(p, bath, n_fock=10)
            devs.append(rep.alpha_deviation)
        assert devs[0] < devs[1] < devs[2]


class TestResonatorField:
    def test_occupation_and_stability(self):
        f = ResonatorField(alpha=0.1 + 0.0j, kappa_minus=0.1, kappa_plus=0.02,
                           detuning_eff=0.0)
        assert f.stable
        assert f.kappa_prime == pytest.approx(0.08)
        assert f.occupation == pytest.approx(0.25)
        unstable = ResonatorField(alpha=0j, kappa_minus=0.1, kappa_plus=0.2,
                                  detuning_eff=0.0)
        assert not unstable.stable
        assert math.isinf(unstable.occupation)
