import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from laddyn import analytic, dynamics, linalg, measures, model
from laddyn.errors import ValidationError

from conftest import ALL_PAIRS, evolved, propagator

ds = st.floats(min_value=0.05, max_value=4.0, allow_nan=False)
times = st.floats(min_value=0.0, max_value=30.0, allow_nan=False)


def bell_density():
    bell = np.zeros(4, dtype=complex)
    bell[1] = bell[2] = 1 / math.sqrt(2)
    return np.outer(bell, bell.conj())


def w4_state():
    psi = np.zeros(16, dtype=complex)
    psi[list(linalg.ONE_PARTICLE_INDICES)] = 0.5
    return psi


class TestWoottersConcurrence:
    def test_bell_state_maximal(self):
        assert abs(measures.wootters_concurrence(bell_density()) - 1.0) < 1e-10

    def test_product_state_zero(self):
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = 1.0
        assert measures.wootters_concurrence(rho) == 0.0

    def test_w4_pairs_are_half(self):
        # every reduced pair of the four-site W state carries 2/N = 1/2
        for p, q in ALL_PAIRS:
            rho = linalg.partial_trace_to_pair(w4_state(), p, q)
            assert abs(measures.wootters_concurrence(rho) - 0.5) < 1e-10

    def test_werner_family_closed_form(self):
        for p in (0.1, 1 / 3, 0.5, 0.9):
            rho = p * bell_density() + (1 - p) * np.eye(4) / 4
            expected = max(0.0, (3 * p - 1) / 2)
            assert abs(measures.wootters_concurrence(rho) - expected) < 1e-12

    def test_validation(self):
        with pytest.raises(ValidationError, match="Hermitian"):
            m = np.eye(4, dtype=complex) / 4
            m[0, 1] = 1e-3
            measures.wootters_concurrence(m)
        with pytest.raises(ValidationError, match="trace"):
            measures.wootters_concurrence(np.eye(4) / 2)
        with pytest.raises(ValidationError, match="semidefinite"):
            rho = np.diag([1.2, -0.2, 0.0, 0.0]).astype(complex)
            measures.wootters_concurrence(rho)
        with pytest.raises(ValidationError):
            measures.wootters_concurrence(np.eye(2) / 2)


class TestOneParticleShortcut:
    def test_initial_amplitudes(self):
        b = np.array([1 / math.sqrt(2), 1 / math.sqrt(2), 0, 0])
        assert measures.concurrence_one_particle(b, 1, 2) == pytest.approx(1.0)
        assert measures.concurrence_one_particle(b, 3, 4) == 0.0

    def test_w_amplitudes_give_half(self):
        b = 0.5 * np.exp(1j * np.array([0.3, -1.0, 2.2, 0.0]))
        for p, q in ALL_PAIRS:
            assert abs(measures.concurrence_one_particle(b, p, q) - 0.5) < 1e-14

    def test_index_validation(self):
        with pytest.raises(ValidationError):
            measures.concurrence_one_particle(np.zeros(4), 2, 2)
        with pytest.raises(ValidationError):
            measures.concurrence_one_particle(np.zeros(3), 1, 2)

    @given(t=times, d=ds)
    @settings(max_examples=40, deadline=None)
    def test_agrees_with_full_route(self, t, d):
        psi = dynamics.evolve(propagator(d), t)
        b = dynamics.one_particle_amplitudes(psi)
        for p, q in ALL_PAIRS:
            full = measures.wootters_concurrence(linalg.partial_trace_to_pair(psi, p, q))
            short = measures.concurrence_one_particle(b, p, q)
            assert abs(full - short) < 1e-10


class TestTwoPointCorrelation:
    def test_initial_zz_values(self):
        psi = model.initial_state()
        assert abs(measures.two_point_correlation(psi, 1, 2, "z", "z") + 0.25) < 1e-14
        assert abs(measures.two_point_correlation(psi, 3, 4, "z", "z") - 0.25) < 1e-14

    def test_rung_cross_axis_vanishes(self):
        psi = evolved(0.6, 1.7)
        for pair in ((1, 2), (3, 4)):
            for a, b in (("x", "y"), ("y", "x"), ("x", "z"), ("z", "y")):
                assert abs(measures.two_point_correlation(psi, *pair, a, b)) < 1e-12

    def test_leg_transverse_identity(self):
        # on leg-class pairs the xy part is generally nonzero; what holds is
        # chi_xx^2 + chi_xy^2 = (sin((mu+nu) t / 2) / 8)^2
        d, t = 0.6, 1.7
        sp = analytic.spectral_params(d)
        psi = evolved(d, t)
        xx = measures.two_point_correlation(psi, 1, 3, "x", "x")
        xy = measures.two_point_correlation(psi, 1, 3, "x", "y")
        target = (math.sin((sp.mu + sp.nu) * t / 2.0) / 8.0) ** 2
        assert abs(xx ** 2 + xy ** 2 - target) < 1e-12
        assert abs(xy) > 0.01  # the cross term is genuinely nonzero here

    def test_particle_number_violating_axes_vanish_for_all_pairs(self):
        psi = evolved(1.0, 2.3)
        for p, q in ALL_PAIRS:
            for a, b in (("x", "z"), ("z", "x"), ("y", "z"), ("z", "y")):
                assert abs(measures.two_point_correlation(psi, p, q, a, b)) < 1e-12

    def test_pair_symmetry_exact(self):
        psi = evolved(0.8, 2.1)
        for p, q in ALL_PAIRS:
            for a in ("x", "z"):
                assert measures.two_point_correlation(psi, p, q, a, a) == \
                    measures.two_point_correlation(psi, q, p, a, a)

    def test_validation(self):
        psi = model.initial_state()
        with pytest.raises(ValidationError):
            measures.two_point_correlation(psi, 1, 1, "x", "x")


class TestTotalSpin:
    @pytest.mark.parametrize("t", [0.0, 0.9, 7.7])
    def test_evolved_state_totals(self, t):
        psi = evolved(0.6, t)
        assert abs(measures.total_spin_expectation(psi, "z") + 1.0) < 1e-12
        assert abs(measures.total_spin_expectation(psi, "x")) < 1e-12
        assert abs(measures.total_spin_expectation(psi, "y")) < 1e-12

    def test_all_up_state(self):
        psi = np.zeros(16, dtype=complex)
        psi[15] = 1.0
        assert abs(measures.total_spin_expectation(psi, "z") - 2.0) < 1e-14


class TestOracleEquivalence:
    @pytest.mark.parametrize("d", [0.2, 0.6, 1.0, 1.5, 2.0])
    def test_numeric_matches_closed_forms(self, d):
        ts = np.linspace(0.0, 30.0, 241)
        states = dynamics.evolve_states(propagator(d), ts)
        for p, q in ALL_PAIRS:
            pc = analytic.classify_pair(p, q)
            cn = measures.concurrence_series(states, p, q)
            ca = analytic.concurrence_formula(pc, ts, d)
            assert np.max(np.abs(cn - ca)) < 1e-9

    @pytest.mark.parametrize("d", [0.2, 1.0, 2.0])
    def test_rung_sum_is_one(self, d):
        ts = np.linspace(0.0, 30.0, 241)
        states = dynamics.evolve_states(propagator(d), ts)
        total = (measures.concurrence_series(states, 1, 2)
                 + measures.concurrence_series(states, 3, 4))
        assert np.max(np.abs(total - 1.0)) < 1e-9

    def test_scalar_and_series_paths_agree(self):
        psi = evolved(0.6, 1.0)
        for p, q in ALL_PAIRS:
            series_val = float(measures.concurrence_series(psi[None], p, q)[0])
            scalar_val = measures.wootters_concurrence(
                linalg.partial_trace_to_pair(psi, p, q))
            assert abs(series_val - scalar_val) < 1e-14


def test_pair_observables_bundle():
    psi = evolved(0.6, 1.0)
    obs = measures.pair_observables(psi, 1, 2)
    assert obs.pair == (1, 2)
    assert abs(obs.concurrence
               - analytic.concurrence_formula(analytic.PairClass.FIRST_RUNG, 1.0, 0.6)) < 1e-9
    assert obs.chi.shape == (3, 3)
    assert abs(obs.chi[2, 2]
               - analytic.correlation_formula(analytic.PairClass.FIRST_RUNG, "zz", 1.0, 0.6)) < 1e-9
    assert all(abs(obs.chi[i, j]) <= 0.25 + 1e-12 for i in range(3) for j in range(3))
