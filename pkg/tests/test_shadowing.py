"""Shadowing engine: existence bounds, recovery, equivariance, uniqueness."""

import math

import numpy as np
import pytest

from soldyn.linalg import IntMatrix
from soldyn.shadowing import (
    ProductHyperbolicSystem,
    PseudoOrbit,
    doubling_system,
    existence_bound,
    linear_toral_system,
    sample_pseudo_orbit,
    shadow,
    smale_descriptor,
    uniqueness_epsilon,
    verify_shadow,
)

CAT = IntMatrix([[2, 1], [1, 1]])


def true_orbit(system, J, rng, base_scale=1.0):
    orbit = sample_pseudo_orbit(system, rng, J, noise=0.0, base_scale=base_scale)
    assert orbit.gap(system) == 0.0
    return orbit


class TestExactRecovery:
    def test_zero_noise_recovers_orbit_point(self):
        for name, system in [("doubling", doubling_system()),
                             ("cat", linear_toral_system(CAT))]:
            rng = np.random.default_rng(3)
            orbit = true_orbit(system, 40, rng)
            result = shadow(system, orbit)
            center = orbit.point(0)
            d = system.distance(result.point, center)
            assert d < 1e-10, name

    def test_gap_zero_reported(self):
        system = linear_toral_system(CAT)
        orbit = true_orbit(system, 30, np.random.default_rng(4))
        result = shadow(system, orbit)
        assert result.gap == 0.0
        assert result.existence_bound == 0.0


class TestExistenceBound:
    def test_noisy_orbits_shadowed_within_bound(self):
        system = linear_toral_system(CAT)
        rng = np.random.default_rng(5)
        for _ in range(20):
            orbit = sample_pseudo_orbit(system, rng, 30, noise=0.01)
            result = shadow(system, orbit)
            sup = verify_shadow(system, orbit, result.point)
            assert sup <= result.existence_bound + 1e-12
            assert result.existence_bound <= math.sqrt(5) * result.gap + 1e-12

    def test_bound_formula(self):
        system = linear_toral_system(CAT)
        L = 0.01
        expected = L * (1.0 / (system.mu - 1.0) + system.c / (1.0 - system.lam))
        assert existence_bound(system, L) == pytest.approx(expected, rel=1e-12)

    def test_concatenated_segments_single_jump(self):
        # two half-orbits of different true orbits: gap concentrated in one
        # jump; the bound must still hold
        system = doubling_system()
        rng = np.random.default_rng(6)
        J = 25
        a = true_orbit(system, J, rng)
        b = true_orbit(system, J, rng)
        pts = [a.point(j) for j in range(-J, 1)] + [b.point(j) for j in range(1, J + 1)]
        orbit = PseudoOrbit(tuple(pts))
        result = shadow(system, orbit)
        sup = verify_shadow(system, orbit, result.point)
        assert sup <= result.existence_bound + 1e-9


class TestEquivariance:
    def test_deck_orbit_translation_preserves_shadow(self):
        # translating the data by the deck orbit A^j n translates the
        # shadow by n and preserves every gap
        system = linear_toral_system(CAT)
        rng = np.random.default_rng(7)
        J = 8
        orbit = sample_pseudo_orbit(system, rng, J, noise=0.01)
        n = np.array([1.0, -1.0])
        translated = []
        for j in range(-J, J + 1):
            power = CAT.power(abs(j))
            vec = np.array(
                [float(c) for c in (power.apply(n) if j >= 0 else power.apply_inv(n))]
            )
            translated.append(system.translate(orbit.point(j), vec))
        shifted = PseudoOrbit(tuple(translated))
        assert shifted.gap(system) == pytest.approx(orbit.gap(system), abs=1e-12)
        res = shadow(system, orbit)
        res_shifted = shadow(system, shifted)
        moved = system.translate(res.point, n)
        assert system.distance(res_shifted.point, moved) < 1e-9


class TestUniqueness:
    def test_epsilon_formula(self):
        eps = uniqueness_epsilon(C=1.0, c=2.0, K=3.0, lam=0.5, mu=2.0, N=10)
        assert eps == pytest.approx(2.0 * 3.0 * 0.5**10 + 2.0**-10 * 1.0, rel=1e-12)

    def test_epsilon_decreases_in_window(self):
        values = [uniqueness_epsilon(1.0, 1.0, 1.0, 0.4, 2.5, n) for n in range(1, 12)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_adversarial_distinct_orbits_separate(self):
        # two true orbits agreeing on a window of length N must differ
        # somewhere by more than epsilon_N at the matching depth
        system = doubling_system()
        for N in (5, 10, 20):
            x0 = 0.3
            y0 = x0 + 2.0 ** -(N + 1)
            xs = [x0]
            ys = [y0]
            for _ in range(N):
                xs.append((2 * xs[-1]) % 1.0)
                ys.append((2 * ys[-1]) % 1.0)
            sep = max(abs(a - b) for a, b in zip(xs, ys))
            eps = uniqueness_epsilon(
                C=0.5, c=0.0, K=0.0, lam=0.0, mu=2.0, N=N
            )
            assert sep >= eps * 0.5

    def test_validation(self):
        with pytest.raises(ValueError):
            uniqueness_epsilon(1.0, 1.0, 1.0, 1.5, 2.0, 3)
        with pytest.raises(ValueError):
            uniqueness_epsilon(1.0, 1.0, 1.0, 0.5, 0.9, 3)


class TestPseudoOrbit:
    def test_json_round_trip(self):
        system = linear_toral_system(CAT)
        orbit = sample_pseudo_orbit(system, np.random.default_rng(8), 5, 0.01)
        again = PseudoOrbit.from_json(orbit.to_json())
        assert again.window == orbit.window
        for j in range(-5, 6):
            np.testing.assert_allclose(again.point(j)[0], orbit.point(j)[0])

    def test_even_length_rejected(self):
        pts = (
            (np.zeros(1), np.zeros(0)),
            (np.zeros(1), np.zeros(0)),
        )
        with pytest.raises(ValueError):
            PseudoOrbit(pts)


class TestDescriptors:
    def test_descriptor_without_maps_refuses_to_shadow(self):
        system = smale_descriptor()
        pts = tuple(
            (np.zeros(1), np.zeros(2)) for _ in range(5)
        )
        orbit = PseudoOrbit(pts)
        with pytest.raises(ValueError):
            shadow(system, orbit)

    def test_descriptor_carries_constants(self):
        system = smale_descriptor(lambda_c=0.25)
        assert system.mu == 2.0
        assert system.lam == 0.25
        assert system.fiber_diameter == 2.0

    def test_linear_toral_constants(self):
        system = linear_toral_system(CAT)
        golden_sq = (3 + math.sqrt(5)) / 2
        assert system.mu == pytest.approx(golden_sq, rel=1e-10)
        assert system.lam == pytest.approx(1 / golden_sq, rel=1e-10)
        factor = 1 / (system.mu - 1) + system.c / (1 - system.lam)
        assert factor == pytest.approx(math.sqrt(5), rel=1e-10)
