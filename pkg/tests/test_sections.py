import json
import math

import numpy as np
import pytest

from cubewrap.maps import EmbeddingConfig, build_phi, make_lambda
from cubewrap.quotient import reduce
from cubewrap.sections import (
    fubini_check,
    psi_section_membership_many,
    section_area_mc,
    section_membership,
    section_membership_many,
    section_of_phi,
    section_to_json,
    v_set,
    w_set,
)

CFG2 = EmbeddingConfig(n=2, c=2.0)


class TestVSet:
    def test_removed_point(self):
        v = v_set(0.3, 2.0)
        # removed angle: -0.6 mod 1 = 0.4
        assert not v.contains(0.4)
        assert v.contains(0.41)
        assert v.total_length == 1.0

    def test_c1_symmetry(self):
        v = v_set(0.5, 1.0)
        assert not v.contains(0.5)
        assert v.contains(0.1)

    def test_domain(self):
        with pytest.raises(ValueError):
            v_set(0.0, 2.0)
        with pytest.raises(ValueError):
            v_set(0.5, 0.5)


class TestWSet:
    def test_split_case(self):
        assert w_set(reduce(0.5, 2.0), 2.0).intervals == ((0.0, 0.25), (0.75, 1.0))

    def test_single_case(self):
        assert w_set(reduce(1.5, 2.0), 2.0).intervals == ((0.25, 0.75),)

    def test_period_mismatch(self):
        with pytest.raises(ValueError):
            w_set(reduce(0.5, 1.0), 2.0)

    def test_interval_count_and_length(self):
        rng = np.random.default_rng(0)
        for _ in range(300):
            c = rng.uniform(1, 8)
            w = w_set(reduce(rng.uniform(0, c), c), c)
            assert len(w.intervals) in (1, 2)
            assert abs(w.total_length - 1 / c) < 1e-12


class TestSectionOfPhi:
    def test_puncture(self):
        sd = section_of_phi(CFG2.z0, CFG2)
        assert sd.status == "puncture" and sd.analytic_area == 0.0

    def test_outside(self):
        assert section_of_phi([2.0, 0.5], EmbeddingConfig(n=2, c=1.0)).status == "empty"
        assert section_of_phi([0.5, -0.1], CFG2).status == "empty"

    def test_generic(self):
        sd = section_of_phi([0.3, 0.7], CFG2)
        assert sd.status == "generic"
        assert sd.analytic_area == 0.5
        assert sd.V.total_length == 1.0
        assert abs(sd.W.total_length - 0.5) < 1e-12

    def test_n3_tail_handling(self):
        cfg = EmbeddingConfig(n=3, c=2.0)
        assert section_of_phi([0.3, 0.7, 0.5, 0.5], cfg).status == "generic"
        assert section_of_phi([0.3, 0.7, 1.5, 0.5], cfg).status == "empty"

    def test_wrong_z_dimension(self):
        with pytest.raises(ValueError):
            section_of_phi([0.3, 0.7, 0.5], CFG2)

    def test_areas_constant_over_generic_region(self):
        rng = np.random.default_rng(1)
        areas = set()
        for _ in range(100):
            z = (rng.uniform(0.01, 0.99), rng.uniform(0.01, 1.99))
            sd = section_of_phi(z, CFG2)
            if sd.status == "generic":
                areas.add(sd.analytic_area)
        assert areas == {0.5}


class TestMembership:
    def test_puncture_point_excluded(self):
        assert not section_membership(CFG2.y0, [0.3, 0.7], CFG2)

    def test_outside_square(self):
        assert not section_membership([1.5, 0.5], [0.3, 0.7], CFG2)

    def test_slit_excluded(self):
        lam = make_lambda(CFG2)
        sd = section_of_phi([0.3, 0.7], CFG2)
        for t in (0.1, 0.45, 0.8):
            y = lam.forward(np.array([sd.slit_angle, t]))
            assert not section_membership(y, sd, CFG2)

    def test_forward_consistency(self):
        # phi(x) decomposes into a square point and a z with membership true.
        phi = build_phi(CFG2)
        rng = np.random.default_rng(2)
        X = rng.uniform(0, 1, (300, 4))
        Y = phi.forward(X)
        for row in Y:
            assert section_membership(row[:2], row[2:], CFG2)

    @pytest.mark.parametrize("c", [1.0, 1.5, 2.0, math.pi])
    def test_mc_area_matches_analytic(self, c):
        cfg = EmbeddingConfig(n=2, c=c)
        est, se = section_area_mc([0.3, 0.7 * c / 2], samples=200_000, seed=5, config=cfg)
        assert abs(est - 1 / c) < 3 * se


class TestSectionAreaMC:
    def test_puncture_area_zero(self):
        est, se = section_area_mc(CFG2.z0, samples=10_000, seed=0, config=CFG2)
        assert est == 0.0 and se == 0.0

    def test_samples_floor(self):
        with pytest.raises(ValueError):
            section_area_mc([0.3, 0.7], samples=100, seed=0, config=CFG2)

    def test_c1_full_area(self):
        cfg = EmbeddingConfig(n=2, c=1.0)
        est, se = section_area_mc([0.3, 0.7], samples=200_000, seed=1, config=cfg)
        assert abs(est - 1.0) < 3 * max(se, 1e-5)

    def test_deterministic_given_seed(self):
        a1 = section_area_mc([0.3, 0.7], samples=50_000, seed=9, config=CFG2)
        a2 = section_area_mc([0.3, 0.7], samples=50_000, seed=9, config=CFG2)
        assert a1 == a2


class TestFubini:
    def test_analytic_integral_exact(self):
        fr = fubini_check(CFG2, grid=(20, 40))
        assert fr.analytic_integral == pytest.approx(1.0, abs=1e-12)
        assert fr.max_area == 0.5
        assert fr.min_generic_area == 0.5

    def test_mc_integral(self):
        fr = fubini_check(CFG2, grid=(10, 20), mc_spots=5, samples_per_spot=50_000, seed=3)
        assert fr.mc_integral == pytest.approx(1.0, abs=0.02)
        for _, _, est, se in fr.mc_spots:
            assert abs(est - 0.5) < 3 * se


class TestSerialization:
    def test_json_round_trip(self):
        sd = section_of_phi([0.3, 0.7], CFG2)
        doc = json.loads(section_to_json(sd, mc_area=0.5, mc_stderr=1e-3, seed=4))
        assert doc["status"] == "generic"
        assert doc["analytic_area"] == 0.5
        assert doc["seed"] == 4
        assert len(doc["W_intervals"]) in (1, 2)
        assert len(doc["V_arcs"]) == 1

    def test_empty_section_json(self):
        doc = json.loads(section_to_json(section_of_phi([5.0, 0.5], CFG2)))
        assert doc["status"] == "empty" and doc["V_arcs"] == []


class TestPsiSectionMembership:
    def test_contained_in_scaled_phi_section(self):
        # psi-section area is below the bound a.
        rng = np.random.default_rng(6)
        from cubewrap.maps import DISC_RADIUS

        ys = rng.uniform(-DISC_RADIUS, DISC_RADIUS, (200_000, 2))
        a = 0.5
        m = psi_section_membership_many(ys, [0.3, 0.7], CFG2, a)
        area = m.mean() * (2 * DISC_RADIUS) ** 2
        assert area < a

    def test_empty_outside_rectangle(self):
        m = psi_section_membership_many(np.zeros((10, 2)), [1.5, 0.7], CFG2, 0.5)
        assert not m.any()

    def test_invalid_a(self):
        with pytest.raises(ValueError):
            psi_section_membership_many(np.zeros((1, 2)), [0.3, 0.7], CFG2, 0.0)
