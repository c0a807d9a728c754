import math

import numpy as np
import pytest

from cubewrap.maps import (
    DISC_RADIUS,
    ChiMap,
    DomainError,
    EmbeddingConfig,
    KappaMap,
    PhiMap,
    build_phi,
    build_psi,
    check_symplectic,
    corner_straighten,
    corner_straighten_jacobian,
    finite_difference_jacobian,
    make_lambda,
    make_lambda_prime,
    shear,
    symplectic_defect,
    symplectic_matrix,
    wrap_project,
)

RNG = np.random.default_rng(12345)


def random_disc_points(n, radius=DISC_RADIUS, rng=RNG):
    theta = rng.uniform(-np.pi, np.pi, n)
    rad = radius * np.sqrt(rng.uniform(0, 1, n))
    return np.stack([rad * np.cos(theta), rad * np.sin(theta)], axis=-1)


class TestConfig:
    def test_defaults(self):
        cfg = EmbeddingConfig(n=2, c=2.0)
        assert cfg.r == pytest.approx(math.pi ** -0.5)
        assert cfg.r**2 * math.pi == pytest.approx(1.0)
        assert cfg.y0 == (0.5, 0.5)
        assert cfg.z0 == (0.5, 1.0)

    def test_invalid(self):
        with pytest.raises(ValueError):
            EmbeddingConfig(n=1, c=2.0)
        with pytest.raises(ValueError):
            EmbeddingConfig(n=2, c=0.5)


class TestShear:
    def test_example(self):
        out = shear(2.0).forward(np.array([0.25, 0.5, 0.5, 0.25]))
        assert np.allclose(out, [-0.75, 0.5, 0.5, 1.25])

    def test_origin_fixed(self):
        assert np.allclose(shear(1.0).forward(np.zeros(4)), 0.0)

    def test_exactly_symplectic(self):
        for c in [1.0, 1.5, 2.0, math.pi]:
            M = shear(c).matrix
            Om = symplectic_matrix(2)
            assert np.array_equal(M.T @ Om @ M, Om)
            assert np.linalg.det(M) == pytest.approx(1.0)


class TestWrapProject:
    def test_reduction(self):
        out = wrap_project(2.0).forward(np.array([-0.75, 0.5, 0.5, 1.25]))
        assert np.allclose(out, [0.25, 0.5, 0.5, 1.25])

    def test_reduction_wrapping(self):
        out = wrap_project(2.0).forward(np.array([0.1, 0.2, 0.3, 2.4]))
        assert np.allclose(out, [0.1, 0.2, 0.3, 0.4])

    def test_middle_unchanged(self):
        X = RNG.uniform(-5, 5, (100, 4))
        Y = wrap_project(1.5).forward(X)
        assert np.array_equal(Y[:, 1:3], X[:, 1:3])


class TestChi:
    def test_rim_point(self):
        out = ChiMap(1, 1).forward(np.array([0.0, 0.0]))
        assert np.allclose(out, [math.pi ** -0.5, 0.0])

    def test_interior_point(self):
        out = ChiMap(1, 1).forward(np.array([0.25, 0.75]))
        assert np.allclose(out, [0.0, math.sqrt(0.25 / math.pi)], atol=1e-15)

    def test_unit_jacobian(self):
        chi = ChiMap(1, 1)
        pts = np.stack(
            [RNG.uniform(0, 1, 10_000), RNG.uniform(1e-3, 1 - 1e-3, 10_000)], axis=-1
        )
        det = np.linalg.det(chi.jacobian(pts))
        assert np.abs(det - 1).max() < 1e-9

    def test_jacobian_matches_finite_differences(self):
        chi = ChiMap(2.0, 1.0)
        pts = np.stack([RNG.uniform(0, 2, 500), RNG.uniform(0.1, 0.9, 500)], axis=-1)
        J = chi.jacobian(pts)
        Jfd = finite_difference_jacobian(chi.forward, pts, 1e-6)
        assert np.abs((J - Jfd) / np.maximum(np.abs(J), 1)).max() < 1e-5

    def test_domain_error(self):
        with pytest.raises(DomainError):
            ChiMap(1, 1).forward(np.array([0.5, 1.0]))

    def test_rim_maps_to_boundary_circle(self):
        chi = ChiMap(1.5, 2.0)
        pts = np.stack([np.linspace(0, 1.5, 64), np.zeros(64)], axis=-1)
        out = chi.forward(pts)
        assert np.allclose(np.hypot(out[:, 0], out[:, 1]), chi.rim_radius)


class TestKappa:
    def test_center(self):
        assert np.allclose(KappaMap(1.0).forward(np.array([0.0, 0.0])), [0.5, 0.5])

    def test_boundary_angle_zero(self):
        out = KappaMap(1.0).forward(np.array([math.pi ** -0.5, 0.0]))
        assert np.allclose(out, [1.0, 0.5])

    def test_round_trip(self):
        k = KappaMap(1.0)
        pts = random_disc_points(10_000)
        assert np.abs(k.inverse(k.forward(pts)) - pts).max() < 1e-10

    def test_unit_jacobian_off_diagonals(self):
        k = KappaMap(1.0)
        pts = random_disc_points(20_000)
        pts = pts[k.singular_distance(pts) > 1e-4][:10_000]
        det = np.linalg.det(k.jacobian(pts))
        assert np.abs(det - 1).max() < 1e-9

    def test_image_is_square(self):
        k = KappaMap(2.0)
        pts = random_disc_points(5000, radius=k.radius)
        sq = k.forward(pts)
        assert sq.min() >= 0 and sq.max() <= 2.0

    def test_domain_error(self):
        with pytest.raises(DomainError):
            KappaMap(1.0).forward(np.array([1.0, 1.0]))

    def test_jacobian_matches_finite_differences(self):
        k = KappaMap(1.0)
        pts = random_disc_points(5000)
        pts = pts[k.singular_distance(pts) > 1e-3][:1000]
        J = k.jacobian(pts)
        Jfd = finite_difference_jacobian(k.forward, pts, 1e-7)
        assert np.abs(J - Jfd).max() < 1e-5


class TestCornerStraighten:
    def test_examples(self):
        out, sing = corner_straighten(np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]))
        assert np.allclose(out, [[1, 0], [-1, 0], [0, math.sqrt(2)]])
        assert not sing.any()

    def test_origin_flagged(self):
        out, sing = corner_straighten(np.array([0.0, 0.0]))
        assert np.allclose(out, 0.0) and bool(sing)

    def test_domain_error(self):
        with pytest.raises(DomainError):
            corner_straighten(np.array([-1.0, 0.5]))

    def test_area_doubling(self):
        pts = np.abs(RNG.normal(size=(10_000, 2))) + 1e-3
        det = np.linalg.det(corner_straighten_jacobian(pts))
        assert np.abs(det - 2).max() < 1e-9

    def test_jacobian_matches_finite_differences(self):
        pts = np.abs(RNG.normal(size=(500, 2))) + 0.05
        J = corner_straighten_jacobian(pts)
        Jfd = finite_difference_jacobian(lambda z: corner_straighten(z)[0], pts, 1e-7)
        assert np.abs(J - Jfd).max() < 1e-5


class TestLambda:
    def test_round_trip(self):
        lam = make_lambda()
        pts = np.stack(
            [RNG.uniform(0, 1, 10_000), RNG.uniform(1e-4, 1 - 1e-4, 10_000)], axis=-1
        )
        back = lam.inverse(lam.forward(pts))
        dq = np.abs(back[:, 0] - pts[:, 0])
        dq = np.minimum(dq, 1 - dq)
        assert dq.max() < 1e-9
        assert np.abs(back[:, 1] - pts[:, 1]).max() < 1e-9

    def test_area_preservation_mc(self):
        # lambda-image area of a product set equals its cylinder area.
        lam = make_lambda()
        rng = np.random.default_rng(7)
        ys = rng.uniform(0, 1, (1_000_000, 2))
        cyl = lam.inverse(ys)
        q_in = (cyl[:, 0] > 0.1) & (cyl[:, 0] < 0.4)
        p_in = (cyl[:, 1] > 0.2) & (cyl[:, 1] < 0.7)
        est = (q_in & p_in).mean()
        assert est == pytest.approx(0.3 * 0.5, rel=0.01)

    def test_approaches_puncture(self):
        lam = make_lambda()
        dists = [
            np.linalg.norm(lam.forward(np.array([0.3, 1 - eps])) - [0.5, 0.5])
            for eps in (1e-2, 1e-4, 1e-6)
        ]
        assert dists[0] > dists[1] > dists[2]
        assert dists[2] < 1e-2

    def test_unit_jacobian(self):
        lam = make_lambda()
        pts = np.stack(
            [RNG.uniform(0, 1, 20_000), RNG.uniform(1e-3, 1 - 1e-3, 20_000)], axis=-1
        )
        pts = pts[lam.singular_distance(pts) > 1e-4][:10_000]
        det = np.linalg.det(lam.jacobian(pts))
        assert np.abs(det - 1).max() < 1e-9


class TestLambdaPrime:
    @pytest.mark.parametrize("c", [1.0, 1.5, 2.0, math.pi])
    def test_round_trip(self, c):
        lamp = make_lambda_prime(c)
        pts = np.stack(
            [RNG.uniform(1e-4, 1 - 1e-4, 10_000), RNG.uniform(0, c, 10_000)], axis=-1
        )
        back = lamp.inverse(lamp.forward(pts))
        da = np.abs(back[:, 1] - pts[:, 1])
        da = np.minimum(da, c - da)
        assert np.abs(back[:, 0] - pts[:, 0]).max() < 1e-9
        assert da.max() < 1e-9

    def test_image_in_rectangle_c1(self):
        lamp = make_lambda_prime(1.0)
        rng = np.random.default_rng(8)
        pts = np.stack(
            [rng.uniform(1e-6, 1 - 1e-6, 100_000), rng.uniform(0, 1, 100_000)], axis=-1
        )
        z = lamp.forward(pts)
        assert np.all((z > 0) & (z < 1))
        assert not np.any((z[:, 0] == 0.5) & (z[:, 1] == 0.5))

    @pytest.mark.parametrize("c", [1.0, 1.5, 2.0, math.pi])
    def test_unit_jacobian(self, c):
        lamp = make_lambda_prime(c)
        pts = np.stack(
            [RNG.uniform(1e-3, 1 - 1e-3, 20_000), RNG.uniform(0, c, 20_000)], axis=-1
        )
        pts = pts[lamp.singular_distance(pts) > 1e-4][:10_000]
        det = np.linalg.det(lamp.jacobian(pts))
        assert np.abs(det - 1).max() < 1e-9

    def test_puncture_at_rectangle_center(self):
        lamp = make_lambda_prime(2.0)
        near = lamp.forward(np.array([1 - 1e-9, 0.3]))
        assert np.linalg.norm(near - [0.5, 1.0]) < 1e-3


class TestPhi:
    @pytest.mark.parametrize("c", [1.0, 2.0])
    def test_containment(self, c):
        phi = build_phi(EmbeddingConfig(n=2, c=c))
        X = np.random.default_rng(9).uniform(0, 1, (100_000, 4))
        Y = phi.forward(X)
        assert np.all((Y[:, :3] > 0) & (Y[:, :3] < 1))
        assert np.all((Y[:, 3] > 0) & (Y[:, 3] < c))

    def test_symplectic(self):
        phi = build_phi(EmbeddingConfig(n=2, c=1.5))
        rep = check_symplectic(phi, 2000, tol=1e-8, seed=0)
        assert rep.passed and rep.max_deviation < 1e-8

    def test_jacobian_vs_finite_differences(self):
        phi = build_phi(EmbeddingConfig(n=2, c=2.0))
        X = phi.sample_domain(np.random.default_rng(10), 500, margin=1e-3)
        J = phi.jacobian(X)
        Jfd = finite_difference_jacobian(phi.forward, X, 1e-6)
        rel = np.abs(J - Jfd) / np.maximum(np.abs(J), 1.0)
        assert rel.max() < 1e-5

    def test_inverse_round_trip(self):
        phi = build_phi(EmbeddingConfig(n=2, c=2.0))
        X = np.random.default_rng(11).uniform(0, 1, (10_000, 4))
        Y = phi.forward(X)
        assert phi.image_contains(Y).all()
        assert np.abs(phi.inverse(Y) - X).max() < 1e-12

    def test_domain_error(self):
        phi = build_phi(EmbeddingConfig(n=2, c=2.0))
        with pytest.raises(DomainError):
            phi.forward(np.array([1.5, 0.5, 0.5, 0.5]))

    def test_n3_extends_n2(self):
        phi3 = build_phi(EmbeddingConfig(n=3, c=1.5))
        phi2 = build_phi(EmbeddingConfig(n=2, c=1.5))
        X = np.random.default_rng(12).uniform(0, 1, (5000, 6))
        Y = phi3.forward(X)
        assert np.array_equal(Y[:, :4], phi2.forward(X[:, :4]))
        assert np.array_equal(Y[:, 4:], X[:, 4:])

    def test_image_volume(self):
        phi = build_phi(EmbeddingConfig(n=2, c=2.0))
        rng = np.random.default_rng(13)
        pts = rng.uniform(0, 1, (1_000_000, 4))
        pts[:, 3] *= 2.0
        vol = phi.image_contains(pts).mean() * 2.0
        assert vol == pytest.approx(1.0, abs=0.02)


class TestPsi:
    @pytest.mark.parametrize("a", [1.0, 0.5])
    def test_containment(self, a):
        psi = build_psi(EmbeddingConfig(n=2, c=1.0 / a), a)
        X = psi.sample_domain(np.random.default_rng(14), 50_000)
        Y = psi.forward(X)
        assert np.all(np.hypot(Y[:, 0], Y[:, 1]) < DISC_RADIUS)

    def test_symplectic(self):
        psi = build_psi(EmbeddingConfig(n=2, c=2.0), 0.5)
        rep = check_symplectic(psi, 2000, tol=1e-8, seed=1)
        assert rep.passed

    def test_domain_error(self):
        psi = build_psi(EmbeddingConfig(n=2, c=2.0), 0.5)
        with pytest.raises(DomainError):
            psi.forward(np.full(4, DISC_RADIUS))

    def test_invalid_a(self):
        with pytest.raises(ValueError):
            build_psi(EmbeddingConfig(n=2, c=2.0), 1.5)


class TestCheckSymplectic:
    def test_identity_like_map_zero_deviation(self):
        pm = wrap_project(2.0)
        assert symplectic_defect(pm, RNG.uniform(0, 1, (100, 4))).max() == 0.0

    def test_shear_exact(self):
        rep = check_symplectic(shear(2.0), 100, tol=1e-12, seed=2)
        assert rep.max_deviation < 1e-12

    def test_report_fields(self):
        rep = check_symplectic(shear(2.0), 10, tol=1e-12, seed=3)
        d = rep.to_dict()
        assert d["seed"] == 3 and d["samples"] == 10 and d["passed"]

    def test_invalid_samples(self):
        with pytest.raises(ValueError):
            check_symplectic(shear(2.0), 0, tol=1e-12)
