import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcm.objectives import (
    BoxDomain,
    Dataset,
    HeavyTailed,
    SubGaussian,
    make_hinge,
    make_l1_quadratic,
    make_quadratic,
    partial_grad_exact,
    project,
    reference_quadratic,
    restrict,
    sample_loss,
    sample_partial_grad,
    soft_threshold,
    value_exact,
)
from pcm.rng import stream


def tiny_dataset():
    Y = np.array([[1.0, 0.5, -1.0], [0.2, -0.3, 1.0], [-0.7, 0.9, 1.0]])
    Z = np.array([1.0, -1.0, 1.0])
    return Dataset(Y, Z)


class TestBoxDomain:
    def test_interior_point_unchanged(self):
        dom = BoxDomain.cube(2, 0.0, 1.0)
        np.testing.assert_array_equal(project(dom, [0.5, 0.5]), [0.5, 0.5])

    def test_clamps_outside(self):
        dom = BoxDomain.cube(2, 0.0, 1.0)
        np.testing.assert_array_equal(project(dom, [-0.2, 1.7]), [0.0, 1.0])

    def test_boundary_fixed_point(self):
        dom = BoxDomain.cube(1, -1.0, 1.0)
        np.testing.assert_array_equal(project(dom, [-1.0]), [-1.0])

    def test_rejects_non_finite(self):
        dom = BoxDomain.cube(1, 0.0, 1.0)
        with pytest.raises(ValueError):
            project(dom, [np.nan])

    def test_rejects_empty_interval(self):
        with pytest.raises(ValueError):
            BoxDomain(np.array([0.0, 1.0]), np.array([1.0, 1.0]))

    @given(st.lists(st.floats(-1e6, 1e6), min_size=3, max_size=3))
    def test_projection_idempotent_and_inside(self, x):
        dom = BoxDomain(np.array([-1.0, 0.0, 2.0]), np.array([1.0, 0.5, 3.0]))
        p = dom.project(x)
        assert dom.contains(p)
        np.testing.assert_array_equal(dom.project(p), p)

    def test_arrays_read_only(self):
        dom = BoxDomain.cube(2, 0.0, 1.0)
        with pytest.raises(ValueError):
            dom.lo[0] = 5.0


class TestNoise:
    def test_subgaussian_mean_and_mgf(self):
        noise = SubGaussian(np.array([0.5]))
        x = noise.sample(0, stream(1, "t"), 200_000)
        assert abs(x.mean()) < 5 * 0.5 / np.sqrt(x.size)
        for lam in (0.5, 1.0, 2.0):
            # empirical MGF stays under the Gaussian bound exp(lam^2 sigma^2 / 2)
            assert np.exp(lam * x).mean() <= np.exp(lam**2 * 0.25 / 2) * 1.01

    def test_heavy_tailed_moment_finite_and_stable(self):
        noise = HeavyTailed(1.5, 1.0)
        m1 = (np.abs(noise.sample(0, stream(1, "h"), 10**6)) ** 1.5).mean()
        m2 = (np.abs(noise.sample(0, stream(2, "h"), 10**6)) ** 1.5).mean()
        assert np.isfinite(m1) and np.isfinite(m2)
        assert abs(m1 - noise.moment_b()) / noise.moment_b() < 0.1
        assert abs(m1 - m2) / noise.moment_b() < 0.1

    def test_heavy_tailed_zero_mean(self):
        x = HeavyTailed(1.5, 1.0).sample(0, stream(3, "h"), 10**6)
        assert abs(x.mean()) < 0.05

    def test_heavy_tailed_variance_grows(self):
        noise = HeavyTailed(1.5, 1.0)
        small = [noise.sample(0, stream(s, "v"), 10**3).var() for s in range(30)]
        large = [noise.sample(0, stream(s, "v"), 10**6).var() for s in range(30)]
        assert np.median(large) > 2 * np.median(small)

    def test_heavy_tailed_rejects_bad_b(self):
        with pytest.raises(ValueError):
            HeavyTailed(2.0)
        with pytest.raises(ValueError):
            HeavyTailed(1.0)

    def test_tail_index_default(self):
        assert HeavyTailed(1.2).tail_index == pytest.approx(1.2 + 0.75 * 0.8)


class TestQuadratic:
    def test_gradient_zero_at_center(self):
        obj = make_quadratic([0.3, 0.6], BoxDomain.cube(2, 0.0, 1.0))
        assert sample_partial_grad(obj, [0.3, 0.6], 0, stream(0, "g")) == 0.0

    def test_hand_values(self):
        obj = make_quadratic([1.0, 2.0], BoxDomain.cube(2, -3.0, 3.0))
        assert value_exact(obj, [0.0, 0.0]) == pytest.approx(2.5)
        assert partial_grad_exact(obj, [0.0, 0.0], 0) == pytest.approx(-1.0)
        assert partial_grad_exact(obj, [0.0, 0.0], 1) == pytest.approx(-2.0)
        assert value_exact(obj, [1.0, 2.0]) == 0.0

    def test_noisy_gradient_unbiased(self):
        obj = reference_quadratic(3, sigma=0.1)
        x = np.array([0.9, 0.1, 0.5])
        for i in range(3):
            g = sample_partial_grad(obj, x, i, stream(i, "u"), size=10**5)
            assert abs(g.mean() - partial_grad_exact(obj, x, i)) <= 5 * 0.1 / np.sqrt(10**5)

    def test_known_minimum(self):
        obj = make_quadratic(np.zeros(4), BoxDomain.cube(4, -1.0, 1.0))
        np.testing.assert_array_equal(obj.x_star, np.zeros(4))
        assert obj.f_star == 0.0

    def test_rejects_nonpositive_alpha(self):
        with pytest.raises(ValueError):
            make_quadratic([0.0], BoxDomain.cube(1, -1, 1), curvature=0.0)
        with pytest.raises(ValueError):
            make_quadratic([0.0, 0.0], BoxDomain.cube(2, -1, 1), curvature=np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_sampled_convexity_smoothness(self):
        rng = np.random.default_rng(0)
        A = np.array([[2.0, 1.0, 0.0], [1.0, 2.0, 0.5], [0.0, 0.5, 1.0]])
        objs = [
            reference_quadratic(5),
            make_l1_quadratic(np.full(3, 0.2), BoxDomain.cube(3, -1, 1), 0.1, curvature=[1.0, 2.0, 3.0]),
            make_quadratic(np.zeros(3), BoxDomain.cube(3, -1, 1), curvature=A),
        ]
        for obj in objs:
            for _ in range(1000):
                x, y = obj.domain.sample(rng), obj.domain.sample(rng)
                gx, gy = obj.grad_psi(x), obj.grad_psi(y)
                lhs = obj.psi(y)
                rhs = obj.psi(x) + gx @ (y - x) + 0.5 * obj.alpha * np.sum((y - x) ** 2)
                assert lhs >= rhs - 1e-12
                assert np.linalg.norm(gx - gy) <= obj.beta * np.linalg.norm(x - y) + 1e-12

    def test_l1_minimizer_soft_threshold(self):
        c = np.array([1.0, 0.05, -0.4, 0.2])
        obj = make_l1_quadratic(c, BoxDomain.cube(4, -2, 2), 0.1, curvature=2.0)
        np.testing.assert_allclose(obj.x_star, soft_threshold(c, 0.1 / 2.0))
        grid = np.linspace(-2, 2, 400_001)
        for i in range(4):
            vals = 0.5 * 2.0 * (grid - c[i]) ** 2 + 0.1 * np.abs(grid)
            assert abs(grid[np.argmin(vals)] - obj.x_star[i]) < 2e-5

    def test_l1_subgradient_zero_at_kink(self):
        obj = make_l1_quadratic([0.0], BoxDomain.cube(1, -1, 1), 0.5)
        assert obj.phi_subgrad(0, 0.0) == 0.0
        assert partial_grad_exact(obj, [0.0], 0) == 0.0

    def test_separability(self):
        obj = make_l1_quadratic(np.full(3, 0.1), BoxDomain.cube(3, -1, 1), [0.1, 0.2, 0.3])
        x = np.array([0.5, -0.5, 0.25])
        y = x.copy()
        y[2] = -0.9
        assert obj.phi_subgrad(0, x[0]) == obj.phi_subgrad(0, y[0])
        assert obj.phi(y) - obj.phi(x) == pytest.approx(0.3 * (0.9 - 0.25))

    def test_default_g_max(self):
        obj = reference_quadratic(2, sigma=0.1)
        # worst |x_i - 0.3| on [0, 1] is 0.7, plus 3 sigma
        assert obj.g_max == pytest.approx(1.0)

    def test_sample_loss_at_minimizer(self):
        obj = make_quadratic([0.3], BoxDomain.cube(1, 0, 1))
        assert sample_loss(obj, [0.3], stream(0, "l")) == obj.f_star


class TestRestriction:
    def test_minimizer_at_anchor_center(self):
        obj = make_quadratic([0.2, 0.7], BoxDomain.cube(2, 0, 1))
        for i in range(2):
            assert restrict(obj, obj.center, i).minimizer() == pytest.approx(obj.center[i])

    def test_gradient_matches_partial(self):
        obj = make_l1_quadratic([0.2, -0.4, 0.1], BoxDomain.cube(3, -1, 1), 0.05, curvature=[1.0, 3.0, 2.0])
        anchor = np.array([0.3, 0.5, -0.2])
        r = restrict(obj, anchor, 1)
        for s in np.linspace(-1, 1, 17):
            x = anchor.copy()
            x[1] = s
            assert r.grad(s) == pytest.approx(partial_grad_exact(obj, x, 1))
            assert r.value(s) == pytest.approx(value_exact(obj, x))

    def test_coupled_quadratic_restricted_minimizer(self):
        # f = x1^2 + x1 x2 + x2^2 as 1/2 x^T A x with A = [[2, 1], [1, 2]]
        A = np.array([[2.0, 1.0], [1.0, 2.0]])
        obj = make_quadratic([0.0, 0.0], BoxDomain.cube(2, -1, 1), curvature=A)
        r = restrict(obj, [0.9, 0.5], 0)
        assert r.minimizer() == pytest.approx(-0.25)
        grid = np.linspace(-1, 1, 200_001)
        assert grid[np.argmin(r.value(grid))] == pytest.approx(-0.25, abs=1e-5)

    def test_inherits_constants(self):
        obj = reference_quadratic(3, sigma=0.2)
        r = restrict(obj, obj.domain.center(), 2)
        assert (r.lo, r.hi) == (0.0, 1.0)
        assert (r.alpha, r.beta, r.g_max, r.sigma) == (obj.alpha, obj.beta, obj.g_max, 0.2)

    def test_cursor_tracks_value(self):
        A = np.array([[2.0, 0.3], [0.3, 1.0]])
        obj = make_l1_quadratic([0.1, 0.2], BoxDomain.cube(2, -1, 1), 0.1, curvature=A)
        cur = obj.cursor([0.0, 0.0])
        rng = np.random.default_rng(1)
        for _ in range(50):
            i = int(rng.integers(2))
            cur.set(i, float(rng.uniform(-1, 1)))
            assert cur.value() == pytest.approx(obj.value(cur.point), abs=1e-12)


class TestHinge:
    def test_gradient_at_origin(self):
        ds = tiny_dataset()
        obj = make_hinge(ds, 0.1)
        rng = stream(4, "h")
        # the same draw selects record n: -Z_n Y_{n,i}
        n = int(stream(4, "h").integers(ds.n))
        g = sample_partial_grad(obj, np.zeros(3), 1, rng)
        assert g == pytest.approx(-ds.labels[n] * ds.features[n, 1])

    def test_loss_at_origin_is_one(self):
        obj = make_hinge(tiny_dataset(), 0.1)
        rng = stream(0, "l")
        assert all(sample_loss(obj, np.zeros(3), rng) == 1.0 for _ in range(20))

    def test_value_is_mean_of_record_losses(self):
        ds = tiny_dataset()
        obj = make_hinge(ds, 0.1)
        x = np.array([0.3, -0.2, 0.5])
        per = np.maximum(0, 1 - ds.labels * (ds.features @ x)) + 0.05 * x @ x
        assert value_exact(obj, x) == pytest.approx(per.mean())

    def test_noisy_gradient_unbiased(self):
        ds = tiny_dataset()
        obj = make_hinge(ds, 0.1)
        x = np.array([0.3, -0.2, 0.5])
        g = sample_partial_grad(obj, x, 0, stream(0, "u"), size=10**5)
        assert abs(g.mean() - partial_grad_exact(obj, x, 0)) < 5 * np.abs(ds.features).max() / np.sqrt(10**5)

    def test_constants(self):
        ds = tiny_dataset()
        obj = make_hinge(ds, 1.2e-2)
        assert obj.alpha == 1.2e-2
        sq = (ds.features**2).sum(axis=1).max()
        assert obj.beta == pytest.approx(1.2e-2 + sq / 3)
        assert obj.radius == pytest.approx(np.sqrt(2 / 1.2e-2))

    def test_restriction_consistent(self):
        ds = tiny_dataset()
        obj = make_hinge(ds, 0.1)
        anchor = np.array([0.3, -0.2, 0.5])
        r = restrict(obj, anchor, 2)
        for s in np.linspace(-2, 2, 9):
            x = anchor.copy()
            x[2] = s
            assert r.value(s) == pytest.approx(value_exact(obj, x))
            assert r.grad(s) == pytest.approx(partial_grad_exact(obj, x, 2))
        np.testing.assert_allclose(r.value(np.linspace(-2, 2, 9)), [r.value(s) for s in np.linspace(-2, 2, 9)])

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            make_hinge(tiny_dataset(), 0.0)
        with pytest.raises(ValueError):
            Dataset(np.empty((0, 3)), np.empty(0))
        with pytest.raises(ValueError):
            Dataset(np.ones((2, 2)), np.array([1.0, 0.0]))
        with pytest.raises(ValueError):
            Dataset(np.array([[np.inf, 1.0]]), np.array([1.0]))

    def test_cursor_refresh_keeps_margins(self):
        ds = tiny_dataset()
        obj = make_hinge(ds, 0.1)
        cur = obj.cursor(np.zeros(3))
        rng = np.random.default_rng(0)
        for _ in range(2500):
            cur.set(int(rng.integers(3)), float(rng.uniform(-2, 2)))
        assert cur.value() == pytest.approx(obj.value(cur.point), abs=1e-12)

    def test_dataset_digest_stable(self):
        assert tiny_dataset().digest() == tiny_dataset().digest()


@settings(max_examples=50, deadline=None)
@given(st.floats(-2, 2), st.floats(0.01, 1.0), st.floats(0.1, 5.0))
def test_restricted_minimizer_is_grid_optimal(c, lam, a):
    obj = make_l1_quadratic([c], BoxDomain.cube(1, -1, 1), lam, curvature=a)
    r = restrict(obj, [0.0], 0)
    m = r.minimizer()
    grid = np.linspace(-1, 1, 20_001)
    assert r.value(m) <= r.value(grid).min() + 1e-12
