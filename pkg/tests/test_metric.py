import numpy as np
import pytest
from scipy.integrate import quad

from degenlab import (
    CoefficientProfile,
    PowerDegenerate,
    RadialShell,
    StronglyElliptic,
    ball_volume,
    build_mesh,
    distance_1d,
    distance_field,
    holder_fit,
)


def power1d(delta, domain=(-8.0, 8.0)):
    return CoefficientProfile(1, PowerDegenerate(delta, ((0.0,),)), domain)


def c_delta_inv_sqrt(delta):
    return lambda z: ((1 + z * z) / (z * z)) ** (delta / 2.0)


class TestDistance1D:
    def test_unit_coefficient(self):
        p = power1d(0.0)
        assert distance_1d(p, -1.0, 2.5) == pytest.approx(3.5, rel=1e-12)

    def test_small_y_model(self):
        # d(0, y) ~ y^{1-delta}/(1-delta) near the degeneracy
        p = power1d(0.5)
        d = distance_1d(p, 0.0, 0.01)
        assert d == pytest.approx(2.0 * 0.01**0.5, rel=0.01)

    @pytest.mark.parametrize("delta", [0.25, 0.5, 0.75])
    def test_adaptive_quadrature_oracle(self, delta):
        # independent oracle: scipy adaptive rule on the exact integrand
        p = power1d(delta)
        for y in (0.01, 0.3, 1.7):
            oracle, err = quad(c_delta_inv_sqrt(delta), 0.0, y, points=[0.0], limit=400)
            assert distance_1d(p, 0.0, y) == pytest.approx(oracle, rel=1e-7)

    def test_symmetry(self):
        p = power1d(0.6)
        assert distance_1d(p, -0.7, 1.3) == distance_1d(p, 1.3, -0.7)

    def test_crossing_the_degeneracy(self):
        p = power1d(0.5)
        both = distance_1d(p, -1.0, 1.0)
        halves = distance_1d(p, -1.0, 0.0) + distance_1d(p, 0.0, 1.0)
        assert both == pytest.approx(halves, rel=1e-10)

    def test_epsilon_monotone_nondecreasing(self):
        p = power1d(0.75)
        eps = [2.0**-k for k in range(0, 29)]
        vals = [distance_1d(p, -1.0, 1.0, e) for e in eps]
        assert all(b >= a for a, b in zip(vals, vals[1:]))
        # sup over eps approaches the eps = 0 value from below; the gap
        # closes like eps^{(1-delta)/(2 delta)} = eps^{1/6} here
        v0 = distance_1d(p, -1.0, 1.0, 0.0)
        assert vals[-1] <= v0
        assert v0 - vals[-1] < 0.05 * v0

    @pytest.mark.parametrize("delta", [0.1, 0.25, 0.5, 0.75, 0.9])
    def test_finite_for_all_builtin_deltas(self, delta):
        assert np.isfinite(distance_1d(power1d(delta), -2.0, 2.0))

    def test_infinite_across_plateau(self):
        # annular plateau in 1D: c vanishes identically on an interval
        p = CoefficientProfile(1, RadialShell(0.5, 1.0, width=0.2), (-4.0, 4.0))
        assert distance_1d(p, 0.0, 2.0) == np.inf
        assert np.isfinite(distance_1d(p, -0.5, 0.5))

    def test_lower_euclidean_bound(self):
        p = power1d(0.75)
        for a, b in ((-2.0, 1.0), (0.5, 3.0)):
            d = distance_1d(p, a, b)
            assert d >= abs(b - a) / np.sqrt(p.norm_bound) - 1e-10


class TestDistanceField:
    def test_1d_matches_quadrature(self):
        p = power1d(0.5, domain=(-4.0, 4.0))
        mesh = build_mesh(1, (-4.0, 4.0), 1024)
        fld = distance_field(p, mesh, (0.0,))
        assert fld.values[mesh.nearest_index((0.0,))] == 0.0
        for target in (0.25, 1.0, -2.5, 3.5):
            i = mesh.nearest_index((target,))
            ref = distance_1d(p, min(0.0, target), max(0.0, target))
            assert abs(fld.values[i] - ref) <= 0.005 * ref

    def test_constant_metric_scaling(self):
        mu = 4.0
        p = CoefficientProfile(1, StronglyElliptic(np.array([[mu]])), (-2.0, 2.0))
        mesh = build_mesh(1, (-2.0, 2.0), 256)
        fld = distance_field(p, mesh, (0.0,))
        xs = mesh.axis(0)
        assert np.allclose(fld.values, np.abs(xs) / np.sqrt(mu), atol=1e-10)

    def test_octile_bound_2d(self):
        p = CoefficientProfile(2, PowerDegenerate(0.0, ((0.0, 0.0),)), (-2.0, 2.0))
        mesh = build_mesh(2, (-2.0, 2.0), 48)
        fld = distance_field(p, mesh, (0.0, 0.0))
        pts = mesh.points()
        eu = np.linalg.norm(pts, axis=1)
        sel = eu > 0.25
        ratio = fld.values[sel] / eu[sel]
        assert ratio.max() <= 1.083
        assert ratio.min() >= 1.0 - 1e-12

    def test_triangle_inequality_sampled(self):
        p = power1d(0.5, domain=(-4.0, 4.0))
        mesh = build_mesh(1, (-4.0, 4.0), 512)
        f0 = distance_field(p, mesh, (0.0,))
        f1 = distance_field(p, mesh, (1.0,))
        i1 = mesh.nearest_index((1.0,))
        rng = np.random.default_rng(5)
        for j in rng.integers(0, mesh.size, 32):
            lhs = f0.values[j]
            rhs = f0.values[i1] + f1.values[j]
            assert lhs <= rhs + 1e-9

    def test_monotone_in_epsilon(self):
        p = power1d(0.5, domain=(-4.0, 4.0))
        mesh = build_mesh(1, (-4.0, 4.0), 256)
        f_small = distance_field(p, mesh, (0.0,), epsilon=1e-4)
        f_big = distance_field(p, mesh, (0.0,), epsilon=1e-1)
        assert np.all(f_small.values >= f_big.values - 1e-12)

    def test_unreachable_is_inf(self):
        # 2D annular plateau: outside is metrically disconnected from inside
        p = CoefficientProfile(2, RadialShell(0.75, 1.0, width=0.3), (-2.0, 2.0))
        mesh = build_mesh(2, (-2.0, 2.0), 32)
        fld = distance_field(p, mesh, (0.0, 0.0))
        pts = mesh.points()
        outside = np.linalg.norm(pts, axis=1) > 1.4
        assert np.all(np.isinf(fld.values[outside]))


class TestBallVolume:
    def test_r_zero_convention(self):
        p = power1d(0.0, domain=(-1.0, 1.0))
        mesh = build_mesh(1, (-1.0, 1.0), 64)
        fld = distance_field(p, mesh, (0.0,))
        assert ball_volume(fld, 0.0) == pytest.approx(mesh.cell_volume)

    def test_interval_length(self):
        p = power1d(0.0, domain=(-1.0, 1.0))
        mesh = build_mesh(1, (-1.0, 1.0), 512)
        fld = distance_field(p, mesh, (0.0,))
        for r in (0.1, 0.33, 0.8):
            assert abs(ball_volume(fld, r) - 2 * r) <= 2 * mesh.h

    def test_degenerate_ball_inversion(self):
        # delta = 0.5: d(0, y) ~ 2 sqrt(y) so |B(0; r)| ~ r^2 / 2; radii are
        # restricted to balls at least ~20 cells wide (below that the grid
        # cannot resolve the quadratically shrinking ball)
        p = power1d(0.5, domain=(-1.0, 1.0))
        mesh = build_mesh(1, (-1.0, 1.0), 4096)
        fld = distance_field(p, mesh, (0.0,))
        for r in (0.15, 0.25, 0.4):
            assert ball_volume(fld, r) == pytest.approx(r**2 / 2.0, rel=0.05)

    def test_mask_restriction(self):
        p = power1d(0.0, domain=(-1.0, 1.0))
        mesh = build_mesh(1, (-1.0, 1.0), 128)
        fld = distance_field(p, mesh, (0.0,))
        mask = mesh.axis(0) > 0
        assert ball_volume(fld, 0.5, mask=mask) == pytest.approx(0.5, abs=2 * mesh.h)


class TestHolderFit:
    @pytest.mark.parametrize(
        "delta,expect", [(0.0, 1.0), (0.25, 0.75), (0.5, 0.5), (0.75, 0.25)]
    )
    def test_recovers_comparison_exponent(self, delta, expect):
        fit = holder_fit(power1d(delta), 0.0, (1e-3, 1e-1))
        tol = 0.01 if delta == 0.0 else 0.02
        assert abs(fit.gamma_hat - expect) <= tol

    def test_prefactor_for_half(self):
        # d ~ y^{1/2} / (1/2) = 2 sqrt(y)
        fit = holder_fit(power1d(0.5), 0.0, (1e-3, 1e-2))
        assert fit.a_hat == pytest.approx(2.0, rel=0.02)

    def test_needs_enough_samples(self):
        with pytest.raises(ValueError):
            holder_fit(power1d(0.5), 0.0, (1e-3, 1e-1), nsamples=5)

    def test_field_input(self):
        p = power1d(0.5, domain=(-4.0, 4.0))
        mesh = build_mesh(1, (-4.0, 4.0), 4096)
        fld = distance_field(p, mesh, (0.0,))
        fit = holder_fit(fld, (0.0,), (2e-2, 0.5))
        assert abs(fit.gamma_hat - 0.5) <= 0.05


class TestExports:
    def test_distance_and_volume_csv(self, tmp_path):
        from degenlab import ball_volumes_to_csv, distance_field_to_csv

        p = CoefficientProfile(1, RadialShell(0.75, 1.0, width=0.3), (-2.0, 2.0))
        mesh = build_mesh(1, (-2.0, 2.0), 64)
        fld = distance_field(p, mesh, (0.0,))
        path = tmp_path / "d.csv"
        distance_field_to_csv(fld, path)
        body = path.read_text()
        assert body.splitlines()[0] == "x,d"
        assert "inf" in body  # outside the plateau shell is unreachable
        ball_volumes_to_csv(fld, [0.1, 0.5, 1.0], tmp_path / "vol.csv")
        assert (tmp_path / "vol.csv").read_text().splitlines()[0] == "r,volume"
