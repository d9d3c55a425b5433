"""Intrinsic pseudodistance of a coefficient field and derived geometry.

In 1D the distance between x and y is the integral of (c + eps)^(-1/2),
computed by graded quadrature that is exact about each declared degeneracy
and deterministic: the same nodes serve every epsilon, so epsilon-monotone
families of distances come out exactly monotone.  On meshes, distance fields
are Dijkstra shortest paths on the 2-neighbor (1D) or 8-neighbor (2D) grid
graph with metric edge weights; +inf is a first-class value (unreachable
components across exact cuts).
"""

import heapq
from dataclasses import dataclass

import numpy as np

from .coeffs import CoefficientProfile, PowerDegenerate, RadialShell
from .quadrature import graded_tail, integrate_graded

# 8-point Gauss-Legendre on [0, 1] for near-degenerate edge weights
_G8_X, _G8_W = np.polynomial.legendre.leggauss(8)
_G8_X = 0.5 * (_G8_X + 1.0)
_G8_W = 0.5 * _G8_W


@dataclass
class DistanceField:
    origin: object  # point (tuple) or source index list
    values: np.ndarray
    epsilon: float
    method: str
    mesh: object

    def at_index(self, i):
        return float(self.values[i])


def _inv_sqrt_section(profile, epsilon):
    """Integrand (c(s) + eps_total)^(-1/2) as a function of the signed offset
    from a degeneracy center; safe at tiny offsets."""
    sect = profile.normal_section()
    shift = epsilon

    def f(s):
        return 1.0 / np.sqrt(np.maximum(sect(s) + shift, 1e-300))

    return f


def distance_1d(profile: CoefficientProfile, x: float, y: float, epsilon: float = 0.0):
    """d_{C_eps}(x, y) = int_x^y (c + eps)^(-1/2) dz; +inf when the integral
    diverges (possible only for custom non-integrable profiles)."""
    if profile.dimension != 1:
        raise ValueError("distance_1d needs a 1D profile")
    if not profile.is_scalar:
        raise ValueError("distance_1d needs a scalar profile")
    x, y = float(x), float(y)
    if x == y:
        return 0.0
    if x > y:
        x, y = y, x

    centers = [z for z in _degeneracy_points(profile) if x < z < y]
    eps = epsilon

    # segment endpoints: x, interior degeneracies, y
    knots = [x] + centers + [y]
    total = 0.0
    for a, b in zip(knots[:-1], knots[1:]):
        total += _segment_distance(profile, a, b, eps)
        if not np.isfinite(total):
            return np.inf
    return float(total)


def _degeneracy_points(profile):
    try:
        return profile.axis_degeneracies()
    except ValueError:
        return []


def _is_degeneracy(profile, z):
    return any(abs(z - c) < 1e-14 for c in _degeneracy_points(profile))


def _segment_distance(profile, a, b, eps):
    """Integrate (c+eps)^(-1/2) over [a, b], split at the midpoint and graded
    toward both endpoints (exact about centers, merely overcautious about
    smooth endpoints); a divergent graded tail yields +inf."""
    if b - a <= 0:
        return 0.0
    mid = 0.5 * (a + b)
    left = _graded_or_inf(_offset_integrand(profile, a, +1.0, eps), mid - a)
    right = _graded_or_inf(_offset_integrand(profile, b, -1.0, eps), b - mid)
    return left + right


def _offset_integrand(profile, z0, side, eps):
    """(c + eps)^(-1/2) at exact offsets rho from the center z0, using the
    family's normal section to avoid cancellation at tiny rho."""
    fam = profile.family
    if isinstance(fam, (PowerDegenerate, RadialShell)) and _is_degeneracy(profile, z0):
        sect = _inv_sqrt_section(profile, eps)
        return lambda rho: sect(side * rho)

    def f(rho):
        vals = profile.scalar_values(z0 + side * rho) + eps
        return 1.0 / np.sqrt(np.maximum(vals, 1e-300))

    return f


def _graded_or_inf(f_offset, span):
    """Convergent graded integral, or +inf when the dyadic tail diverges.
    The divergence threshold is far above any finite d_{C_eps} of interest;
    genuine divergence is caught by the piece-ratio test."""
    if span <= 0:
        return 0.0
    probe = graded_tail(f_offset, span, levels=52, div_threshold=1e15, strict=True)
    if probe.divergent:
        return np.inf
    if np.isfinite(probe.value):
        return probe.value
    return integrate_graded(f_offset, span, levels=52)


# ---------------------------------------------------------------------------
# grid distance fields


def distance_field(
    profile: CoefficientProfile,
    mesh,
    origin,
    epsilon: float = 0.0,
    sources=None,
    edge_floor: float = 1e-6,
) -> DistanceField:
    """Dijkstra distance field from the origin point (or the given source
    index set) on the grid graph with edge weights length * (c + eps)^(-1/2)
    sampled at edge midpoints; near-degenerate edges get an 8-point Gauss
    sub-quadrature along the edge, and the two edges abutting a declared 1D
    center use the exact graded integral."""
    if sources is None:
        sources = [mesh.nearest_index(origin)]
    heads, tails, weights = _edge_graph(profile, mesh, epsilon, edge_floor)
    N = mesh.size
    adj_index = [[] for _ in range(N)]
    for e, (i, j) in enumerate(zip(heads, tails)):
        adj_index[i].append(e)
        adj_index[j].append(e)
    dist = np.full(N, np.inf)
    heap = []
    for s in sources:
        dist[s] = 0.0
        heapq.heappush(heap, (0.0, int(s)))
    seen = np.zeros(N, dtype=bool)
    while heap:
        d, i = heapq.heappop(heap)
        if seen[i]:
            continue
        seen[i] = True
        for e in adj_index[i]:
            j = tails[e] if heads[e] == i else heads[e]
            w = weights[e]
            if not np.isfinite(w) or seen[j]:
                continue
            nd = d + w
            if nd < dist[j]:
                dist[j] = nd
                heapq.heappush(heap, (nd, int(j)))
    return DistanceField(origin, dist, epsilon, "GraphGeodesic", mesh)


def _edge_graph(profile, mesh, epsilon, edge_floor):
    """Edge list (heads, tails, weights) of the 2-/8-neighbor grid graph."""
    pts = mesh.points()
    N = mesh.size
    if mesh.dimension == 1:
        pairs = [(np.arange(N - 1), np.arange(1, N))]
    else:
        npa = mesh.points_per_axis
        grid = np.arange(N).reshape(npa, npa)
        pairs = [
            (grid[:-1, :].ravel(), grid[1:, :].ravel()),  # +x
            (grid[:, :-1].ravel(), grid[:, 1:].ravel()),  # +y
            (grid[:-1, :-1].ravel(), grid[1:, 1:].ravel()),  # diagonal
            (grid[1:, :-1].ravel(), grid[:-1, 1:].ravel()),  # anti-diagonal
        ]
    heads = np.concatenate([p[0] for p in pairs])
    tails = np.concatenate([p[1] for p in pairs])
    a = pts[heads]
    b = pts[tails]
    mids = 0.5 * (a + b)
    lengths = np.linalg.norm(b - a, axis=1)
    c_mid = profile.scalar_values(mids) + epsilon
    with np.errstate(divide="ignore"):
        weights = lengths / np.sqrt(c_mid)

    refine = c_mid < max(edge_floor, 0.0) ** 2
    near = _near_degenerate_edges(profile, mids, mesh.h)
    for e in np.nonzero(refine | near)[0]:
        weights[e] = _edge_weight_quadrature(profile, a[e], b[e], epsilon, mesh.h)
    return heads, tails, weights


def _near_degenerate_edges(profile, mids, h):
    try:
        rho = profile.rho_values(mids)
    except ValueError:
        return np.zeros(mids.shape[0], dtype=bool)
    return rho <= 8.0 * h


def _edge_weight_quadrature(profile, a, b, epsilon, h):
    """Metric length of the edge a-b by Gauss sub-quadrature; for 1D edges
    that touch a declared center, the exact graded integral instead."""
    if profile.dimension == 1:
        x0, x1 = sorted((a[0], b[0]))
        for z in _degeneracy_points(profile):
            if x0 - 1e-12 <= z <= x1 + 1e-12:
                f_r = _offset_integrand(profile, z, +1.0, epsilon)
                f_l = _offset_integrand(profile, z, -1.0, epsilon)
                right = _graded_or_inf(f_r, x1 - z) if x1 > z else 0.0
                left = _graded_or_inf(f_l, z - x0) if z > x0 else 0.0
                return left + right
    seg = a + np.outer(_G8_X, b - a)
    vals = profile.scalar_values(seg) + epsilon
    length = float(np.linalg.norm(b - a))
    with np.errstate(divide="ignore"):
        integrand = 1.0 / np.sqrt(vals)
    return length * float(np.dot(_G8_W, integrand))


# ---------------------------------------------------------------------------
# derived quantities


def ball_volume(field: DistanceField, r: float, mask=None) -> float:
    """Lebesgue volume of the ball {d < r} on the mesh (cell count times cell
    volume).  Convention: r = 0 returns the volume of the zero set, i.e. one
    cell for a point origin."""
    if r < 0:
        raise ValueError("r must be >= 0")
    vals = field.values
    inside = vals <= 0.0 if r == 0.0 else vals < r
    if mask is not None:
        inside = inside & mask
    return float(np.count_nonzero(inside) * field.mesh.cell_volume)


def distance_field_to_csv(field: DistanceField, path):
    """CSV rows (x[, y], d); +inf serializes as 'inf'."""
    import csv

    pts = field.mesh.points()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "d"] if pts.shape[1] == 1 else ["x", "y", "d"])
        for p, v in zip(pts, field.values):
            w.writerow([format(c, ".17g") for c in p] + ["inf" if np.isinf(v) else format(v, ".17g")])


def ball_volumes_to_csv(field: DistanceField, radii, path, mask=None):
    """CSV rows (r, volume) over the given radii."""
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["r", "volume"])
        for r in radii:
            w.writerow([format(float(r), ".17g"), format(ball_volume(field, float(r), mask), ".17g")])


@dataclass
class HolderFit:
    gamma_hat: float
    a_hat: float
    residual: float
    stderr: float


def holder_fit(profile_or_field, origin, sample_range, epsilon=0.0, nsamples=12) -> HolderFit:
    """Least-squares slope of log d versus log |x - y| on radii approaching
    the degeneracy; the slope estimates the comparison exponent of the metric
    against the Euclidean one."""
    if nsamples < 12:
        raise ValueError("need at least 12 sample radii")
    r_lo, r_hi = sample_range
    if not 0 < r_lo < r_hi:
        raise ValueError("sample range must satisfy 0 < lo < hi")
    radii = np.geomspace(r_lo, r_hi, nsamples)
    if isinstance(profile_or_field, CoefficientProfile):
        origin = float(np.atleast_1d(origin)[0])
        dists = np.array(
            [distance_1d(profile_or_field, origin, origin + r, epsilon) for r in radii]
        )
    else:
        field = profile_or_field
        pts = field.mesh.points()
        o = np.atleast_1d(np.asarray(origin, dtype=float))
        eu = np.linalg.norm(pts - o, axis=1)
        dists = np.array(
            [field.values[np.argmin(np.abs(eu - r))] for r in radii]
        )
    good = np.isfinite(dists) & (dists > 0)
    radii, dists = radii[good], dists[good]
    lx, ly = np.log(radii), np.log(dists)
    if len(lx) < 3 or np.ptp(lx) == 0:
        raise ValueError("degenerate fit: not enough spread in samples")
    A = np.column_stack([lx, np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    fit = A @ coef
    resid = ly - fit
    dof = max(len(lx) - 2, 1)
    sxx = np.sum((lx - lx.mean()) ** 2)
    stderr = float(np.sqrt(np.sum(resid**2) / dof / sxx))
    return HolderFit(
        gamma_hat=float(coef[0]),
        a_hat=float(np.exp(coef[1])),
        residual=float(np.abs(resid).max()),
        stderr=stderr,
    )
