"""Actions of the discrete semigroup e^{-tA}, the wave propagator
cos(t A^{1/2}), and resolvent powers (I + r^2 A)^{-m}.

The default exponential action is a Chebyshev polynomial approximation of
exp(-t x) on the Gershgorin interval [0, lambda_max].  Coefficients come from
scaled modified Bessel functions, so the polynomial reproduces exp exactly at
the spectrum endpoints in exact arithmetic; in particular p(A) 1 = 1 to
machine precision (zero row sums), and sparse matrix-vector products keep
decoupled blocks exactly decoupled.  The required degree grows like
sqrt(t * lambda_max), with squaring-free substepping past the degree cap.

For 1D operators (tridiagonal matrices) a full eigendecomposition is cheap up
to a few thousand points and is the preferred backend for whole-diagonal
kernel scans; it is cached on the operator and optionally memoized on disk
under $DEGENLAB_CACHE.
"""

import hashlib
import os
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh, eigh_tridiagonal, solveh_banded
from scipy.special import ive

from .errors import CflError, SolverError
from .grid import DiscreteOperator

EIG_POINT_CAP = 4200  # dense eigenvector matrix stays comfortably in memory
CHEB_DEGREE_CAP = 24_000
DEFAULT_TOL = 1e-12


@dataclass
class HeatField:
    """Density vector at a given time; sum(values) * cell_volume is mass."""

    values: np.ndarray
    time: float
    mesh: object
    source: int | None = None

    @property
    def mass(self):
        return float(self.values.sum() * self.mesh.cell_volume)


@dataclass
class WaveField:
    displacement: np.ndarray
    previous: np.ndarray
    time: float
    dt: float
    energy_drift: float = 0.0


# ---------------------------------------------------------------------------
# eigendecomposition backend


def operator_eig(op: DiscreteOperator, point_cap=EIG_POINT_CAP):
    """Full spectrum and eigenvectors of the operator; cached on the operator
    object and, when $DEGENLAB_CACHE is set, memoized on disk."""
    if op._eig is not None:
        return op._eig
    N = op.size
    if N > point_cap:
        raise ValueError(f"eigendecomposition disabled for N={N} > {point_cap}")
    cache_dir = os.environ.get("DEGENLAB_CACHE")
    key = None
    if cache_dir:
        A = op.matrix.tocsr()
        hval = hashlib.sha256()
        hval.update(A.indptr.tobytes())
        hval.update(A.indices.tobytes())
        hval.update(A.data.tobytes())
        key = os.path.join(cache_dir, f"eig_{hval.hexdigest()[:24]}.npz")
        if os.path.exists(key):
            data = np.load(key)
            op._eig = (data["lam"], data["V"])
            return op._eig
    if op.mesh.dimension == 1:
        d = op.matrix.diagonal()
        e = op.matrix.diagonal(1)
        lam, V = eigh_tridiagonal(d, e)
    else:
        lam, V = eigh(op.matrix.toarray())
    lam = np.maximum(lam, 0.0)
    op._eig = (lam, V)
    if key:
        os.makedirs(cache_dir, exist_ok=True)
        np.savez(key, lam=lam, V=V)
    return op._eig


def _eig_expm_apply(op, phi, t):
    lam, V = operator_eig(op)
    return V @ (np.exp(-t * lam) * (V.T @ phi))


# ---------------------------------------------------------------------------
# Chebyshev exponential action


def _cheb_coefficients(a, tol):
    """Coefficients c_k with exp(-a(1+xi)) = sum c_k T_k(xi) on [-1, 1]:
    c_0 = e^{-a} I_0(a), c_k = 2 e^{-a} (-1)^k I_k(a)."""
    guess = int(np.sqrt(80.0 * max(a, 1.0))) + 80
    k = np.arange(guess + 1)
    mags = ive(k, a)
    tails = mags[::-1].cumsum()[::-1]
    keep = np.nonzero(tails > 0.25 * tol)[0]
    deg = int(keep[-1]) + 1 if keep.size else 1
    deg = min(deg, guess)
    c = mags[: deg + 1].copy()
    c[1:] *= 2.0
    c[1::2] *= -1.0
    return c


def _cheb_expm_apply(op, phi, t, tol):
    """p(A) phi with p ~ exp(-t .) uniformly on [0, lambda_max] within tol."""
    lmax = op.spectral_norm_bound
    a = 0.5 * t * lmax
    if a == 0.0:
        return phi.copy()
    nsub = 1
    deg_est = int(np.sqrt(80.0 * max(a, 1.0))) + 80
    if deg_est > CHEB_DEGREE_CAP:
        nsub = int(np.ceil(80.0 * a / CHEB_DEGREE_CAP**2)) + 1
    c = _cheb_coefficients(a / nsub, tol / nsub)
    A = op.matrix
    scale = 2.0 / lmax
    y = phi
    for _ in range(nsub):
        w_prev = y
        w = scale * (A @ y) - y  # T_1(M) y with M = (2/lmax) A - I
        acc = c[0] * w_prev + (c[1] * w if len(c) > 1 else 0.0)
        for ck in c[2:]:
            # T_{k+1} = 2 M T_k - T_{k-1}
            w_prev, w = w, 2.0 * scale * (A @ w) - 2.0 * w - w_prev
            acc = acc + ck * w
        y = acc
    return y


# ---------------------------------------------------------------------------
# implicit backends


def _factorized_shift_solver(op, coef):
    """Solver for (I + coef * A) u = v; banded Cholesky in 1D, sparse LU
    otherwise."""
    N = op.size
    if op.mesh.dimension == 1:
        ab = np.zeros((2, N))
        ab[1] = 1.0 + coef * op.matrix.diagonal()
        ab[0, 1:] = coef * op.matrix.diagonal(1)

        def solve(v):
            return solveh_banded(ab, v)

        return solve
    M = (sp.identity(N, format="csc") + coef * op.matrix.tocsc()).tocsc()
    lu = sp.linalg.splu(M)
    return lu.solve


def _implicit_evolve(op, phi, t, dt, theta):
    """theta = 1: backward Euler; theta = 0.5: Crank-Nicolson."""
    nsteps = max(int(np.ceil(t / dt - 1e-12)), 1)
    step = t / nsteps
    solve = _factorized_shift_solver(op, theta * step)
    u = phi.astype(float, copy=True)
    explicit = (1.0 - theta) * step
    for _ in range(nsteps):
        rhs = u if explicit == 0.0 else u - explicit * (op.matrix @ u)
        u = solve(rhs)
    return u


# ---------------------------------------------------------------------------
# public operations


def heat_evolve(
    op: DiscreteOperator,
    phi0,
    t: float,
    backend: str = "chebyshev",
    tol: float = DEFAULT_TOL,
    dt: float | None = None,
) -> HeatField:
    """Approximation of e^{-tA} phi0.

    Backends: 'chebyshev' (uniform error <= tol * ||phi0||_2 on the Gershgorin
    interval), 'eig' (exact up to roundoff, 1D / small N), 'backward_euler'
    (first order, unconditionally positivity preserving for M-matrices),
    'crank_nicolson' (second order in dt).
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    phi0 = np.asarray(phi0, dtype=float)
    if t == 0.0:
        return HeatField(phi0.copy(), 0.0, op.mesh)
    if backend == "chebyshev":
        vals = _cheb_expm_apply(op, phi0, t, tol)
    elif backend == "eig":
        vals = _eig_expm_apply(op, phi0, t)
    elif backend == "backward_euler":
        vals = _implicit_evolve(op, phi0, t, dt or t / 128.0, theta=1.0)
    elif backend == "crank_nicolson":
        vals = _implicit_evolve(op, phi0, t, dt or t / 256.0, theta=0.5)
    else:
        raise ValueError(f"unknown backend '{backend}'")
    return HeatField(vals, t, op.mesh)


def kernel_column(op: DiscreteOperator, source_index: int, t: float, backend="chebyshev"):
    """Heat kernel column K_t(. ; y_source) as a density: the delta datum
    carries 1/cell_volume so values approximate the continuum kernel."""
    if t <= 0:
        raise ValueError("t must be > 0")
    phi = np.zeros(op.size)
    phi[source_index] = 1.0 / op.mesh.cell_volume
    field = heat_evolve(op, phi, t, backend=backend)
    field.source = source_index
    return field


@dataclass
class SupKernelValue:
    value: float
    strategy: str
    t: float


def sup_kernel(
    op: DiscreteOperator,
    t: float,
    strategy: str = "auto",
    sample_indices=None,
    boundary_margin: float = 0.0,
) -> SupKernelValue:
    """Max on-diagonal kernel density sup_x K_t(x; x).

    1D operators up to the eigendecomposition cap scan the entire diagonal
    exactly; otherwise the scan runs over the declared sample set by column
    evolutions.  boundary_margin excludes diagonal entries within that
    distance of the box boundary, where the reflecting truncation inflates
    the on-diagonal value (image terms) relative to the free-space kernel.
    """
    if t <= 0:
        raise ValueError("t must be > 0")
    mesh = op.mesh
    vol = mesh.cell_volume
    keep = _interior_mask(mesh, boundary_margin)
    if strategy == "auto":
        strategy = "eig" if (mesh.dimension == 1 and op.size <= EIG_POINT_CAP) else "columns"
    if strategy == "eig":
        lam, V = operator_eig(op)
        diag = np.einsum("ij,ij->i", V, V * np.exp(-t * lam))
        value = float(diag[keep].max() / vol)
        return SupKernelValue(value, "eig", t)
    if strategy == "columns":
        idx = np.arange(op.size)[keep]
        if sample_indices is not None:
            sample_indices = np.asarray(sample_indices)
            idx = sample_indices[keep[sample_indices]]
        best = -np.inf
        for i in idx:
            col = kernel_column(op, int(i), t)
            best = max(best, float(col.values[i]))
        return SupKernelValue(best, "columns", t)
    raise ValueError(f"unknown strategy '{strategy}'")


def _interior_mask(mesh, margin):
    if margin <= 0:
        return np.ones(mesh.size, dtype=bool)
    pts = mesh.points()
    keep = np.ones(mesh.size, dtype=bool)
    for k in range(mesh.dimension):
        a, b = mesh.box[k]
        keep &= (pts[:, k] >= a + margin) & (pts[:, k] <= b - margin)
    if not np.any(keep):
        raise ValueError("boundary margin excludes every grid point")
    return keep


def resolvent_power_apply(op: DiscreteOperator, r: float, m: int, phi) -> np.ndarray:
    """(I + r^2 A)^{-m} phi by m successive solves; direct banded elimination
    in 1D, conjugate gradients in 2D."""
    if r <= 0:
        raise ValueError("r must be > 0")
    if m < 1:
        raise ValueError("m must be >= 1")
    phi = np.asarray(phi, dtype=float)
    N = op.size
    coef = r * r
    if op.mesh.dimension == 1:
        solve = _factorized_shift_solver(op, coef)
        shift_norm = 1.0 + coef * op.spectral_norm_bound
        u = phi
        for _ in range(m):
            v = u
            u = solve(v)
            # one step of iterative refinement covers ill-conditioned r^2 A
            r_vec = v - u - coef * (op.matrix @ u)
            u = u + solve(r_vec)
            res = np.linalg.norm(v - u - coef * (op.matrix @ u))
            scale = np.linalg.norm(v) + shift_norm * np.linalg.norm(u)
            if res > 1e-12 * max(scale, 1.0):
                raise SolverError(f"tridiagonal solve backward residual {res / scale:.3e}")
        return u
    u = phi
    for _ in range(m):
        u = _cg_shifted(op, coef, u)
    return u


def _cg_shifted(op, coef, b, rtol=1e-12, check_tol=1e-10, max_iter=None):
    """Conjugate gradients for (I + coef A) u = b; SPD with condition number
    at most 1 + coef * lambda_max."""
    A = op.matrix
    matvec = lambda v: v + coef * (A @ v)
    x = np.zeros_like(b)
    r = b - matvec(x)
    p = r.copy()
    rs = float(r @ r)
    bnorm = float(np.linalg.norm(b)) or 1.0
    max_iter = max_iter or 20 * op.size
    for _ in range(max_iter):
        if np.sqrt(rs) <= rtol * bnorm:
            break
        Ap = matvec(p)
        alpha = rs / float(p @ Ap)
        x += alpha * p
        r -= alpha * Ap
        rs_new = float(r @ r)
        p = r + (rs_new / rs) * p
        rs = rs_new
    res = float(np.linalg.norm(b - matvec(x)))
    if res > check_tol * bnorm:
        raise SolverError(f"CG stalled: relative residual {res / bnorm:.3e}")
    return x


def wave_evolve(op: DiscreteOperator, phi0, t: float, cfl_safety: float = 0.5) -> WaveField:
    """cos(t A^{1/2}) phi0 by leapfrog with cosine initial condition
    (u^{-1} = u^{1}); dt = cfl_safety * 2 / sqrt(lambda_max)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if not 0 < cfl_safety <= 1:
        raise ValueError("cfl_safety must be in (0, 1]")
    phi0 = np.asarray(phi0, dtype=float)
    if t == 0.0:
        return WaveField(phi0.copy(), phi0.copy(), 0.0, 0.0)
    lmax = max(op.spectral_norm_bound, 1e-300)
    dt_max = cfl_safety * 2.0 / np.sqrt(lmax)
    nsteps = max(int(np.ceil(t / dt_max - 1e-12)), 1)
    dt = t / nsteps
    A = op.matrix
    guard = 10.0 * max(float(np.abs(phi0).max()), 1e-300)

    u_prev = phi0.copy()
    u = phi0 - 0.5 * dt * dt * (A @ phi0)
    e0 = _leapfrog_energy(A, u, u_prev, dt)
    for _ in range(nsteps - 1):
        u_prev, u = u, 2.0 * u - u_prev - dt * dt * (A @ u)
        if np.abs(u).max() > guard:
            raise CflError("leapfrog norm grew beyond 10x the initial datum")
    drift = abs(_leapfrog_energy(A, u, u_prev, dt) - e0) / max(abs(e0), 1e-300)
    return WaveField(u, u_prev, t, dt, drift)


def _leapfrog_energy(A, u, u_prev, dt):
    v = (u - u_prev) / dt
    return float(v @ v + u @ (A @ u_prev))


# ---------------------------------------------------------------------------
# field export


def field_to_csv(field, mesh, path):
    """CSV rows (x[, y], value) for a heat or wave field (or a raw vector)."""
    import csv

    if isinstance(field, HeatField):
        values = field.values
    elif isinstance(field, WaveField):
        values = field.displacement
    else:
        values = np.asarray(field)
    pts = mesh.points()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "value"] if pts.shape[1] == 1 else ["x", "y", "value"])
        for p, v in zip(pts, values):
            w.writerow([format(c, ".17g") for c in p] + [format(v, ".17g")])


def sup_series_to_csv(pairs, path):
    """CSV rows (t, value) for a sup-kernel time series."""
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "value"])
        for t, v in pairs:
            w.writerow([format(float(t), ".17g"), format(float(v), ".17g")])
