"""Graded quadrature toward point degeneracies.

All integrals of the form  int_{z0}^{z0 + span} f(z) dz  with f blowing up
(or not) at z0 are computed after the grading substitution z = z0 + u**kappa,
which turns power singularities (z - z0)**(-p), p < 1, into integrands that a
per-piece Gauss rule resolves to near machine precision.  The same dyadic
pieces double as the divergence detector: the piece-to-piece decay ratio of

    p_k = int over u in [U 2^{-k-1}, U 2^{-k}]

tends to 2**(-kappa (1 - p)), so p >= 1 (a divergent integral) shows up as a
ratio >= 1 while every integrable power stays clearly below the cutoff.

Integrands are supplied as functions of the *offset* rho = z - z0 >= 0, never
of z itself, so that offsets as small as 1e-70 survive without cancellation.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InconclusiveIntegralError

# 16-point Gauss-Legendre on [0, 1]
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


@dataclass
class TailAnalysis:
    """Outcome of dyadic integration toward a singular endpoint.

    divergent is True/False when the ratio test settled, None when the level
    budget ran out in the ambiguous band.  value is the extrapolated integral
    (math.inf when divergent, nan when ambiguous).
    """

    pieces: np.ndarray
    partials: np.ndarray
    divergent: bool | None
    value: float
    ratio: float
    levels: int


def dyadic_piece(f_offset, span, k, kappa=4):
    """Integral of f over offsets rho in [ (U 2^{-k-1})^kappa, (U 2^{-k})^kappa ]
    with U = span**(1/kappa), evaluated in the graded variable."""
    U = span ** (1.0 / kappa)
    hi = U * 2.0 ** (-k)
    lo = 0.5 * hi
    u = lo + (hi - lo) * _GL_X
    rho = u**kappa
    vals = f_offset(rho) * kappa * u ** (kappa - 1)
    return float((hi - lo) * np.dot(_GL_W, vals))


def graded_tail(
    f_offset,
    span,
    levels=60,
    kappa=4,
    div_threshold=1e3,
    ratio_cutoff=0.97,
    rel_tol=1e-10,
    strict=False,
) -> TailAnalysis:
    """Integrate f from the singular endpoint out to `span`, deciding
    convergence on the fly.

    Early exits: the running partial passing div_threshold declares
    divergence; a trailing ratio safely below 1 with a geometric tail
    estimate under rel_tol declares convergence.  With `strict` the
    ambiguous outcome raises InconclusiveIntegralError instead of
    returning divergent=None.
    """
    pieces = []
    partials = []
    total = 0.0
    ratio = np.nan
    for k in range(levels):
        p = dyadic_piece(f_offset, span, k, kappa)
        pieces.append(p)
        total += p
        partials.append(total)
        if total > div_threshold:
            return TailAnalysis(
                np.array(pieces), np.array(partials), True, np.inf, _trail_ratio(pieces), k + 1
            )
        if k >= 2:
            ratio = _trail_ratio(pieces)
            if ratio < ratio_cutoff and ratio > 0:
                tail = pieces[-1] * ratio / (1.0 - ratio)
                if tail < rel_tol * max(total, 1e-300):
                    return TailAnalysis(
                        np.array(pieces), np.array(partials), False, total + tail, ratio, k + 1
                    )
    # budget exhausted: settle by the trailing ratio
    ratio = _trail_ratio(pieces)
    last3 = [pieces[-3] / pieces[-4], pieces[-2] / pieces[-3], pieces[-1] / pieces[-2]]
    spread = max(last3) - min(last3)
    if ratio >= ratio_cutoff and spread <= 0.08:
        return TailAnalysis(np.array(pieces), np.array(partials), True, np.inf, ratio, levels)
    if ratio < ratio_cutoff and spread <= 0.08:
        tail = pieces[-1] * ratio / (1.0 - ratio) if ratio < 1 else np.inf
        return TailAnalysis(
            np.array(pieces), np.array(partials), False, total + tail, ratio, levels
        )
    if strict:
        raise InconclusiveIntegralError(
            f"graded tail ambiguous after {levels} levels (trailing ratio {ratio:.4f})"
        )
    return TailAnalysis(np.array(pieces), np.array(partials), None, np.nan, ratio, levels)


def _trail_ratio(pieces):
    """Geometric mean of the last three piece-to-piece ratios."""
    if len(pieces) < 4:
        return np.nan
    a = pieces[-4]
    b = pieces[-1]
    if a <= 0 or b <= 0:
        return 0.0
    return float((b / a) ** (1.0 / 3.0))


def integrate_graded(f_offset, span, levels=48, kappa=4):
    """Convergent integral from the singular endpoint out to `span`,
    dyadic pieces plus a geometric closure of the unresolved stub."""
    if span <= 0:
        return 0.0
    pieces = [dyadic_piece(f_offset, span, k, kappa) for k in range(levels)]
    total = float(np.sum(pieces))
    if pieces[-1] > 0 and pieces[-2] > 0:
        r = pieces[-1] / pieces[-2]
        if 0 < r < 0.999:
            total += pieces[-1] * r / (1.0 - r)
    return total


def integrate_segment(f, a, b, nparts=8):
    """Composite 16-point Gauss rule for a smooth integrand on [a, b]."""
    if b <= a:
        return 0.0
    edges = np.linspace(a, b, nparts + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        x = lo + (hi - lo) * _GL_X
        total += (hi - lo) * np.dot(_GL_W, f(x))
    return float(total)
