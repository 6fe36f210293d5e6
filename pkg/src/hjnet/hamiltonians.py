"""Per-arc Hamiltonians and the scalar constants the solver needs from them.

Three evaluable kinds are supported, each continuous in (s, p), convex and
coercive in p, and locally Lipschitz in p:

* ``quadratic``  H(s,p) = alpha(s) p^2 + beta(s) p + kappa(s),  alpha > 0
* ``abs``        H(s,p) = alpha(s) |p - beta(s)| + kappa(s),    alpha > 0
* ``sampled``    bilinear table on an (s, p) grid with a declared linear
  coercive extension beyond the p-range

Coefficient functions are sampled arrays on an s-knot grid and interpolated
linearly.  Restricting to these kinds keeps every derived constant (the
critical value c_gamma, stationary-subsolution levels, sublevel widths,
momentum Lipschitz constants) computable in closed form or by robust
bisection instead of being estimated.

Orientation reversal obeys H_rev(s, p) = H(1 - s, -p), so a family defined on
forward arcs extends uniquely to the inverse arcs.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import EmptySublevelError, MomentumRangeError

__all__ = [
    "ArcHamiltonian",
    "HamiltonianFamily",
    "quadratic_hamiltonian",
    "abs_hamiltonian",
    "sampled_hamiltonian",
    "evaluate",
    "c_gamma",
    "reverse_hamiltonian",
    "positive_shift",
    "subsolution_level",
    "sublevel_width",
    "momentum_lipschitz",
    "global_min",
    "momentum_minimizer",
]

TOL_INV_SYMBOLIC = 1e-10
TOL_INV_SAMPLED = 1e-6
TOL_CONVEX = 1e-10

_KINDS = ("quadratic", "abs", "sampled")


@dataclass(frozen=True)
class ArcHamiltonian:
    """Evaluable Hamiltonian on one arc, parametrized on s in [0,1]."""

    kind: str
    s_knots: np.ndarray
    alpha: np.ndarray | None = None
    beta: np.ndarray | None = None
    kappa: np.ndarray | None = None
    p_knots: np.ndarray | None = None
    table: np.ndarray | None = None
    extension_slope: float | None = None

    def __call__(self, s, p):
        return evaluate(self, s, p)


def _as_knot_array(c, m=None):
    a = np.atleast_1d(np.asarray(c, dtype=float))
    if a.size == 1:
        a = np.repeat(a, 2 if m is None else m)
    return a


def _make_knots(n, s_knots):
    if s_knots is not None:
        s = np.asarray(s_knots, dtype=float)
        if s.ndim != 1 or s.size != n:
            raise ValueError("s_knots must match coefficient length")
        if s[0] != 0.0 or s[-1] != 1.0 or np.any(np.diff(s) <= 0):
            raise ValueError("s_knots must increase from 0 to 1")
        return s
    return np.linspace(0.0, 1.0, n)


def _symbolic(kind, alpha, beta, kappa, s_knots):
    arrs = [np.atleast_1d(np.asarray(c, dtype=float)) for c in (alpha, beta, kappa)]
    sizes = {a.size for a in arrs if a.size > 1}
    if len(sizes) > 1:
        raise ValueError("coefficient arrays must share one s-knot grid")
    n = sizes.pop() if sizes else 2
    alpha, beta, kappa = (np.repeat(a, n) if a.size == 1 else a for a in arrs)
    if np.min(alpha) <= 0:
        raise ValueError("alpha must be strictly positive (convexity/coercivity)")
    return ArcHamiltonian(kind=kind, s_knots=_make_knots(n, s_knots),
                          alpha=alpha, beta=beta, kappa=kappa)


def quadratic_hamiltonian(alpha=1.0, beta=0.0, kappa=0.0, s_knots=None):
    """H(s,p) = alpha(s) p^2 + beta(s) p + kappa(s)."""
    return _symbolic("quadratic", alpha, beta, kappa, s_knots)


def abs_hamiltonian(alpha=1.0, beta=0.0, kappa=0.0, s_knots=None):
    """H(s,p) = alpha(s) |p - beta(s)| + kappa(s)."""
    return _symbolic("abs", alpha, beta, kappa, s_knots)


def sampled_hamiltonian(s_knots, p_knots, table, extension_slope):
    """Tabulated H on an (s,p) grid, linearly extended beyond the p-range.

    The table must be discretely convex in p, and the declared extension
    slope at least as steep as the outermost table slopes so the extension
    preserves convexity and coercivity.
    """
    s = np.asarray(s_knots, dtype=float)
    p = np.asarray(p_knots, dtype=float)
    t = np.asarray(table, dtype=float)
    if t.shape != (s.size, p.size):
        raise ValueError("table shape must be (len(s_knots), len(p_knots))")
    if p.size < 3:
        raise ValueError("need at least 3 momentum knots")
    if np.any(np.diff(p) <= 0):
        raise ValueError("p_knots must be increasing")
    scale = 1.0 + float(np.max(np.abs(t)))
    d2 = np.diff(t, n=2, axis=1) / np.diff(p)[:-1].min() ** 2
    if np.min(d2) < -TOL_CONVEX * scale:
        raise ValueError("table is not convex in p")
    slope = float(extension_slope)
    edge = np.diff(t, axis=1) / np.diff(p)
    if slope <= 0:
        raise ValueError("extension slope must be positive (coercivity)")
    if slope < np.max(edge[:, -1]) - TOL_CONVEX or slope < np.max(-edge[:, 0]) - TOL_CONVEX:
        raise ValueError("extension slope shallower than boundary table slopes")
    return ArcHamiltonian(kind="sampled", s_knots=_make_knots(s.size, s),
                          p_knots=p, table=t, extension_slope=slope)


def _coeff_at(H, name, s):
    return np.interp(s, H.s_knots, getattr(H, name))


def _check_s(s):
    s = np.asarray(s, dtype=float)
    if np.any(s < -1e-12) or np.any(s > 1.0 + 1e-12):
        raise ValueError("s out of range [0, 1]")
    return np.clip(s, 0.0, 1.0)


def _sampled_rows_at(H, s):
    """Table rows linearly interpolated in s; shape (len(s), len(p_knots))."""
    s = np.atleast_1d(s)
    idx = np.clip(np.searchsorted(H.s_knots, s, side="right") - 1, 0,
                  H.s_knots.size - 2)
    s0 = H.s_knots[idx]
    s1 = H.s_knots[idx + 1]
    w = np.where(s1 > s0, (s - s0) / (s1 - s0), 0.0)
    return (1.0 - w)[:, None] * H.table[idx] + w[:, None] * H.table[idx + 1]


def _sampled_eval_rows(H, rows, p):
    """Evaluate interpolated table rows at momenta p (same leading shape)."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    pk = H.p_knots
    pc = np.clip(p, pk[0], pk[-1])
    j = np.clip(np.searchsorted(pk, pc, side="right") - 1, 0, pk.size - 2)
    w = (pc - pk[j]) / (pk[j + 1] - pk[j])
    r = np.arange(rows.shape[0])
    vals = (1.0 - w) * rows[r, j] + w * rows[r, j + 1]
    over = p - pk[-1]
    under = pk[0] - p
    vals = vals + H.extension_slope * (np.maximum(over, 0.0) + np.maximum(under, 0.0))
    return vals


def evaluate(H, s, p):
    """H(s, p); s and p broadcast together, s validated to [0,1]."""
    s = _check_s(s)
    p = np.asarray(p, dtype=float)
    s_b, p_b = np.broadcast_arrays(s, p)
    if H.kind == "quadratic":
        a = _coeff_at(H, "alpha", s_b)
        b = _coeff_at(H, "beta", s_b)
        k = _coeff_at(H, "kappa", s_b)
        out = a * p_b * p_b + b * p_b + k
    elif H.kind == "abs":
        a = _coeff_at(H, "alpha", s_b)
        b = _coeff_at(H, "beta", s_b)
        k = _coeff_at(H, "kappa", s_b)
        out = a * np.abs(p_b - b) + k
    else:
        shape = s_b.shape
        rows = _sampled_rows_at(H, s_b.ravel())
        out = _sampled_eval_rows(H, rows, p_b.ravel()).reshape(shape)
    if out.ndim == 0 or (np.ndim(s) == 0 and np.ndim(p) == 0):
        return float(out)
    return out


def _s_check_grid(H, s_grid=None, n=257):
    if s_grid is not None:
        return _check_s(np.asarray(s_grid, dtype=float))
    return np.union1d(H.s_knots, np.linspace(0.0, 1.0, n))


def momentum_minimizer(H, s):
    """Per-s minimizer(s) of p -> H(s,p); vectorized over s."""
    s = _check_s(np.atleast_1d(s))
    if H.kind == "quadratic":
        return -_coeff_at(H, "beta", s) / (2.0 * _coeff_at(H, "alpha", s))
    if H.kind == "abs":
        return _coeff_at(H, "beta", s)
    rows = _sampled_rows_at(H, s)
    j = np.argmin(rows, axis=1)
    inward = (j == 0) & (rows[:, 1] < rows[:, 0])
    inward |= (j == rows.shape[1] - 1) & (rows[:, -2] < rows[:, -1])
    if np.any(inward):
        raise MomentumRangeError("sampled p-range excludes a momentum minimizer")
    return H.p_knots[j]


def _min_over_p(H, s):
    """min_p H(s,p) per s (vectorized)."""
    s = np.atleast_1d(s)
    pstar = momentum_minimizer(H, s)
    if H.kind == "sampled":
        rows = _sampled_rows_at(H, s)
        return np.min(rows, axis=1)
    return evaluate(H, s, pstar)


def c_gamma(H, s_grid=None, p_grid=None):
    """Critical value -max_s min_p H(s,p) on a check grid.

    Symbolic kinds use the closed-form per-s minimizer; the sampled kind
    scans its momentum knots (p_grid overrides) and refuses tables whose
    minimizer provably escapes the p-range.
    """
    s = _s_check_grid(H, s_grid)
    if H.kind == "sampled" and p_grid is not None:
        rows = _sampled_rows_at(H, s)
        vals = np.stack([_sampled_eval_rows(H, rows, np.full(s.size, p))
                         for p in np.asarray(p_grid, dtype=float)], axis=1)
        momentum_minimizer(H, s)  # range check
        return -float(np.max(np.min(vals, axis=1)))
    return -float(np.max(_min_over_p(H, s)))


def global_min(H, s_grid=None):
    """min over (s,p) of H on the check grid."""
    return float(np.min(_min_over_p(H, _s_check_grid(H, s_grid))))


def reverse_hamiltonian(H):
    """Hamiltonian of the inverse arc: (s,p) -> H(1-s, -p)."""
    cand = np.flip(1.0 - H.s_knots)
    cand[0] = 0.0
    cand[-1] = 1.0
    knots = H.s_knots if np.array_equal(cand, H.s_knots) else cand
    if H.kind == "sampled":
        return replace(H, s_knots=knots,
                       p_knots=-np.flip(H.p_knots),
                       table=np.flip(np.flip(H.table, axis=0), axis=1))
    return replace(H, s_knots=knots,
                   alpha=np.flip(H.alpha),
                   beta=-np.flip(H.beta),
                   kappa=np.flip(H.kappa))


def shift_hamiltonian(H, a):
    """H + a (constant in s and p)."""
    if a == 0.0:
        return H
    if H.kind == "sampled":
        return replace(H, table=H.table + a)
    return replace(H, kappa=H.kappa + a)


def subsolution_level(H, w0):
    """Smallest m with H(s, w0') <= m a.e., rendered on the grid.

    w0 is sampled on a uniform s-grid; the a.e. condition becomes the maximum
    of H evaluated at cell midpoints with forward-difference slopes, matching
    the upwind stencil of the marching scheme.
    """
    w0 = np.asarray(w0, dtype=float)
    if w0.ndim != 1 or w0.size < 2:
        raise ValueError("need at least 2 samples of the datum")
    n = w0.size - 1
    slopes = np.diff(w0) * n
    mids = (np.arange(n) + 0.5) / n
    return float(np.max(evaluate(H, mids, slopes)))


def _uniform_max(H, p, s):
    """max over the s check grid of H(s, p) for scalar p."""
    return float(np.max(evaluate(H, s, np.full(s.shape, p))))


def sublevel_width(H, M, s_grid=None, tol=1e-12):
    """max{|p| : H(s,p) <= M for every s}, by bisection.

    Convexity in p makes {p : max_s H(s,p) <= M} an interval; coercivity
    bounds it.  Raises EmptySublevelError when the interval is empty.
    """
    s = _s_check_grid(H, s_grid)
    # candidate interior point: best per-s minimizer under the uniform max
    cands = np.unique(momentum_minimizer(H, s))
    vals = [_uniform_max(H, p, s) for p in cands]
    i0 = int(np.argmin(vals))
    p0, v0 = float(cands[i0]), vals[i0]
    if v0 > M:
        # convex in p: ternary search around the candidate set
        lo, hi = float(cands.min()) - 1.0, float(cands.max()) + 1.0
        for _ in range(200):
            m1 = lo + (hi - lo) / 3.0
            m2 = hi - (hi - lo) / 3.0
            if _uniform_max(H, m1, s) <= _uniform_max(H, m2, s):
                hi = m2
            else:
                lo = m1
        p0 = 0.5 * (lo + hi)
        v0 = _uniform_max(H, p0, s)
        if v0 > M + tol * (1.0 + abs(M)):
            raise EmptySublevelError(f"sublevel at M={M} is empty (min {v0})")

    def root(direction):
        step = 1.0
        inside, outside = p0, p0 + direction * step
        while _uniform_max(H, outside, s) <= M:
            inside = outside
            step *= 2.0
            outside = p0 + direction * step
            if step > 1e12:
                raise EmptySublevelError("coercivity violated: no outer bound")
        for _ in range(100):
            mid = 0.5 * (inside + outside)
            if _uniform_max(H, mid, s) <= M:
                inside = mid
            else:
                outside = mid
        return inside

    return max(abs(root(+1.0)), abs(root(-1.0)))


def momentum_lipschitz(H, M_bound):
    """Lipschitz constant of p -> H(s,p) on |p| <= M_bound, uniform in s."""
    if M_bound <= 0:
        raise ValueError("M_bound must be positive")
    if H.kind == "quadratic":
        return float(2.0 * np.max(H.alpha) * M_bound + np.max(np.abs(H.beta)))
    if H.kind == "abs":
        return float(np.max(H.alpha))
    pk = H.p_knots
    lo, hi = max(pk[0], -M_bound), min(pk[-1], M_bound)
    grid = np.union1d(pk[(pk >= lo) & (pk <= hi)], [lo, hi])
    best = float(H.extension_slope) if (M_bound > pk[-1] or -M_bound < pk[0]) else 0.0
    if grid.size >= 2:
        rows = _sampled_rows_at(H, H.s_knots)
        vals = np.stack([_sampled_eval_rows(H, rows, np.full(H.s_knots.size, p))
                         for p in grid], axis=1)
        best = max(best, float(np.max(np.abs(np.diff(vals, axis=1) / np.diff(grid)))))
    return best


@dataclass(frozen=True)
class HamiltonianFamily:
    """Map from oriented arc id to its Hamiltonian, closed under reversal."""

    by_arc: dict

    def __getitem__(self, arc_id):
        return self.by_arc[arc_id]

    def arcs(self):
        return sorted(self.by_arc)


def family_from_edges(network, per_edge):
    """Build a family from Hamiltonians on forward arcs; reverses derived."""
    by_arc = {}
    for arc in network.edge_arcs():
        H = per_edge[arc.id]
        by_arc[arc.id] = H
        by_arc[arc.inverse_id] = reverse_hamiltonian(H)
    return HamiltonianFamily(by_arc)


def validate_inversion(family, network, tol=None):
    """Check H_rev(s,p) = H(1-s,-p) across all arc pairs on a probe grid."""
    worst = 0.0
    for arc in network.edge_arcs():
        H = family[arc.id]
        Hr = family[arc.inverse_id]
        t = tol if tol is not None else (
            TOL_INV_SAMPLED if H.kind == "sampled" else TOL_INV_SYMBOLIC)
        s = np.linspace(0.0, 1.0, 41)
        p = np.linspace(-3.0, 3.0, 25)
        S, P = np.meshgrid(s, p, indexing="ij")
        diff = np.max(np.abs(evaluate(Hr, S, P) - evaluate(H, 1.0 - S, -P)))
        worst = max(worst, float(diff))
        if diff > t:
            raise ValueError(
                f"inverse Hamiltonian of {arc.id} violates the reversal law "
                f"(max deviation {diff:.3e} > {t:.1e})")
    return worst


def positive_shift(family, limiter, margin=1e-6):
    """Shift all Hamiltonians up so min H >= margin > 0.

    Returns (shifted family, shift a, shifted limiter values).  Solutions of
    the shifted problem relate to the original by u_orig = u_shifted + a*t,
    which the solver applies as a post-correction.
    """
    gmin = min(global_min(H) for H in family.by_arc.values())
    a = max(0.0, margin - gmin)
    if a == 0.0:
        return family, 0.0, dict(limiter)
    shifted = HamiltonianFamily(
        {aid: shift_hamiltonian(H, a) for aid, H in family.by_arc.items()})
    return shifted, a, {x: c - a for x, c in limiter.items()}
