"""Stationary radial profiles of the absorption equation.

A stationary profile V solves

    V'' + (N-1)/r V' = V h(V),   V(0) = a,  V'(0) = 0.

For borderline nonlinearities these profiles grow like
``exp(c r^(2/(2-alpha)))`` and overflow doubles around r = 12, so all
integration happens in the log variable W = ln(1+V), which grows only
polynomially.  In that variable the equation reads

    W'' + W'^2 + (N-1)/r W' = (1 - e^(-W)) h(e^W - 1),

and for the log-power family the right-hand factor h(e^W - 1) is exactly
W^alpha -- no exponentials anywhere.

The module provides:

* :func:`shoot_profile` -- initial-value shooting from the center with a
  Taylor seed that steps over the coordinate singularity at r = 0;
* :func:`apriori_bound` -- the universal pointwise bound on any profile,
  obtained by inverting an energy integral;
* :func:`boundary_blowup_profile` -- profiles with prescribed (eventually
  infinite) boundary values, built by bisection on the center height;
* :func:`fit_asymptotics` -- least-squares measurement of the super-Gaussian
  growth exponent and constant against their predicted values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator

from ._quad import _GL_NODES, _GL_WEIGHTS, tail_integral
from .errors import (
    BracketError,
    DomainError,
    GridError,
    InsufficientRangeError,
    OverflowGuardError,
    PreconditionError,
    ToleranceError,
)
from .nonlinearity import Nonlinearity, classify_conditions, eval_H, eval_h, h_of_w

_V_CLIP = 1e300


def c_alpha(alpha: float) -> float:
    """Growth constant of the super-Gaussian profile law for alpha in (1,2).

    Profiles of the log-power family satisfy
    ``ln V(r) ~ c_alpha * r^(2/(2-alpha))`` with
    ``c_alpha = ((2-alpha)/2)^(2/(2-alpha))``.
    """
    if not (0.0 < alpha < 2.0):
        raise DomainError("growth constant defined for alpha in (0, 2)")
    return ((2.0 - alpha) / 2.0) ** (2.0 / (2.0 - alpha))


@dataclass(frozen=True)
class RadialProfile:
    """A stationary profile sampled on a radial grid, stored in W = ln(1+V)."""

    radii: np.ndarray
    w_values: np.ndarray
    dw_values: np.ndarray
    dimension: int
    center_value: float
    kind: str  # "shooting" | "apriori_bound" | "boundary_blowup"
    spec: Nonlinearity
    dense: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        r = np.asarray(self.radii)
        if r.ndim != 1 or len(r) < 2 or r[0] != 0.0 or np.any(np.diff(r) <= 0):
            raise GridError("radii must be strictly increasing from 0")
        if np.any(np.diff(self.w_values) < -1e-12):
            raise DomainError("profile must be nondecreasing in r")

    def sample(self, radii) -> tuple[np.ndarray, np.ndarray]:
        """(W, W_r) at arbitrary radii inside the computed range."""
        radii = np.asarray(radii, dtype=float)
        if np.any(radii < 0.0) or np.any(radii > self.radii[-1] * (1 + 1e-12)):
            raise DomainError("sample radii outside the computed range")
        if self.dense is not None:
            out = np.atleast_2d(self.dense(np.clip(radii, self.dense.t_min, None)))
            w = np.where(radii < self.dense.t_min, self.w_values[0], out[0])
            dw = np.where(radii < self.dense.t_min, 0.0, out[1])
            return w, dw
        w_i = PchipInterpolator(self.radii, self.w_values)
        dw_i = PchipInterpolator(self.radii, self.dw_values)
        return w_i(radii), dw_i(radii)

    def w_at(self, r: float) -> float:
        return float(self.sample(np.asarray([r]))[0][0])

    def v_clipped(self) -> np.ndarray:
        """V on the grid in linear scale, saturated at 1e300 for export."""
        out = np.full_like(self.w_values, _V_CLIP)
        ok = self.w_values < math.log(_V_CLIP)
        out[ok] = np.expm1(self.w_values[ok])
        return out


def _w_rhs(spec: Nonlinearity, N: int):
    def rhs(r, y):
        w, p = y
        absorb = -np.expm1(-w) * h_of_w(spec, np.asarray(w))
        return [p, float(absorb) - p * p - (N - 1) * p / r]

    return rhs


def shoot_profile(
    spec: Nonlinearity,
    a: float,
    N: int,
    r_max: float,
    grid: np.ndarray | None = None,
    rtol: float = 1e-9,
) -> RadialProfile:
    """Integrate the stationary profile with center height ``a`` out to r_max.

    Shooting starts at ``r0 = 1e-6 * max(1, r_max)`` with the Taylor seed
    ``V(r0) = a + a h(a) r0^2 / (2N)``, ``V'(r0) = a h(a) r0 / N``, which is
    the exact curvature of the profile at the origin and steps over the
    (N-1)/r singularity.  Adaptive Runge-Kutta (order 5(4)) in the W
    variable; the solution is resampled onto ``grid`` (default: 513 uniform
    nodes).  The run aborts with an overflow guard if W leaves double range,
    which can only happen for nonlinearities admitting finite-radius blow-up.
    """
    if not (a > 0.0):
        raise DomainError(f"center height must be positive, got {a}")
    if N < 1:
        raise DomainError(f"dimension must be >= 1, got {N}")
    if grid is None:
        grid = np.linspace(0.0, r_max, 513)
    grid = np.asarray(grid, dtype=float)
    if grid[0] != 0.0 or abs(grid[-1] - r_max) > 1e-12 * max(1.0, r_max):
        raise GridError("grid must span [0, r_max]")

    r0 = 1e-6 * max(1.0, r_max)
    ha = eval_h(spec, a)
    v0 = a + a * ha * r0 * r0 / (2.0 * N)
    dv0 = a * ha * r0 / N
    y0 = [math.log1p(v0), dv0 / (1.0 + v0)]

    cap = math.log(_V_CLIP)

    def overflow_event(r, y):
        return y[0] - cap

    overflow_event.terminal = True

    sol = solve_ivp(
        _w_rhs(spec, N),
        (r0, r_max),
        y0,
        method="RK45",
        rtol=rtol,
        atol=1e-12,
        dense_output=True,
        events=overflow_event,
    )
    if sol.status == 1:
        raise OverflowGuardError(
            f"profile left double range at r = {sol.t[-1]:.6g} (center height {a:g})"
        )
    if not sol.success:
        raise ToleranceError(f"profile integration failed: {sol.message}")

    w = np.empty_like(grid)
    dw = np.empty_like(grid)
    inside = grid >= r0
    vals = sol.sol(grid[inside])
    w[inside], dw[inside] = vals[0], vals[1]
    w[~inside] = math.log1p(a)
    dw[~inside] = 0.0
    # guard against tiny negative drifts of the monotone solution
    w = np.maximum.accumulate(w)
    return RadialProfile(
        radii=grid,
        w_values=w,
        dw_values=dw,
        dimension=N,
        center_value=float(a),
        kind="shooting",
        spec=spec,
        dense=sol.sol,
    )


def _sqrtH_cumulative(spec: Nonlinearity, b: float, target: float):
    """Sweep x = ln v upward, accumulating H and F(v) = int_b^v ds/sqrt(H).

    Returns (breaks, H_at_breaks, F_at_breaks) where the last F passes
    ``target``.  H is advanced through the Gauss nodes of each panel so the
    two integrals share one pass and no nested quadrature appears.
    """
    x = math.log(b)
    H = eval_H(spec, b)
    if H <= 0.0:
        raise PreconditionError("H must be positive above the lower limit")
    breaks = [x]
    Hs = [H]
    Fs = [0.0]
    width = 0.25
    for _ in range(20000):
        if Fs[-1] > target:
            return np.array(breaks), np.array(Hs), np.array(Fs)
        dF, H = _panel_F_increment(spec, x, H, x + width)
        x += width
        breaks.append(x)
        Hs.append(H)
        Fs.append(Fs[-1] + dF)
        width = min(width * 1.2, 1.0)
        if x > math.log(_V_CLIP):
            raise BracketError(
                "energy integral saturates below the target before 1e300"
            )
    raise ToleranceError("energy-integral sweep exceeded its panel budget")


def _panel_F_increment(
    spec: Nonlinearity, x_lo: float, H_lo: float, x_hi: float
) -> tuple[float, float]:
    """Gauss-Legendre increment of F = int e^x/sqrt(H) over [x_lo, x_hi].

    H itself is advanced through the Gauss nodes by sub-panel quadrature of
    e^(2x) h(e^x), so both integrals come out of a single left-to-right pass.
    Returns (dF, H at x_hi).
    """
    width = x_hi - x_lo
    if width <= 0.0:
        return 0.0, H_lo
    nodes = x_lo + (_GL_NODES + 1.0) * 0.5 * width
    H_nodes = np.empty_like(nodes)
    prev = x_lo
    H_run = H_lo
    # overflow of H to inf just kills the 1/sqrt(H) contribution, which is
    # the right limit when the sweep runs past double range
    with np.errstate(over="ignore"):
        for i, u in enumerate(nodes):
            mid, half = 0.5 * (prev + u), 0.5 * (u - prev)
            sub_nodes = mid + half * _GL_NODES
            H_run += half * float(
                np.dot(_GL_WEIGHTS, np.exp(2.0 * sub_nodes) * _h_at_exp(spec, sub_nodes))
            )
            H_nodes[i] = H_run
            prev = u
        mid, half = 0.5 * (prev + x_hi), 0.5 * (x_hi - prev)
        sub_nodes = mid + half * _GL_NODES
        H_run += half * float(
            np.dot(_GL_WEIGHTS, np.exp(2.0 * sub_nodes) * _h_at_exp(spec, sub_nodes))
        )
        dF = 0.5 * width * float(np.dot(_GL_WEIGHTS, np.exp(nodes) / np.sqrt(H_nodes)))
    return dF, H_run


def _h_at_exp(spec: Nonlinearity, x):
    """h(e^x), vectorized, for quadrature along x = ln s."""
    from .nonlinearity import log_h_at_log

    return np.exp(log_h_at_log(spec, np.asarray(x, dtype=float)))


def apriori_bound(spec: Nonlinearity, b: float, R: float) -> float:
    """Universal bound at radius R for any profile with center height >= b.

    Returns the root v of ``F_b(v) = sqrt(2) R`` where
    ``F_b(v) = integral of 1/sqrt(H) over [b, v]``, located by a bracketed
    sweep of the cumulative integral plus bisection, relative tolerance 1e-8.
    """
    if not (b > 0.0):
        raise DomainError("lower height must be positive")
    if R < 0.0:
        raise DomainError("radius must be nonnegative")
    if R == 0.0:
        return b
    target = math.sqrt(2.0) * R
    breaks, Hs, Fs = _sqrtH_cumulative(spec, b, target)
    j = int(np.searchsorted(Fs, target))
    x_lo, x_hi = breaks[j - 1], breaks[j]
    H_lo, F_lo = Hs[j - 1], Fs[j - 1]
    # bisect inside the bracketing panel; each trial recomputes the partial
    # panel with the same Gauss-node H advance used by the sweep
    lo, hi = x_lo, x_hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        dF, _ = _panel_F_increment(spec, x_lo, H_lo, mid)
        if F_lo + dF < target:
            lo = mid
        else:
            hi = mid
    x_root = 0.5 * (lo + hi)
    dF, _ = _panel_F_increment(spec, x_lo, H_lo, x_root)
    residual = abs(F_lo + dF - target)
    if residual > 1e-8 * target:
        raise ToleranceError(
            "a-priori bound root residual above tolerance", residual=residual
        )
    return math.exp(x_root)


def ko_tail(spec: Nonlinearity, v: float) -> float:
    """Tail integral of 1/sqrt(H) over [v, infinity) for blow-up bounds."""
    if not (v > 0.0):
        raise DomainError("tail integral needs a positive lower limit")
    if spec.family == "log_power" and spec.alpha <= 2.0:
        raise PreconditionError(
            "the barrier tail integral diverges without the keller_osserman condition"
        )

    if spec.family == "power":
        p = spec.p

        def f(x):
            x = np.asarray(x, dtype=float)
            return np.exp(x) * math.sqrt(p + 1.0) * np.exp(-0.5 * (p + 1.0) * x)

    else:
        H_vec = np.vectorize(lambda x: eval_H(spec, math.exp(x)), otypes=[float])

        def f(x):
            return np.exp(np.asarray(x, dtype=float)) / np.sqrt(H_vec(x))

    return tail_integral(f, math.log(v), first_len=1.0, rel_tol=1e-12)


@dataclass(frozen=True)
class BlowupReport:
    """Convergence record of the finite-boundary approximations."""

    k_values: np.ndarray
    center_values: np.ndarray  # fitted center heights v(0) per k
    cauchy_sup_w: np.ndarray   # sup over [0, 0.9 m] of consecutive W-differences


def boundary_blowup_profile(
    spec: Nonlinearity,
    m: float,
    N: int,
    k_list: Sequence[float],
    grid: np.ndarray | None = None,
) -> tuple[RadialProfile, BlowupReport]:
    """Profile on the ball of radius m with boundary heights k from ``k_list``.

    Requires the keller_osserman condition (otherwise no boundary blow-up
    limit exists).  Each finite-boundary problem ``V(m) = k`` is solved by
    bisection on the center height using :func:`shoot_profile`; a shoot that
    overflows before reaching m counts as overshooting the target.  Returns
    the largest-k profile together with the Cauchy differences (sup over
    [0, 0.9 m], measured in W) between consecutive profiles.
    """
    if spec.family == "log_power":
        ko = spec.alpha > 2.0
    elif spec.family == "power":
        ko = True
    else:
        ko = classify_conditions(spec).keller_osserman
    if not ko:
        raise PreconditionError(
            "boundary blow-up profiles require the keller_osserman condition"
        )
    k_list = np.asarray(sorted(k_list), dtype=float)
    if len(k_list) < 2 or np.any(k_list <= 0.0):
        raise DomainError("need at least two positive boundary heights")

    if grid is None:
        grid = np.linspace(0.0, m, 513)

    def boundary_gap(a: float, k: float) -> float:
        try:
            prof = shoot_profile(spec, a, N, m, grid=grid)
        except (OverflowGuardError, ToleranceError):
            return math.inf
        return prof.w_values[-1] - math.log1p(k)

    profiles = []
    centers = []
    for k in k_list:
        lo, hi = 1e-12, float(k)
        if boundary_gap(hi, k) < 0.0:
            raise BracketError(
                "shooting bracket failed: center height k undershoots boundary k"
            )
        for _ in range(60):
            midpoint = 0.5 * (lo + hi)
            if boundary_gap(midpoint, k) < 0.0:
                lo = midpoint
            else:
                hi = midpoint
        a_star = 0.5 * (lo + hi)
        profiles.append(shoot_profile(spec, a_star, N, m, grid=grid))
        centers.append(a_star)

    interior = grid <= 0.9 * m
    cauchy = np.array(
        [
            float(
                np.max(
                    np.abs(p2.w_values[interior] - p1.w_values[interior])
                )
            )
            for p1, p2 in zip(profiles[:-1], profiles[1:])
        ]
    )
    final = profiles[-1]
    final = RadialProfile(
        radii=final.radii,
        w_values=final.w_values,
        dw_values=final.dw_values,
        dimension=N,
        center_value=centers[-1],
        kind="boundary_blowup",
        spec=spec,
        dense=final.dense,
    )
    report = BlowupReport(
        k_values=k_list,
        center_values=np.array(centers),
        cauchy_sup_w=cauchy,
    )
    return final, report


@dataclass(frozen=True)
class FitReport:
    """Measured growth law of a computed profile."""

    exponent_hat: float
    constant_hat: float
    window: tuple[float, float]
    n_points: int
    target_exponent: float
    target_constant: float | None
    kind: str  # "power_of_r" for alpha < 2, "exponential_in_r" for alpha = 2


def fit_asymptotics(profile: RadialProfile, alpha: float) -> FitReport:
    """Least-squares fit of the profile growth law over the outer fifth.

    For alpha < 2 fits ln W against ln r (target exponent 2/(2-alpha),
    target constant :func:`c_alpha`); for alpha = 2 fits ln W against r
    (target slope 1).  The window is [0.8 r_max, r_max]: wider windows mix
    pre-asymptotic curvature into the linear fit and bias the slope low
    (for the largest feasible ranges the measured slope error drops from
    tens of percent to a few percent when the window tightens).  Requires
    W(r_max) >= 10 so the asymptotic regime is at least entered.
    """
    if not (1.0 < alpha <= 2.0):
        raise DomainError("asymptotic fit defined for alpha in (1, 2]")
    r = profile.radii
    w = profile.w_values
    if w[-1] < 10.0:
        raise InsufficientRangeError(
            f"profile reaches only W(r_max) = {w[-1]:.3g} < 10"
        )
    r_hi = r[-1]
    r_lo = 0.8 * r_hi
    sel = (r >= r_lo) & (w > 0.0)
    if int(np.count_nonzero(sel)) < 8:
        raise InsufficientRangeError("fewer than 8 grid points in the fit window")
    if alpha < 2.0:
        x = np.log(r[sel])
        kind = "power_of_r"
        target_exp = 2.0 / (2.0 - alpha)
        target_const = c_alpha(alpha)
    else:
        x = r[sel]
        kind = "exponential_in_r"
        target_exp = 1.0
        target_const = None
    y = np.log(w[sel])
    slope, intercept = np.polyfit(x, y, 1)
    return FitReport(
        exponent_hat=float(slope),
        constant_hat=float(math.exp(intercept)),
        window=(float(r_lo), float(r_hi)),
        n_points=int(np.count_nonzero(sel)),
        target_exponent=target_exp,
        target_constant=target_const,
        kind=kind,
    )
