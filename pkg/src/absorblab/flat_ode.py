"""Space-independent (flat) solutions of the absorption ODE.

A flat profile solves ``Phi' = -Phi h(Phi)`` with ``Phi(0) = a``.  Since the
equation is separable, the solver never time-steps: it inverts the level-time
relation

    t  =  integral from Phi(t) to a  of  ds / (s h(s))

by quadrature along x = ln s plus bracketed root finding.  That gives
machine-accurate values at arbitrary times with no error accumulation, and
extends naturally to two objects a time-stepper cannot reach:

* ``solve_phi_infinity`` -- the solution started from infinite height,
  characterized by ``integral from Phi_inf(t) to infinity = t``, which exists
  exactly when the osgood condition holds;
* ``solve_phi_log`` -- trajectories whose initial height is given as ln(a),
  for data far beyond double range (``a ~ exp(2500)`` appears routinely in
  the threshold experiments).
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import numpy as np

from ._quad import gl_panel_refined, tail_integral
from .errors import (
    BracketError,
    DomainError,
    GridError,
    OverflowGuardError,
    PreconditionError,
    ToleranceError,
)
from .nonlinearity import Nonlinearity, classify_conditions, log_h_at_log

_V_CAP = 1e300


@dataclass(frozen=True)
class FlatTrajectory:
    """A sampled flat solution.

    ``initial_datum`` is ``math.inf`` for the infinite-height solution.
    Values are strictly decreasing and positive for t > 0.
    """

    times: np.ndarray
    values: np.ndarray
    initial_datum: float
    spec: Nonlinearity

    def __post_init__(self):
        v = np.asarray(self.values)
        if np.any(v <= 0.0):
            raise DomainError("flat trajectory values must stay positive")
        if np.any(np.diff(v) > 0.0):
            raise DomainError("flat trajectory values must be nonincreasing")


def _inv_h(spec: Nonlinearity):
    """Integrand 1/h(e^x) of the level-time relation, vectorized in x."""

    def f(x):
        return np.exp(-log_h_at_log(spec, np.asarray(x, dtype=float)))

    return f


def _level_time_panels(spec: Nonlinearity, x_a: float, t_max: float):
    """Cumulative time-from-level table descending from x_a.

    Returns (breaks, T) with ``breaks`` strictly decreasing from ``x_a`` and
    ``T[i]`` the time at which the solution level has fallen to
    ``exp(breaks[i])``; the table extends slightly past ``t_max``.
    """
    f = _inv_h(spec)
    breaks = [x_a]
    T = [0.0]
    width = 0.25
    guard = 200000
    while T[-1] <= t_max * (1.0 + 1e-9) + 1e-300:
        lo = breaks[-1] - width
        dT = gl_panel_refined(f, lo, breaks[-1], splits=4)
        breaks.append(lo)
        T.append(T[-1] + dT)
        width = min(width * 1.5, 4.0)
        guard -= 1
        if guard == 0:
            raise ToleranceError("level-time table failed to reach t_max")
    return np.array(breaks), np.array(T)


def _invert_on_panel(spec, f, x_lo, x_hi, T_hi, t):
    """Solve T(x) = t on [x_lo, x_hi] where T(x_hi) = T_hi <= t."""

    def residual(x: float) -> float:
        return T_hi + gl_panel_refined(f, x, x_hi, splits=2) - t

    a, b = x_lo, x_hi  # residual(a) >= 0 >= residual(b)
    for _ in range(20):
        m = 0.5 * (a + b)
        if residual(m) >= 0.0:
            a = m
        else:
            b = m
    x = 0.5 * (a + b)
    for _ in range(5):
        res = residual(x)
        # dT/dx = -1/h(e^x); Newton step in x
        x += res * math.exp(float(log_h_at_log(spec, x)))
        x = min(max(x, x_lo), x_hi)
    res = residual(x)
    # where h is tiny (low levels decay slowly) T is steep in x and one
    # ulp of x moves T by eps/h; below that the inversion is exact to
    # representability and the leftover residual is conditioning, not
    # error — the level itself is off by under h*|res| relative, which
    # is far below an ulp exactly when this slack bites
    slack = 4.0 * sys.float_info.epsilon * max(1.0, abs(x)) * math.exp(
        -float(log_h_at_log(spec, x))
    )
    if abs(res) > 1e-10 * max(abs(t), 1e-6) + slack:
        raise ToleranceError("level inversion residual above tolerance", residual=res)
    return x


def _solve_log_levels(spec: Nonlinearity, x_a: float, times: np.ndarray) -> np.ndarray:
    """ln Phi(t) for each t in ``times``, init level exp(x_a)."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0:
        raise GridError("time grid must be a nonempty 1-D array")
    if np.any(np.diff(times) <= 0.0):
        raise GridError("time grid must be strictly increasing")
    if times[0] < 0.0:
        raise GridError("time grid must start at t >= 0")
    out = np.empty_like(times)
    positive = times > 0.0
    out[~positive] = x_a
    if not np.any(positive):
        return out
    breaks, T = _level_time_panels(spec, x_a, float(times[-1]))
    f = _inv_h(spec)
    for i in np.nonzero(positive)[0]:
        t = float(times[i])
        j = int(np.searchsorted(T, t))
        j = min(max(j, 1), len(T) - 1)
        out[i] = _invert_on_panel(spec, f, breaks[j], breaks[j - 1], T[j - 1], t)
    return out


def solve_phi(spec: Nonlinearity, a: float, times) -> FlatTrajectory:
    """Flat solution with initial height ``a``, sampled on ``times``.

    Inversion of the separable level-time relation with relative tolerance
    1e-10; no step error accumulates between sample times.
    """
    if not (a > 0.0):
        raise DomainError(f"initial height must be positive, got {a}")
    xs = _solve_log_levels(spec, math.log(a), np.asarray(times, dtype=float))
    return FlatTrajectory(
        times=np.asarray(times, dtype=float),
        values=np.exp(xs),
        initial_datum=float(a),
        spec=spec,
    )


def solve_phi_log(spec: Nonlinearity, ln_a: float, times) -> np.ndarray:
    """ln Phi(t) for initial height exp(ln_a); usable for ln_a in the thousands.

    Returns the array of log-values rather than a trajectory, since the
    linear-scale values may not be representable.
    """
    return _solve_log_levels(spec, float(ln_a), np.asarray(times, dtype=float))


def osgood_tail_from_log(spec: Nonlinearity, x0: float) -> float:
    """G(v) = integral of 1/(s h(s)) over [v, infinity) with x0 = ln v."""
    _require_osgood(spec)
    return tail_integral(
        _inv_h(spec), float(x0), first_len=max(1.0, 0.1 * abs(x0)), rel_tol=1e-13
    )


def osgood_tail(spec: Nonlinearity, v: float) -> float:
    """Same as :func:`osgood_tail_from_log` with the level given linearly."""
    if not (v > 0.0):
        raise DomainError("tail integral needs a positive lower limit")
    return osgood_tail_from_log(spec, math.log(v))


def _require_osgood(spec: Nonlinearity) -> None:
    if spec.family == "log_power":
        ok = spec.alpha > 1.0
    elif spec.family == "power":
        ok = True
    else:
        ok = classify_conditions(spec).osgood
    if not ok:
        raise PreconditionError(
            "the lifetime tail integral diverges without the osgood condition"
        )


def solve_phi_infinity(spec: Nonlinearity, t: float) -> float:
    """Value of the infinite-height flat solution at time t > 0.

    Brackets by doubling the level until its tail integral falls below t,
    erroring out above 1e300; then bisection plus Newton polish to relative
    tolerance 1e-10.  Use :func:`solve_phi_infinity_log` when the value
    itself exceeds double range.
    """
    _require_osgood(spec)
    if not (t > 0.0):
        raise DomainError(f"time must be positive, got {t}")
    # Doubling bracket: each doubling shortens the tail integral by one panel,
    # so G(2v) is obtained from G(v) by subtracting the panel [ln v, ln 2v].
    f = _inv_h(spec)
    ln2 = math.log(2.0)
    x = 0.0
    g = osgood_tail_from_log(spec, x)
    while g >= t:
        g -= gl_panel_refined(f, x, x + ln2, splits=2)
        x += ln2
        if x > math.log(_V_CAP):
            raise OverflowGuardError(
                "infinite-height value exceeds 1e300 at this time; "
                "use solve_phi_infinity_log"
            )
    lam = _phi_infinity_root(spec, t, x - ln2 if x > 0.0 else _down_bracket(spec, t), x)
    return math.exp(lam)


def _down_bracket(spec: Nonlinearity, t: float) -> float:
    """Lower bracket when even level 1 already has tail integral < t."""
    lo = -1.0
    while osgood_tail_from_log(spec, lo) < t:
        lo *= 2.0
        if lo < -1e6:
            raise BracketError("failed to bracket the infinite-height level")
    return lo


def solve_phi_infinity_log(spec: Nonlinearity, t: float) -> float:
    """ln of the infinite-height flat value at t, valid for tiny t.

    Same characterization as :func:`solve_phi_infinity` solved directly in
    log coordinates, so early-time values like exp(4e12) pose no problem.
    """
    _require_osgood(spec)
    if not (t > 0.0):
        raise DomainError(f"time must be positive, got {t}")
    lo, hi = 0.0, 1.0
    # expand upward until the tail integral drops below t
    while osgood_tail_from_log(spec, hi) >= t:
        lo, hi = hi, hi * 2.0
        if hi > 1e15:
            raise BracketError("failed to bracket the infinite-height level")
    # expand downward if even level e^0 is too high
    while osgood_tail_from_log(spec, lo) < t:
        hi, lo = lo, lo - max(1.0, abs(lo))
        if lo < -1e6:
            raise BracketError("failed to bracket the infinite-height level")
    return _phi_infinity_root(spec, t, lo, hi)


def _phi_infinity_root(spec: Nonlinearity, t: float, lo: float, hi: float) -> float:
    """Root of G(e^lam) = t on [lo, hi]; G decreasing in lam."""
    for _ in range(60):
        m = 0.5 * (lo + hi)
        if osgood_tail_from_log(spec, m) >= t:
            lo = m
        else:
            hi = m
        if hi - lo < 1e-9 * max(1.0, abs(hi)):
            break
    lam = 0.5 * (lo + hi)
    for _ in range(4):
        res = osgood_tail_from_log(spec, lam) - t
        # dG/dlam = -1/h(e^lam)
        lam += res * math.exp(float(log_h_at_log(spec, lam)))
    res = osgood_tail_from_log(spec, lam) - t
    if abs(res) > 1e-10 * max(t, 1e-12):
        raise ToleranceError(
            "infinite-height inversion residual above tolerance", residual=res
        )
    return lam
