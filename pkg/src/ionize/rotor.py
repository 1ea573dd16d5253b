"""Classical limit of the driven transmon: a driven rotor.

Equations of motion for the rescaled variables (phi, n):

    dn/dt   = -omega_p * sum_m m c_m sin(m phi)
    dphi/dt =  omega_p * n + eps_d sin(omega_d t)

with ordinary frequencies (GHz) converted to angular units internally.
Trajectories integrate with fixed-step classical RK4, batched over initial
conditions.  Undriven motion conserves
E = omega_p (n^2/2 - sum_m c_m cos(m phi)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import FITTED_E_C, FITTED_E_J, ParameterError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class RotorParams:
    """Driven-rotor parameters.

    omega_p: plasma frequency, GHz (explicit input; not recomputed from
    circuit energies).  c_m: harmonic ratios with c_m[0] = 1.  z: transmon
    impedance sqrt(8 E_C / E_J), sets the Bohr-Sommerfeld area quantum.
    """

    omega_p: float
    c_m: tuple[float, ...]
    z: float
    eps_d: float = 0.0
    omega_d: float = 1.75

    def __post_init__(self):
        object.__setattr__(self, "c_m", tuple(float(c) for c in self.c_m))
        if self.omega_p <= 0 or self.z <= 0:
            raise ParameterError("omega_p and z must be positive")
        if not self.c_m or self.c_m[0] != 1.0:
            raise ParameterError("c_m[0] must equal 1")
        if self.omega_d <= 0:
            raise ParameterError("omega_d must be positive")

    @property
    def period(self) -> float:
        return 1.0 / self.omega_d


@dataclass(frozen=True)
class PoincareSection:
    """Stroboscopic phase-space samples per trajectory."""

    points: np.ndarray          # (trajectories, n_periods + 1, 2)
    initial_conditions: np.ndarray
    params: RotorParams
    separatrix: np.ndarray      # reference contour of the undriven system


def fitted_rotor(omega_p: float | None = None, eps_d: float = 0.0,
                 omega_d: float = 1.75) -> RotorParams:
    """Rotor ratios from the fitted circuit parameters.

    omega_p defaults to sqrt(8 E_C E_J1); other conventions for the same
    symbol differ, so the frequency stays an explicit input.
    """
    e_j1 = FITTED_E_J[0]
    if omega_p is None:
        omega_p = float(np.sqrt(8.0 * FITTED_E_C * e_j1))
    return RotorParams(
        omega_p=omega_p,
        c_m=tuple(e / e_j1 for e in FITTED_E_J),
        z=float(np.sqrt(8.0 * FITTED_E_C / e_j1)),
        eps_d=eps_d,
        omega_d=omega_d,
    )


def rotor_rhs(state, t, params: RotorParams):
    """Time derivative of (phi, n); state may be (2,) or (N, 2)."""
    state = np.asarray(state, dtype=float)
    phi = state[..., 0]
    n = state[..., 1]
    wp = TWO_PI * params.omega_p
    dn = np.zeros_like(phi)
    for m, c in enumerate(params.c_m, start=1):
        dn -= wp * m * c * np.sin(m * phi)
    dphi = wp * n + TWO_PI * params.eps_d * np.sin(TWO_PI * params.omega_d * t)
    return np.stack([dphi, dn], axis=-1)


def rotor_energy(state, params: RotorParams):
    """Undriven energy in GHz: omega_p (n^2/2 - sum_m c_m cos(m phi))."""
    state = np.asarray(state, dtype=float)
    phi = state[..., 0]
    n = state[..., 1]
    pot = np.zeros_like(phi)
    for m, c in enumerate(params.c_m, start=1):
        pot -= c * np.cos(m * phi)
    return params.omega_p * (0.5 * n**2 + pot)


def potential_top(params: RotorParams, scan_points: int = 2001) -> float:
    """Max over phi of -sum c_m cos(m phi) (dimensionless)."""
    phi = np.linspace(-np.pi, np.pi, scan_points)
    pot = np.zeros_like(phi)
    for m, c in enumerate(params.c_m, start=1):
        pot -= c * np.cos(m * phi)
    return float(pot.max())


def separatrix_energy(params: RotorParams) -> float:
    """Energy of the undriven separatrix, GHz."""
    return params.omega_p * potential_top(params)


def _rk4(states, t0, n_steps, h, params: RotorParams, record_every=0):
    """Fixed-step RK4 on a batch of states; optionally record snapshots."""
    s = np.array(states, dtype=float)
    recorded = [] if record_every else None
    if record_every:
        recorded.append(s.copy())
    t = t0
    for k in range(n_steps):
        k1 = rotor_rhs(s, t, params)
        k2 = rotor_rhs(s + 0.5 * h * k1, t + 0.5 * h, params)
        k3 = rotor_rhs(s + 0.5 * h * k2, t + 0.5 * h, params)
        k4 = rotor_rhs(s + h * k3, t + h, params)
        s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = t0 + (k + 1) * h
        if record_every and (k + 1) % record_every == 0:
            recorded.append(s.copy())
    if record_every:
        return np.array(recorded)
    return s


def integrate_trajectory(ic, params: RotorParams, n_periods: int,
                         steps_per_period: int = 600):
    """Integrate one initial condition, returning (times, path).

    Undriven runs must conserve energy to 1e-6 relative over the run;
    violation raises with a suggestion to increase steps_per_period.
    """
    if steps_per_period < 100:
        raise ParameterError("steps_per_period must be at least 100")
    h = params.period / steps_per_period
    n_steps = n_periods * steps_per_period
    path = _rk4(np.asarray(ic, dtype=float)[None, :], 0.0, n_steps, h,
                params, record_every=1)[:, 0, :]
    times = np.arange(n_steps + 1) * h
    if params.eps_d == 0.0:
        e = rotor_energy(path, params)
        scale = max(abs(e[0]), params.omega_p)
        drift = np.abs(e - e[0]).max() / scale
        if drift > 1e-6:
            raise RuntimeError(
                f"energy drift {drift:.2e} exceeds 1e-6; "
                "increase steps_per_period")
    return times, path


def poincare_section(ic_grid, params: RotorParams, n_periods: int,
                     steps_per_period: int = 200) -> PoincareSection:
    """Stroboscopic section at t = k T for a batch of initial conditions."""
    ics = np.atleast_2d(np.asarray(ic_grid, dtype=float))
    h = params.period / steps_per_period
    n_steps = n_periods * steps_per_period
    snaps = _rk4(ics, 0.0, n_steps, h, params,
                 record_every=steps_per_period)
    points = np.swapaxes(snaps, 0, 1).copy()
    points[..., 0] = np.mod(points[..., 0] + np.pi, TWO_PI) - np.pi
    # Undriven separatrix contour at the well-top energy, for reference.
    phi = np.linspace(-np.pi, np.pi, 601)
    pot = np.zeros_like(phi)
    for m, c in enumerate(params.c_m, start=1):
        pot -= c * np.cos(m * phi)
    n_sep = np.sqrt(np.maximum(2.0 * (potential_top(params) - pot), 0.0))
    separatrix = np.concatenate([
        np.stack([phi, n_sep], axis=-1),
        np.stack([phi[::-1], -n_sep[::-1]], axis=-1),
    ])
    return PoincareSection(
        points=points,
        initial_conditions=ics,
        params=params,
        separatrix=separatrix,
    )


def chaos_indicator_batch(ics, params: RotorParams, horizon: int,
                          steps_per_period: int = 200,
                          d0: float = 1e-8, d_renorm: float = 1e-4,
                          escape_n: float = 20.0):
    """Largest-Lyapunov estimates (per drive period) for a batch of ICs.

    Twin trajectories start separated by d0 in phi.  Stretching is
    measured on the separation component transverse to the local flow
    direction: on a regular orbit the along-flow component grows linearly
    from frequency shear, which would mask the near-zero Lyapunov rate,
    while the transverse component stays bounded.  The companion is
    rescaled back to d0 whenever the transverse separation exceeds
    d_renorm, and the accumulated log stretching divided by the elapsed
    periods is the rate.  Trajectories escaping to |n| > escape_n are
    flagged.
    """
    if horizon < 100:
        raise ParameterError("horizon must be at least 100 periods")
    ics = np.atleast_2d(np.asarray(ics, dtype=float))
    n_traj = len(ics)
    h = params.period / steps_per_period
    main = ics.copy()
    twin = ics.copy()
    twin[:, 0] += d0
    log_sum = np.zeros(n_traj)
    escaped = np.zeros(n_traj, dtype=bool)
    t = 0.0

    def transverse(delta, state, time):
        flow = rotor_rhs(state, time, params)
        norm = np.hypot(flow[:, 0], flow[:, 1])
        norm = np.where(norm > 0, norm, 1.0)
        fx, fy = flow[:, 0] / norm, flow[:, 1] / norm
        return np.abs(delta[:, 1] * fx - delta[:, 0] * fy)

    for k in range(horizon * steps_per_period):
        both = np.concatenate([main, twin])
        both = _rk4(both, t, 1, h, params)
        t += h
        main, twin = both[:n_traj], both[n_traj:]
        delta = twin - main
        d_perp = transverse(delta, main, t)
        over = d_perp > d_renorm
        if np.any(over):
            log_sum[over] += np.log(d_perp[over] / d0)
            dist = np.hypot(delta[over, 0], delta[over, 1])
            twin[over] = main[over] + delta[over] * (d0 / dist)[:, None]
        escaped |= np.abs(main[:, 1]) > escape_n
    d_perp = transverse(twin - main, main, t)
    log_sum += np.log(np.maximum(d_perp, d0) / d0)
    return log_sum / horizon, escaped


def chaos_indicator(ic, params: RotorParams, horizon: int,
                    steps_per_period: int = 200):
    """Per-period divergence rate of a single initial condition."""
    rates, escaped = chaos_indicator_batch(
        np.asarray(ic, dtype=float)[None, :], params, horizon,
        steps_per_period=steps_per_period)
    return float(rates[0]), bool(escaped[0])


def orbit_areas(phi0_batch, params: RotorParams, n_periods: int,
                steps_per_period: int) -> np.ndarray:
    """Areas of the stroboscopic invariant curves seeded at (phi0, 0).

    One batched integration covers all seeds; each orbit's area is the
    shoelace sum over its angle-ordered stroboscopic points.
    """
    phi0 = np.atleast_1d(np.asarray(phi0_batch, dtype=float))
    ics = np.stack([phi0, np.zeros_like(phi0)], axis=-1)
    section = poincare_section(ics, params, n_periods,
                               steps_per_period=steps_per_period)
    areas = np.empty(len(phi0))
    for i, pts in enumerate(section.points):
        center = pts.mean(axis=0)
        ang = np.arctan2(pts[:, 1] - center[1], pts[:, 0] - center[0])
        order = np.argsort(ang)
        x = pts[order, 0]
        y = pts[order, 1]
        areas[i] = 0.5 * abs(
            float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))
    return areas


def _orbit_area(phi0: float, params: RotorParams, n_periods: int,
                steps_per_period: int) -> float:
    return float(orbit_areas([phi0], params, n_periods, steps_per_period)[0])


def quantized_orbit(params: RotorParams, level: int, n_periods: int = 200,
                    steps_per_period: int = 200, horizon: int = 100,
                    chaos_cutoff: float = 0.3, scan_points: int = 24,
                    refine_rounds: int = 2, area_tol: float = 1e-3):
    """Regular orbit enclosing phase-space area 2 pi z (level + 1/2).

    Seeds (phi0, 0) on the n = 0 axis are scanned in batches; the scan
    brackets the target area and two refinement rounds shrink the bracket
    by the scan factor each time.  Returns a dict with the seed, area, and
    boundary points, or the string "swallowed" when no regular orbit with
    the requested area exists.
    """
    target = TWO_PI * params.z * (level + 0.5)
    seeds = np.linspace(0.02, np.pi - 0.05, scan_points)
    rates, escaped = chaos_indicator_batch(
        np.stack([seeds, np.zeros_like(seeds)], axis=-1), params, horizon,
        steps_per_period=steps_per_period)
    regular = (rates < chaos_cutoff) & ~escaped
    areas = np.full(scan_points, np.nan)
    idx = np.nonzero(regular)[0]
    if len(idx):
        areas[idx] = orbit_areas(seeds[idx], params, n_periods,
                                 steps_per_period)
    usable = idx[~np.isnan(areas[idx])]
    above = [i for i in usable if areas[i] >= target]
    if not above:
        return "swallowed"
    hi = min(above, key=lambda i: areas[i])
    below = [i for i in usable if areas[i] < target and seeds[i] < seeds[hi]]
    lo_seed = seeds[max(below)] if below else 1e-3
    hi_seed = seeds[hi]
    best_seed, best_area = seeds[hi], areas[hi]
    for _ in range(refine_rounds):
        if abs(best_area - target) < area_tol * target:
            break
        grid = np.linspace(lo_seed, hi_seed, scan_points)
        grid_areas = orbit_areas(grid, params, n_periods, steps_per_period)
        k = int(np.argmin(np.abs(grid_areas - target)))
        best_seed, best_area = float(grid[k]), float(grid_areas[k])
        lo_seed = grid[max(k - 1, 0)]
        hi_seed = grid[min(k + 1, scan_points - 1)]
    rate, esc = chaos_indicator(np.array([best_seed, 0.0]), params, horizon,
                                steps_per_period=steps_per_period)
    if rate >= chaos_cutoff or esc:
        return "swallowed"
    section = poincare_section(np.array([[best_seed, 0.0]]), params,
                               n_periods, steps_per_period=steps_per_period)
    return {
        "level": level,
        "phi0": float(best_seed),
        "area": float(best_area),
        "target_area": float(target),
        "points": section.points[0],
    }
