"""Critical properties of the pairing transition.

The on-shell vertex diverges where the relevant kernel mass M(T) crosses 1:
M_vac for vacuum/number states (the root is occupation-independent), M_th for
the equilibrium thermal state (strictly larger, so its root sits above the
vacuum one).  Near the root, 1 - M(T) ~ m (T - T_c) defines the mass slope m,
and the center-of-mass-momentum-resolved vertex takes the quadratic form

    thermal:   gamma0 / [P^2 (cos^2 theta + a) + m (T - T_c)]
    n quanta:  gamma0 / [P^2 (cos^2 theta + a) + m (T - T_c)]^(n+1)

with a fixed anisotropy constant a > 0.  Spatial pair correlations follow by
Fourier transform over P; for the number-state case the correlation length is
extracted from the leading-pole form with the mass reduced by n+1, which is
precisely what the binomial collapse of the power form gives at small P (the
exact power form shares the value and curvature at P = 0 but its tail slope
is not what sets the physical decay scale; see ``vertex_P`` for both).

Two correlation engines are provided.  The default reduces the Cartesian P_x
integral by closing the contour on the quadratic form's simple pole, leaving
one smooth non-oscillatory integral over P_y (machine-accurate at any r).
The literal nested polar scheme (adaptive radial rule under a 64-point
angular trapezoid) is kept as ``engine="polar"``; its angular aliasing limits
it to roughly kappa*r <~ 3 at the few-1e-4 level, which is why it is not the
default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from . import ladder
from .ladder import KernelScalars, vertex_for_state
from .model import (
    DiagonalMixture,
    DomainError,
    Fock,
    InitialPhotonState,
    LifetimeModel,
    ModelParams,
    Thermal,
    Vacuum,
)
from .sectors import QuadratureError

__all__ = [
    "BracketError",
    "CorrelationProfile",
    "CriticalPoint",
    "CriticalReport",
    "ExponentFit",
    "FitRejected",
    "SlopeError",
    "correlation_function",
    "critical_report",
    "critical_temperature_for_state",
    "find_tc",
    "fit_gamma",
    "fit_nu",
    "fitted_pole_location",
    "kernel_mass",
    "mass_slope",
    "vertex_P",
]


class BracketError(RuntimeError):
    """No sign change of M(T) - 1 found on the scan grid."""

    def __init__(self, message, scan_table=None):
        super().__init__(message)
        self.scan_table = scan_table


class SlopeError(RuntimeError):
    """Non-positive mass slope: pathological parameters."""


class FitRejected(RuntimeError):
    """Least-squares fit failed the acceptance threshold."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class CriticalPoint:
    t_c: float
    mode: str
    bracket: tuple[float, float]
    residual: float
    flagged: bool = False
    n_brackets: int = 1


@dataclass(frozen=True)
class ExponentFit:
    exponent: float
    window: tuple[float, float]
    r_squared: float
    residual_max: float
    points: int


@dataclass(frozen=True)
class CorrelationProfile:
    r_grid: tuple
    values: tuple
    xi: float
    mass_slope: float
    anisotropy: float
    fit_window: tuple[float, float]
    r_squared: float
    engine: str


@dataclass(frozen=True)
class CriticalReport:
    state: InitialPhotonState
    t_c: float
    gamma: ExponentFit
    nu: ExponentFit | None
    xi: float | None
    xi_window: tuple[float, float] | None


# ---------------------------------------------------------------------------
# critical temperature
# ---------------------------------------------------------------------------

def kernel_mass(
    p: ModelParams,
    lt: LifetimeModel,
    temperature: float,
    mode: str = "vacuum",
    convention: str = "canonical",
    thermal_stat: float | None = None,
) -> float:
    """M_vac(T) or M_th(T); ``thermal_stat`` fixes the photon statistics."""
    k = KernelScalars.from_model(p, lt, temperature, convention)
    if mode == "vacuum":
        return float(k.m_vac)
    if mode == "thermal":
        if thermal_stat is None:
            return float(k.m_th)
        return float(k.a_bcs + 2 * k.c2 * thermal_stat**2)
    raise ValueError(f"unknown mode {mode!r}")


def find_tc(
    p: ModelParams,
    lt: LifetimeModel,
    mode: str = "vacuum",
    convention: str = "canonical",
    scan_range: tuple[float, float] = (1e-8, 0.99),
    n_scan: int = 512,
    rtol: float = 1e-12,
    thermal_stat: float | None = None,
) -> CriticalPoint:
    """Locate the root of M(T) = 1 by geometric scan plus bisection.

    The scan covers ``scan_range`` in units of E_F.  The upper end stays
    strictly below E_F: the Fermi-liquid lifetime formula degenerates
    (log -> 0) at the band edge, which would manufacture a spurious
    high-temperature crossing.  The instability root is a downward crossing
    (M > 1 below T_c: the vertex diverges on cooling); if the scan finds
    several crossings, the largest downward one is refined and the result is
    flagged.
    """
    lo_f, hi_f = scan_range
    ts = np.geomspace(lo_f * p.e_f, hi_f * p.e_f, n_scan)
    f = lambda T: kernel_mass(p, lt, T, mode, convention, thermal_stat) - 1.0
    vals = np.array([f(t) for t in ts])
    brackets = [
        (ts[i], ts[i + 1], vals[i] > vals[i + 1])
        for i in range(n_scan - 1)
        if vals[i] == 0.0 or (vals[i] > 0) != (vals[i + 1] > 0)
    ]
    if not brackets:
        raise BracketError(
            f"M(T) - 1 has no sign change on [{ts[0]:.3e}, {ts[-1]:.3e}] ({mode})",
            scan_table=list(zip(ts.tolist(), (vals + 1.0).tolist())),
        )
    flagged = len(brackets) > 1
    downward = [b for b in brackets if b[2]]
    lo, hi, _ = downward[-1] if downward else brackets[-1]
    bracket0 = (lo, hi)
    flo = f(lo)
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            lo = hi = mid
            break
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    tc = 0.5 * (lo + hi)
    return CriticalPoint(tc, mode, bracket0, abs(f(tc)), flagged, len(brackets))


def critical_temperature_for_state(
    state: InitialPhotonState,
    p: ModelParams,
    lt: LifetimeModel,
    convention: str = "canonical",
    **kw,
) -> CriticalPoint:
    """Dispatch the root mode on the photon state.

    Vacuum, number states and diagonal mixtures all diverge at the vacuum
    root; the equilibrium thermal state uses M_th, and a fixed-beta thermal
    state freezes its statistical factor.
    """
    if isinstance(state, (Vacuum, Fock, DiagonalMixture)):
        return find_tc(p, lt, "vacuum", convention, **kw)
    if isinstance(state, Thermal):
        if state.beta is None:
            return find_tc(p, lt, "thermal", convention, **kw)
        stat = 1.0 / math.tanh(state.beta * p.delta_c / 2.0)
        return find_tc(p, lt, "thermal", convention, thermal_stat=stat, **kw)
    raise TypeError(f"unknown photon state {state!r}")


def mass_slope(
    p: ModelParams,
    lt: LifetimeModel,
    mode: str = "vacuum",
    convention: str = "canonical",
    tc: float | None = None,
    h_rel: float = 1e-6,
    thermal_stat: float | None = None,
) -> float:
    """m = -dM/dT at T_c, Richardson-extrapolated central difference.

    The linear Taylor term then reads 1 - M(T) ~ m (T - T_c) with m > 0.
    """
    if tc is None:
        tc = find_tc(p, lt, mode, convention, thermal_stat=thermal_stat).t_c
    f = lambda T: kernel_mass(p, lt, T, mode, convention, thermal_stat)
    h = h_rel * tc
    d1 = (f(tc + h) - f(tc - h)) / (2 * h)
    d2 = (f(tc + h / 2) - f(tc - h / 2)) / h
    m = -(4 * d2 - d1) / 3
    if m <= 0:
        raise SlopeError(f"mass slope {m} is not positive at T_c={tc}")
    return m


def fitted_pole_location(
    n: int,
    p: ModelParams,
    lt: LifetimeModel,
    convention: str = "canonical",
    rtol: float = 1e-12,
) -> float:
    """Pole temperature of Gamma^n located from vertex values alone.

    The ratio Gamma^n / Gamma^(n+1) vanishes linearly and with a sign change
    at the pole, so the divergence can be bisected without referencing the
    kernel mass directly.
    """
    anchor = find_tc(p, lt, "vacuum", convention)
    lo, hi = anchor.bracket

    def ratio(T):
        vals = ladder.solve_fock_hierarchy(
            n + 1, KernelScalars.from_model(p, lt, T, convention)
        ).values
        return vals[n] / vals[n + 1]

    rlo = ratio(lo)
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        rm = ratio(mid)
        if rm == 0.0:
            return mid
        if (rm > 0) == (rlo > 0):
            lo, rlo = mid, rm
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# susceptibility exponent
# ---------------------------------------------------------------------------

def _geom(lo: float, hi: float, n: int) -> np.ndarray:
    return np.geomspace(lo, hi, n)


def _loglog_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), r2, float(np.max(np.abs(ly - pred)))


def fit_gamma(
    state: InitialPhotonState,
    p: ModelParams,
    lt: LifetimeModel,
    convention: str = "canonical",
    window: tuple[float, float] = (1e-6, 1e-3),
    points: int = 24,
    r2_min: float = 0.999,
) -> ExponentFit:
    """Susceptibility exponent from log|Gamma| vs log reduced temperature.

    Number states give n+1 (the pole order of the hierarchy), Gaussian states
    give 1.  The window must sit strictly above T_c; with the defaults the
    leading pole dominates subleading ones by >= 1e3 for n <= 5.
    """
    if points < 20:
        raise ValueError("need at least 20 window points")
    crit = critical_temperature_for_state(state, p, lt, convention)
    red = _geom(window[0], window[1], points)
    gams = np.empty(points)
    for i, t in enumerate(red):
        k = KernelScalars.from_model(p, lt, crit.t_c * (1.0 + t), convention)
        gams[i] = abs(float(vertex_for_state(state, k)))
    slope, r2, resid = _loglog_fit(red, gams)
    if r2 <= r2_min:
        raise FitRejected(
            f"gamma fit rejected: r^2 = {r2:.6f} <= {r2_min}",
            {"window": window, "r_squared": r2, "slope": slope, "state": state},
        )
    return ExponentFit(-slope, window, r2, resid, points)


# ---------------------------------------------------------------------------
# momentum-resolved vertex and spatial correlations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _LorentzianTerm:
    """One term amp / [c_par P_x^2 + c_perp P_y^2 + mass]^order."""

    amp: float
    c_par: float
    c_perp: float
    mass: float
    order: int

    def value(self, px: float, py: float) -> float:
        return self.amp / (self.c_par * px * px + self.c_perp * py * py + self.mass) ** self.order


def _vertex_terms(
    state: InitialPhotonState,
    gamma0: float,
    mass_gap: float,
    anisotropy: float,
    fock_form: str,
    isotropic: bool,
) -> list[_LorentzianTerm]:
    if anisotropy <= 0:
        raise ValueError("anisotropy must be > 0")
    if mass_gap <= 0:
        raise ValueError("mass gap must be > 0 (need T > T_c)")
    c_par = anisotropy if isotropic else 1.0 + anisotropy
    c_perp = anisotropy

    def fock_term(n: int, weight: float = 1.0) -> _LorentzianTerm:
        if fock_form == "power":
            return _LorentzianTerm(weight * gamma0, c_par, c_perp, mass_gap, n + 1)
        if fock_form == "reduced":
            amp = weight * gamma0 / (mass_gap**n * (n + 1))
            return _LorentzianTerm(amp, c_par, c_perp, mass_gap / (n + 1), 1)
        raise ValueError(f"unknown fock_form {fock_form!r}")

    if isinstance(state, Thermal):
        return [_LorentzianTerm(gamma0, c_par, c_perp, mass_gap, 1)]
    if isinstance(state, Vacuum):
        return [fock_term(0)]
    if isinstance(state, Fock):
        return [fock_term(state.n)]
    if isinstance(state, DiagonalMixture):
        return [fock_term(n, w) for n, w in state.weights.items() if w > 0]
    raise TypeError(f"unknown photon state {state!r}")


def vertex_P(
    state: InitialPhotonState,
    P: float,
    theta: float,
    T: float,
    p: ModelParams,
    lt: LifetimeModel,
    anisotropy: float = 1.0,
    fock_form: str = "power",
    convention: str = "canonical",
    crit: CriticalPoint | None = None,
    slope: float | None = None,
) -> float:
    """Pair vertex at center-of-mass momentum P and angle theta, T > T_c.

    ``fock_form="power"`` keeps the full pole order n+1; ``"reduced"`` is the
    small-P binomial collapse onto a single Lorentzian with the mass divided
    by n+1.  The two agree in value and curvature at P = 0.
    """
    if crit is None:
        crit = critical_temperature_for_state(state, p, lt, convention)
    if slope is None:
        slope = _slope_for_state(state, p, lt, convention, crit)
    dT = T - crit.t_c
    if dT <= 0:
        raise DomainError("vertex_P needs T > T_c")
    terms = _vertex_terms(
        state, ladder.bare_vertex(p), slope * dT, anisotropy, fock_form, isotropic=False
    )
    px = P * math.cos(theta)
    py = P * math.sin(theta)
    return sum(t.value(px, py) for t in terms)


def _slope_for_state(state, p, lt, convention, crit) -> float:
    if isinstance(state, Thermal):
        stat = None
        if state.beta is not None:
            stat = 1.0 / math.tanh(state.beta * p.delta_c / 2.0)
        return mass_slope(p, lt, "thermal", convention, tc=crit.t_c, thermal_stat=stat)
    return mass_slope(p, lt, "vacuum", convention, tc=crit.t_c)


def _corr_contour(term: _LorentzianTerm, r: float, epsrel: float) -> tuple[float, float, int]:
    """Fourier transform of one Lorentzian term by residue in P_x.

    Closing the P_x contour on the pole at i*mu(P_y), mu = sqrt((c_perp
    P_y^2 + mass)/c_par), turns the oscillatory 2D integral into a single
    smooth decaying integral over P_y.  Exact for every pole order.
    """
    q = term.order
    c_par, c_perp, mass = term.c_par, term.c_perp, term.mass
    fact = math.factorial
    binom = math.comb

    def inner(py: float) -> float:
        mu = math.sqrt((c_perp * py * py + mass) / c_par)
        s = 0j
        for j in range(q):
            s += (
                binom(q - 1, j)
                * (1j * r) ** (q - 1 - j)
                * (-1) ** j
                * (fact(q + j - 1) // fact(q - 1))
                * (2j * mu) ** (-(q + j))
            )
        val = 2j * math.pi * s * math.exp(-mu * r) / (fact(q - 1) * c_par**q)
        return val.real

    mu0 = math.sqrt(mass / c_par)
    decay = r * math.sqrt(c_perp / c_par)
    y_max = (60.0 + mu0 * r) / max(decay, 1e-300)
    v, e, info = quad(
        inner, 0.0, y_max, epsabs=0.0, epsrel=epsrel, limit=400, full_output=1
    )[:3]
    return 2.0 * v * term.amp / (2.0 * math.pi) ** 2, 2.0 * abs(term.amp) * e / (2.0 * math.pi) ** 2, info["neval"]


def _corr_polar(
    term: _LorentzianTerm, r: float, epsrel: float, n_angles: int
) -> tuple[float, float, int]:
    """Literal nested scheme: adaptive radial rule x angular trapezoid.

    The angular rule uses midpoints of n_angles equal sectors over the full
    circle (evaluated on a quarter by symmetry).  Radial support is capped at
    48/r with a smooth taper so the angular rule never aliases; the cap makes
    the scheme accurate only while the integrand dies out before the cap,
    i.e. for kappa*r up to a few.
    """
    n_q = n_angles // 4
    th = (np.arange(n_q) + 0.5) * (math.pi / (2 * n_q))  # quarter circle by symmetry
    cs2 = np.cos(th) ** 2
    c_eff = term.c_par * cs2 + term.c_perp * (1.0 - cs2)
    rc = r * np.cos(th)
    p_max = 48.0 / r
    p_taper = 0.7 * p_max

    def radial(P: float) -> float:
        w = 1.0
        if P > p_taper:
            w = math.cos(0.5 * math.pi * (P - p_taper) / (p_max - p_taper)) ** 2
        ang = np.mean(np.cos(P * rc) / (c_eff * P * P + term.mass) ** term.order)
        return w * P * ang

    v, e, info = quad(
        radial, 0.0, p_max, epsabs=0.0, epsrel=epsrel, limit=600, full_output=1
    )[:3]
    scale = term.amp / (2.0 * math.pi)
    return v * scale, abs(scale) * e, info["neval"]


def correlation_function(
    state: InitialPhotonState,
    p: ModelParams,
    lt: LifetimeModel,
    T: float,
    r_grid: Sequence[float] | None = None,
    anisotropy: float = 1.0,
    fock_form: str = "reduced",
    isotropic: bool = False,
    engine: str = "contour",
    angular_points: int = 64,
    rel_tol: float = 1e-6,
    convention: str = "canonical",
    refit: bool = True,
) -> CorrelationProfile:
    """Spatial pair correlation C(r) and the fitted correlation length.

    C(r) is the 2D Fourier transform of the momentum-resolved vertex along
    the distinguished axis, normalised with |gamma0| so the profile is
    positive.  xi comes from a log-linear fit of the tail over r in
    [3 xi_est, 10 xi_est] with one re-estimation pass.  For number states the
    default ``fock_form="reduced"`` fits the leading-pole form whose mass is
    reduced by n+1, the form whose decay sets the physical correlation
    length; ``"power"`` transforms the full (n+1)-order pole instead.
    """
    crit = critical_temperature_for_state(state, p, lt, convention)
    slope = _slope_for_state(state, p, lt, convention, crit)
    dT = T - crit.t_c
    if dT <= 0:
        raise DomainError("correlation_function needs T > T_c")
    terms = _vertex_terms(
        state, abs(ladder.bare_vertex(p)), slope * dT, anisotropy, fock_form, isotropic
    )
    # slowest decay across terms sets the expected length
    xi_est = max(math.sqrt(t.c_par / t.mass) for t in terms)

    def evaluate(grid: np.ndarray) -> np.ndarray:
        out = np.empty(len(grid))
        for i, r in enumerate(grid):
            tot = err = 0.0
            for term in terms:
                if engine == "contour":
                    v, e, _ = _corr_contour(term, float(r), rel_tol * 1e-2)
                elif engine == "polar":
                    v, e, _ = _corr_polar(term, float(r), rel_tol * 1e-2, angular_points)
                else:
                    raise ValueError(f"unknown engine {engine!r}")
                tot += v
                err += e
            if tot <= 0:
                raise QuadratureError(f"non-positive correlation value at r={r}")
            if err > rel_tol * abs(tot):
                raise QuadratureError(
                    f"quadrature error {err:.3e} exceeds {rel_tol:.1e} relative at r={r}"
                )
            out[i] = tot
        return out

    external_grid = r_grid is not None
    if external_grid:
        grid = np.asarray(r_grid, dtype=float)
    else:
        grid = _geom(3.0 * xi_est, 10.0 * xi_est, 20)
    values = evaluate(grid)
    coeffs = np.polyfit(grid, np.log(values), 1)
    xi = -1.0 / coeffs[0]
    if refit and not external_grid and xi > 0:
        grid = _geom(3.0 * xi, 10.0 * xi, 20)
        values = evaluate(grid)
        coeffs = np.polyfit(grid, np.log(values), 1)
        xi = -1.0 / coeffs[0]
    pred = np.polyval(coeffs, grid)
    ss_res = float(np.sum((np.log(values) - pred) ** 2))
    ss_tot = float(np.sum((np.log(values) - np.log(values).mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    if xi <= 0:
        raise QuadratureError("fitted correlation length is not positive")
    return CorrelationProfile(
        tuple(grid.tolist()),
        tuple(values.tolist()),
        float(xi),
        slope,
        anisotropy,
        (float(grid[0]), float(grid[-1])),
        r2,
        engine,
    )


def critical_report(
    state: InitialPhotonState,
    p: ModelParams,
    lt: LifetimeModel,
    convention: str = "canonical",
    xi_reduced_t: float = 1e-4,
    anisotropy: float = 1.0,
    fock_form: str = "reduced",
) -> CriticalReport:
    """Bundle T_c, gamma, nu and xi for one photon state."""
    crit = critical_temperature_for_state(state, p, lt, convention)
    gamma = fit_gamma(state, p, lt, convention)
    nu = fit_nu(state, p, lt, convention,
                anisotropy=anisotropy, fock_form=fock_form)
    prof = correlation_function(
        state, p, lt, crit.t_c * (1.0 + xi_reduced_t),
        anisotropy=anisotropy, fock_form=fock_form, convention=convention,
    )
    return CriticalReport(state, crit.t_c, gamma, nu, prof.xi, prof.fit_window)


def fit_nu(
    state: InitialPhotonState,
    p: ModelParams,
    lt: LifetimeModel,
    convention: str = "canonical",
    window: tuple[float, float] = (1e-5, 1e-3),
    n_temps: int = 8,
    r2_min: float = 0.999,
    **corr_kwargs,
) -> ExponentFit:
    """Correlation-length exponent from log xi vs log reduced temperature.

    Uses >= 8 reduced temperatures spanning two decades; the answer is 1/2
    for Gaussian and number states alike (only the amplitude of xi knows the
    photon number).
    """
    if n_temps < 8:
        raise ValueError("need at least 8 temperatures")
    if window[1] / window[0] < 99.0:
        raise ValueError("window must span at least two decades")
    crit = critical_temperature_for_state(state, p, lt, convention)
    red = _geom(window[0], window[1], n_temps)
    xis = np.empty(n_temps)
    for i, t in enumerate(red):
        prof = correlation_function(
            state, p, lt, crit.t_c * (1.0 + t), convention=convention, **corr_kwargs
        )
        xis[i] = prof.xi
    slope, r2, resid = _loglog_fit(red, xis)
    if r2 <= r2_min:
        raise FitRejected(
            f"nu fit rejected: r^2 = {r2:.6f} <= {r2_min}",
            {"window": window, "r_squared": r2, "slope": slope, "state": state},
        )
    return ExponentFit(-slope, window, r2, resid, n_temps)
