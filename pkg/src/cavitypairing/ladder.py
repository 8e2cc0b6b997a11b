"""On-shell ladder equations for the cavity pairing channel.

The resummed scattering vertex of two electrons at the Fermi surface, with the
photon either absorbed virtually (static channel, kernel ``a_bcs = gtilde *
delta_c / T``) or exchanged as a real resonant quantum (kernel ``c2 = (gtilde
* delta_c * tau)**2``), closes on a single on-shell component.  With the
quadratic source u attached to the photon's statistical line, the intermediate
vertex is an exact rational function of u,

    Gamma(u) = gamma0 / (1 - a_bcs - 2*c2*((1+u)/(1-u))**2),

and the physical vertex for n photons is the n-th Taylor coefficient of
Gamma(u)/(1-u).  Equivalently, the sector values obey the recursion

    Gamma^m = [gamma0 + w * sum_{j<m} (m-j) Gamma^j] / (1 - m_vac),

with hierarchy coupling weight w = 8*c2 and m_vac = a_bcs + 2*c2.  Both routes
are implemented independently; ``oracle_check`` demands bit-exact agreement in
rational arithmetic.  A thermal (Gaussian) photon state collapses the whole
structure to a single equation with m_th = a_bcs + 2*c2*coth(delta_c/2T)**2.

Published variants of the kernel normalisation differ by factors of two; they
are exposed as a convention switch and rescale ``a_bcs``/``c2`` only.  No
critical exponent depends on the choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Union

from .model import (
    DiagonalMixture,
    Fock,
    InitialPhotonState,
    LifetimeModel,
    ModelParams,
    Thermal,
    Vacuum,
    tau_inv,
)
from .useries import RationalFunction, taylor

__all__ = [
    "CONVENTIONS",
    "CriticalityError",
    "KernelScalars",
    "OracleReport",
    "ResummationReport",
    "VertexHierarchy",
    "bare_vertex",
    "intermediate_vertex_closed_form",
    "oracle_check",
    "physical_vertex_series",
    "solve_fock_hierarchy",
    "solve_thermal",
    "thermal_resummation_check",
    "vertex_for_state",
]

Number = Union[int, float, Fraction]

#: Kernel normalisation variants: (bcs factor, resonant factor) multipliers
#: applied on top of the canonical a_bcs = gtilde*delta_c/T, c2 = (gtilde*delta_c*tau)**2.
CONVENTIONS = {
    "canonical": (1, 1),
    "eq-bs-u-freq": (2, 1),
    "subsec-tc": (2, 16),
}


class CriticalityError(ArithmeticError):
    """Kernel sits on the pairing instability; the linear solve is singular."""


def _exact(x: Number) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)  # exact binary value
    raise TypeError(f"cannot lift {type(x).__name__} to a rational")


def bare_vertex(p: ModelParams) -> float:
    """Bare pairing vertex gamma0 = -g0**2 / (2 delta_c) (attractive)."""
    return -p.g0**2 / (2.0 * p.delta_c)


@dataclass(frozen=True)
class KernelScalars:
    """Scalar kernels of the on-shell ladder at one temperature.

    ``thermal_stat`` is coth(delta_c / 2T) for the equilibrium thermal
    closure; 1 reproduces the vacuum.  ``gtilde`` and ``dct`` (= delta_c *
    tau) are kept when known so the frequency-sector system can be assembled
    from the same primitives.  Fields may be floats or Fractions; ``exact()``
    lifts every float to its exact binary rational.
    """

    gamma0: Number
    a_bcs: Number
    c2: Number
    thermal_stat: Number = 1
    gtilde: Number | None = None
    dct: Number | None = None
    delta_c: Number | None = None
    temperature: Number | None = None
    convention: str = "canonical"

    def __post_init__(self):
        if self.c2 < 0:
            raise ValueError("c2 must be >= 0")
        if self.convention not in CONVENTIONS:
            raise ValueError(f"unknown convention {self.convention!r}")

    @property
    def w(self) -> Number:
        """Hierarchy coupling weight, 8*c2."""
        return 8 * self.c2

    @property
    def m_vac(self) -> Number:
        return self.a_bcs + 2 * self.c2

    @property
    def m_th(self) -> Number:
        return self.a_bcs + 2 * self.c2 * self.thermal_stat**2

    @classmethod
    def from_model(
        cls,
        p: ModelParams,
        lt: LifetimeModel,
        temperature: float,
        convention: str = "canonical",
    ) -> "KernelScalars":
        if temperature <= 0:
            raise ValueError("temperature must be > 0")
        if convention not in CONVENTIONS:
            raise ValueError(f"unknown convention {convention!r}")
        fa, fc = CONVENTIONS[convention]
        g = p.gtilde
        dct = p.delta_c / tau_inv(lt, p, temperature)
        return cls(
            gamma0=bare_vertex(p),
            a_bcs=fa * g * p.delta_c / temperature,
            c2=fc * (g * dct) ** 2,
            thermal_stat=1.0 / math.tanh(p.delta_c / (2.0 * temperature)),
            gtilde=g,
            dct=dct,
            delta_c=p.delta_c,
            temperature=temperature,
            convention=convention,
        )

    def exact(self) -> "KernelScalars":
        """Lift every numeric field to exact rationals (floats are dyadic)."""
        return replace(
            self,
            gamma0=_exact(self.gamma0),
            a_bcs=_exact(self.a_bcs),
            c2=_exact(self.c2),
            thermal_stat=_exact(self.thermal_stat),
            gtilde=None if self.gtilde is None else _exact(self.gtilde),
            dct=None if self.dct is None else _exact(self.dct),
        )

    def is_exact(self) -> bool:
        return all(
            isinstance(x, (int, Fraction))
            for x in (self.gamma0, self.a_bcs, self.c2, self.thermal_stat)
        )


@dataclass(frozen=True)
class VertexHierarchy:
    """On-shell vertex values Gamma^0..Gamma^n at one temperature."""

    values: tuple
    kernel: KernelScalars
    temperature: Number | None = None
    weight_mode: str = "physical"

    def __getitem__(self, n: int):
        return self.values[n]

    def __len__(self):
        return len(self.values)


def _check_off_criticality(one_minus_m) -> None:
    if isinstance(one_minus_m, Fraction):
        if one_minus_m == 0:
            raise CriticalityError("1 - m_vac = 0: kernel sits exactly on the instability")
    elif abs(one_minus_m) < 1e-14:
        raise CriticalityError(f"|1 - m_vac| = {abs(one_minus_m):.3e} < 1e-14")


def solve_fock_hierarchy(
    n: int,
    kernel: KernelScalars,
    weight_mode: str = "physical",
    mutate_f: bool = False,
) -> VertexHierarchy:
    """Solve the sector recursion bottom-up from the vacuum component.

    ``weight_mode="physical"`` uses the coupling weight w = 8*c2;
    ``"unit-weight"`` sets w = 1, which reproduces the display
    coefficients (1; 1,1; 1,3,1; ...) of the iterated solution.
    ``mutate_f`` deliberately corrupts the inter-sector coupling
    coefficients (negative control for the oracle check).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if weight_mode not in ("physical", "unit-weight"):
        raise ValueError(f"unknown weight_mode {weight_mode!r}")
    gamma0, denom = kernel.gamma0, 1 - kernel.m_vac
    _check_off_criticality(denom)
    w = kernel.w if weight_mode == "physical" else 1
    values = []
    for m in range(n + 1):
        drive = gamma0
        for j in range(m):
            k = m - j
            coeff = w * (k + 1 if mutate_f else k)
            drive = drive + coeff * values[j]
        values.append(drive / denom)
    return VertexHierarchy(tuple(values), kernel, kernel.temperature, weight_mode)


def intermediate_vertex_closed_form(kernel: KernelScalars) -> RationalFunction:
    """Exact rational function Gamma(u) = gamma0 / (1 - a_bcs - 2*c2*f(u)^2).

    Floats in the kernel are lifted to their exact binary rationals, so the
    closed form is always exact given its inputs.
    """
    k = kernel.exact()
    one_m_a = 1 - k.a_bcs
    # (1-a)(1-u)^2 - 2 c2 (1+u)^2, expanded
    den = RationalFunction(
        (one_m_a - 2 * k.c2, -2 * one_m_a - 4 * k.c2, one_m_a - 2 * k.c2)
    )
    if den(0) == 0:
        raise CriticalityError("pole at u = 0: kernel sits exactly on the instability")
    num = RationalFunction((k.gamma0,)) * RationalFunction((1, -2, 1))
    return num / den


def physical_vertex_series(kernel: KernelScalars, order: int) -> list[Fraction]:
    """Taylor coefficients of Gamma(u)/(1-u): the exact sector values."""
    rf = intermediate_vertex_closed_form(kernel) / RationalFunction((1, -1))
    return taylor(rf, order)


@dataclass(frozen=True)
class OracleReport:
    ok: bool
    max_abs_discrepancy: Fraction
    hierarchy: tuple
    series: tuple


def oracle_check(n: int, kernel: KernelScalars, mutate_f: bool = False) -> OracleReport:
    """Compare recursion against the series oracle, coefficient by coefficient.

    Both sides run in exact rational arithmetic (float kernels are lifted to
    their dyadic values first); agreement must be bit-exact.
    """
    k = kernel.exact()
    rec = solve_fock_hierarchy(n, k, mutate_f=mutate_f).values
    ser = tuple(physical_vertex_series(k, n))
    diffs = [abs(a - b) for a, b in zip(rec, ser)]
    worst = max(diffs) if diffs else Fraction(0)
    return OracleReport(worst == 0, worst, rec, ser)


def solve_thermal(kernel: KernelScalars):
    """Closed thermal vertex gamma0 / (1 - m_th)."""
    denom = 1 - kernel.m_th
    if isinstance(denom, Fraction):
        if denom == 0:
            raise CriticalityError("m_th = 1: thermal kernel on the instability")
    elif abs(denom) < 1e-14:
        raise CriticalityError(f"|1 - m_th| = {abs(denom):.3e} < 1e-14")
    return kernel.gamma0 / denom


@dataclass(frozen=True)
class ResummationReport:
    residual: float
    n_used: int
    tail: float
    warned: bool


def thermal_resummation_check(
    kernel: KernelScalars, x: Number, n_max: int | None = None
) -> ResummationReport:
    """Check that the Boltzmann-weighted sector sum closes onto m_th.

    ``x`` is the Boltzmann ratio exp(-beta * delta_c) of the photon mode.
    The truncated weighted sum (1-x) * sum_{m<=N} x^m Gamma^m is compared
    against gamma0 / (1 - a_bcs - 2*c2*((1+x)/(1-x))**2); both sides are
    built from the same recursion coefficients, so the residual isolates the
    rearrangement algebra plus the truncation tail.  A tail with x**N >=
    1e-12 triggers a warning flag, not a failure.
    """
    if not 0 <= x < 1:
        raise ValueError("need 0 <= x < 1")
    k = kernel.exact()
    xe = _exact(x)
    if n_max is None:
        n_max = 0
        if xe > 0:
            while xe**n_max >= Fraction(1, 10**12) and n_max < 512:
                n_max += 1
    hier = solve_fock_hierarchy(n_max, k)
    partial = (1 - xe) * sum(
        (xe**m * hier.values[m] for m in range(n_max + 1)), Fraction(0)
    )
    stat = (1 + xe) / (1 - xe)
    closed_kernel = replace(k, thermal_stat=stat)
    closed = solve_thermal(closed_kernel)
    residual = abs(float(partial - closed))
    tail = float(xe**n_max)
    warned = xe > 0 and tail >= 1e-12
    return ResummationReport(residual, n_max, tail, warned)


def vertex_for_state(
    state: InitialPhotonState,
    kernel: KernelScalars,
    weight_mode: str = "physical",
):
    """Physical on-shell vertex for one initial photon state.

    Fock states read the hierarchy, diagonal mixtures average it, and the
    equilibrium thermal state uses the closed form with the kernel's own
    statistical factor.
    """
    if isinstance(state, Vacuum):
        return solve_fock_hierarchy(0, kernel, weight_mode).values[0]
    if isinstance(state, Fock):
        return solve_fock_hierarchy(state.n, kernel, weight_mode).values[state.n]
    if isinstance(state, Thermal):
        k = kernel
        if state.beta is not None:
            if kernel.delta_c is None:
                raise ValueError("fixed-beta thermal vertex needs delta_c on the kernel")
            k = replace(
                kernel,
                thermal_stat=1.0 / math.tanh(state.beta * float(kernel.delta_c) / 2.0),
            )
        return solve_thermal(k)
    if isinstance(state, DiagonalMixture):
        top = max(state.weights)
        hier = solve_fock_hierarchy(top, kernel, weight_mode)
        return sum(w * hier.values[m] for m, w in state.weights.items())
    raise TypeError(f"unknown photon state {state!r}")
