"""Physical parameters and single-particle Keldysh Green's functions.

Fermions live near a 2D Fermi surface with a lifetime broadening; the cavity
supplies a single gapped boson mode of frequency ``delta_c`` (the detuning of
the resonance from the drive) and momentum ``q0 << k_F``.  Retarded functions
know nothing about the initial state; the Keldysh (statistical) functions
carry it, through a single scalar factor per mode:

    vacuum        1
    n quanta      1 + 2n
    thermal(beta) coth(beta * delta_c / 2)
    mixture       sum_n w_n (1 + 2n)

All operations are pure functions of immutable inputs and may be evaluated
concurrently without coordination.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence, Union

__all__ = [
    "ConstantLifetime",
    "DiagonalMixture",
    "DomainError",
    "FermiLiquidLifetime",
    "Fock",
    "InitialPhotonState",
    "LifetimeModel",
    "ModelParams",
    "Thermal",
    "Vacuum",
    "fermion_ga",
    "fermion_gk",
    "fermion_gr",
    "mean_photon_number",
    "photon_d0",
    "photon_da",
    "photon_dk_physical",
    "photon_dr",
    "photon_gk_two_time",
    "photon_im_dr_weights",
    "statistical_factor",
    "tau_inv",
]


class DomainError(ValueError):
    """Input outside the validity domain of a physical formula."""


def _finite(z: complex) -> complex:
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ArithmeticError(f"non-finite value escaped an operation: {z!r}")
    return z


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelParams:
    """All physical scales in one immutable record.

    ``g0`` is the light-matter coupling amplitude (units energy**0.5),
    ``delta_c`` the photon gap, ``q0`` the cavity momentum, ``e_f``/``k_f``
    the Fermi energy and momentum.  The derived dimensionless coupling
    ``gtilde = g0**2 / (4*pi*delta_c)**2`` is recomputed on access and never
    stored.  ``dispersion`` may override the default quadratic band
    ``e_f * ((k/k_f)**2 - 1)`` (measured from the Fermi surface).
    """

    g0: float
    delta_c: float
    q0: float
    e_f: float
    k_f: float
    dispersion: Callable[[float], float] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.delta_c <= 0:
            raise DomainError("delta_c must be > 0 (attractive regime)")
        if self.e_f <= 0 or self.k_f <= 0:
            raise DomainError("e_f and k_f must be > 0")
        if self.q0 < 0 or self.q0 > 0.1 * self.k_f:
            raise DomainError("q0 must satisfy 0 <= q0 << k_F (enforced: q0 <= 0.1 k_F)")

    @property
    def gtilde(self) -> float:
        return self.g0**2 / (4.0 * math.pi * self.delta_c) ** 2

    @classmethod
    def with_gtilde(
        cls, gtilde: float, delta_c: float, q0: float, e_f: float, k_f: float
    ) -> "ModelParams":
        """Build parameters from the dimensionless coupling instead of g0."""
        if gtilde <= 0:
            raise DomainError("gtilde must be > 0")
        return cls(
            g0=math.sqrt(gtilde) * 4.0 * math.pi * delta_c,
            delta_c=delta_c, q0=q0, e_f=e_f, k_f=k_f,
        )

    def eps(self, k: float) -> float:
        """Band dispersion measured from the Fermi surface."""
        if self.dispersion is not None:
            return self.dispersion(k)
        return self.e_f * ((k / self.k_f) ** 2 - 1.0)

    def in_cavity_units(self) -> "ModelParams":
        """Return a copy with all energies rescaled so that delta_c = 1."""
        s = self.delta_c
        return ModelParams(
            g0=self.g0 / math.sqrt(s),
            delta_c=1.0,
            q0=self.q0,
            e_f=self.e_f / s,
            k_f=self.k_f,
            dispersion=None if self.dispersion is None else (lambda k: self.dispersion(k) / s),
        )


# ---------------------------------------------------------------------------
# quasiparticle lifetime
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantLifetime:
    """Temperature-independent broadening tau_inv (an energy)."""

    rate: float

    def __post_init__(self):
        if self.rate <= 0:
            raise DomainError("constant lifetime rate must be > 0")


@dataclass(frozen=True)
class FermiLiquidLifetime:
    """tau_inv(T) = (pi T^2 / 8 E_F) ln(E_F / T), valid for 0 < T < E_F."""


LifetimeModel = Union[ConstantLifetime, FermiLiquidLifetime]


def tau_inv(lt: LifetimeModel, p: ModelParams, temperature: float) -> float:
    if isinstance(lt, ConstantLifetime):
        return lt.rate
    if isinstance(lt, FermiLiquidLifetime):
        if not (0.0 < temperature < p.e_f):
            raise DomainError(
                f"Fermi-liquid lifetime needs 0 < T < E_F, got T={temperature}, E_F={p.e_f}"
            )
        return (math.pi * temperature**2 / (8.0 * p.e_f)) * math.log(p.e_f / temperature)
    raise TypeError(f"unknown lifetime model {lt!r}")


# ---------------------------------------------------------------------------
# initial photon states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Vacuum:
    pass


@dataclass(frozen=True)
class Fock:
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise DomainError("Fock occupation must be >= 0")


@dataclass(frozen=True)
class Thermal:
    """Thermal photon state.

    ``beta = None`` means the photons equilibrate with the electron bath, so
    the statistical factor is evaluated at the ambient electron temperature.
    """

    beta: float | None = None

    def __post_init__(self):
        if self.beta is not None and self.beta <= 0:
            raise DomainError("thermal beta must be > 0")


@dataclass(frozen=True)
class DiagonalMixture:
    weights: Mapping[int, float]

    def __post_init__(self):
        w = dict(self.weights)
        if not w:
            raise DomainError("mixture needs at least one weight")
        if any(n < 0 for n in w):
            raise DomainError("occupation numbers must be >= 0")
        if any(x < 0 for x in w.values()):
            raise DomainError("mixture weights must be non-negative")
        total = sum(w.values())
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"mixture weights sum to {total}, expected 1 within 1e-12")
        object.__setattr__(self, "weights", dict(sorted(w.items())))

    def __hash__(self):
        return hash(tuple(self.weights.items()))


InitialPhotonState = Union[Vacuum, Fock, Thermal, DiagonalMixture]


def statistical_factor(
    state: InitialPhotonState, p: ModelParams, temperature: float | None = None
) -> float:
    """Scalar s multiplying the vacuum Keldysh photon function."""
    if isinstance(state, Vacuum):
        return 1.0
    if isinstance(state, Fock):
        return 1.0 + 2.0 * state.n
    if isinstance(state, Thermal):
        beta = state.beta
        if beta is None:
            if temperature is None or temperature <= 0:
                raise DomainError("equilibrium thermal state needs a positive ambient temperature")
            beta = 1.0 / temperature
        return 1.0 / math.tanh(beta * p.delta_c / 2.0)
    if isinstance(state, DiagonalMixture):
        return sum(w * (1.0 + 2.0 * n) for n, w in state.weights.items())
    raise TypeError(f"unknown photon state {state!r}")


def mean_photon_number(
    state: InitialPhotonState, p: ModelParams, temperature: float | None = None
) -> float:
    """Mean occupation of the cavity mode in the given initial state."""
    if isinstance(state, Vacuum):
        return 0.0
    if isinstance(state, Fock):
        return float(state.n)
    if isinstance(state, Thermal):
        beta = state.beta
        if beta is None:
            if temperature is None or temperature <= 0:
                raise DomainError("equilibrium thermal state needs a positive ambient temperature")
            beta = 1.0 / temperature
        return 0.5 / math.tanh(beta * p.delta_c / 2.0) - 0.5
    if isinstance(state, DiagonalMixture):
        return sum(w * n for n, w in state.weights.items())
    raise TypeError(f"unknown photon state {state!r}")


# ---------------------------------------------------------------------------
# fermion Green's functions (frequency domain, near the Fermi surface)
# ---------------------------------------------------------------------------

def fermion_gr(
    k: float,
    omega: float,
    p: ModelParams,
    lt: LifetimeModel,
    temperature: float,
    advanced: bool = False,
) -> complex:
    """Retarded (advanced on request) fermion propagator 1/(w - eps_k +- i/tau)."""
    rate = tau_inv(lt, p, temperature)
    sign = -1.0 if advanced else 1.0
    return _finite(1.0 / complex(omega - p.eps(k), sign * rate))


def fermion_ga(k, omega, p, lt, temperature):
    return fermion_gr(k, omega, p, lt, temperature, advanced=True)


def fermion_gk(
    k: float, omega: float, p: ModelParams, lt: LifetimeModel, temperature: float
) -> complex:
    """Keldysh fermion propagator broadened by the finite lifetime.

    G_K = [1/(w - eps - i/tau)] * [-2i tanh(w/2T) / tau] / (w - eps + i/tau);
    purely imaginary for real arguments and odd in w on the Fermi surface.
    """
    rate = tau_inv(lt, p, temperature)
    e = p.eps(k)
    num = -2.0j * rate * math.tanh(omega / (2.0 * temperature))
    return _finite(num / ((omega - e) ** 2 + rate**2))


# ---------------------------------------------------------------------------
# photon propagators
# ---------------------------------------------------------------------------

def photon_dr(omega: float, p: ModelParams, eta: float, advanced: bool = False) -> complex:
    """Retarded/advanced photon propagator 1/[2(w +- i eta)^2 - 2 delta_c^2].

    ``eta`` regularises the resonance poles at +-delta_c and must be > 0;
    vertex computations never integrate over this Lorentzian; they use the
    exact delta-comb of ``photon_im_dr_weights`` instead.
    """
    if eta <= 0:
        raise DomainError("eta must be > 0")
    sign = -1.0 if advanced else 1.0
    z = complex(omega, sign * eta)
    return _finite(1.0 / (2.0 * z * z - 2.0 * p.delta_c**2))


def photon_da(omega, p, eta):
    return photon_dr(omega, p, eta, advanced=True)


def photon_d0(z: complex, p: ModelParams) -> complex:
    """Analytic continuation 1/(2 z^2 - 2 delta_c^2), poles at +-delta_c.

    This is the eta -> 0 limit off the real axis; on the real axis it is the
    principal-value part shared by the retarded and advanced functions.
    """
    return _finite(1.0 / (2.0 * complex(z) ** 2 - 2.0 * p.delta_c**2))


def photon_im_dr_weights(p: ModelParams) -> tuple[tuple[float, float], tuple[float, float]]:
    """Exact delta-comb of 2i Im D_R: weights of delta(w -+ delta_c).

    Returns ((+delta_c, -pi/(2 delta_c)), (-delta_c, +pi/(2 delta_c))); the
    caller supplies the overall factor i.
    """
    w = math.pi / (2.0 * p.delta_c)
    return ((p.delta_c, -w), (-p.delta_c, +w))


def photon_dk_physical(
    t: float,
    tp: float,
    p: ModelParams,
    state: InitialPhotonState,
    temperature: float | None = None,
) -> complex:
    """Physical Keldysh photon function -i s cos(delta_c (t-t')) / (2 delta_c)."""
    s = statistical_factor(state, p, temperature)
    return _finite(-1.0j * s * math.cos(p.delta_c * (t - tp)) / (2.0 * p.delta_c))


def photon_gk_two_time(
    omegas: Sequence[float],
    occupation: Sequence[Sequence[complex]],
    s: int,
    sp: int,
    t: float,
    tp: float,
) -> complex:
    """Two-time Keldysh function for a number-conserving initial state.

    G_K(s, s', t, t') = -i (1 + 2 <b^dag_s b_s'>) exp(-i(w_s t - w_s' t')).
    ``occupation`` is the matrix of initial correlators and must be Hermitian;
    off-diagonal entries break time-translation invariance.
    """
    m = [list(row) for row in occupation]
    nmodes = len(m)
    if nmodes != len(omegas) or any(len(row) != nmodes for row in m):
        raise ValueError("occupation matrix shape must match the mode list")
    scale = max(1.0, max(abs(complex(x)) for row in m for x in row))
    for i in range(nmodes):
        for j in range(nmodes):
            if abs(complex(m[i][j]) - complex(m[j][i]).conjugate()) > 1e-12 * scale:
                raise ValueError("occupation matrix must be Hermitian")
    phase = cmath.exp(-1.0j * (omegas[s] * t - omegas[sp] * tp))
    return _finite(-1.0j * (1.0 + 2.0 * complex(m[s][sp])) * phase)
