"""Casimir free energy and pressure of a metal film on a thick metal plate.

Medium 1 is the plate (half-space), medium 2 the film of thickness a and
medium 3 vacuum. All per-term integrals are done in y = 2 a k^(2) with the
prefactors

    F = k_B T / (8 pi a^2) sum'_l int y dy   sum_alpha ln(1 - r23 r21 e^-y)
    P = -k_B T / (8 pi a^3) sum'_l int y^2 dy sum_alpha r23 r21 e^-y / (1 - r23 r21 e^-y)

where the primed sum halves the l = 0 term.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
import math

import numpy as np

from . import _kernels as K
from .constants import ENERGY_DENSITY_SI, HBAR_C, KB, PRESSURE_SI, matsubara_spacing
from .errors import ConfigError, ConvergenceError, ModelError
from .materials import Material
from .permittivity import PermittivityModel, Variant, check_same_limit, eval as eval_eps
from .polylog import li3

MIN_THICKNESS = 10.0  # nm; anisotropy of thinner films is not modelled
L_MAX_HARD = 20000
TRUNCATION_RTOL = 1e-9


@dataclass(frozen=True)
class FilmSystem:
    """Film (medium 2) of ``thickness`` nm on ``plate`` (medium 1), vacuum above."""

    film: Material
    plate: Material
    thickness: float
    temperature: float = 300.0
    variant: Variant = Variant.SIMPLE_DRUDE
    allow_thin: bool = False
    film_model: PermittivityModel = field(init=False, repr=False, compare=False)
    plate_model: PermittivityModel = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        variant = Variant.parse(self.variant)
        object.__setattr__(self, "variant", variant)
        object.__setattr__(self, "thickness", float(self.thickness))
        object.__setattr__(self, "temperature", float(self.temperature))
        if not self.thickness > 0:
            raise ConfigError(f"film thickness must be > 0 nm, got {self.thickness}")
        if self.thickness < MIN_THICKNESS and not self.allow_thin:
            raise ConfigError(f"film thickness {self.thickness} nm is below {MIN_THICKNESS} nm; "
                              "pass allow_thin=True to override")
        if not self.temperature > 0:
            raise ConfigError(f"temperature must be > 0 K, got {self.temperature}")
        if variant.is_data:
            for role, m in (("film", self.film), ("plate", self.plate)):
                if m.table is None:
                    raise ConfigError(f"{variant.value} needs an optical data table for the {role} ({m.name})")
        object.__setattr__(self, "film_model", PermittivityModel.for_material(self.film, variant))
        object.__setattr__(self, "plate_model", PermittivityModel.for_material(self.plate, variant))

    def with_thickness(self, a):
        return replace(self, thickness=a)

    def with_variant(self, variant):
        return replace(self, variant=variant)

    def describe(self):
        return (f"{self.film.name} film on {self.plate.name} plate, {self.variant.value}, "
                f"a={self.thickness:g} nm, T={self.temperature:g} K")


@dataclass(frozen=True)
class MatsubaraGrid:
    temperature: float
    l_max: int

    @property
    def spacing(self):
        return matsubara_spacing(self.temperature)

    @property
    def xi(self):
        """xi_l in eV for l = 0..l_max; xi_0 is exactly 0."""
        return np.arange(self.l_max + 1) * self.spacing

    @property
    def weights(self):
        w = np.ones(self.l_max + 1)
        w[0] = 0.5
        return w


@dataclass(frozen=True)
class ReflectionPair:
    r_tm: float
    r_te: float
    interface: tuple


@dataclass(frozen=True)
class ZeroFrequencyCoefficients:
    r_tm_21: float
    r_tm_23: float
    r_te_21: float
    r_te_23: float


def _fresnel(e_n, e_2, kp2, q2):
    """Cancellation-free TM and TE coefficients r^(2,n) at imaginary frequency."""
    if kp2 < 0 or q2 < 0 or e_n < 0 or e_2 < 0:
        raise ValueError("square-root arguments must be nonnegative at imaginary frequency")
    k2 = math.sqrt(kp2 + e_2 * q2)
    kn = math.sqrt(kp2 + e_n * q2)
    d = e_n * k2 + e_2 * kn
    r_tm = (e_n - e_2) * ((e_n + e_2) * kp2 + e_n * e_2 * q2) / (d * d)
    s = k2 + kn
    r_te = (e_2 - e_n) * q2 / (s * s)
    return r_tm, r_te


def reflection(interface, l, k_perp, system):
    """r_TM and r_TE at the (2,1) film/plate or (2,3) film/vacuum interface, l >= 1.

    ``k_perp`` is in nm^-1.
    """
    interface = tuple(interface)
    if interface not in ((2, 1), (2, 3)):
        raise ValueError(f"interface must be (2, 1) or (2, 3), got {interface}")
    if l < 1:
        raise ValueError("reflection() covers l >= 1; use zero_freq_coefficients for l = 0")
    if k_perp < 0:
        raise ValueError("k_perp must be >= 0")
    xi = l * matsubara_spacing(system.temperature)
    q2 = (xi / HBAR_C) ** 2
    e2 = eval_eps(system.film_model, xi)
    en = eval_eps(system.plate_model, xi) if interface == (2, 1) else 1.0
    r_tm, r_te = _fresnel(en, e2, k_perp * k_perp, q2)
    return ReflectionPair(r_tm, r_te, interface)


def drude_static_reflection(system):
    """r_D^(0): the k_perp-independent TM coefficient at the film/plate interface, xi = 0."""
    d1, d2 = system.plate.drude, system.film.drude
    if d1.relaxation_frequency == 0 or d2.relaxation_frequency == 0:
        raise ModelError("r_D^(0) needs nonzero relaxation frequencies")
    a = d1.plasma_frequency ** 2 * d2.relaxation_frequency
    b = d2.plasma_frequency ** 2 * d1.relaxation_frequency
    return (a - b) / (a + b)


def _is_drude_static(system):
    return check_same_limit(system.film_model, system.plate_model) == "drude"


def zero_freq_coefficients(system, k_perp=0.0):
    """Reflection coefficients at zero Matsubara frequency.

    Drude-type metals: r_TM^(2,1) = r_D^(0), r_TM^(2,3) = -1 and r_TE = 0,
    all independent of ``k_perp``. Plasma-type metals: the k_perp-dependent
    limits of the Fresnel formulas with eps xi^2 -> wp^2.
    """
    if _is_drude_static(system):
        return ZeroFrequencyCoefficients(drude_static_reflection(system), -1.0, 0.0, 0.0)
    o1 = (system.plate.drude.plasma_frequency / HBAR_C) ** 2
    o2 = (system.film.drude.plasma_frequency / HBAR_C) ** 2
    kp2 = k_perp * k_perp
    k1 = math.sqrt(kp2 + o1)
    k2 = math.sqrt(kp2 + o2)
    d = o1 * k2 + o2 * k1
    r_tm_21 = (o1 - o2) * ((o1 + o2) * kp2 + o1 * o2) / (d * d)
    r_te_21 = (o2 - o1) / (k2 + k1) ** 2
    r_te_23 = o2 / (k2 + k_perp) ** 2
    return ZeroFrequencyCoefficients(r_tm_21, -1.0, r_te_21, r_te_23)


def _prefactor(system, kind):
    a = system.thickness
    kT = KB * system.temperature
    if kind == K.FREE_ENERGY:
        return kT / (8.0 * math.pi * a * a) * ENERGY_DENSITY_SI
    return -kT / (8.0 * math.pi * a ** 3) * PRESSURE_SI


def _static_term(system, kind, numeric=False, backend=None):
    """Unweighted y-integral of the l = 0 term and its panel count."""
    a = system.thickness
    if _is_drude_static(system):
        r_d = drude_static_reflection(system)
        if not numeric:
            # int y ln(1 + r e^-y) dy = -Li3(-r); int y^2 (-r e^-y)/(1 + r e^-y) dy = 2 Li3(-r)
            return (-li3(-r_d) if kind == K.FREE_ENERGY else 2.0 * li3(-r_d)), 0
        regime, p1, p2, ymin = K.DRUDE_STATIC, r_d, 0.0, 0.0
    else:
        p1 = (system.plate.drude.plasma_frequency / HBAR_C) ** 2
        p2 = (system.film.drude.plasma_frequency / HBAR_C) ** 2
        regime, ymin = K.PLASMA_STATIC, 2.0 * a * math.sqrt(p2)
    J, panels, ok = K.integrate_block(a, kind, np.array([regime]), np.array([p1]), np.array([p2]),
                                      np.zeros(1), np.array([ymin]), backend=backend)
    if not ok[0]:
        raise ConvergenceError("zero-frequency quadrature did not reach tolerance",
                               {"thickness_nm": a, "l": 0})
    return float(J[0] * math.exp(-ymin)), int(panels[0])


def _matsubara_terms(system, kind, l_lo, l_hi, backend=None):
    """Unweighted y-integrals for l_lo <= l < l_hi (l >= 1)."""
    a = system.thickness
    l = np.arange(l_lo, l_hi)
    xi = l * matsubara_spacing(system.temperature)
    e1 = np.asarray(eval_eps(system.plate_model, xi), dtype=float)
    e2 = np.asarray(eval_eps(system.film_model, xi), dtype=float)
    q2 = (xi / HBAR_C) ** 2
    ymin = 2.0 * a * np.sqrt(e2 * q2)
    regime = np.full(l.size, K.MATSUBARA, dtype=np.int64)
    J, panels, ok = K.integrate_block(a, kind, regime, e1, e2, q2, ymin, backend=backend)
    if not np.all(ok):
        bad = int(l[np.argmin(ok)])
        raise ConvergenceError("wave-vector quadrature did not reach tolerance",
                               {"thickness_nm": a, "l": bad})
    with np.errstate(under="ignore"):
        values = J * np.exp(-ymin)
    return values, panels


@dataclass
class SeriesResult:
    value: float          # SI: J/m^2 or Pa
    l_max: int
    panels: int
    terms: np.ndarray = field(repr=False)  # weighted, unscaled y-integrals, l = 0..l_max


def matsubara_sum(system, kind, l_max=None, backend=None, numeric_static=False):
    """Primed Matsubara sum for the free energy (kind=0) or pressure (kind=1).

    Without ``l_max`` terms are added in ascending l until three consecutive
    terms are each below 1e-9 of the running total and the geometric tail
    they imply is below the same bound; with ``l_max`` exactly l = 0..l_max
    are summed. The final reduction is an exactly rounded sum in index
    order, so the result does not depend on how the terms were scheduled.
    """
    t0, panels = _static_term(system, kind, numeric=numeric_static, backend=backend)
    terms = [0.5 * t0]
    if l_max is not None:
        if l_max >= 1:
            v, p = _matsubara_terms(system, kind, 1, l_max + 1, backend)
            terms.extend(v.tolist())
            panels += int(p.sum())
        total = math.fsum(terms)
        return SeriesResult(_prefactor(system, kind) * total + 0.0, l_max, panels, np.array(terms))

    running = terms[0]
    absolute = abs(terms[0])
    quiet = 0
    prev = abs(terms[0])
    l_next = 1
    block = 16
    stop = None
    while stop is None:
        if l_next > L_MAX_HARD:
            raise ConvergenceError(
                f"Matsubara series not converged after {L_MAX_HARD} terms ({system.describe()})",
                {"thickness_nm": system.thickness, "l_max": L_MAX_HARD, "partial_sum": running,
                 "last_term": terms[-1]})
        hi = min(l_next + block, L_MAX_HARD + 1)
        v, p = _matsubara_terms(system, kind, l_next, hi, backend)
        for j, t in enumerate(v.tolist()):
            l = l_next + j
            terms.append(t)
            panels += int(p[j])
            running += t
            absolute += abs(t)
            scale = TRUNCATION_RTOL * max(abs(running), 1e-6 * absolute)
            at = abs(t)
            if at == 0.0:
                tail = 0.0
            else:
                ratio = at / prev if prev > 0 else 1.0
                tail = at * ratio / (1.0 - ratio) if ratio < 1.0 else math.inf
            prev = at
            if at <= scale and tail <= scale:
                quiet += 1
                if quiet == 3:
                    stop = l
                    break
            else:
                quiet = 0
        l_next = hi
        block = min(block * 2, 1024)
    total = math.fsum(terms)
    return SeriesResult(_prefactor(system, kind) * total + 0.0, stop, panels, np.array(terms))


@dataclass(frozen=True)
class LifshitzResult:
    free_energy: float   # J/m^2
    pressure: float      # Pa
    l_max_free_energy: int
    l_max_pressure: int
    panels: int

    @property
    def l_max(self):
        return max(self.l_max_free_energy, self.l_max_pressure)


def compute(system, backend=None):
    f = matsubara_sum(system, K.FREE_ENERGY, backend=backend)
    p = matsubara_sum(system, K.PRESSURE, backend=backend)
    return LifshitzResult(f.value, p.value, f.l_max, p.l_max, f.panels + p.panels)


def free_energy(system, l_max=None, backend=None):
    """Casimir free energy per unit area of the film, J/m^2."""
    return matsubara_sum(system, K.FREE_ENERGY, l_max=l_max, backend=backend).value


def pressure(system, l_max=None, backend=None):
    """Casimir pressure on the film, Pa (negative means attraction)."""
    return matsubara_sum(system, K.PRESSURE, l_max=l_max, backend=backend).value


def zero_frequency_free_energy(system, numeric=False, backend=None):
    """The l = 0 contribution to the free energy (with its 1/2 weight), J/m^2."""
    t0, _ = _static_term(system, K.FREE_ENERGY, numeric=numeric, backend=backend)
    return 0.5 * t0 * _prefactor(system, K.FREE_ENERGY)


def zero_frequency_pressure(system, numeric=False, backend=None):
    t0, _ = _static_term(system, K.PRESSURE, numeric=numeric, backend=backend)
    return 0.5 * t0 * _prefactor(system, K.PRESSURE)


def _require_classical(system):
    if system.variant.is_plasma or not _is_drude_static(system):
        raise ModelError("no classical limit: the plasma model has no k_B T-only asymptote")
    return drude_static_reflection(system)


def classical_free_energy(system):
    """-k_B T Li3(-r_D^(0)) / (16 pi a^2), J/m^2."""
    r_d = _require_classical(system)
    a = system.thickness
    return -KB * system.temperature * li3(-r_d) / (16.0 * math.pi * a * a) * ENERGY_DENSITY_SI


def classical_pressure(system):
    """-k_B T Li3(-r_D^(0)) / (8 pi a^3), Pa."""
    r_d = _require_classical(system)
    a = system.thickness
    return -KB * system.temperature * li3(-r_d) / (8.0 * math.pi * a ** 3) * PRESSURE_SI


def classical_free_energy_series(system, order=3):
    """Small-r_D expansion k_B T r (1 - r/8 + r^2/27 - ...) / (16 pi a^2) truncated after ``order`` terms."""
    r_d = _require_classical(system)
    a = system.thickness
    s = sum((-1) ** (k - 1) * r_d ** (k - 1) / k ** 3 for k in range(1, order + 1))
    return KB * system.temperature * r_d * s / (16.0 * math.pi * a * a) * ENERGY_DENSITY_SI


def ideal_metal_limit(system, scale, backend=None):
    """(F, P) with the film plasma frequency multiplied by ``scale`` (simple variants only)."""
    if system.variant.is_data:
        raise ModelError("optical data tables cannot be rescaled to the ideal-metal limit")
    if not scale >= 1:
        raise ValueError(f"scale must be >= 1, got {scale}")
    film = system.film.with_drude(system.film.drude.scaled(scale))
    scaled = replace(system, film=film)
    res = compute(scaled, backend=backend)
    return res.free_energy, res.pressure


def ideal_metal_drude(system):
    """Drude-model ideal-metal film: (-k_B T zeta(3)/(16 pi a^2), -k_B T zeta(3)/(8 pi a^3))."""
    from .constants import ZETA3

    a = system.thickness
    kT = KB * system.temperature
    return (-kT * ZETA3 / (16.0 * math.pi * a * a) * ENERGY_DENSITY_SI,
            -kT * ZETA3 / (8.0 * math.pi * a ** 3) * PRESSURE_SI)
