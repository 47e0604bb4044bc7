"""Dielectric permittivity of metals at imaginary frequency.

Four variants share one interface: the simple Drude and plasma models, and
the "data" variants in which the measured Im eps(omega) of a metal is carried
to the imaginary axis by a Kramers-Kronig integral and completed at low
frequency by the Drude or plasma free-electron term.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
import logging
import math
import threading

import numpy as np

from .errors import ConfigError, DomainError, ModelError
from .materials import DrudeParameters, Material, SpectralTable

log = logging.getLogger(__name__)


class Variant(str, Enum):
    SIMPLE_DRUDE = "simple-drude"
    SIMPLE_PLASMA = "simple-plasma"
    DATA_DRUDE = "data-drude"
    DATA_PLASMA = "data-plasma"

    @property
    def is_data(self):
        return self in (Variant.DATA_DRUDE, Variant.DATA_PLASMA)

    @property
    def is_drude(self):
        return self in (Variant.SIMPLE_DRUDE, Variant.DATA_DRUDE)

    @property
    def is_plasma(self):
        return not self.is_drude

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        for v in cls:
            if v.value == key or v.name.lower().replace("_", "-") == key:
                return v
        # also accept CamelCase names such as "SimpleDrude"
        for v in cls:
            if v.value.replace("-", "") == key.replace("-", ""):
                return v
        raise ConfigError(f"unknown model variant {value!r}; choose from {', '.join(v.value for v in cls)}")


def _check_positive(xi):
    xi = np.asarray(xi, dtype=float)
    if np.any(~(xi > 0)):
        raise DomainError("permittivity is evaluated only at xi > 0; the xi = 0 term is handled analytically")
    return xi


def _out(x, like):
    return float(x) if np.ndim(like) == 0 else x


def eval_simple_drude(p, xi):
    """1 + wp^2 / (xi (xi + gamma)) for xi in eV (scalar or array)."""
    x = _check_positive(xi)
    wp, g = p.plasma_frequency, p.relaxation_frequency
    return _out(1.0 + wp * wp / (x * (x + g)), xi)


def eval_simple_plasma(p, xi):
    """1 + wp^2 / xi^2 for xi in eV (scalar or array)."""
    x = _check_positive(xi)
    wp = p.plasma_frequency
    return _out(1.0 + wp * wp / (x * x), xi)


def _drude_low_segment(drude, w0, xi):
    """(2/pi) int_0^w0 omega Im eps_D(omega) / (omega^2 + xi^2) d omega, closed form."""
    wp, g = drude.plasma_frequency, drude.relaxation_frequency
    if g == 0:
        return np.zeros_like(xi)
    # int_0^w0 dw / ((w^2+g^2)(w^2+xi^2)) = [atan(w0/g)/g - atan(w0/xi)/xi] / (xi^2 - g^2)
    d = xi * xi - g * g
    num = np.arctan(w0 / g) / g - np.arctan(w0 / xi) / xi
    near = np.abs(xi - g) < 1e-6 * g
    with np.errstate(divide="ignore", invalid="ignore"):
        val = num / d
    if np.any(near):
        # limit xi -> g: (1/(2 g^3)) [atan(w0/g) + g w0 / (w0^2 + g^2)]
        lim = (np.arctan(w0 / g) + g * w0 / (w0 * w0 + g * g)) / (2 * g ** 3)
        val = np.where(near, lim, val)
    return (2.0 / math.pi) * wp * wp * g * val


def _power_tail(c3, w_top, xi):
    """(2/pi) int_{w_top}^inf omega (c3 / omega^3) / (omega^2 + xi^2) d omega."""
    x = xi / w_top
    small = x < 1e-2
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (1.0 / w_top - np.arctan(x) / xi) / (xi * xi)
    x2 = x * x
    series = (1.0 / 3 - x2 / 5 + x2 * x2 / 7 - x2 ** 3 / 9) / w_top ** 3
    return (2.0 / math.pi) * c3 * np.where(small, series, direct)


_warned_tables = set()


def core_im_eps(table, subtract=None):
    """Im eps on the table grid, minus the Drude part when ``subtract`` is given; clamped at 0."""
    im = table.im_eps
    if subtract is None:
        return im
    from .materials import drude_im_eps

    core = im - drude_im_eps(subtract, table.energy)
    if np.any(core < 0):
        key = (table.digest, subtract)
        # round-off when the data are themselves Drude-like is not worth a warning
        if key not in _warned_tables and np.any(core < -1e-9 * im):
            _warned_tables.add(key)
            neg = int(np.count_nonzero(core < -1e-9 * im))
            log.warning("Im eps core negative at %d of %d grid points after subtracting the Drude term "
                        "(wp=%g, gamma=%g); clamped to 0", neg, len(core),
                        subtract.plasma_frequency, subtract.relaxation_frequency)
        core = np.maximum(core, 0.0)
    return core


def eval_kk_core(table, xi, subtract=None, low_extension=None, chunk=256):
    """Kramers-Kronig integral (2/pi) int_0^inf omega Im eps_core / (omega^2 + xi^2) d omega.

    Trapezoidal rule in log(omega) on the table's own grid. Below the first
    tabulated energy the integrand is the Drude Im eps of ``low_extension``
    (integrated in closed form) or zero; above the last one Im eps_core is
    continued as c / omega^3 matched at the last point. With ``subtract``
    the Drude Im eps of those parameters is removed from the data first,
    and the low-frequency extension is zero.
    """
    if table is None:
        raise ConfigError("Kramers-Kronig evaluation needs an optical data table")
    x = _check_positive(xi)
    flat = np.atleast_1d(x).ravel()
    w = table.energy
    t = np.log(w)
    im = core_im_eps(table, subtract)
    f_base = w * w * im
    dt = np.diff(t)
    out = np.empty_like(flat)
    for s in range(0, flat.size, chunk):
        xs = flat[s:s + chunk, None]
        h = f_base[None, :] / (w[None, :] ** 2 + xs * xs)
        out[s:s + chunk] = 0.5 * np.sum((h[:, 1:] + h[:, :-1]) * dt[None, :], axis=1)
    out *= 2.0 / math.pi
    if im[-1] > 0:
        out += _power_tail(im[-1] * w[-1] ** 3, w[-1], flat)
    if subtract is None and low_extension is not None:
        out += _drude_low_segment(low_extension, w[0], flat)
    return _out(out.reshape(np.shape(x)), xi)


@dataclass(frozen=True)
class PermittivityModel:
    variant: Variant
    drude: DrudeParameters
    table: SpectralTable | None = None

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        if self.variant.is_data and self.table is None:
            raise ConfigError(f"{self.variant.value} needs an optical data table")

    @classmethod
    def for_material(cls, material: Material, variant):
        variant = Variant.parse(variant)
        return cls(variant, material.drude, material.table if variant.is_data else None)

    @property
    def cache_key(self):
        return (self.variant, self.drude, None if self.table is None else self.table.digest)

    def __call__(self, xi):
        return eval(self, xi)


class _EpsCache:
    """xi -> eps memo per model. Values never change once stored."""

    def __init__(self):
        self._store = {}
        self._lock = threading.Lock()

    def lookup(self, key, xs, compute):
        with self._lock:
            table = self._store.setdefault(key, {})
            missing = [x for x in dict.fromkeys(xs.tolist()) if x not in table]
        if missing:
            vals = compute(np.array(missing))
            with self._lock:
                for x, v in zip(missing, vals.tolist()):
                    table.setdefault(x, v)
        with self._lock:
            return np.array([table[x] for x in xs.tolist()])

    def clear(self):
        with self._lock:
            self._store.clear()


_CACHE = _EpsCache()


def clear_cache():
    _CACHE.clear()


def _eval_data(model, x):
    if model.variant is Variant.DATA_DRUDE:
        return 1.0 + eval_kk_core(model.table, x, low_extension=model.drude)
    wp = model.drude.plasma_frequency
    return 1.0 + (wp / x) ** 2 + eval_kk_core(model.table, x, subtract=model.drude)


def eval(model, xi):  # noqa: A001 - mirrors the operation name
    """eps(i xi) for any variant; scalar or array xi > 0 in eV."""
    x = _check_positive(xi)
    v = model.variant
    if v is Variant.SIMPLE_DRUDE:
        return eval_simple_drude(model.drude, xi)
    if v is Variant.SIMPLE_PLASMA:
        return eval_simple_plasma(model.drude, xi)
    flat = np.atleast_1d(x).ravel()
    vals = _CACHE.lookup(model.cache_key, flat, lambda arr: _eval_data(model, arr))
    return _out(vals.reshape(np.shape(x)), xi)


def static_limit(model):
    """Behaviour of eps(i xi) as xi -> 0: ('drude', wp^2/gamma) or ('plasma', wp^2).

    eps ~ wp^2/(gamma xi) for Drude-type and wp^2/xi^2 for plasma-type
    response; the optical data only add a finite core term and do not change
    the limit.
    """
    wp, g = model.drude.plasma_frequency, model.drude.relaxation_frequency
    if model.variant.is_plasma or g == 0:
        return "plasma", wp * wp
    return "drude", wp * wp / g


def check_same_limit(a, b):
    ka, _ = static_limit(a)
    kb, _ = static_limit(b)
    if ka != kb:
        raise ModelError("film and plate must both be Drude-type or both plasma-type at zero frequency")
    return ka
