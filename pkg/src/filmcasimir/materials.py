"""Built-in metals and tabulated optical data.

Optical data files are plain UTF-8 text: ``#`` starts a comment line and each
data row holds ``energy_eV n k`` separated by whitespace, with strictly
ascending photon energy.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import hashlib
import os
from pathlib import Path

import numpy as np

from .errors import GridError, InsufficientData, ParseError, UnknownMaterial

MIN_ROWS = 10
DATA_DIR_ENV = "CASIMIR_DATA_DIR"
_PACKAGE_DATA = Path(__file__).parent / "data"


@dataclass(frozen=True)
class DrudeParameters:
    """Free-electron parameters in eV. ``relaxation_frequency == 0`` is the plasma model."""

    plasma_frequency: float
    relaxation_frequency: float

    def __post_init__(self):
        if not self.plasma_frequency > 0:
            raise ValueError(f"plasma_frequency must be > 0, got {self.plasma_frequency}")
        if not self.relaxation_frequency >= 0:
            raise ValueError(f"relaxation_frequency must be >= 0, got {self.relaxation_frequency}")

    def scaled(self, factor):
        return DrudeParameters(self.plasma_frequency * factor, self.relaxation_frequency)


@dataclass(frozen=True, eq=False)
class SpectralTable:
    """Validated (photon energy, n, k) table. Arrays are read-only."""

    energy: np.ndarray
    n: np.ndarray
    k: np.ndarray
    source_label: str = ""
    digest: str = field(init=False, repr=False)

    def __post_init__(self):
        arrays = []
        for name in ("energy", "n", "k"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.ndim != 1:
                raise ValueError(f"{name} must be one-dimensional")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
            arrays.append(arr)
        e, n, k = arrays
        if not (len(e) == len(n) == len(k)):
            raise ValueError("energy, n and k must have equal length")
        if len(e) < MIN_ROWS:
            raise InsufficientData(f"need at least {MIN_ROWS} rows, got {len(e)}")
        if not np.all(np.isfinite(e)) or not np.all(np.isfinite(n)) or not np.all(np.isfinite(k)):
            raise GridError("non-finite values in table")
        if e[0] <= 0:
            raise GridError(f"photon energies must be > 0, first is {e[0]}")
        bad = np.nonzero(np.diff(e) <= 0)[0]
        if bad.size:
            i = int(bad[0])
            raise GridError(f"photon energy not strictly increasing at row {i + 2}: {e[i]} -> {e[i + 1]}")
        if np.any(n < 0) or np.any(k < 0):
            raise GridError("n and k must be nonnegative")
        h = hashlib.sha1()
        for arr in arrays:
            h.update(arr.tobytes())
        object.__setattr__(self, "digest", h.hexdigest())

    def __len__(self):
        return len(self.energy)

    def __eq__(self, other):
        if not isinstance(other, SpectralTable):
            return NotImplemented
        return self.digest == other.digest

    def __hash__(self):
        return hash(self.digest)

    @property
    def rows(self):
        return list(zip(self.energy.tolist(), self.n.tolist(), self.k.tolist()))

    @property
    def im_eps(self):
        """Imaginary part of the permittivity on the grid, 2 n k."""
        return 2.0 * self.n * self.k

    @property
    def low_cutoff(self):
        return float(self.energy[0])

    @property
    def high_cutoff(self):
        return float(self.energy[-1])

    def to_text(self):
        lines = []
        if self.source_label:
            for part in self.source_label.splitlines():
                lines.append(f"# {part}")
        lines.append("# energy_eV n k")
        for e, n, k in self.rows:
            lines.append(f"{e!r} {n!r} {k!r}")
        return "\n".join(lines) + "\n"

    def save(self, path):
        Path(path).write_text(self.to_text(), encoding="utf-8")


def parse_spectral_table(text, path=None, source_label=None):
    energy, n, k = [], [], []
    comments = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"expected 3 columns 'energy_eV n k', got {len(parts)}", lineno, path)
        try:
            e_, n_, k_ = (float(p) for p in parts)
        except ValueError:
            raise ParseError(f"non-numeric value in {line!r}", lineno, path) from None
        energy.append(e_)
        n.append(n_)
        k.append(k_)
    if source_label is None:
        kept = [c for c in comments if c and c != "energy_eV n k"]
        source_label = "\n".join(kept) if kept else (str(path) if path else "")
    return SpectralTable(np.array(energy), np.array(n), np.array(k), source_label)


def load_spectral_table(path):
    """Read and validate an optical data file.

    Rows are checked, never re-sorted: a non-monotone energy column raises
    GridError, a malformed row ParseError (with its line number), and fewer
    than ten rows InsufficientData.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_spectral_table(text, path=str(path))


def resolve_data_path(path):
    """Find a table file, falling back to $CASIMIR_DATA_DIR for relative names."""
    p = Path(path)
    if p.exists() or p.is_absolute():
        return p
    base = os.environ.get(DATA_DIR_ENV)
    if base:
        for candidate in (Path(base) / p, Path(base) / f"{p}.txt"):
            if candidate.exists():
                return candidate
    return p


@dataclass(frozen=True)
class Material:
    name: str
    drude: DrudeParameters
    table: SpectralTable | None = None

    @property
    def data_low_cutoff(self):
        return None if self.table is None else self.table.low_cutoff

    @property
    def data_high_cutoff(self):
        return None if self.table is None else self.table.high_cutoff

    def with_table(self, table):
        return Material(self.name, self.drude, table)

    def with_drude(self, drude):
        return Material(self.name, drude, self.table)


# Room-temperature Drude parameters (eV) and the energy range of the
# handbook optical data each metal is normally paired with.
_BUILTIN = {
    "Au": (DrudeParameters(9.0, 0.035), (0.125, 1e4)),
    "Ag": (DrudeParameters(9.66, 0.0315), (0.125, 1e4)),
    "Cu": (DrudeParameters(8.6, 0.0325), (0.13, 9e3)),
    "Al": (DrudeParameters(11.34, 0.041), (0.04, 1e4)),
}

BUILTIN_NAMES = tuple(_BUILTIN)


def builtin_material(name):
    """Look up one of Au, Ag, Cu, Al (case-insensitive), without optical data."""
    for key, (drude, _) in _BUILTIN.items():
        if key.lower() == str(name).strip().lower():
            return Material(key, drude)
    raise UnknownMaterial(name, BUILTIN_NAMES)


def data_range(name):
    """(low, high) photon-energy range in eV of the usual optical data for a built-in metal."""
    return _BUILTIN[builtin_material(name).name][1]


def drude_im_eps(drude, omega):
    """Im eps(omega) of the Drude model on the real frequency axis."""
    omega = np.asarray(omega, dtype=float)
    wp, g = drude.plasma_frequency, drude.relaxation_frequency
    return wp * wp * g / (omega * (omega * omega + g * g))


def synthetic_drude_table(drude, e_lo, e_hi, n_points=600, label=None):
    """n, k of the pure Drude permittivity on a log grid.

    Test data only: it stands in for measured tables and carries no
    interband structure.
    """
    energy = np.geomspace(e_lo, e_hi, n_points)
    eps = 1.0 - drude.plasma_frequency ** 2 / (energy * (energy + 1j * drude.relaxation_frequency))
    nk = np.sqrt(eps)
    n = np.abs(nk.real)
    k = np.abs(nk.imag)
    if label is None:
        label = (f"SYNTHETIC Drude-model table (wp={drude.plasma_frequency} eV, "
                 f"gamma={drude.relaxation_frequency} eV); not measured data")
    return SpectralTable(energy, n, k, label)


def synthetic_table_path(name):
    return _PACKAGE_DATA / f"synthetic_{builtin_material(name).name}.txt"


def load_synthetic_table(name):
    return load_spectral_table(synthetic_table_path(name))
