import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from filmcasimir.constants import CONSTANTS, HBAR_C, KB, matsubara_spacing
from filmcasimir.errors import GridError, InsufficientData, ParseError, UnknownMaterial
from filmcasimir.materials import (BUILTIN_NAMES, DrudeParameters, Material, SpectralTable, builtin_material,
                                   load_spectral_table, load_synthetic_table, parse_spectral_table,
                                   resolve_data_path, synthetic_drude_table)


def _table_text(rows):
    return "# energy n k\n" + "\n".join(f"{e} {n} {k}" for e, n, k in rows) + "\n"


def test_constants_fixed():
    assert CONSTANTS.boltzmann == 8.617333262e-5
    assert CONSTANTS.hbar_c == 197.3269804
    assert CONSTANTS.ev_to_joule == 1.602176634e-19
    assert matsubara_spacing(300.0) == pytest.approx(2 * np.pi * KB * 300.0, rel=1e-15)
    # xi_1 at room temperature, to the 4 digits quoted as 0.16244
    assert matsubara_spacing(300.0) == pytest.approx(0.162442, abs=2e-5)
    assert HBAR_C > 0


@pytest.mark.parametrize("name, wp, g", [("Au", 9.0, 0.035), ("Ag", 9.66, 0.0315),
                                          ("Cu", 8.6, 0.0325), ("Al", 11.34, 0.041)])
def test_builtin_parameters(name, wp, g):
    m = builtin_material(name)
    assert m.drude == DrudeParameters(wp, g)
    assert m.table is None
    assert builtin_material(name.lower()) == m
    assert builtin_material(name) == builtin_material(name)


def test_unknown_material_lists_names():
    with pytest.raises(UnknownMaterial) as exc:
        builtin_material("Xx")
    for n in BUILTIN_NAMES:
        assert n in str(exc.value)
    # still catchable as KeyError
    with pytest.raises(KeyError):
        builtin_material("Pt")


def test_drude_validation():
    with pytest.raises(ValueError):
        DrudeParameters(0.0, 0.01)
    with pytest.raises(ValueError):
        DrudeParameters(9.0, -0.1)
    assert DrudeParameters(9.0, 0.0).relaxation_frequency == 0.0
    assert DrudeParameters(9.0, 0.035).scaled(100).plasma_frequency == pytest.approx(900.0)


def test_load_table_cutoffs(tmp_path):
    e = np.geomspace(0.125, 1e4, 50)
    p = tmp_path / "au.txt"
    p.write_text(_table_text([(x, 1.0, 2.0) for x in e]))
    t = load_spectral_table(p)
    assert t.low_cutoff == pytest.approx(0.125)
    assert t.high_cutoff == pytest.approx(1e4)
    m = Material("Au", builtin_material("Au").drude, t)
    assert m.data_low_cutoff == t.energy[0]
    assert m.data_high_cutoff == t.energy[-1]
    np.testing.assert_array_equal(t.im_eps, 4.0)


def test_al_range_table(tmp_path):
    e = np.geomspace(0.04, 1e4, 30)
    p = tmp_path / "al.txt"
    p.write_text(_table_text([(x, 0.5, 0.5) for x in e]))
    t = load_spectral_table(p)
    assert (t.low_cutoff, t.high_cutoff) == (pytest.approx(0.04), pytest.approx(1e4))


def test_too_few_rows(tmp_path):
    p = tmp_path / "two.txt"
    p.write_text(_table_text([(1.0, 1, 1), (2.0, 1, 1)]))
    with pytest.raises(InsufficientData):
        load_spectral_table(p)


def test_parse_error_line_number():
    rows = [(float(i + 1), 1, 1) for i in range(12)]
    text = _table_text(rows).replace("5.0 1 1", "5.0 one 1")
    with pytest.raises(ParseError) as exc:
        parse_spectral_table(text)
    assert exc.value.line == 6


def test_non_monotone_grid_rejected_not_sorted():
    rows = [(float(i + 1), 1, 1) for i in range(12)]
    rows[4], rows[5] = rows[5], rows[4]
    with pytest.raises(GridError):
        parse_spectral_table(_table_text(rows))


def test_negative_nk_rejected():
    rows = [(float(i + 1), 1, 1) for i in range(12)]
    rows[3] = (4.0, 1, -0.1)
    with pytest.raises(ValueError):
        parse_spectral_table(_table_text(rows))


def test_data_dir_env(tmp_path, monkeypatch):
    p = tmp_path / "x.txt"
    p.write_text(_table_text([(float(i + 1), 1, 1) for i in range(12)]))
    monkeypatch.setenv("CASIMIR_DATA_DIR", str(tmp_path))
    assert resolve_data_path("x.txt") == p


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_synthetic_tables_ship(name):
    t = load_synthetic_table(name)
    assert "SYNTHETIC" in t.source_label.upper()
    assert len(t.rows) >= 10
    assert np.all(t.im_eps >= 0)


_rows = st.lists(st.tuples(st.floats(0.0, 50.0), st.floats(0.0, 50.0)), min_size=10, max_size=40)


@settings(max_examples=40, deadline=None)
@given(_rows, st.floats(0.01, 1.0))
def test_round_trip_bit_exact(tmp_path_factory, nk, e0):
    e = e0 * np.cumprod(np.full(len(nk), 1.37))
    t = SpectralTable(e, [r[0] for r in nk], [r[1] for r in nk], "rt")
    p = tmp_path_factory.mktemp("rt") / "t.txt"
    t.save(p)
    back = load_spectral_table(p)
    np.testing.assert_array_equal(back.energy, t.energy)
    np.testing.assert_array_equal(back.n, t.n)
    np.testing.assert_array_equal(back.k, t.k)
    assert back == t
    assert np.all(back.im_eps >= 0)


def test_synthetic_generator_is_drude():
    d = DrudeParameters(9.0, 0.035)
    t = synthetic_drude_table(d, 0.1, 100.0, n_points=50)
    w = t.energy
    np.testing.assert_allclose(t.im_eps, 81 * 0.035 / (w * (w * w + 0.035 ** 2)), rtol=1e-12)
