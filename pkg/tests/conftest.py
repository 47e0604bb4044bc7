import pytest

from filmcasimir import FilmSystem, builtin_material

PAIRS = [("Ag", "Cu"), ("Au", "Cu"), ("Au", "Al"), ("Ag", "Al")]


def make_system(film, plate, a=50.0, variant="simple-drude", **kw):
    return FilmSystem(builtin_material(film), builtin_material(plate), a, variant=variant, **kw)


@pytest.fixture
def ag_cu():
    return make_system("Ag", "Cu")


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in ("1", "2", "2P", "3", "4", "5", "6", "7", "8", "9"):
        if key in results:
            terminalreporter.write_line(results[key])
