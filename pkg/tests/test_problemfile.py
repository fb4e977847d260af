import pytest

from hybridfrac import expr as ex
from hybridfrac.problem import example1
from hybridfrac.problemfile import ProblemFileError, bundled, dumps, load, loads

MINIMAL = """
alpha = 0.5
f = 1
g = 1   # trailing comment
phi = t
rho = t/2
k = 1/4
r = 1/3
"""


def test_defaults_applied():
    pf = loads(MINIMAL)
    assert pf.seed == 0
    assert pf.settings.grid_points == 1025 and pf.settings.tol == 1e-10
    assert pf.spec.k_exp == 0.25


def test_bundled_example1_matches_builder():
    pf = load(bundled("example1"))
    ref = example1()
    assert pf.spec.alpha == ref.alpha
    for key in ("f_expr", "g_expr", "phi_expr", "rho_expr"):
        assert getattr(pf.spec, key) == getattr(ref, key)


def test_roundtrip():
    pf = load(bundled("example1"))
    again = loads(dumps(pf))
    assert again == pf
    assert dumps(again) == dumps(pf)


@pytest.mark.parametrize(
    "text, match",
    [
        (MINIMAL.replace("rho = t/2", ""), "rho"),
        (MINIMAL + "colour = 3\n", "unknown key"),
        (MINIMAL + "k = 0.5\n", "duplicate"),
        (MINIMAL + "grid_points = 10.5\n", "integer"),
        (MINIMAL + "nonsense\n", "key = value"),
        (MINIMAL.replace("f = 1", "f = 1 +"), "line"),
        (MINIMAL.replace("phi = t", "phi = x"), "phi"),
        (MINIMAL.replace("alpha = 0.5", "alpha = 1.5"), "alpha"),
        (MINIMAL + "grid_points = 8\n", "grid_points"),
    ],
)
def test_rejections(text, match):
    with pytest.raises(ProblemFileError, match=match):
        loads(text)


def test_overrides():
    pf = loads(MINIMAL).with_overrides(grid=257, tol=1e-6, max_iter=3, seed=9)
    assert (pf.settings.grid_points, pf.settings.tol, pf.settings.max_iter, pf.seed) == (257, 1e-6, 3, 9)
    assert loads(MINIMAL).with_overrides() == loads(MINIMAL)
    with pytest.raises(ProblemFileError):
        loads(MINIMAL).with_overrides(grid=4)


def test_expression_valued_reals():
    pf = loads(MINIMAL.replace("k = 1/4", "k = sqrt(1/16)"))
    assert pf.spec.k_exp == 0.25


def test_problem_file_error_is_value_error():
    assert issubclass(ProblemFileError, ValueError)
    assert not issubclass(ProblemFileError, ex.ExprError)
