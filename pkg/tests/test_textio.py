import pytest
from hypothesis import given, settings

from jetph.errors import ParseError
from jetph.mindlin import CHART
from jetph.symbolic import JetCoordinate, Param, jet, normalize
from jetph.textio import parse, to_text

from strategies import CHART as SCHART, expressions


def test_jet_letters_any_order():
    X, Y = CHART.coord("X"), CHART.coord("Y")
    w = CHART.dep("w")
    assert parse("w_YX", CHART) == parse("w_XY", CHART) == jet(w, X, Y)
    assert parse("w", CHART) == JetCoordinate(w)


def test_unknown_names_are_parameters():
    assert parse("rho", CHART) == Param("rho")
    # a suffix that is not a derivative word leaves the name opaque
    assert parse("w_Q", CHART) == Param("w_Q")


def test_canonical_printing():
    assert to_text(parse("w_YX + psi", CHART)) == to_text(parse("psi + w_XY", CHART))


@pytest.mark.parametrize("text", ["w_X +", "(w", "w_XXX", "2^^3", "", "w)"])
def test_malformed_text(text):
    with pytest.raises(ParseError):
        parse(text, CHART)


@settings(max_examples=80, deadline=None)
@given(expressions())
def test_round_trip(e):
    n = normalize(e)
    assert parse(to_text(n), SCHART) == n
