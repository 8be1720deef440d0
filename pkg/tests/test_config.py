from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dampwave.config import ExperimentConfig, dump_config, format_exact, load_config, parse_config
from dampwave.errors import ParseError, ValidationError
from dampwave.model import CompactBump, PolyDecay, Zero

MINIMAL = """
[model]
n = 1
alpha = 0
p = 3
lambda = 0
"""


def test_minimal_config_accepted():
    cfg = parse_config(MINIMAL)
    assert (cfg.n, cfg.alpha, cfg.p, cfg.lam) == (1, 0, 3, 0)
    assert cfg.seed == 42 and cfg.cells == 2049


def test_condition_p_violation():
    with pytest.raises(ValidationError) as info:
        parse_config("[model]\nn = 3\np = 4\n")
    assert any("condition (p)" in v for v in info.value.violations)


def test_all_violations_collected():
    text = "[model]\nn = 3\np = 4\nalpha = 5/2\n[weights]\nepsilon = 0.7\nt0 = 0.5\n[run]\nfamily = beta\n"
    with pytest.raises(ValidationError) as info:
        parse_config(text)
    assert len(info.value.violations) >= 5


def test_duplicate_key_line_number():
    with pytest.raises(ParseError, match="line 3") as info:
        parse_config("[model]\nn = 1\nn = 2\n")
    assert info.value.lineno == 3


@pytest.mark.parametrize(
    "text",
    ["n = 1\n", "[nope]\n", "[model]\nfoo = 1\n", "[model]\nn\n", "[model]\nn = x\n", "[model]\nu0 = square 1\n", "[model\n"],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_config(text)


def test_comments_and_profiles():
    cfg = parse_config("# header\n[model]\nu0 = bump 3 1.5 0.5  # trailing\nu1 = zero\n[grid]\nr_max = auto\n")
    assert cfg.u0 == CompactBump(3.0, 1.5, 0.5)
    assert isinstance(cfg.u1, Zero) and cfg.r_max is None


def test_poly_profile_threshold():
    with pytest.raises(ValidationError, match="PolyDecay"):
        parse_config("[model]\nlambda = 1\nu0 = poly 1\n[run]\ncheck_cone = false\n")
    cfg = parse_config("[model]\nlambda = 1\nu0 = poly 2 0.5\n[run]\ncheck_cone = false\n")
    assert cfg.u0 == PolyDecay(2.0, 0.5)


def test_cone_requirement_reported():
    with pytest.raises(ValidationError, match="cone"):
        parse_config("[grid]\nr_max = 5\n")


def test_exact_parameters():
    cfg = parse_config("[model]\nn = 3\nalpha = 1/2\np = 7/5\nlambda = 0.25\n")
    assert cfg.alpha == F(1, 2) and cfg.p == F(7, 5) and cfg.lam == F(1, 4)


def test_canonical_round_trip():
    text = dump_config(parse_config(MINIMAL))
    assert dump_config(parse_config(text)) == text
    assert parse_config(text) == parse_config(MINIMAL)


def test_round_trip_with_sweep(tmp_path):
    text = "[model]\nn = 3\nalpha = 1/2\np = 2\n[sweep]\np = 6/5, 7/5, 2\nlambda = 0, 1/3, 5\n"
    cfg = parse_config(text)
    path = tmp_path / "c.txt"
    path.write_text(dump_config(cfg))
    again = load_config(path)
    assert again == cfg and dump_config(again) == dump_config(cfg)


fracs = st.fractions(F(0), F(20), max_denominator=50)


@settings(max_examples=60, deadline=None)
@given(st.lists(fracs, min_size=1, max_size=4), st.floats(0.01, 0.9), st.integers(1, 50))
def test_round_trip_property(lams, cfl, every):
    cfg = ExperimentConfig(sweep_p=(F(2),), sweep_lambda=tuple(lams), cfl=cfl, record_every=every)
    text = dump_config(cfg)
    assert parse_config(text) == cfg
    assert dump_config(parse_config(text)) == text


@settings(max_examples=60, deadline=None)
@given(fracs)
def test_format_exact_round_trip(x):
    assert F(format_exact(x)) == x
