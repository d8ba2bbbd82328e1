import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from singpot.config import ConfigError, ScenarioConfig, parse_config


def test_golden_elliptic_example():
    cfg = parse_config("d = 3\nA = 1\nbeta = 0\nkind = elliptic")
    assert (cfg.kind, cfg.d, cfg.A, cfg.beta) == ("elliptic", 3, 1.0, 0.0)
    assert cfg.coefficients == "laplacian"


def test_negative_A_names_key():
    with pytest.raises(ConfigError) as exc:
        parse_config("A = -1")
    assert exc.value.key == "A" and exc.value.line == 1
    assert "A" in str(exc.value)


def test_empty_is_default_verifyall():
    cfg = parse_config("")
    assert cfg == ScenarioConfig() and cfg.kind == "verifyall"


def test_comments_and_blank_lines():
    cfg = parse_config("# header\n\nA = 2   # alpha = 1\n  kind = Special\n")
    assert cfg.A == 2.0 and cfg.kind == "special"


def test_lists():
    cfg = parse_config("k = 4, 8, 16, inf\nkernel_A = 0; 1")
    assert cfg.ks == (4.0, 8.0, 16.0, math.inf)
    assert cfg.kernel_A == (0.0, 1.0)


@pytest.mark.parametrize("text,line,key", [
    ("A = 1\nfoo = 2", 2, "foo"),
    ("A = 1\nA = 2", 2, "A"),
    ("d = 3\nd3", 2, None),
    ("\n\nM = many", 3, "M"),
    ("kind = elliptic\nd = 2", 2, "d"),
    ("k = 8, 4", 1, "k"),
    ("lambda = 1\nLambda = 4", 2, "Lambda"),
    ("grading = 1.0", 1, "grading"),
    ("n = 3", 1, "n"),
])
def test_line_numbered_errors(text, line, key):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.line == line and exc.value.key == key
    assert str(exc.value).startswith(f"line {line}:")


def test_echo_round_trip():
    cfg = parse_config("kind = kernel\nk = 4, inf\ncoefficients = checkerboard\nLambda = 4")
    assert parse_config(cfg.echo()) == cfg


@given(st.floats(1e-3, 1e3), st.integers(3, 6), st.floats(0, 3), st.integers(0, 2 ** 31))
def test_echo_round_trip_property(A, d, beta, seed):
    cfg = ScenarioConfig(A=A, d=d, beta=beta, seed=seed)
    assert parse_config(cfg.echo()) == cfg


def test_overrides_validated():
    cfg = parse_config("")
    assert cfg.with_overrides(seed=5, grid_scale=None).seed == 5
    with pytest.raises(ConfigError):
        cfg.with_overrides(grid_scale=0.0)
