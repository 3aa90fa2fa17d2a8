from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from singhomeo import serialize
from singhomeo.cantor import CantorScheme
from singhomeo.errors import ConfigError
from singhomeo.grammar import parse, parse_expr
from singhomeo.homeo import Compose, Identity, PowerMap, Slide, random_expr
from singhomeo.interval_fn import PLFunc
from singhomeo.rational import q

EXPRESSIONS = [
    "identity(2)",
    "powermap(1.5, 1.25)",
    "product(monotone(pl([0,0],[1/3,1/2],[1,1])), d=2)",
    "slide(phi=zigzag(pow2:3, stages=4, scale=0.2), delta=0.25) o powermap(1.3, 1.7)",
    "twist(pow2:3, d=2)",
    "inverse(expand(center=[0.5,0.5], r=0.1, eta=0.01))",
    "compose(identity(3), product(singular(3, p=3), d=3))",
    "radial_twist(h=pl([0,0],[1/4,1/8],[1,1]), phi=constant(1/16))",
]


def test_decimals_are_exact():
    f = parse("pl([0, 0], [0.2, 0.1], [1, 1])")
    assert isinstance(f, PLFunc)
    assert f.xs[1] == q(1, 5) and f.ys[1] == q(1, 10)


def test_composition_order():
    e = parse_expr("powermap(2) o product(monotone(pl([0,0],[1/2,1/4],[1,1])))")
    assert isinstance(e, Compose)
    # the PL map acts first: 1/2 -> 1/4, then squaring gives 1/16
    assert e.eval([0.5])[0] == pytest.approx(1 / 16)


def test_cantor_term():
    c = parse("cantor(0, 1/2)")
    assert isinstance(c, CantorScheme) and c.v == q(1, 2)


@pytest.mark.parametrize(
    "text",
    ["", "identity(", "slide(constant(0))", "unknown(1)", "powermap(3)", "identity(2) o", "identity(d=2, d=3)",
     "pl([0,0],[1,1]) $"],
)
def test_bad_input_is_config_error(text):
    with pytest.raises(ConfigError):
        parse_expr(text)


def test_parse_expr_rejects_functions():
    with pytest.raises(ConfigError):
        parse_expr("constant(1/2)")


@pytest.mark.parametrize("text", EXPRESSIONS)
def test_serialize_is_byte_stable(text, tmp_path):
    obj = parse(text)
    first = serialize.dumps(obj)
    again = serialize.dumps(serialize.loads(first))
    assert first == again
    path = serialize.write_object(obj, tmp_path / "obj.json")
    assert path.read_bytes() == first.encode()
    assert serialize.dumps(serialize.read_object(path)) == first


@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_random_expr_serialization(seed, d):
    e = random_expr(np.random.default_rng(seed), d, 4)
    text = serialize.dumps(e)
    back = serialize.loads(text)
    assert serialize.dumps(back) == text
    x = np.random.default_rng(seed + 1).random((32, d))
    assert np.array_equal(back.eval(x), e.eval(x))


def test_pl_and_cantor_envelopes():
    f = PLFunc.from_points([(0, 0), (q(1, 3), q(2, 3)), (1, 1)], True)
    g = serialize.loads(serialize.dumps(f))
    assert g.xs == f.xs and g.ys == f.ys and g.monotone_homeo
    c = serialize.loads(serialize.dumps(CantorScheme(q(1, 4), q(3, 4))))
    assert (c.u, c.v) == (q(1, 4), q(3, 4))


@pytest.mark.parametrize(
    "text",
    [
        "{not json",
        json.dumps({"format": "other"}),
        json.dumps({"format": "singhomeo", "version": 99, "kind": "homeo", "data": {}}),
        json.dumps({"format": "singhomeo", "version": 1, "kind": "teapot", "data": {}}),
        json.dumps({"format": "singhomeo", "version": 1, "kind": "pl", "data": {}}),
    ],
)
def test_corrupted_files(text):
    with pytest.raises(ConfigError):
        serialize.loads(text)


def test_atomic_write_leaves_no_temp(tmp_path):
    serialize.atomic_write(tmp_path / "a" / "b.txt", "hello\n")
    assert sorted(p.name for p in (tmp_path / "a").iterdir()) == ["b.txt"]


def test_canonical_rejects_nan():
    with pytest.raises(ValueError):
        serialize.canonical({"x": float("nan")})


def test_slide_serialization_is_exact():
    sl = Slide(PLFunc.from_points([(0, q(1, 17)), (1, q(1, 19))]), q(1, 4), 2)
    back = serialize.loads(serialize.dumps(sl))
    assert back.eval_exact((q(1, 2), q(1, 3))) == sl.eval_exact((q(1, 2), q(1, 3)))
    assert serialize.dumps(Identity(2)) != serialize.dumps(PowerMap((1.0, 1.0)))
