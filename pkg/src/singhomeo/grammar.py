"""A small textual language for building expressions.

    slide(phi=zigzag(pow2:3, stages=4, scale=0.2), delta=0.25) o powermap(1.3, 1.7)

``a o b`` is composition (``b`` first).  Numbers are read exactly, so
``0.2`` is the rational ``1/5``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Any

from .cantor import CantorScheme
from .errors import ConfigError, SingHomeoError
from .interval_fn import PLFunc
from .rational import q
from . import homeo as H
from . import zigzag as zz
from .singular import strongly_singular_1d

_TOKEN = re.compile(
    r"\s*(?:(?P<num>-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?(?:/\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*(?::[A-Za-z0-9_./]+(?:,[A-Za-z0-9_./]+)*(?=[\s,)\]]|$))?)"
    r"|(?P<punct>[()\[\],=]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    out, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ConfigError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            raise ConfigError(f"expected {value!r}, found {tok[1]!r}")
        self.i += 1
        return tok

    def parse(self):
        v = self.expr()
        if self.i != len(self.toks):
            raise ConfigError(f"trailing input at token {self.peek()[1]!r}")
        return v

    def expr(self):
        parts = [self.value()]
        while self.peek() == ("name", "o"):
            self.take()
            parts.append(self.value())
        if len(parts) == 1:
            return parts[0]
        for p in parts:
            if not isinstance(p, H.HomeoExpr):
                raise ConfigError("'o' composes expressions, not plain values")
        return H.compose(*parts)

    def value(self):
        kind, text = self.peek()
        if kind == "num":
            self.take()
            try:
                return q(Fraction(text))
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigError(f"bad number {text!r}") from exc
        if kind == "punct" and text == "(":
            self.take("(")
            items = self._items(")")
            return items[0] if len(items) == 1 else tuple(items)
        if kind == "punct" and text == "[":
            self.take("[")
            return list(self._items("]"))
        if kind == "name":
            self.take()
            if self.peek() == ("punct", "("):
                self.take("(")
                args, kwargs = self._args()
                return _call(text, args, kwargs)
            return text
        raise ConfigError(f"unexpected token {text!r}")

    def _items(self, close):
        items = []
        if self.peek() == ("punct", close):
            self.take(close)
            return items
        while True:
            items.append(self.expr())
            tok = self.take()
            if tok[1] == close:
                return items
            if tok[1] != ",":
                raise ConfigError(f"expected ',' or {close!r}")

    def _args(self):
        args, kwargs = [], {}
        if self.peek() == ("punct", ")"):
            self.take(")")
            return args, kwargs
        while True:
            kind, text = self.peek()
            nxt = self.toks[self.i + 1] if self.i + 1 < len(self.toks) else (None, None)
            if kind == "name" and nxt == ("punct", "="):
                self.take()
                self.take("=")
                if text in kwargs:
                    raise ConfigError(f"argument {text!r} given twice")
                kwargs[text] = self.expr()
            else:
                if kwargs:
                    raise ConfigError("positional argument after keyword argument")
                args.append(self.expr())
            tok = self.take()
            if tok[1] == ")":
                return args, kwargs
            if tok[1] != ",":
                raise ConfigError("expected ',' or ')'")


def _int(v) -> int:
    v = q(v)
    if v.denominator != 1:
        raise ConfigError(f"expected an integer, got {v}")
    return int(v)


def _pl(v) -> PLFunc:
    if not isinstance(v, PLFunc):
        raise ConfigError("expected a PL function")
    return v


def _bind(name, args, kwargs, spec):
    """Match arguments against ``spec = [(param, default), ...]``."""
    out = {}
    for (param, _), val in zip(spec, args):
        out[param] = val
    if len(args) > len(spec):
        raise ConfigError(f"{name}: too many arguments")
    for k, val in kwargs.items():
        if k not in dict(spec):
            raise ConfigError(f"{name}: unknown argument {k!r}")
        if k in out:
            raise ConfigError(f"{name}: {k!r} given twice")
        out[k] = val
    for param, default in spec:
        if param not in out:
            if default is _REQUIRED:
                raise ConfigError(f"{name}: missing argument {param!r}")
            out[param] = default
    return out


_REQUIRED = object()


def _call(name: str, args: list, kwargs: dict) -> Any:
    try:
        return _dispatch(name, args, kwargs)
    except ConfigError:
        raise
    except (SingHomeoError, TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def _dispatch(name, args, kwargs):
    if name == "identity":
        a = _bind(name, args, kwargs, [("d", 1)])
        return H.Identity(_int(a["d"]))
    if name == "powermap":
        if kwargs:
            raise ConfigError("powermap takes exponents only")
        return H.PowerMap(tuple(float(v) for v in args))
    if name == "pl":
        if kwargs:
            raise ConfigError("pl takes points only")
        return PLFunc.from_points([(q(x), q(y)) for x, y in args])
    if name == "monotone":
        a = _bind(name, args, kwargs, [("f", _REQUIRED)])
        return _pl(a["f"]).as_monotone_homeo()
    if name == "constant":
        a = _bind(name, args, kwargs, [("c", _REQUIRED)])
        return PLFunc.constant(q(a["c"]))
    if name == "singular":
        a = _bind(name, args, kwargs, [("m", _REQUIRED), ("p", 3), ("depth", 1)])
        return strongly_singular_1d(_int(a["m"]), _int(a["p"]), _int(a["depth"]))
    if name == "zigzag":
        a = _bind(name, args, kwargs, [("s", _REQUIRED), ("stages", 3), ("scale", 1)])
        spec = zz.build(zz.SSequence.parse(str(a["s"])), _int(a["stages"]))
        return spec.phi().scale(q(a["scale"]))
    if name == "product":
        a = _bind(name, args, kwargs, [("f", _REQUIRED), ("d", None)])
        if a["d"] is not None:
            return H.Product1D.power(_pl(a["f"]).as_monotone_homeo(), _int(a["d"]))
        fs = [a["f"], *args[1:]] if len(args) > 1 else [a["f"]]
        return H.Product1D(tuple(_pl(f).as_monotone_homeo() for f in fs))
    if name == "slide":
        a = _bind(name, args, kwargs, [("phi", _REQUIRED), ("delta", _REQUIRED), ("d", 2)])
        return H.Slide(_pl(a["phi"]), q(a["delta"]), _int(a["d"]))
    if name == "twist":
        a = _bind(name, args, kwargs, [("s", _REQUIRED), ("d", 2), ("eps", q(1, 4)), ("span", 5)])
        return H.nowhere_twist(zz.SSequence.parse(str(a["s"])), _int(a["d"]), q(a["eps"]), _int(a["span"]))
    if name == "radial_twist":
        a = _bind(name, args, kwargs, [("h", _REQUIRED), ("phi", _REQUIRED), ("d", 2)])
        return H.radial_twist(_pl(a["h"]).as_monotone_homeo(), _pl(a["phi"]), _int(a["d"]))
    if name == "expand":
        a = _bind(name, args, kwargs, [("center", _REQUIRED), ("r", _REQUIRED), ("eta", _REQUIRED)])
        return H.RadialExpand(tuple(float(v) for v in a["center"]), float(a["r"]), float(a["eta"]))
    if name in ("inverse", "inv"):
        a = _bind(name, args, kwargs, [("e", _REQUIRED)])
        return H.Inverse(a["e"])
    if name == "cantor":
        a = _bind(name, args, kwargs, [("u", 0), ("v", 1)])
        return CantorScheme(q(a["u"]), q(a["v"]))
    if name == "compose":
        if kwargs or not args:
            raise ConfigError("compose takes expressions only")
        return H.compose(*args)
    raise ConfigError(f"unknown function {name!r}")


def parse(text: str):
    """Parse text into a HomeoExpr, a PLFunc (1-D function terms) or a CantorScheme."""
    if not isinstance(text, str) or not text.strip():
        raise ConfigError("empty expression")
    return _Parser(text).parse()


def parse_expr(text: str) -> H.HomeoExpr:
    v = parse(text)
    if not isinstance(v, H.HomeoExpr):
        raise ConfigError("the text does not describe a homeomorphism of the cube")
    return v
