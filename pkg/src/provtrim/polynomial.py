"""Provenance polynomials: multisets of sparse sums of variable products.

A monomial is identified by its variable multiset (names with positive
exponents); the coefficient never takes part in identity.  Polynomials are
kept normalized: no two monomials share a variable multiset, exact-zero
coefficients are dropped, and monomials are ordered lexicographically over
their sorted (name, exponent) pairs so that serialization is byte-stable.

All values are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import InvalidCoefficientError, ParseError, UnboundVariableError

# Identity of a monomial: ((name, exponent), ...) sorted by name.
VarsKey = tuple[tuple[str, int], ...]

# A hypothetical scenario: one numeric value per variable.
Valuation = Mapping[str, float]


def vars_key(vars: Mapping[str, int]) -> VarsKey:
    """Canonical key for a variable-to-exponent mapping."""
    for name, exp in vars.items():
        if not isinstance(exp, int) or isinstance(exp, bool) or exp < 1:
            raise ValueError(f"exponent of {name!r} must be a positive integer, got {exp!r}")
    return tuple(sorted(vars.items()))


@dataclass(frozen=True)
class Monomial:
    """A coefficient times a product of variables with exponents."""

    coef: float
    vars: VarsKey

    def vars_dict(self) -> dict[str, int]:
        return dict(self.vars)


class Polynomial:
    """A normalized sum of monomials."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[VarsKey, float]):
        # Assumes canonical input; use normalize() to build from raw terms.
        self._terms: dict[VarsKey, float] = dict(sorted(terms.items()))

    @property
    def terms(self) -> Mapping[VarsKey, float]:
        return MappingProxyType(self._terms)

    @property
    def num_m(self) -> int:
        return len(self._terms)

    def monomials(self) -> tuple[Monomial, ...]:
        return tuple(Monomial(coef, key) for key, coef in self._terms.items())

    def vars(self) -> frozenset[str]:
        return frozenset(name for key in self._terms for name, _ in key)

    def evaluate(self, valuation: Valuation) -> float:
        """Value of the polynomial under a total assignment of its variables."""
        total = 0.0
        for key, coef in self._terms.items():
            term = coef
            for name, exp in key:
                try:
                    value = valuation[name]
                except KeyError:
                    raise UnboundVariableError(name) from None
                term *= value ** exp
            total += term
        return total

    def substitute(self, mapping: Mapping[str, str]) -> Polynomial:
        """Rename variables through ``mapping`` and re-normalize.

        Variables absent from the mapping stay intact; exponents are
        preserved, and exponents of variables that collide after renaming
        are summed.
        """
        raw = []
        for key, coef in self._terms.items():
            renamed: dict[str, int] = {}
            for name, exp in key:
                target = mapping.get(name, name)
                renamed[target] = renamed.get(target, 0) + exp
            raw.append((coef, renamed))
        return normalize(raw)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(self._terms.items()))

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self) -> str:
        parts = []
        for key, coef in list(self._terms.items())[:4]:
            factors = "*".join(n if e == 1 else f"{n}^{e}" for n, e in key)
            parts.append(f"{coef:g}*{factors}" if factors else f"{coef:g}")
        suffix = " + ..." if len(self._terms) > 4 else ""
        return f"Polynomial({' + '.join(parts)}{suffix})"


def normalize(raw: Iterable[tuple[float, Mapping[str, int]]]) -> Polynomial:
    """Build a normalized polynomial from raw (coefficient, vars) terms.

    Terms with identical variable multisets are merged by summing their
    coefficients; terms whose merged coefficient is exactly zero are
    dropped.
    """
    merged: dict[VarsKey, float] = {}
    for coef, vars in raw:
        coef = float(coef)
        if not math.isfinite(coef):
            raise InvalidCoefficientError(f"non-finite coefficient {coef!r}")
        key = vars_key(vars)
        merged[key] = merged.get(key, 0.0) + coef
    return Polynomial({key: coef for key, coef in merged.items() if coef != 0.0})


class PolySet:
    """An ordered multiset of polynomials with a variable interning order.

    ``variables`` lists every known variable name exactly once, in
    insertion order; it always covers the variables occurring in the
    member polynomials and may declare extra, unused names.
    """

    __slots__ = ("_polys", "_variables", "_num_m", "_num_v")

    def __init__(self, polys: Iterable[Polynomial], variables: Sequence[str] | None = None):
        self._polys: tuple[Polynomial, ...] = tuple(polys)
        occurring: dict[str, None] = {}
        for poly in self._polys:
            for key in poly.terms:
                for name, _ in key:
                    occurring.setdefault(name)
        if variables is None:
            self._variables = tuple(occurring)
        else:
            declared = tuple(variables)
            if len(set(declared)) != len(declared):
                raise ValueError("variable names must be unique")
            missing = [name for name in occurring if name not in set(declared)]
            if missing:
                raise ValueError(f"variables {missing!r} occur but are not declared")
            self._variables = declared
        self._num_m = sum(p.num_m for p in self._polys)
        self._num_v = len(occurring)

    @property
    def polys(self) -> tuple[Polynomial, ...]:
        return self._polys

    @property
    def variables(self) -> tuple[str, ...]:
        return self._variables

    @property
    def num_m(self) -> int:
        return self._num_m

    @property
    def num_v(self) -> int:
        return self._num_v

    def vars(self) -> frozenset[str]:
        return frozenset().union(*(p.vars() for p in self._polys)) if self._polys else frozenset()

    def __iter__(self) -> Iterator[Polynomial]:
        return iter(self._polys)

    def __len__(self) -> int:
        return len(self._polys)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolySet):
            return NotImplemented
        return self._polys == other._polys

    def __hash__(self) -> int:
        return hash(self._polys)

    def __repr__(self) -> str:
        return f"PolySet({len(self._polys)} polynomials, num_m={self._num_m}, num_v={self._num_v})"


def num_m(polyset: PolySet) -> int:
    """Total number of monomials, recomputed from scratch."""
    return sum(len(p.terms) for p in polyset.polys)


def num_v(polyset: PolySet) -> int:
    """Number of distinct variables across all members, recomputed from scratch."""
    seen: set[str] = set()
    for poly in polyset.polys:
        seen.update(poly.vars())
    return len(seen)


def evaluate(poly: Polynomial, valuation: Valuation) -> float:
    """Module-level alias of :meth:`Polynomial.evaluate`."""
    return poly.evaluate(valuation)


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------
#
# PolySet documents look like:
#
#   {"variables": ["p1", "m1", ...],
#    "polynomials": [{"monomials": [{"coef": 220.8, "vars": {"p1": 1, "m1": 1}}, ...]}, ...]}
#
# Parsing is strict: unknown variables, duplicate keys, non-positive
# exponents and non-finite coefficients are all rejected with the JSON
# path of the offending element.


class _JsonObject:
    """JSON object preserved as a raw pair list so duplicate keys survive parsing."""

    __slots__ = ("pairs",)

    def __init__(self, pairs):
        self.pairs = pairs


def _loads(data: bytes | str):
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        return json.loads(text, object_pairs_hook=_JsonObject)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}") from None


def _as_object(node, location: str) -> dict:
    if not isinstance(node, _JsonObject):
        raise ParseError("expected an object", location)
    out = {}
    for key, value in node.pairs:
        if key in out:
            raise ParseError(f"duplicate key {key!r}", location)
        out[key] = value
    return out


def _as_array(node, location: str) -> list:
    if not isinstance(node, list):
        raise ParseError("expected an array", location)
    return node


def _as_number(node, location: str) -> float:
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        raise ParseError("expected a number", location)
    value = float(node)
    if not math.isfinite(value):
        raise ParseError("coefficient must be finite", location)
    return value


def parse_polyset(data: bytes | str) -> PolySet:
    """Parse a PolySet JSON document."""
    doc = _as_object(_loads(data), "$")
    names = _as_array(doc.get("variables"), "$.variables")
    declared: list[str] = []
    seen: set[str] = set()
    for i, name in enumerate(names):
        if not isinstance(name, str):
            raise ParseError("variable names must be strings", f"$.variables[{i}]")
        if name in seen:
            raise ParseError(f"duplicate variable {name!r}", f"$.variables[{i}]")
        seen.add(name)
        declared.append(name)

    polys = []
    for pi, pnode in enumerate(_as_array(doc.get("polynomials"), "$.polynomials")):
        ploc = f"$.polynomials[{pi}]"
        pobj = _as_object(pnode, ploc)
        terms: dict[VarsKey, float] = {}
        for mi, mnode in enumerate(_as_array(pobj.get("monomials"), f"{ploc}.monomials")):
            mloc = f"{ploc}.monomials[{mi}]"
            mobj = _as_object(mnode, mloc)
            if set(mobj) != {"coef", "vars"}:
                raise ParseError("monomial must have exactly 'coef' and 'vars'", mloc)
            coef = _as_number(mobj["coef"], f"{mloc}.coef")
            vloc = f"{mloc}.vars"
            vars_map: dict[str, int] = {}
            for name, exp in _as_object(mobj["vars"], vloc).items():
                if name not in seen:
                    raise ParseError(f"undeclared variable {name!r}", vloc)
                if isinstance(exp, bool) or not isinstance(exp, int) or exp < 1:
                    raise ParseError(f"exponent of {name!r} must be a positive integer", vloc)
                vars_map[name] = exp
            key = tuple(sorted(vars_map.items()))
            if key in terms:
                raise ParseError("two monomials share one variable multiset", mloc)
            terms[key] = coef
        polys.append(Polynomial(terms))
    return PolySet(polys, declared)


def serialize_polyset(polyset: PolySet) -> bytes:
    """Serialize a PolySet to canonical JSON bytes."""
    doc = {
        "variables": list(polyset.variables),
        "polynomials": [
            {
                "monomials": [
                    {"coef": coef, "vars": {name: exp for name, exp in key}}
                    for key, coef in poly.terms.items()
                ]
            }
            for poly in polyset.polys
        ],
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def parse_valuation(data: bytes | str) -> dict[str, float]:
    """Parse a valuation document: ``{"assignments": {"name": value, ...}}``."""
    doc = _as_object(_loads(data), "$")
    assignments = _as_object(doc.get("assignments"), "$.assignments")
    out = {}
    for name, value in assignments.items():
        out[name] = _as_number(value, f"$.assignments[{name!r}]")
    return out


def serialize_valuation(valuation: Valuation) -> bytes:
    doc = {"assignments": dict(sorted(valuation.items()))}
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
