"""System specifications: the named ODE systems the CLI can integrate.

A spec is a JSON-able document with a ``kind`` plus kind-specific
parameters; ``build_rhs`` turns it into something the integrator accepts.
Time-dependent coefficients are expression strings in the time-function
grammar.

kinds:
    linear_homogeneous  {order, b: [order strings]}      companion system, dim = order
    linear_affine       {a, b}                           x' = a(t) x + b(t), dim 1
    bernoulli           {a, b, n}                        x' = a(t) x + b(t) x^n, dim 1
    riccati             {b0, b1}                         y' = -b0 - b1 y - y^2, dim 1
    oscillator          {omega}                          x' = p, p' = -omega^2(t) x, dim 2
    pinney              {omega, c}                       x' = p, p' = -omega^2(t) x + c/x^3, dim 2
    hierarchy_member    {order, b: [order strings]}      dim = order - 1
    custom_td           {dim, terms: [{coeff, field}]}   explicit decomposed form
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .algebra import Poly
from .hierarchy import (
    LinearODESpec,
    companion_linear_system,
    generate_member,
    member_first_order_system,
    member_td_system,
)
from .parsing import ParseError, TimeFunction, TimePower, parse_poly, parse_timefn
from .vectorfield import AnyRHS, GenericRHS, PolyVectorField, TDVectorField

KINDS = (
    "linear_homogeneous",
    "linear_affine",
    "bernoulli",
    "riccati",
    "oscillator",
    "pinney",
    "hierarchy_member",
    "custom_td",
)


class SpecError(ValueError):
    """A system specification failed validation; message names the path."""


@dataclass(frozen=True)
class SystemSpec:
    kind: str
    params: dict

    @property
    def dimension(self) -> int:
        if self.kind in ("linear_affine", "bernoulli", "riccati"):
            return 1
        if self.kind in ("oscillator", "pinney"):
            return 2
        if self.kind == "linear_homogeneous":
            return int(self.params["order"])
        if self.kind == "hierarchy_member":
            return int(self.params["order"]) - 1
        return int(self.params["dim"])


def _require(doc: dict, key: str, path: str):
    if key not in doc:
        raise SpecError(f"{path}.{key}: missing required key")
    return doc[key]


def _check_timefn(value, path: str) -> str:
    if not isinstance(value, str):
        raise SpecError(f"{path}: expected a time-function string")
    try:
        parse_timefn(value)
    except ParseError as exc:
        raise SpecError(f"{path}: {exc}") from exc
    return value


def _timefn_string(doc: dict, key: str, path: str) -> str:
    return _check_timefn(_require(doc, key, path), f"{path}.{key}")


def parse_system_spec(doc: dict, path: str = "system") -> SystemSpec:
    """Validate a raw document and return the normalized spec."""
    if not isinstance(doc, dict):
        raise SpecError(f"{path}: expected an object")
    kind = _require(doc, "kind", path)
    if kind not in KINDS:
        raise SpecError(f"{path}.kind: unknown kind {kind!r}")
    params: dict = {}
    if kind in ("linear_homogeneous", "hierarchy_member"):
        order = _require(doc, "order", path)
        if not isinstance(order, int) or order < 2:
            raise SpecError(f"{path}.order: expected an integer >= 2")
        b = _require(doc, "b", path)
        if not isinstance(b, list) or len(b) != order:
            raise SpecError(f"{path}.b: expected a list of {order} coefficient strings")
        for i in range(order):
            _check_timefn(b[i], f"{path}.b[{i}]")
        params = {"order": order, "b": list(b)}
    elif kind == "linear_affine":
        params = {
            "a": _timefn_string(doc, "a", path),
            "b": _timefn_string(doc, "b", path),
        }
    elif kind == "bernoulli":
        n = _require(doc, "n", path)
        if not isinstance(n, int) or n == 1:
            raise SpecError(f"{path}.n: expected an integer exponent != 1")
        params = {
            "a": _timefn_string(doc, "a", path),
            "b": _timefn_string(doc, "b", path),
            "n": n,
        }
    elif kind == "riccati":
        params = {
            "b0": _timefn_string(doc, "b0", path),
            "b1": _timefn_string(doc, "b1", path),
        }
    elif kind == "oscillator":
        params = {"omega": _timefn_string(doc, "omega", path)}
    elif kind == "pinney":
        c = _require(doc, "c", path)
        if not isinstance(c, (int, float)):
            raise SpecError(f"{path}.c: expected a number")
        params = {"omega": _timefn_string(doc, "omega", path), "c": float(c)}
    elif kind == "custom_td":
        dim = _require(doc, "dim", path)
        if not isinstance(dim, int) or dim < 1:
            raise SpecError(f"{path}.dim: expected a positive integer")
        terms = _require(doc, "terms", path)
        if not isinstance(terms, list) or not terms:
            raise SpecError(f"{path}.terms: expected a non-empty list")
        norm_terms = []
        for i, term in enumerate(terms):
            tp = f"{path}.terms[{i}]"
            if not isinstance(term, dict):
                raise SpecError(f"{tp}: expected an object")
            coeff = _timefn_string(term, "coeff", tp)
            comps = _require(term, "field", tp)
            if not isinstance(comps, list) or len(comps) != dim:
                raise SpecError(f"{tp}.field: expected {dim} component strings")
            for j, comp in enumerate(comps):
                if not isinstance(comp, str):
                    raise SpecError(f"{tp}.field[{j}]: expected a polynomial string")
                try:
                    parse_poly(comp, dim)
                except ParseError as exc:
                    raise SpecError(f"{tp}.field[{j}]: {exc}") from exc
            norm_terms.append({"coeff": coeff, "field": list(comps)})
        params = {"dim": dim, "terms": norm_terms}
    return SystemSpec(kind, params)


def _b_functions(strings: Sequence[str]) -> list[TimeFunction]:
    return [parse_timefn(s) for s in strings]


def build_rhs(spec: SystemSpec) -> AnyRHS:
    """Instantiate the right-hand side described by a spec."""
    kind, params = spec.kind, spec.params
    if kind == "linear_homogeneous":
        lin = LinearODESpec(params["order"], tuple(_b_functions(params["b"])))
        return companion_linear_system(lin)
    if kind == "linear_affine":
        a = parse_timefn(params["a"])
        b = parse_timefn(params["b"])
        x = PolyVectorField([Poly.variable(1, 0)])
        one = PolyVectorField([Poly.constant(1, 1)])
        return TDVectorField([(a, x), (b, one)])
    if kind == "bernoulli":
        a = parse_timefn(params["a"])
        b = parse_timefn(params["b"])
        n = params["n"]
        x = PolyVectorField([Poly.variable(1, 0)])
        xn = PolyVectorField([Poly.variable(1, 0) ** n])
        return TDVectorField([(a, x), (b, xn)])
    if kind == "riccati":
        return member_td_system(2, [parse_timefn(params["b0"]), parse_timefn(params["b1"])])
    if kind == "oscillator":
        return oscillator_system(parse_timefn(params["omega"]))
    if kind == "pinney":
        return pinney_system(parse_timefn(params["omega"]), params["c"])
    if kind == "hierarchy_member":
        member = generate_member(params["order"])
        return member_first_order_system(member, _b_functions(params["b"]))
    if kind == "custom_td":
        dim = params["dim"]
        terms = []
        for term in params["terms"]:
            coeff = parse_timefn(term["coeff"])
            comps = [parse_poly(src, dim) for src in term["field"]]
            terms.append((coeff, PolyVectorField(comps)))
        return TDVectorField(terms)
    raise SpecError(f"unknown kind {kind!r}")


def oscillator_system(omega: TimeFunction) -> TDVectorField:
    """x' = p, p' = -omega^2(t) x on R^2, in decomposed form."""
    drift = PolyVectorField([Poly.variable(2, 1), Poly.zero(2)])
    pull = PolyVectorField([Poly.zero(2), -Poly.variable(2, 0)])
    return TDVectorField([(TimeFunction.constant(1), drift), (TimePower(omega, 2), pull)])


def pinney_system(omega: TimeFunction, c: float) -> GenericRHS:
    """x' = p, p' = -omega^2(t) x + c/x^3 on the half-plane x > 0."""
    cval = float(c)

    def fn(t: float, state: Sequence[float]) -> list[float]:
        x, p = state
        return [p, -omega.eval(t) ** 2 * x + cval / x**3]

    return GenericRHS(2, fn, label="pinney")


def spec_to_doc(spec: SystemSpec) -> dict:
    """Normalized JSON document; parse_system_spec round-trips it."""
    doc = {"kind": spec.kind}
    doc.update(spec.params)
    return doc
