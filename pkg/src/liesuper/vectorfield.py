"""Polynomial vector fields, their Lie brackets, and time-dependent systems.

A ``PolyVectorField`` on R^n holds one Poly per coordinate.  Time-dependent
systems come in two shapes:

* ``TDVectorField`` -- a sum of (time function) * (autonomous polynomial
  field) terms.  This decomposed storage is what makes minimal-Lie-algebra
  computations exact: the closure is taken over the constituent autonomous
  fields rather than estimated from samples.

* ``GenericRHS`` -- an opaque but deterministic right-hand side, for
  systems whose components are not polynomial in the state (or are more
  convenient to evaluate directly).  These are only ever integrated, never
  bracketed.

``diagonal_prolong`` copies a field blockwise onto several copies of its
state space; ``direct_product`` glues time-dependent systems on different
spaces into one system on the product space.
"""

from __future__ import annotations

from typing import Callable, Sequence, Union

from .algebra import Poly, poly_partial
from .parsing import TimeFunction

State = Sequence[float]


class PolyVectorField:
    """An autonomous vector field on R^n with polynomial components."""

    __slots__ = ("dimension", "components", "_compiled")

    def __init__(self, components: Sequence[Poly]):
        components = tuple(components)
        if not components:
            raise ValueError("a vector field needs at least one component")
        n = len(components)
        for p in components:
            if p.arity != n:
                raise ValueError(f"component arity {p.arity} does not match dimension {n}")
        object.__setattr__(self, "dimension", n)
        object.__setattr__(self, "components", components)
        object.__setattr__(self, "_compiled", None)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("PolyVectorField is immutable")

    @classmethod
    def zero(cls, dimension: int) -> PolyVectorField:
        return cls([Poly.zero(dimension)] * dimension)

    @property
    def is_zero(self) -> bool:
        return all(p.is_zero for p in self.components)

    def __add__(self, other: PolyVectorField) -> PolyVectorField:
        if self.dimension != other.dimension:
            raise ValueError("dimension mismatch")
        return PolyVectorField([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: PolyVectorField) -> PolyVectorField:
        return self + (-other)

    def __neg__(self) -> PolyVectorField:
        return PolyVectorField([-p for p in self.components])

    def __mul__(self, scalar) -> PolyVectorField:
        return PolyVectorField([p * scalar for p in self.components])

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PolyVectorField)
            and self.dimension == other.dimension
            and self.components == other.components
        )

    def __hash__(self) -> int:
        return hash(self.components)

    def evaluate(self, point: Sequence) -> list:
        """Component values at a point; exact when the point is exact."""
        return [p.evaluate(point) for p in self.components]

    def evaluate_float(self, point: Sequence[float]) -> list[float]:
        """Fast float evaluation used inside integration loops."""
        compiled = self._compiled
        if compiled is None:
            compiled = []
            for p in self.components:
                compiled.append(
                    [
                        (float(c), tuple((j, e) for j, e in enumerate(exps) if e))
                        for exps, c in p.terms.items()
                    ]
                )
            object.__setattr__(self, "_compiled", compiled)
        out = []
        for monos in compiled:
            acc = 0.0
            for coeff, powers in monos:
                v = coeff
                for j, e in powers:
                    v *= point[j] if e == 1 else point[j] ** e
                acc += v
            out.append(acc)
        return out

    def coefficient_vector(self) -> dict:
        """Sparse coefficient vector keyed by (component, monomial).

        Linear independence of polynomial fields over R is exactly linear
        independence of these vectors, which is how rank computations stay
        sample-free.
        """
        out = {}
        for i, p in enumerate(self.components):
            for exps, c in p.terms.items():
                out[(i, exps)] = c
        return out

    def to_text(self, names: Sequence[str] | None = None) -> str:
        comps = ", ".join(p.to_text(names) for p in self.components)
        return f"({comps})"

    def __repr__(self) -> str:
        return f"PolyVectorField{self.to_text()}"


def lie_bracket(x: PolyVectorField, y: PolyVectorField) -> PolyVectorField:
    """Exact commutator [X, Y]^i = sum_j (X^j d_j Y^i - Y^j d_j X^i)."""
    if x.dimension != y.dimension:
        raise ValueError(f"dimension mismatch: {x.dimension} vs {y.dimension}")
    n = x.dimension
    comps = []
    for i in range(n):
        acc = Poly.zero(n)
        for j in range(n):
            if not x.components[j].is_zero:
                acc = acc + x.components[j] * poly_partial(y.components[i], j)
            if not y.components[j].is_zero:
                acc = acc - y.components[j] * poly_partial(x.components[i], j)
        comps.append(acc)
    return PolyVectorField(comps)


def diagonal_prolong(x: PolyVectorField, copies: int) -> PolyVectorField:
    """The field on R^{n*copies} applying X to each block's own variables."""
    if copies < 1:
        raise ValueError("copies must be at least 1")
    n = x.dimension
    total = n * copies
    comps = []
    for a in range(copies):
        index_map = [a * n + j for j in range(n)]
        for i in range(n):
            comps.append(x.components[i].remap(total, index_map))
    return PolyVectorField(comps)


class TDVectorField:
    """A time-dependent field sum_alpha b_alpha(t) * Y_alpha."""

    __slots__ = ("dimension", "terms", "_compiled")

    def __init__(self, terms: Sequence[tuple[TimeFunction, PolyVectorField]]):
        terms = tuple(terms)
        if not terms:
            raise ValueError("a time-dependent field needs at least one term")
        n = terms[0][1].dimension
        for _, field in terms:
            if field.dimension != n:
                raise ValueError("all terms must share one dimension")
        object.__setattr__(self, "dimension", n)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "_compiled", None)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("TDVectorField is immutable")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TDVectorField)
            and self.dimension == other.dimension
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash(self.terms)

    def collect(self) -> TDVectorField:
        """Merge terms with structurally equal time coefficients and drop
        zero fields; used for structural comparisons of products."""
        order: list[TimeFunction] = []
        acc: dict[TimeFunction, PolyVectorField] = {}
        for tf, field in self.terms:
            if tf in acc:
                acc[tf] = acc[tf] + field
            else:
                order.append(tf)
                acc[tf] = field
        merged = [(tf, acc[tf]) for tf in order if not acc[tf].is_zero]
        if not merged:
            merged = [(self.terms[0][0], PolyVectorField.zero(self.dimension))]
        return TDVectorField(merged)

    def constituent_fields(self) -> list[PolyVectorField]:
        return [field for _, field in self.terms]

    def evaluate(self, t: float, state: State) -> list[float]:
        if len(state) != self.dimension:
            raise ValueError(f"state of length {len(state)} for dimension {self.dimension}")
        compiled = self._compiled
        if compiled is None:
            compiled = []
            for tf, field in self.terms:
                comps = []
                for i, p in enumerate(field.components):
                    if p.terms:
                        comps.append(
                            (
                                i,
                                [
                                    (float(c), tuple((j, e) for j, e in enumerate(exps) if e))
                                    for exps, c in p.terms.items()
                                ],
                            )
                        )
                compiled.append((tf, comps))
            object.__setattr__(self, "_compiled", compiled)
        out = [0.0] * self.dimension
        for tf, comps in compiled:
            s = tf.eval(t)
            for i, monos in comps:
                acc = 0.0
                for coeff, powers in monos:
                    v = coeff
                    for j, e in powers:
                        v *= state[j] if e == 1 else state[j] ** e
                    acc += v
                out[i] += s * acc
        return out


class GenericRHS:
    """A deterministic right-hand side f(t, state) of fixed dimension."""

    __slots__ = ("dimension", "_fn", "label")

    def __init__(self, dimension: int, fn: Callable[[float, State], Sequence[float]], label: str = ""):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        object.__setattr__(self, "dimension", dimension)
        object.__setattr__(self, "_fn", fn)
        object.__setattr__(self, "label", label)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("GenericRHS is immutable")

    def evaluate(self, t: float, state: State) -> list[float]:
        if len(state) != self.dimension:
            raise ValueError(f"state of length {len(state)} for dimension {self.dimension}")
        out = self._fn(t, state)
        return list(out)

    def __repr__(self) -> str:
        return f"GenericRHS(dim={self.dimension}, {self.label!r})"


AnyRHS = Union[TDVectorField, GenericRHS]


def direct_product(systems: Sequence[TDVectorField]) -> TDVectorField:
    """Join time-dependent systems on a product space.

    The projection onto each factor recovers that factor's field: each
    term of each factor is embedded into its own coordinate block and the
    time coefficients are kept as they are.
    """
    systems = list(systems)
    if not systems:
        raise ValueError("direct product of an empty family")
    total = sum(s.dimension for s in systems)
    terms: list[tuple[TimeFunction, PolyVectorField]] = []
    offset = 0
    for system in systems:
        n = system.dimension
        index_map = [offset + j for j in range(n)]
        for tf, field in system.terms:
            comps = [Poly.zero(total) for _ in range(total)]
            for i, p in enumerate(field.components):
                comps[offset + i] = p.remap(total, index_map)
            terms.append((tf, PolyVectorField(comps)))
        offset += n
    return TDVectorField(terms)


def join_rhs(parts: Sequence[AnyRHS]) -> GenericRHS:
    """Blockwise join of heterogeneous right-hand sides (evaluation only)."""
    parts = list(parts)
    if not parts:
        raise ValueError("cannot join an empty family")
    dims = [p.dimension for p in parts]
    total = sum(dims)
    offsets = []
    acc = 0
    for d in dims:
        offsets.append(acc)
        acc += d

    def fn(t: float, state: State) -> list[float]:
        out: list[float] = []
        for part, off, d in zip(parts, offsets, dims):
            out.extend(part.evaluate(t, state[off : off + d]))
        return out

    return GenericRHS(total, fn, label="join")


def eval_rhs(rhs: AnyRHS, t: float, state: State) -> list[float]:
    """Evaluate a right-hand side at (t, state)."""
    return rhs.evaluate(t, state)
