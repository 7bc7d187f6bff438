"""Exact Lie-algebra computations for polynomial vector fields.

The central operation is ``closure``: starting from a set of generator
fields, keep bracketing until nothing new appears or a cap is exceeded.
Independence over R is decided in coefficient space (exact row reduction
of the fields' coefficient vectors), never by sampling, so a finite
answer is a proof and a ``CapExceeded`` is a certificate that the
generated algebra has dimension above the cap.

Pointwise questions -- whether a basis is linearly independent at a
generic point ("modular") -- are intrinsically about evaluation, so there
the definition is followed: seeded rational sample points, exact rank of
the evaluation matrix, one full-rank witness suffices.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .exactlinalg import (
    SparseEchelon,
    dense_rank,
    determinant,
    solve_in_span,
    sparse_rank,
)
from .vectorfield import PolyVectorField, lie_bracket

DEFAULT_CLOSURE_CAP = 64


class CapExceeded(Exception):
    """The generated algebra outgrew the requested cap."""

    def __init__(self, cap: int, dimension: int):
        super().__init__(f"cap exceeded at dimension {dimension}")
        self.cap = cap
        self.dimension = dimension


class NotClosed(Exception):
    """A bracket of two basis fields escaped the span of the basis."""

    def __init__(self, alpha: int, beta: int):
        super().__init__(f"bracket of basis fields {alpha} and {beta} lies outside the span")
        self.alpha = alpha
        self.beta = beta


class LieBasis:
    """A linearly independent list of polynomial fields on a common space."""

    __slots__ = ("dimension", "fields", "coefficient_rows")

    def __init__(self, fields: Sequence[PolyVectorField], dimension: int | None = None):
        fields = tuple(fields)
        if fields:
            n = fields[0].dimension
            for f in fields:
                if f.dimension != n:
                    raise ValueError("basis fields must share one dimension")
            if dimension is not None and dimension != n:
                raise ValueError("explicit dimension disagrees with the fields")
        elif dimension is None:
            raise ValueError("an empty basis needs an explicit ambient dimension")
        else:
            n = dimension
        rows = tuple(f.coefficient_vector() for f in fields)
        if sparse_rank(rows) != len(fields):
            raise ValueError("basis fields are linearly dependent")
        object.__setattr__(self, "dimension", n)
        object.__setattr__(self, "fields", fields)
        object.__setattr__(self, "coefficient_rows", rows)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("LieBasis is immutable")

    @property
    def size(self) -> int:
        return len(self.fields)

    def __len__(self) -> int:
        return len(self.fields)

    def __iter__(self):
        return iter(self.fields)


def independence_rank(fields: Sequence[PolyVectorField]) -> int:
    """Rank of a family of polynomial fields over R (exact, sample-free)."""
    fields = list(fields)
    if not fields:
        return 0
    n = fields[0].dimension
    for f in fields:
        if f.dimension != n:
            raise ValueError("fields must share one dimension")
    return sparse_rank([f.coefficient_vector() for f in fields])


def closure(generators: Sequence[PolyVectorField], cap: int = DEFAULT_CLOSURE_CAP) -> LieBasis:
    """Basis of the smallest Lie algebra containing the generators.

    Every unordered pair of basis fields is bracketed exactly once, in a
    fixed order, and a bracket joins the basis iff it is independent of
    the current span.  Raises CapExceeded as soon as the basis would grow
    past ``cap``.
    """
    generators = list(generators)
    if not generators:
        raise ValueError("closure needs at least one generator")
    if cap < 1:
        raise ValueError("cap must be at least 1")
    n = generators[0].dimension
    for g in generators:
        if g.dimension != n:
            raise ValueError("generators must share one dimension")

    ech = SparseEchelon()
    fields: list[PolyVectorField] = []

    def admit(field: PolyVectorField) -> bool:
        if not ech.add(field.coefficient_vector()):
            return False
        if len(fields) == cap:
            raise CapExceeded(cap, cap + 1)
        fields.append(field)
        return True

    for g in generators:
        admit(g)

    i = 0
    while i < len(fields):
        for j in range(i):
            admit(lie_bracket(fields[j], fields[i]))
        i += 1
    return LieBasis(fields, dimension=n)


class StructureConstants:
    """c[a][b][g] with [Y_a, Y_b] = sum_g c[a][b][g] Y_g, exact."""

    __slots__ = ("r", "c")

    def __init__(self, c: Sequence[Sequence[Sequence[Fraction]]]):
        r = len(c)
        table = tuple(tuple(tuple(Fraction(v) for v in row) for row in plane) for plane in c)
        for plane in table:
            if len(plane) != r or any(len(row) != r for row in plane):
                raise ValueError("structure constants must form an r x r x r table")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "c", table)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("StructureConstants is immutable")

    def bracket_coefficients(self, alpha: int, beta: int) -> tuple[Fraction, ...]:
        return self.c[alpha][beta]


def structure_constants(basis: LieBasis) -> StructureConstants:
    """Expand every bracket of basis fields in the basis, exactly.

    Raises NotClosed(alpha, beta) if some bracket escapes the span.
    """
    r = basis.size
    zero = Fraction(0)
    c = [[[zero] * r for _ in range(r)] for _ in range(r)]
    rows = list(basis.coefficient_rows)
    for a in range(r):
        for b in range(a + 1, r):
            br = lie_bracket(basis.fields[a], basis.fields[b])
            coeffs = solve_in_span(rows, br.coefficient_vector())
            if coeffs is None:
                raise NotClosed(a, b)
            for g in range(r):
                c[a][b][g] = coeffs[g]
                c[b][a][g] = -coeffs[g]
    return StructureConstants(c)


def killing_form(sc: StructureConstants) -> list[list[Fraction]]:
    """K[a][b] = sum_{g,d} c[a][g][d] * c[b][d][g], exact and symmetric."""
    r = sc.r
    K = [[Fraction(0)] * r for _ in range(r)]
    for a in range(r):
        for b in range(a, r):
            acc = Fraction(0)
            for g in range(r):
                for d in range(r):
                    acc += sc.c[a][g][d] * sc.c[b][d][g]
            K[a][b] = acc
            K[b][a] = acc
    return K


def killing_determinant(sc: StructureConstants) -> Fraction:
    return determinant(killing_form(sc))


def center_dimension(sc: StructureConstants) -> int:
    """Dimension of {v : [v, Y_b] = 0 for all b} via an exact nullspace."""
    r = sc.r
    if r == 0:
        return 0
    rows = []
    for b in range(r):
        for g in range(r):
            rows.append([sc.c[a][b][g] for a in range(r)])
    return r - dense_rank(rows)


def is_modular_basis(basis: LieBasis, samples: int = 20, seed: int = 0) -> bool:
    """True iff the fields are linearly independent at some sampled point.

    Pointwise rank is lower-semicontinuous, so a single full-rank witness
    certifies genericity; several seeded rational points (coordinates in
    [-10, 10], denominators <= 16) guard against landing on a thin zero
    set.  Ranks are exact.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    r = basis.size
    if r == 0:
        return True
    n = basis.dimension
    if r > n:
        return False
    rng = random.Random(seed)
    for _ in range(samples):
        point = []
        for _ in range(n):
            den = rng.randint(1, 16)
            point.append(Fraction(rng.randint(-10 * den, 10 * den), den))
        rows = [f.evaluate(point) for f in basis.fields]
        if dense_rank(rows) == r:
            return True
    return False


def check_lie_condition(closure_dim: int, component_dims: Sequence[int]) -> bool:
    """The dimension bound satisfied by any system admitting a mixed
    superposition rule: dim V <= sum of the component space dimensions."""
    return closure_dim <= sum(component_dims)
