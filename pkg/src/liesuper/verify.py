"""End-to-end verification of superposition rules against integration.

The protocol for one trial of one rule:

1. sample initial conditions for the component systems and constants,
2. compute the target's initial state through the rule's formula,
3. integrate target and components together as one block-diagonal system
   (the direct product of the components, joined with the target), so all
   comparisons happen on a single shared grid with no interpolation,
4. at every accepted node compare the formula applied to the component
   states against the independently integrated target block,
5. apply rule-specific consistency checks (Wronskian conservation and a
   finite-difference derivative check for the Pinney rule, the exact
   constants round trip for the hierarchy rule).

Trials whose sampled data wander into a rule's singular set (vanishing
denominators, sign changes of the normalizing combination, blown-up
component solutions) are rejected and resampled; rejections and singular
runs are counted in the report, never hidden.

Each verified rule also gets its dimension check: the Lie closure of the
target system's constituent fields (for the Pinney rule, whose target is
not polynomial, the component oscillator's fields stand in) must not
exceed the sum of the component space dimensions.

``run_suite`` drives a declarative list of such checks -- rules, raw
closures, first-integral drifts, and the bracket/prolongation identity --
from a JSON-able document with explicit seeds and tolerances.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .algebra import Poly
from .hierarchy import (
    LinearODESpec,
    companion_linear_system,
    generate_member,
    gl_basis,
    linear_generators,
    member_first_order_system,
    member_lie_generators,
    member_td_system,
)
from .integrate import IntegratorConfig, Trajectory, first_integral_drift, integrate, wronskian
from .liealg import (
    CapExceeded,
    center_dimension,
    check_lie_condition,
    closure,
    killing_determinant,
    structure_constants,
)
from .parsing import ParseError, TimeFunction, parse_poly, parse_timefn
from .superpose import (
    MixedRule,
    SuperpositionError,
    eval_bernoulli_rule,
    eval_hierarchy_rule,
    eval_linear_rule,
    eval_pinney_rule,
    eval_riccati_cross_ratio,
    solve_hierarchy_constants,
)
from .systems import oscillator_system, pinney_system
from .vectorfield import (
    PolyVectorField,
    TDVectorField,
    diagonal_prolong,
    direct_product,
    join_rhs,
    lie_bracket,
)


# ---------------------------------------------------------------------------
# randomized fields and the bracket/prolongation identity
# ---------------------------------------------------------------------------

def random_field(rng: random.Random, dim: int, degree: int = 3, terms: int = 3) -> PolyVectorField:
    """A random polynomial field with small integer coefficients."""
    comps = []
    for _ in range(dim):
        p = Poly.zero(dim)
        for _ in range(rng.randint(1, terms)):
            while True:
                exps = tuple(rng.randint(0, degree) for _ in range(dim))
                if sum(exps) <= degree:
                    break
            coeff = rng.randint(-3, 3)
            p = p + Poly.monomial(dim, exps, coeff)
        comps.append(p)
    return PolyVectorField(comps)


def check_prolongation_identity(seed: int, trials: int) -> bool:
    """Whether prolonging commutes with the bracket on random field pairs:
    the prolongation of [X, Y] must equal the bracket of the prolongations,
    exactly, for every sampled pair."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = random.Random(seed)
    for _ in range(trials):
        dim = rng.randint(1, 3)
        copies = rng.choice((2, 3))
        x = random_field(rng, dim)
        y = random_field(rng, dim)
        lhs = diagonal_prolong(lie_bracket(x, y), copies)
        rhs = lie_bracket(diagonal_prolong(x, copies), diagonal_prolong(y, copies))
        if lhs != rhs:
            return False
    return True


# ---------------------------------------------------------------------------
# per-trial records and per-rule reports
# ---------------------------------------------------------------------------

@dataclass
class TrialRecord:
    index: int
    constants: list[float]
    status: str  # 'ok', 'rejected:<reason>', 'singular:<trigger>'
    max_error: float | None = None
    extras: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_doc(self) -> dict:
        doc = {"index": self.index, "constants": self.constants, "status": self.status}
        if self.max_error is not None:
            doc["max_error"] = self.max_error
        if self.extras:
            doc["extras"] = self.extras
        return doc


@dataclass
class VerificationReport:
    rule_id: str
    trial_count: int
    max_formula_error: float
    max_drift: float
    singular_trials: int
    rejected_trials: int
    closure_dimension: int | None
    dimension_bound: int | None
    lie_condition: bool | None
    records: list[TrialRecord]
    component_closure_dimension: int | None = None

    def to_doc(self) -> dict:
        doc = {
            "rule": self.rule_id,
            "trial_count": self.trial_count,
            "max_formula_error": self.max_formula_error,
            "max_drift": self.max_drift,
            "singular_trials": self.singular_trials,
            "rejected_trials": self.rejected_trials,
            "closure_dimension": self.closure_dimension,
            "dimension_bound": self.dimension_bound,
            "lie_condition": self.lie_condition,
            "trials": [r.to_doc() for r in self.records],
        }
        if self.component_closure_dimension is not None:
            doc["component_closure_dimension"] = self.component_closure_dimension
        return doc


# ---------------------------------------------------------------------------
# rule setups
# ---------------------------------------------------------------------------

@dataclass
class RuleSetup:
    """Everything one rule needs for trials: its component systems, its
    target system, the formula, a seeded sampler, singularity guards, and
    extra per-trial checks."""

    rule: MixedRule
    components: list[TDVectorField]
    target: object  # TDVectorField | GenericRHS
    phi: Callable[[list[np.ndarray], Sequence[float]], list[float]]
    sample: Callable[[random.Random], tuple[list[list[float]], list[float]]]
    guard: Callable[[Trajectory, list[np.ndarray], Sequence[float]], str | None]
    extras: Callable[[Trajectory, list[np.ndarray], Sequence[float]], dict]
    condition_generators: list[PolyVectorField]
    component_generators: list[PolyVectorField] | None = None

    def component_blocks(self, traj: Trajectory) -> list[np.ndarray]:
        blocks = []
        offset = self.rule.target_dim
        for d in self.rule.component_dims:
            blocks.append(traj.states[:, offset : offset + d])
            offset += d
        return blocks


def _no_guard(traj, blocks, constants):
    return None


def _no_extras(traj, blocks, constants):
    return {}


def _build_linear(params: dict) -> RuleSetup:
    a = parse_timefn(params["a"])
    b = parse_timefn(params["b"])
    x = PolyVectorField([Poly.variable(1, 0)])
    one = PolyVectorField([Poly.constant(1, 1)])
    affine = TDVectorField([(a, x), (b, one)])
    homogeneous = TDVectorField([(a, x)])

    def phi(blocks, k):
        return [eval_linear_rule(blocks[0][0], blocks[1][0], k[0])]

    def sample(rng):
        x1 = rng.uniform(-2.0, 2.0)
        x2 = rng.choice((-1, 1)) * rng.uniform(0.5, 2.0)
        k = rng.uniform(-2.0, 2.0)
        return [[x1], [x2]], [k]

    return RuleSetup(
        rule=MixedRule.linear(),
        components=[affine, homogeneous],
        target=affine,
        phi=phi,
        sample=sample,
        guard=_no_guard,
        extras=_no_extras,
        condition_generators=[x, one],
    )


def _build_bernoulli(params: dict) -> RuleSetup:
    a = parse_timefn(params["a"])
    b = parse_timefn(params["b"])
    n = int(params["n"])
    x = PolyVectorField([Poly.variable(1, 0)])
    xn = PolyVectorField([Poly.variable(1, 0) ** n])
    bern = TDVectorField([(a, x), (b, xn)])
    homogeneous = TDVectorField([(a, x)])

    def phi(blocks, k):
        return [eval_bernoulli_rule(blocks[0][0], blocks[1][0], k[0], n)]

    def sample(rng):
        x1 = rng.uniform(0.4, 0.8)
        x2 = rng.uniform(0.5, 1.5)
        k = rng.uniform(0.0, 1.0)
        return [[x1], [x2]], [k]

    def guard(traj, blocks, constants):
        if float(np.min(blocks[0])) < 1e-3 or float(np.min(blocks[1])) < 1e-3:
            return "component-left-positive-domain"
        return None

    return RuleSetup(
        rule=MixedRule.bernoulli(n),
        components=[bern, homogeneous],
        target=bern,
        phi=phi,
        sample=sample,
        guard=guard,
        extras=_no_extras,
        condition_generators=[x, xn],
    )


def _build_pinney(params: dict) -> RuleSetup:
    omega = parse_timefn(params["omega"])
    c = float(params["c"])
    osc = oscillator_system(omega)
    target = pinney_system(omega, c)

    def phi(blocks, k):
        return list(eval_pinney_rule(blocks[0], blocks[1], k[0], k[1], c))

    def sample(rng):
        while True:
            xi1 = [rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)]
            xi2 = [rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)]
            w = xi1[0] * xi2[1] - xi1[1] * xi2[0]
            if abs(w) < 0.3:
                continue
            k1 = rng.uniform(0.4, 2.0)
            k2 = rng.uniform(0.4, 2.0)
            if 4.0 * k1 * k2 - c * w * w < 0.05:
                continue
            return [xi1, xi2], [k1, k2]

    def guard(traj, blocks, constants):
        # the c/x^3 term makes small-x trials stiff far beyond the stated
        # tolerances; the rule is local, so such trials are resampled
        xs = np.array(
            [eval_pinney_rule(b1, b2, constants[0], constants[1], c)[0] for b1, b2 in zip(blocks[0], blocks[1])]
        )
        if float(np.min(xs)) < 0.3:
            return "formula-output-margin"
        return None

    def extras(traj, blocks, constants):
        comp1 = traj.block(2, 4)
        comp2 = traj.block(4, 6)
        w = wronskian(comp1, comp2)
        drift = float(np.max(np.abs(w - w[0])))
        # five-point derivative of the formula's x against its p output,
        # on the uniform grid the fixed-step method produces
        values = np.array(
            [eval_pinney_rule(b1, b2, constants[0], constants[1], c) for b1, b2 in zip(blocks[0], blocks[1])]
        )
        x_f, p_f = values[:, 0], values[:, 1]
        h = traj.times[1] - traj.times[0]
        deriv_error = 0.0
        for i in range(2, len(x_f) - 2):
            fd = (x_f[i - 2] - 8 * x_f[i - 1] + 8 * x_f[i + 1] - x_f[i + 2]) / (12 * h)
            deriv_error = max(deriv_error, abs(fd - p_f[i]))
        return {"wronskian_drift": drift, "deriv_error": float(deriv_error)}

    osc_fields = osc.constituent_fields()
    return RuleSetup(
        rule=MixedRule.pinney(c),
        components=[osc, osc],
        target=target,
        phi=phi,
        sample=sample,
        guard=guard,
        extras=extras,
        condition_generators=osc_fields,
    )


def _build_hierarchy(params: dict) -> RuleSetup:
    s = int(params["order"])
    bfns = [parse_timefn(src) for src in params["b"]]
    if len(bfns) != s:
        raise ValueError(f"hierarchy rule of order {s} needs {s} coefficient functions")
    companion = companion_linear_system(LinearODESpec(s, tuple(bfns)))
    member = generate_member(s)
    target = member_first_order_system(member, bfns)

    def phi(blocks, k):
        return eval_hierarchy_rule(s, [list(b) for b in blocks], list(k))

    def sample(rng):
        while True:
            jets = [[rng.uniform(-1.5, 1.5) for _ in range(s)] for _ in range(s)]
            if abs(np.linalg.det(np.array(jets).T)) < 0.2:
                continue
            k = [rng.uniform(-1.5, 1.5) for _ in range(s - 1)]
            c0 = sum(k[a] * jets[a][0] for a in range(s - 1)) + jets[s - 1][0]
            if abs(c0) < 0.3:
                continue
            return jets, k

    def guard(traj, blocks, constants):
        c0 = sum(constants[a] * blocks[a][:, 0] for a in range(s - 1)) + blocks[s - 1][:, 0]
        if float(np.min(np.abs(c0))) < 0.05 or np.any(np.sign(c0) != np.sign(c0[0])):
            return "normalizing-combination-margin"
        return None

    def extras(traj, blocks, constants):
        jets0 = [list(b[0]) for b in blocks]
        v0 = phi(jets0, constants)
        k_back = solve_hierarchy_constants(s, jets0, v0)
        v_back = eval_hierarchy_rule(s, jets0, k_back)
        err = max(abs(a - b) for a, b in zip(v_back, v0))
        return {"round_trip_error": float(err)}

    return RuleSetup(
        rule=MixedRule.hierarchy(s),
        components=[companion] * s,
        target=target,
        phi=phi,
        sample=sample,
        guard=guard,
        extras=extras,
        condition_generators=member_lie_generators(s),
        component_generators=companion.constituent_fields(),
    )


def _build_cross_ratio(params: dict) -> RuleSetup:
    bfns = [parse_timefn(params["b0"]), parse_timefn(params["b1"])]
    riccati = member_td_system(2, bfns)

    def phi(blocks, k):
        return [eval_riccati_cross_ratio(blocks[0][0], blocks[1][0], blocks[2][0], k[0])]

    def sample(rng):
        while True:
            ys = sorted(rng.uniform(-0.3, 2.5) for _ in range(3))
            if ys[1] - ys[0] < 0.15 or ys[2] - ys[1] < 0.15:
                continue
            k = rng.uniform(-2.0, 2.0)
            den = (ys[2] - ys[1]) + k * (ys[0] - ys[2])
            if abs(den) < 0.1:
                continue
            return [[ys[0]], [ys[1]], [ys[2]]], [k]

    def guard(traj, blocks, constants):
        y1, y2, y3 = blocks[0][:, 0], blocks[1][:, 0], blocks[2][:, 0]
        gap = min(
            float(np.min(np.abs(y1 - y2))),
            float(np.min(np.abs(y1 - y3))),
            float(np.min(np.abs(y2 - y3))),
        )
        if gap < 1e-3:
            return "coincident-solutions-margin"
        den = (y3 - y2) + constants[0] * (y1 - y3)
        if float(np.min(np.abs(den))) < 0.02:
            return "denominator-margin"
        return None

    return RuleSetup(
        rule=MixedRule.riccati_cross_ratio(),
        components=[riccati] * 3,
        target=riccati,
        phi=phi,
        sample=sample,
        guard=guard,
        extras=_no_extras,
        condition_generators=member_lie_generators(2),
    )


_RULE_BUILDERS = {
    "linear": _build_linear,
    "bernoulli": _build_bernoulli,
    "pinney": _build_pinney,
    "hierarchy": _build_hierarchy,
    "riccati-cross-ratio": _build_cross_ratio,
}


def build_rule_setup(rule_id: str, params: dict) -> RuleSetup:
    try:
        builder = _RULE_BUILDERS[rule_id]
    except KeyError:
        raise ValueError(f"unknown rule id {rule_id!r}") from None
    return builder(params)


# ---------------------------------------------------------------------------
# single trials and trial loops
# ---------------------------------------------------------------------------

def verify_rule(
    setup: RuleSetup,
    component_ics: Sequence[Sequence[float]],
    constants: Sequence[float],
    tspan: tuple[float, float],
    cfg: IntegratorConfig,
    index: int = 0,
) -> TrialRecord:
    """One forward trial: formula output versus direct integration."""
    rule = setup.rule
    if len(component_ics) != len(rule.component_dims):
        raise ValueError("one initial condition per component system is required")
    for ic, d in zip(component_ics, rule.component_dims):
        if len(ic) != d:
            raise ValueError("component initial condition has the wrong dimension")
    if len(constants) != rule.constant_count:
        raise ValueError(f"rule takes {rule.constant_count} constants")

    constants = [float(v) for v in constants]
    try:
        x0 = setup.phi([np.array(ic, dtype=float) for ic in component_ics], constants)
    except SuperpositionError as exc:
        return TrialRecord(index, constants, f"rejected:initial-{type(exc).__name__}")

    comp_joint = direct_product(setup.components)
    joint = join_rhs([setup.target, comp_joint])
    y0 = list(x0) + [v for ic in component_ics for v in ic]
    traj = integrate(joint, y0, tspan, cfg)
    if not traj.completed:
        return TrialRecord(index, constants, f"singular:{traj.event.trigger}")

    blocks = setup.component_blocks(traj)
    reason = setup.guard(traj, blocks, constants)
    if reason is not None:
        return TrialRecord(index, constants, f"rejected:{reason}")

    n0 = rule.target_dim
    max_error = 0.0
    try:
        for i in range(len(traj.times)):
            predicted = setup.phi([b[i] for b in blocks], constants)
            for j in range(n0):
                max_error = max(max_error, abs(predicted[j] - traj.states[i, j]))
        extras = setup.extras(traj, blocks, constants)
    except SuperpositionError as exc:
        return TrialRecord(index, constants, f"rejected:formula-{type(exc).__name__}")
    return TrialRecord(index, constants, "ok", float(max_error), extras)


def run_rule_verification(
    rule_id: str,
    params: dict,
    trials: int,
    seed: int,
    tspan: tuple[float, float],
    cfg: IntegratorConfig,
    closure_cap: int = 64,
) -> VerificationReport:
    """Seeded trial loop with rejection resampling, plus the dimension check."""
    setup = build_rule_setup(rule_id, params)
    rng = random.Random(seed)
    records: list[TrialRecord] = []
    clean = singular = rejected = 0
    attempts = 0
    while clean < trials:
        attempts += 1
        if attempts > 60 * trials:
            raise RuntimeError(
                f"rule {rule_id!r}: too many rejected trials ({rejected} rejected, {singular} singular)"
            )
        ics, constants = setup.sample(rng)
        record = verify_rule(setup, ics, constants, tspan, cfg, index=attempts - 1)
        if record.status.startswith("singular"):
            singular += 1
            records.append(record)
        elif record.status.startswith("rejected"):
            rejected += 1
            records.append(record)
        else:
            clean += 1
            records.append(record)

    try:
        dim = closure(setup.condition_generators, closure_cap).size
    except CapExceeded:
        dim = None
    bound = sum(setup.rule.component_dims)
    lie_ok = check_lie_condition(dim, setup.rule.component_dims) if dim is not None else False
    component_dim = None
    if setup.component_generators is not None:
        component_dim = closure(setup.component_generators, closure_cap).size

    clean_records = [r for r in records if r.ok]
    max_error = max((r.max_error for r in clean_records), default=0.0)
    max_drift = max(
        (r.extras.get("wronskian_drift", 0.0) for r in clean_records),
        default=0.0,
    )
    return VerificationReport(
        rule_id=rule_id,
        trial_count=clean + singular,
        max_formula_error=max_error,
        max_drift=max_drift,
        singular_trials=singular,
        rejected_trials=rejected,
        closure_dimension=dim,
        dimension_bound=bound,
        lie_condition=lie_ok,
        records=records,
        component_closure_dimension=component_dim,
    )


# ---------------------------------------------------------------------------
# first-integral drift checks
# ---------------------------------------------------------------------------

def riccati_cross_ratio_drift(
    b0: TimeFunction,
    b1: TimeFunction,
    initial: Sequence[float],
    tspan: tuple[float, float],
    cfg: IntegratorConfig,
) -> float:
    """Drift of the cross ratio along four solutions of one Riccati equation."""
    if len(initial) != 4:
        raise ValueError("the cross ratio needs four initial values")
    riccati = member_td_system(2, [b0, b1])
    joint = direct_product([riccati] * 4)
    traj = integrate(joint, list(initial), tspan, cfg)
    if not traj.completed:
        raise RuntimeError(f"integration became singular at t = {traj.event.time}")
    trajectories = [traj.block(i, i + 1) for i in range(4)]

    def psi(row: np.ndarray) -> float:
        y0, y1, y2, y3 = row
        return ((y0 - y1) * (y3 - y2)) / ((y3 - y1) * (y0 - y2))

    return first_integral_drift(trajectories, psi)


def oscillator_wronskian_drift(
    omega: TimeFunction,
    initial: Sequence[Sequence[float]],
    tspan: tuple[float, float],
    cfg: IntegratorConfig,
) -> float:
    """Drift of the Wronskian along two oscillator solutions."""
    if len(initial) != 2 or any(len(ic) != 2 for ic in initial):
        raise ValueError("need two (x, p) initial conditions")
    osc = oscillator_system(omega)
    joint = direct_product([osc, osc])
    traj = integrate(joint, [v for ic in initial for v in ic], tspan, cfg)
    if not traj.completed:
        raise RuntimeError(f"integration became singular at t = {traj.event.time}")
    w = wronskian(traj.block(0, 2), traj.block(2, 4))
    return float(np.max(np.abs(w - w[0])))


# ---------------------------------------------------------------------------
# suite documents
# ---------------------------------------------------------------------------

class SuiteValidationError(ValueError):
    """The suite document is malformed; ``errors`` lists offending paths."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


_CLOSURE_PRESETS = ("sl2", "riccati", "oscillator", "gl", "linear-generators", "member")

_RULE_REQUIRED_KEYS = {
    "linear": ("a", "b"),
    "bernoulli": ("a", "b", "n"),
    "pinney": ("omega", "c"),
    "hierarchy": ("order", "b"),
    "riccati-cross-ratio": ("b0", "b1"),
}


def _check_timefn_value(value, path: str, errors: list[str]) -> None:
    if not isinstance(value, str):
        errors.append(f"{path}: expected a time-function string")
        return
    try:
        parse_timefn(value)
    except ParseError as exc:
        errors.append(f"{path}: {exc}")


def _validate_item(item, path: str, errors: list[str]) -> None:
    if not isinstance(item, dict):
        errors.append(f"{path}: expected an object")
        return
    kind = item.get("kind")
    if kind not in ("closure", "rule", "drift", "prolongation"):
        errors.append(f"{path}.kind: expected one of closure, rule, drift, prolongation")
        return
    if kind == "closure":
        gens = item.get("generators")
        if not isinstance(gens, dict):
            errors.append(f"{path}.generators: expected an object")
        elif "preset" in gens:
            if gens["preset"] not in _CLOSURE_PRESETS:
                errors.append(f"{path}.generators.preset: unknown preset {gens['preset']!r}")
            elif gens["preset"] in ("gl", "linear-generators", "member") and not isinstance(
                gens.get("order"), int
            ):
                errors.append(f"{path}.generators.order: preset {gens['preset']!r} needs an integer order")
        elif "fields" in gens:
            if not isinstance(gens.get("dim"), int) or gens["dim"] < 1:
                errors.append(f"{path}.generators.dim: expected a positive integer")
            elif not isinstance(gens["fields"], list) or not gens["fields"]:
                errors.append(f"{path}.generators.fields: expected a non-empty list")
            else:
                for i, comps in enumerate(gens["fields"]):
                    if not isinstance(comps, list) or len(comps) != gens["dim"]:
                        errors.append(
                            f"{path}.generators.fields[{i}]: expected {gens['dim']} component strings"
                        )
                        continue
                    for j, comp in enumerate(comps):
                        try:
                            parse_poly(comp, gens["dim"])
                        except (ParseError, TypeError) as exc:
                            errors.append(f"{path}.generators.fields[{i}][{j}]: {exc}")
        else:
            errors.append(f"{path}.generators: needs either a preset or explicit fields")
    elif kind == "rule":
        rule_id = item.get("rule")
        if rule_id not in _RULE_REQUIRED_KEYS:
            errors.append(f"{path}.rule: unknown rule {rule_id!r}")
            return
        for key in _RULE_REQUIRED_KEYS[rule_id]:
            if key not in item:
                errors.append(f"{path}.{key}: required for rule {rule_id!r}")
        if not isinstance(item.get("trials"), int) or item.get("trials", 0) < 1:
            errors.append(f"{path}.trials: expected a positive integer")
        if "tolerance" not in item:
            errors.append(f"{path}.tolerance: required")
        tspan = item.get("tspan")
        if not (isinstance(tspan, list) and len(tspan) == 2 and tspan[0] < tspan[1]):
            errors.append(f"{path}.tspan: expected [t0, t1] with t0 < t1")
        if rule_id == "hierarchy":
            order = item.get("order")
            if not isinstance(order, int) or order < 2:
                errors.append(f"{path}.order: expected an integer >= 2")
            elif not (isinstance(item.get("b"), list) and len(item["b"]) == order):
                errors.append(f"{path}.b: expected {order} coefficient strings")
            else:
                for i, src in enumerate(item["b"]):
                    _check_timefn_value(src, f"{path}.b[{i}]", errors)
        for key in ("a", "b0", "b1", "omega"):
            if key in _RULE_REQUIRED_KEYS.get(rule_id, ()) and key in item:
                _check_timefn_value(item[key], f"{path}.{key}", errors)
        if rule_id in ("linear", "bernoulli") and "b" in item:
            _check_timefn_value(item["b"], f"{path}.b", errors)
        if rule_id == "bernoulli" and not isinstance(item.get("n"), int):
            errors.append(f"{path}.n: expected an integer")
        if rule_id == "pinney":
            if not isinstance(item.get("c"), (int, float)):
                errors.append(f"{path}.c: expected a number")
            if item.get("method", "rk4") != "rk4":
                errors.append(f"{path}.method: the pinney derivative check needs the uniform rk4 grid")
    elif kind == "drift":
        invariant = item.get("invariant")
        if invariant not in ("riccati-cross-ratio", "oscillator-wronskian"):
            errors.append(f"{path}.invariant: unknown invariant {invariant!r}")
            return
        if "tolerance" not in item:
            errors.append(f"{path}.tolerance: required")
        tspan = item.get("tspan")
        if not (isinstance(tspan, list) and len(tspan) == 2 and tspan[0] < tspan[1]):
            errors.append(f"{path}.tspan: expected [t0, t1] with t0 < t1")
        if invariant == "riccati-cross-ratio":
            for key in ("b0", "b1"):
                _check_timefn_value(item.get(key), f"{path}.{key}", errors)
            if not (isinstance(item.get("initial"), list) and len(item["initial"]) == 4):
                errors.append(f"{path}.initial: expected four initial values")
        else:
            _check_timefn_value(item.get("omega"), f"{path}.omega", errors)
            initial = item.get("initial")
            if not (
                isinstance(initial, list)
                and len(initial) == 2
                and all(isinstance(ic, list) and len(ic) == 2 for ic in initial)
            ):
                errors.append(f"{path}.initial: expected two [x, p] pairs")
    elif kind == "prolongation":
        if not isinstance(item.get("trials"), int) or item.get("trials", 0) < 1:
            errors.append(f"{path}.trials: expected a positive integer")


def validate_suite(doc) -> list[str]:
    errors: list[str] = []
    if not isinstance(doc, dict):
        return ["suite: expected an object"]
    items = doc.get("items")
    if not isinstance(items, list):
        return ["suite.items: expected a list"]
    for i, item in enumerate(items):
        _validate_item(item, f"items[{i}]", errors)
    return errors


def closure_preset_generators(preset: str, order: int | None = None) -> list[PolyVectorField]:
    if preset == "sl2":
        return [
            PolyVectorField([Poly.constant(1, 1)]),
            PolyVectorField([Poly.variable(1, 0)]),
            PolyVectorField([Poly.variable(1, 0) ** 2]),
        ]
    if preset == "riccati":
        return member_lie_generators(2)
    if preset == "member":
        return member_lie_generators(order)
    if preset == "oscillator":
        return oscillator_system(TimeFunction.constant(1)).constituent_fields()
    if preset == "gl":
        return list(gl_basis(order).fields)
    if preset == "linear-generators":
        return linear_generators(order)
    raise ValueError(f"unknown preset {preset!r}")


def _suite_generators(gens: dict) -> list[PolyVectorField]:
    if "preset" in gens:
        return closure_preset_generators(gens["preset"], gens.get("order"))
    dim = gens["dim"]
    return [
        PolyVectorField([parse_poly(src, dim) for src in comps])
        for comps in gens["fields"]
    ]


def _run_closure_item(item: dict) -> dict:
    generators = _suite_generators(item["generators"])
    cap = item.get("cap", 64)
    measured: dict = {}
    try:
        basis = closure(generators, cap)
    except CapExceeded as exc:
        measured["cap_exceeded_at"] = exc.dimension
        ok = item.get("expect") == "cap-exceeded"
        return {"measured": measured, "pass": ok}
    measured["dimension"] = basis.size
    sc = structure_constants(basis)
    measured["center_dimension"] = center_dimension(sc)
    measured["killing_determinant"] = str(killing_determinant(sc))
    ok = True
    if item.get("expect") == "cap-exceeded":
        ok = False
    if "expect_dim" in item:
        ok = ok and basis.size == item["expect_dim"]
    if "expect_center" in item:
        ok = ok and measured["center_dimension"] == item["expect_center"]
    return {"measured": measured, "pass": ok}


def _item_cfg(item: dict, default_method: str) -> IntegratorConfig:
    method = item.get("method", default_method)
    return IntegratorConfig(
        method=method,
        step=item.get("step", 1e-3 if method == "rk4" else None),
        rtol=item.get("rtol", 1e-10),
        atol=item.get("atol", 1e-12),
    )


def _run_rule_item(item: dict) -> dict:
    rule_id = item["rule"]
    cfg = _item_cfg(item, "rk4" if rule_id == "pinney" else "rkf45")
    params = {k: item[k] for k in _RULE_REQUIRED_KEYS[rule_id] if k in item}
    report = run_rule_verification(
        rule_id,
        params,
        trials=item["trials"],
        seed=item.get("seed", 0),
        tspan=(item["tspan"][0], item["tspan"][1]),
        cfg=cfg,
    )
    tolerance = float(item["tolerance"])
    ok = report.max_formula_error <= tolerance and bool(report.lie_condition)
    clean = [r for r in report.records if r.ok]
    extra_tols = {
        "wronskian_drift": float(item.get("wronskian_tolerance", 1e-8)),
        "deriv_error": float(item.get("deriv_tolerance", 1e-5)),
        "round_trip_error": float(item.get("round_trip_tolerance", 1e-10)),
    }
    extras_max: dict[str, float] = {}
    for record in clean:
        for key, value in record.extras.items():
            extras_max[key] = max(extras_max.get(key, 0.0), value)
    for key, value in extras_max.items():
        if key in extra_tols:
            ok = ok and value <= extra_tols[key]
    doc = report.to_doc()
    doc["extras_max"] = extras_max
    return {"measured": doc, "pass": ok}


def _run_drift_item(item: dict) -> dict:
    cfg = _item_cfg(item, "rkf45")
    tspan = (item["tspan"][0], item["tspan"][1])
    if item["invariant"] == "riccati-cross-ratio":
        drift = riccati_cross_ratio_drift(
            parse_timefn(item["b0"]),
            parse_timefn(item["b1"]),
            item["initial"],
            tspan,
            cfg,
        )
    else:
        drift = oscillator_wronskian_drift(
            parse_timefn(item["omega"]),
            item["initial"],
            tspan,
            cfg,
        )
    return {"measured": {"drift": drift}, "pass": drift <= float(item["tolerance"])}


def _run_prolongation_item(item: dict) -> dict:
    ok = check_prolongation_identity(item.get("seed", 0), item["trials"])
    return {"measured": {"identity_holds": ok}, "pass": ok}


def run_suite(doc: dict) -> list[dict]:
    """Execute a validated suite document; returns one report per item."""
    errors = validate_suite(doc)
    if errors:
        raise SuiteValidationError(errors)
    handlers = {
        "closure": _run_closure_item,
        "rule": _run_rule_item,
        "drift": _run_drift_item,
        "prolongation": _run_prolongation_item,
    }
    reports = []
    for i, item in enumerate(doc["items"]):
        # the report item repeats the input keys and adds measurements
        result: dict = dict(item)
        result.setdefault("name", f"item-{i}")
        try:
            result.update(handlers[item["kind"]](item))
        except (RuntimeError, SuperpositionError, CapExceeded) as exc:
            result.update({"measured": {"error": str(exc)}, "pass": False})
        reports.append(result)
    return reports


def suite_passed(reports: Sequence[dict]) -> bool:
    return all(r.get("pass") for r in reports)


def default_suite() -> dict:
    """The bundled quick suite: one of each check, all expected to pass."""
    return {
        "items": [
            {
                "kind": "closure",
                "name": "riccati-minimal-algebra",
                "generators": {"preset": "riccati"},
                "expect_dim": 3,
            },
            {
                "kind": "closure",
                "name": "gl2-from-generators",
                "generators": {"preset": "linear-generators", "order": 2},
                "expect_dim": 4,
                "expect_center": 1,
            },
            {
                "kind": "prolongation",
                "name": "bracket-prolongation-identity",
                "trials": 50,
                "seed": 2,
            },
            {
                "kind": "rule",
                "name": "linear-exact",
                "rule": "linear",
                "a": "0",
                "b": "1",
                "trials": 5,
                "seed": 3,
                "tspan": [0.0, 1.0],
                "tolerance": 1e-10,
            },
            {
                "kind": "rule",
                "name": "riccati-order-2",
                "rule": "hierarchy",
                "order": 2,
                "b": ["1", "0"],
                "trials": 5,
                "seed": 5,
                "tspan": [0.0, 0.7],
                "tolerance": 1e-6,
            },
            {
                "kind": "rule",
                "name": "bernoulli-n2",
                "rule": "bernoulli",
                "n": 2,
                "a": "0",
                "b": "1",
                "trials": 5,
                "seed": 7,
                "tspan": [0.0, 0.9],
                "tolerance": 1e-7,
            },
            {
                "kind": "rule",
                "name": "pinney-constant-frequency",
                "rule": "pinney",
                "omega": "1",
                "c": 1.0,
                "trials": 4,
                "seed": 9,
                "tspan": [0.0, 1.0],
                "tolerance": 1e-6,
            },
            {
                "kind": "drift",
                "name": "riccati-cross-ratio-drift",
                "invariant": "riccati-cross-ratio",
                "b0": "1",
                "b1": "0",
                "initial": [0.0, 1.0, -0.5, 2.0],
                "tspan": [0.0, 1.0],
                "tolerance": 1e-7,
            },
            {
                "kind": "drift",
                "name": "oscillator-wronskian-drift",
                "invariant": "oscillator-wronskian",
                "omega": "1 + 0.1*t",
                "initial": [[1.0, 0.0], [0.0, 1.0]],
                "tspan": [0.0, 1.0],
                "tolerance": 1e-8,
            },
        ]
    }
