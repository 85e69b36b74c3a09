"""Seeded random generation of models, event models and formulas, and the
oracle equivalence suites built on them.

Randomness is counter-based: every draw comes from a generator seeded by
hashing (seed, case index, stream label), so cases are independent,
reproducible bit-for-bit, and regenerable individually.  Failures are
data, not errors: each suite records its first failing case together with
a locally minimal shrink of it (worlds removed one at a time, subformulas
replaced by constants).
"""

from __future__ import annotations

import hashlib
import math
import random
import time
from dataclasses import dataclass, field

from .analysis import (
    check_degree,
    greatest_bisimulation,
    is_bisimulation,
    k_star,
    lift_bisimulation,
)
from .errors import ProdupdError
from .models import (
    EventModel,
    KripkeModel,
    PointedModel,
    announcement_event_model,
    product_update,
    relativise,
)
from .parser import event_model_to_jsonable, model_to_jsonable, print_formula
from .semantics import Evaluator, gfp_oracle
from .syntax import (
    TOP,
    ActionDiamond,
    And,
    Announce,
    Atom,
    Bottom,
    Box,
    Diamond,
    ExistsGlobal,
    ExistsProp,
    ForallProp,
    Formula,
    Global,
    Implies,
    LanguageTag,
    Nominal,
    Not,
    Nu,
    Or,
    Top,
    classify,
    contains_node,
    formula_size,
    modal_depth,
    quantifier_count,
    replace_subformula,
    subformula_at,
    subformula_positions,
)
from .translator import translate_event, translate_announcement

SUITE_NAMES = (
    "translation",
    "announcement",
    "nominals",
    "fixpoint",
    "bisim_lift",
    "degree",
)

_PROP_POOL = ("p", "q", "r", "s", "t", "u", "v", "x", "y", "z")


@dataclass(frozen=True)
class FuzzConfig:
    seed: int
    cases: int
    max_worlds: int = 4
    max_events: int = 3
    max_props: int = 3
    max_formula_size: int = 12
    max_eps: int = 2
    edge_probability: float = 0.5
    suites: tuple[str, ...] = SUITE_NAMES

    def __post_init__(self):
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.cases < 1:
            raise ValueError("cases must be at least 1")
        if self.max_worlds < 1 or self.max_events < 1 or self.max_props < 1:
            raise ValueError("size bounds must be at least 1")
        if self.max_formula_size < 1:
            raise ValueError("max_formula_size must be at least 1")
        if self.max_eps < 0:
            raise ValueError("max_eps must be non-negative")
        if not (0.0 <= self.edge_probability <= 1.0):
            raise ValueError("edge_probability must lie in [0,1]")
        if self.max_props > len(_PROP_POOL):
            raise ValueError(f"max_props is capped at {len(_PROP_POOL)}")
        suites = tuple(self.suites)
        unknown = [s for s in suites if s not in SUITE_NAMES]
        if unknown:
            raise ValueError(f"unknown suites: {unknown}")
        if not suites:
            raise ValueError("at least one suite must be selected")
        object.__setattr__(self, "suites", suites)

    def stream(self, case_index: int, label: str) -> random.Random:
        digest = hashlib.sha256(
            f"{self.seed}/{case_index}/{label}".encode()
        ).digest()
        return random.Random(int.from_bytes(digest[:8], "big"))

    @property
    def props(self) -> tuple[str, ...]:
        return _PROP_POOL[: self.max_props]

    def to_jsonable(self) -> dict:
        return {
            "seed": self.seed,
            "cases": self.cases,
            "max_worlds": self.max_worlds,
            "max_events": self.max_events,
            "max_props": self.max_props,
            "max_formula_size": self.max_formula_size,
            "max_eps": self.max_eps,
            "edge_probability": self.edge_probability,
            "suites": list(self.suites),
        }


def _pick(rng: random.Random, options):
    total = sum(w for _, w in options)
    r = rng.random() * total
    for value, w in options:
        r -= w
        if r < 0:
            return value
    return options[-1][0]


def random_model(cfg: FuzzConfig, case_index: int, *, label="model", max_worlds=None) -> KripkeModel:
    """Random model: world count uniform, each edge independent with the
    configured probability, each proposition a uniform subset."""
    rng = cfg.stream(case_index, label)
    n = rng.randint(1, max_worlds if max_worlds is not None else cfg.max_worlds)
    worlds = tuple(f"w{i}" for i in range(n))
    relation = frozenset(
        (u, v) for u in worlds for v in worlds if rng.random() < cfg.edge_probability
    )
    valuation = {}
    for p in cfg.props:
        xs = frozenset(w for w in worlds if rng.random() < 0.5)
        if xs:
            valuation[p] = xs
    return KripkeModel(worlds, relation, valuation)


def _random_static(rng, size, props, *, allow_global=True) -> Formula:
    """Quantifier-free formula over `props`, optionally without the global
    modalities (for the fragments that need finite degree)."""
    return _gen_formula(
        rng, size, props, nominal_count=0, allow_global=allow_global, eps=[0]
    )


def random_event_model(
    cfg: FuzzConfig,
    case_index: int,
    *,
    label="events",
    n_events=None,
    pre_kind="base",
) -> EventModel:
    """Random event model with quantifier-free preconditions of size at
    most 4, one of which is always the true constant so that products are
    rarely empty.  `pre_kind="local"` drops the global modalities from the
    preconditions."""
    rng = cfg.stream(case_index, label)
    n = n_events if n_events is not None else rng.randint(1, cfg.max_events)
    events = tuple(f"a{i}" for i in range(n))
    relation = frozenset(
        (u, v) for u in events for v in events if rng.random() < cfg.edge_probability
    )
    top_at = rng.randrange(n)
    pre: dict[str, Formula] = {}
    for i, e in enumerate(events):
        if i == top_at:
            pre[e] = TOP
        else:
            pre[e] = _random_static(
                rng, rng.randint(1, 4), cfg.props, allow_global=(pre_kind == "base")
            )
    return EventModel(events, relation, pre)


def _gen_formula(
    rng,
    size,
    props,
    *,
    nominal_count=0,
    allow_global=True,
    eps=None,
    allow_nu=False,
    dyn_events=(),
    nu_avoid=frozenset(),
    favored_var=None,
    pos_vars=None,
    parity=True,
) -> Formula:
    eps = eps if eps is not None else [0]
    pos_vars = dict(pos_vars or {})
    nu_vars = [p for p in props if p not in nu_avoid]

    def leaf(parity, pos):
        atoms = [p for p in props if p not in pos or pos[p] == parity]
        options = [("top", 1), ("bottom", 1)]
        if atoms:
            options.append(("atom", 6))
        if nominal_count:
            options.append(("nominal", 2))
        kind = _pick(rng, options)
        if kind == "atom":
            if favored_var in atoms and rng.random() < 0.4:
                return Atom(favored_var)
            return Atom(rng.choice(atoms))
        if kind == "nominal":
            return Nominal(rng.randrange(nominal_count))
        return TOP if kind == "top" else Bottom()

    def gen(size, parity, pos):
        if size <= 1:
            return leaf(parity, pos)
        options = [
            ("leaf", 2),
            ("not", 2),
            ("box", 2),
            ("diamond", 2),
        ]
        if size >= 3:
            options += [("and", 3), ("or", 2), ("implies", 2)]
        if allow_global:
            options += [("global", 1), ("somewhere", 1)]
        if eps[0] > 0 and size >= 2:
            options += [("exists", 3), ("forall", 1)]
        if allow_nu and nu_vars and size >= 3:
            options.append(("nu", 2))
        if dyn_events and size >= 2:
            options.append(("action", 2))
        kind = _pick(rng, options)
        if kind == "leaf":
            return leaf(parity, pos)
        if kind == "not":
            return Not(gen(size - 1, not parity, pos))
        if kind == "box":
            return Box(gen(size - 1, parity, pos))
        if kind == "diamond":
            return Diamond(gen(size - 1, parity, pos))
        if kind == "global":
            return Global(gen(size - 1, parity, pos))
        if kind == "somewhere":
            return ExistsGlobal(gen(size - 1, parity, pos))
        if kind in ("and", "or", "implies"):
            left_size = rng.randint(1, size - 2)
            right_size = size - 1 - left_size
            if kind == "and":
                return And(gen(left_size, parity, pos), gen(right_size, parity, pos))
            if kind == "or":
                return Or(gen(left_size, parity, pos), gen(right_size, parity, pos))
            return Implies(
                gen(left_size, not parity, pos), gen(right_size, parity, pos)
            )
        if kind in ("exists", "forall"):
            eps[0] -= 1
            var = rng.choice(props)
            inner = {k: v for k, v in pos.items() if k != var}
            node = ExistsProp if kind == "exists" else ForallProp
            return node(var, gen(size - 1, parity, inner))
        if kind == "nu":
            var = rng.choice(nu_vars)
            inner = {k: v for k, v in pos.items() if k != var}
            inner[var] = parity
            return Nu(var, gen(size - 1, parity, inner))
        if kind == "action":
            return ActionDiamond(rng.choice(dyn_events), gen(size - 1, parity, pos))
        raise AssertionError(kind)

    return gen(size, parity, pos_vars)


def random_formula(
    cfg: FuzzConfig,
    case_index: int,
    language: LanguageTag,
    *,
    label="formula",
    n_events=None,
    max_eps=None,
) -> Formula:
    """Random formula in the requested fragment, within the configured
    size and quantifier bounds.  Nominal indices stay below `n_events`
    (the configured event bound when not given)."""
    rng = cfg.stream(case_index, label)
    size = rng.randint(1, cfg.max_formula_size)
    eps_cap = cfg.max_eps if max_eps is None else max_eps
    eps = [rng.randint(0, eps_cap)]
    if language is LanguageTag.BASE_MSO:
        return _gen_formula(rng, size, cfg.props, eps=eps)
    if language is LanguageTag.SCOPED_NOMINALS:
        count = n_events if n_events is not None else cfg.max_events
        return _gen_formula(rng, size, cfg.props, nominal_count=count, eps=eps)
    if language is LanguageTag.MU_FRAGMENT:
        var = rng.choice(cfg.props)
        body = _gen_formula(
            rng,
            max(1, size - 1),
            cfg.props,
            allow_global=False,
            allow_nu=True,
            pos_vars={var: True},
            favored_var=var,
        )
        return Nu(var, body)
    raise ValueError(f"unsupported generation fragment: {language}")


def _positive_body(cfg, case_index, var, *, label="body") -> Formula:
    rng = cfg.stream(case_index, label)
    size = rng.randint(1, min(8, cfg.max_formula_size))
    return _gen_formula(
        rng,
        size,
        cfg.props,
        allow_global=False,
        allow_nu=True,
        pos_vars={var: True},
        favored_var=var,
    )


# -- enumeration-cost capping ------------------------------------------


def _quant_nesting(phi: Formula) -> int:
    from .syntax import children

    step = 1 if isinstance(phi, (ExistsProp, ForallProp)) else 0
    return step + max((_quant_nesting(c) for c in children(phi)), default=0)


def _modal_op_count(phi: Formula) -> int:
    from .syntax import children

    step = 1 if isinstance(phi, (Box, Diamond, Global, ExistsGlobal)) else 0
    return step + sum(_modal_op_count(c) for c in children(phi))


def _domain_size(m: KripkeModel, a: EventModel) -> int:
    ev = Evaluator(m, events=a)
    return sum(len(ev.extension(a.pre[e])) for e in a.events)


def _enum_cost_bits(psi: Formula, n_events: int, domain: int) -> float:
    # log2 of the brute-force work: each quantifier layer enumerates the
    # product domain (guard restriction makes the rewritten side match),
    # and each modal operator multiplies rewritten blocks by the event
    # count
    nesting = _quant_nesting(psi)
    if nesting == 0:
        return 0.0
    per_event = math.log2(n_events) if n_events > 1 else 0.0
    return nesting * domain + _modal_op_count(psi) * per_event


def translation_case_inputs(cfg: FuzzConfig, case_index: int):
    """The (model, event model, formula) triple of one translation case.

    Quantifiers make both evaluation routes exponential in the product
    domain, so quantified formulas get their event model redrawn
    (deterministically) until the estimated enumeration cost is small
    enough to keep the case under the per-case time bound.
    """
    m = random_model(cfg, case_index)
    a = random_event_model(cfg, case_index)
    psi = random_formula(
        cfg, case_index, LanguageTag.SCOPED_NOMINALS, n_events=len(a.events)
    )
    budget_bits = 13.5
    if _enum_cost_bits(psi, len(a.events), cfg.max_worlds * cfg.max_events) > 0:
        for t in range(60):
            if _enum_cost_bits(psi, len(a.events), _domain_size(m, a)) <= budget_bits:
                break
            a = random_event_model(
                cfg, case_index, label=f"events-retry{t}", n_events=len(a.events)
            )
        else:
            psi = random_formula(
                cfg,
                case_index,
                LanguageTag.SCOPED_NOMINALS,
                n_events=len(a.events),
                label="formula-flat",
                max_eps=0,
            )
    return m, a, psi


# -- suite checks --------------------------------------------------------


@dataclass
class _Outcome:
    ok: bool
    detail: dict | None = None
    stats: list | None = None


def _sorted_worlds(xs) -> list[str]:
    return sorted(xs)


def _failure(case_index, m, a, phi, message, lhs=None, rhs=None) -> dict:
    out = {
        "case_index": case_index,
        "model": model_to_jsonable(m) if m is not None else None,
        "event_model": event_model_to_jsonable(a) if a is not None else None,
        "formula": print_formula(phi) if phi is not None else None,
        "message": message,
    }
    if lhs is not None:
        out["lhs"] = _sorted_worlds(lhs)
    if rhs is not None:
        out["rhs"] = _sorted_worlds(rhs)
    return out


def _shrink(recheck, m: KripkeModel, phi: Formula | None, *, protected=()):
    """Greedy local minimisation: drop worlds one at a time, then replace
    subformulas by constants, keeping every mutation that still fails."""

    def still_fails(m2, phi2):
        try:
            return not recheck(m2, phi2)
        except ProdupdError:
            return True

    changed = True
    while changed:
        changed = False
        if len(m.worlds) > 1:
            for w in m.worlds:
                if w in protected:
                    continue
                m2 = relativise(m, set(m.worlds) - {w})
                if still_fails(m2, phi):
                    m = m2
                    changed = True
                    break
        if changed:
            continue
        if phi is not None:
            for pos in subformula_positions(phi):
                cur = subformula_at(phi, pos)
                if isinstance(cur, (Top, Bottom)):
                    continue
                for const in (TOP, Bottom()):
                    phi2 = replace_subformula(phi, pos, const)
                    if still_fails(m, phi2):
                        phi = phi2
                        changed = True
                        break
                if changed:
                    break
    return m, phi


def _shrunk_payload(m, phi) -> dict:
    return {
        "model": model_to_jsonable(m),
        "formula": print_formula(phi) if phi is not None else None,
    }


def _check_translation(m, a, psi, stats=None):
    ev = Evaluator(m, events=a)
    for alpha in a.events:
        log: list = []
        chi = translate_event(a, alpha, psi, measure_log=log)
        for parent, child in log:
            if not child < parent:
                return False, _failure(
                    None, m, a, psi, f"measure did not decrease at <{alpha}>"
                )
        if classify(chi) is not LanguageTag.BASE_MSO or contains_node(chi, Nominal):
            return False, _failure(
                None, m, a, psi, f"output for <{alpha}> is not in the base language"
            )
        lhs = ev.extension(ActionDiamond(alpha, psi))
        rhs = ev.extension(chi)
        if lhs != rhs:
            return False, _failure(
                None,
                m,
                a,
                psi,
                f"extension mismatch for <{alpha}>",
                lhs,
                rhs,
            )
        if stats is not None:
            stats.append(
                (
                    formula_size(chi) / (1 + formula_size(psi)),
                    quantifier_count(chi),
                )
            )
    return True, None


def _suite_translation(cfg, i) -> _Outcome:
    m, a, psi = translation_case_inputs(cfg, i)
    stats: list = []
    try:
        ok, detail = _check_translation(m, a, psi, stats)
    except ProdupdError as e:
        ok, detail = False, _failure(None, m, a, psi, f"error: {e}")
    if ok:
        return _Outcome(True, stats=stats)
    detail["case_index"] = i

    def recheck(m2, psi2):
        return _check_translation(m2, a, psi2)[0]

    sm, sphi = _shrink(recheck, m, psi)
    detail["shrunk"] = _shrunk_payload(sm, sphi)
    return _Outcome(False, detail)


def _check_announcement(m, announced, psi):
    ev = Evaluator(m)
    lhs = ev.extension(Announce(announced, psi))
    chi = translate_announcement(announced, psi)
    if classify(chi) is not LanguageTag.BASE_MSO:
        return False, _failure(None, m, None, psi, "output is not in the base language")
    rhs = ev.extension(chi)
    if lhs != rhs:
        return False, _failure(None, m, None, psi, "translation mismatch", lhs, rhs)
    one_event = announcement_event_model(announced)
    ev2 = Evaluator(m, events=one_event)
    via_product = ev2.extension(ActionDiamond("a0", psi))
    if via_product != lhs:
        return False, _failure(
            None, m, one_event, psi, "product route disagrees", lhs, via_product
        )
    cross = translate_event(one_event, "a0", psi)
    cross_ext = ev.extension(cross)
    if cross_ext != lhs:
        return False, _failure(
            None, m, one_event, psi, "event-translation route disagrees", lhs, cross_ext
        )
    return True, None


def _suite_announcement(cfg, i) -> _Outcome:
    m = random_model(cfg, i)
    psi = random_formula(cfg, i, LanguageTag.BASE_MSO)
    announced = _random_static(cfg.stream(i, "announced"), 4, cfg.props)
    try:
        ok, detail = _check_announcement(m, announced, psi)
    except ProdupdError as e:
        ok, detail = False, _failure(None, m, None, psi, f"error: {e}")
    if ok:
        return _Outcome(True)
    detail["case_index"] = i
    detail["announced"] = print_formula(announced)

    def recheck(m2, psi2):
        return _check_announcement(m2, announced, psi2)[0]

    sm, sphi = _shrink(recheck, m, psi)
    detail["shrunk"] = _shrunk_payload(sm, sphi)
    return _Outcome(False, detail)


def _check_nominals(m, a):
    ev = Evaluator(m, events=a)
    for idx, e in enumerate(a.events):
        pre_ext = ev.extension(a.pre[e])
        for k in range(len(a.events)):
            expected = pre_ext if idx == k else frozenset()
            got = ev.extension(ActionDiamond(e, Nominal(k)))
            if got != expected:
                return False, _failure(
                    None, m, a, ActionDiamond(e, Nominal(k)),
                    "nominal axiom fails semantically", expected, got,
                )
            via_translation = ev.extension(translate_event(a, e, Nominal(k)))
            if via_translation != expected:
                return False, _failure(
                    None, m, a, ActionDiamond(e, Nominal(k)),
                    "nominal axiom fails through translation", expected, via_translation,
                )
    return True, None


def _suite_nominals(cfg, i) -> _Outcome:
    m = random_model(cfg, i)
    a = random_event_model(cfg, i)
    try:
        ok, detail = _check_nominals(m, a)
    except ProdupdError as e:
        ok, detail = False, _failure(None, m, a, None, f"error: {e}")
    if ok:
        return _Outcome(True)
    detail["case_index"] = i

    def recheck(m2, _phi):
        return _check_nominals(m2, a)[0]

    sm, _ = _shrink(recheck, m, None)
    detail["shrunk"] = _shrunk_payload(sm, None)
    return _Outcome(False, detail)


def _check_fixpoint(m, var, body):
    ev = Evaluator(m)
    iterative = ev.extension(Nu(var, body))
    oracle = gfp_oracle(m, var, body)
    encoded = ev.extension(
        ExistsProp(var, And(Atom(var), Global(Implies(Atom(var), body))))
    )
    if not (iterative == oracle == encoded):
        return False, _failure(
            None, m, None, Nu(var, body),
            f"fixpoint routes disagree: iterative={_sorted_worlds(iterative)} "
            f"oracle={_sorted_worlds(oracle)} encoded={_sorted_worlds(encoded)}",
        )
    fixed = ev.worlds_of(ev._eval(body, {var: ev.mask_of(iterative)}))
    if fixed != iterative:
        return False, _failure(
            None, m, None, Nu(var, body), "result is not a fixpoint",
            iterative, fixed,
        )
    return True, None


def _suite_fixpoint(cfg, i) -> _Outcome:
    m = random_model(cfg, i)
    var = cfg.stream(i, "var").choice(cfg.props)
    body = _positive_body(cfg, i, var)
    try:
        ok, detail = _check_fixpoint(m, var, body)
    except ProdupdError as e:
        ok, detail = False, _failure(None, m, None, Nu(var, body), f"error: {e}")
    if ok:
        return _Outcome(True)
    detail["case_index"] = i

    def recheck(m2, body2):
        return _check_fixpoint(m2, var, body2)[0]

    sm, sbody = _shrink(recheck, m, body)
    detail["shrunk"] = _shrunk_payload(sm, sbody)
    return _Outcome(False, detail)


def duplicate_world(m: KripkeModel, w: str, clone: str) -> KripkeModel:
    """Clone a world, copying its valuation and its in- and out-edges
    (pointed at the originals), so the identity plus (original, clone) is
    a bisimulation by construction."""
    worlds = m.worlds + (clone,)
    relation = set(m.relation)
    for u, v in m.relation:
        if v == w:
            relation.add((u, clone))
        if u == w:
            relation.add((clone, v))
    valuation = {
        p: xs | ({clone} if w in xs else set()) for p, xs in m.valuation.items()
    }
    return KripkeModel(worlds, frozenset(relation), valuation)


def _invariant_formula(cfg, i, a: EventModel, *, label="invformula") -> Formula:
    # bisimulation-invariant fragment: no quantifiers, no global
    # modalities; fixpoints and event diamonds are fine, but a fixpoint
    # variable must stay clear of the precondition vocabulary, through
    # which it would act non-monotonically
    from .syntax import free_props

    rng = cfg.stream(i, label)
    size = rng.randint(1, cfg.max_formula_size)
    pre_props: frozenset[str] = frozenset()
    for e in a.events:
        pre_props |= free_props(a.pre[e])
    phi = _gen_formula(
        rng,
        size,
        cfg.props,
        allow_global=False,
        allow_nu=True,
        dyn_events=a.events,
        nu_avoid=pre_props,
    )
    if rng.random() < 0.3:
        announced = _gen_formula(rng, 3, cfg.props, allow_global=False)
        phi = Announce(announced, phi)
    return phi


def _check_bisim(m1, target, a, phi):
    clone = f"{target}_c"
    m2 = duplicate_world(m1, target, clone)
    z = greatest_bisimulation(m1, m2)
    expected = {(w, w) for w in m1.worlds} | {(target, clone)}
    if not expected <= z.pairs:
        return False, _failure(
            None, m1, a, phi, "duplication pairs missing from greatest bisimulation"
        )
    if not is_bisimulation(m1, m2, z):
        return False, _failure(None, m1, a, phi, "refinement output fails the checks")
    y = lift_bisimulation(z, a, m1, m2)
    p1 = product_update(m1, a)
    p2 = product_update(m2, a)
    if not is_bisimulation(p1.model, p2.model, y):
        return False, _failure(None, m1, a, phi, "lifted relation is not a bisimulation")
    ev1 = Evaluator(m1, events=a)
    ev2 = Evaluator(m2, events=a)
    for u, v in sorted(z.pairs):
        if ev1.holds(u, phi) != ev2.holds(v, phi):
            return False, _failure(
                None, m1, a, phi, f"bisimilar points ({u},{v}) disagree"
            )
    return True, None


def _suite_bisim_lift(cfg, i) -> _Outcome:
    m1 = random_model(cfg, i)
    target = cfg.stream(i, "dup").choice(m1.worlds)
    a = random_event_model(cfg, i, pre_kind="local")
    phi = _invariant_formula(cfg, i, a)
    try:
        ok, detail = _check_bisim(m1, target, a, phi)
    except ProdupdError as e:
        ok, detail = False, _failure(None, m1, a, phi, f"error: {e}")
    if ok:
        return _Outcome(True)
    detail["case_index"] = i

    def recheck(m2, phi2):
        if target not in m2.worlds:
            return True  # mutation removed the duplication target; skip
        return _check_bisim(m2, target, a, phi2)[0]

    sm, sphi = _shrink(recheck, m1, phi, protected=(target,))
    detail["shrunk"] = _shrunk_payload(sm, sphi)
    return _Outcome(False, detail)


def _suite_degree(cfg, i) -> _Outcome:
    rng = cfg.stream(i, "pick")
    phi = _gen_formula(
        cfg.stream(i, "formula"),
        rng.randint(1, cfg.max_formula_size),
        cfg.props,
        allow_global=False,
    )
    a = random_event_model(cfg, i, pre_kind="local")
    alpha = rng.choice(a.events)
    k = k_star([modal_depth(a.pre[e]) for e in a.events], modal_depth(phi))
    testset = []
    for j in range(20):
        tm = random_model(cfg, i, label=f"testmodel{j}", max_worlds=5)
        point = cfg.stream(i, f"testpoint{j}").choice(tm.worlds)
        testset.append(PointedModel(tm, point))
    try:
        result = check_degree(ActionDiamond(alpha, phi), k, testset, events=a)
    except ProdupdError as e:
        return _Outcome(False, _failure(i, None, a, phi, f"error: {e}"))
    if result.consistent:
        return _Outcome(True)
    pm = result.counterexample
    detail = _failure(
        i,
        pm.model,
        a,
        ActionDiamond(alpha, phi),
        f"degree check fails at {pm.point!r} with radius {k}: "
        f"full={result.full_value} submodel={result.submodel_value}",
    )
    detail["point"] = pm.point

    def recheck(m2, phi2):
        if pm.point not in m2.worlds:
            return True
        sub = check_degree(
            ActionDiamond(alpha, phi2), k, [PointedModel(m2, pm.point)], events=a
        )
        return sub.consistent

    sm, sphi = _shrink(recheck, pm.model, phi, protected=(pm.point,))
    detail["shrunk"] = _shrunk_payload(sm, sphi)
    return _Outcome(False, detail)


_SUITES = {
    "translation": _suite_translation,
    "announcement": _suite_announcement,
    "nominals": _suite_nominals,
    "fixpoint": _suite_fixpoint,
    "bisim_lift": _suite_bisim_lift,
    "degree": _suite_degree,
}


@dataclass
class FuzzReport:
    """Aggregated suite outcomes.  The payload is a pure function of the
    configuration; wall-clock timing is kept to the side."""

    config: FuzzConfig
    suites: dict[str, dict]
    blowup: dict | None
    ok: bool
    timing: dict[str, dict] = field(default_factory=dict)

    def payload(self) -> dict:
        return {
            "config": self.config.to_jsonable(),
            "suites": self.suites,
            "blowup": self.blowup,
            "ok": self.ok,
        }

    def to_jsonable(self, include_timing: bool = False) -> dict:
        out = self.payload()
        if include_timing:
            out["timing"] = self.timing
        return out


def run_fuzz(cfg: FuzzConfig) -> FuzzReport:
    """Run the selected suites over `cases` generated instances each."""
    suites_out: dict[str, dict] = {}
    timing: dict[str, dict] = {}
    ratios: list[float] = []
    epses: list[int] = []
    ok = True
    for name in cfg.suites:
        fn = _SUITES[name]
        passed = failed = 0
        first_failure = None
        max_case = 0.0
        t0 = time.perf_counter()
        for i in range(cfg.cases):
            c0 = time.perf_counter()
            outcome = fn(cfg, i)
            max_case = max(max_case, time.perf_counter() - c0)
            if outcome.ok:
                passed += 1
                if name == "translation" and outcome.stats:
                    for ratio, eps in outcome.stats:
                        ratios.append(ratio)
                        epses.append(eps)
            else:
                failed += 1
                if first_failure is None:
                    first_failure = outcome.detail
        total = time.perf_counter() - t0
        suites_out[name] = {
            "cases": cfg.cases,
            "passed": passed,
            "failed": failed,
            "first_failure": first_failure,
        }
        timing[name] = {
            "total_seconds": round(total, 3),
            "max_case_seconds": round(max_case, 3),
        }
        ok = ok and failed == 0
    blowup = None
    if ratios:
        blowup = {
            "translations": len(ratios),
            "mean_size_ratio": round(sum(ratios) / len(ratios), 3),
            "max_size_ratio": round(max(ratios), 3),
            "mean_output_eps": round(sum(epses) / len(epses), 3),
            "max_output_eps": max(epses),
        }
    return FuzzReport(cfg, suites_out, blowup, ok, timing)
