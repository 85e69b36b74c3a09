"""Rewrites dynamic modalities into the static quantified base language.

Event diamonds are pushed through every connective by reduction rules;
the quantifier case routes through action nominals: the bound proposition
is replaced by a disjunction of fresh propositions paired with nominals,
one per event, guarded by conjuncts tying each fresh proposition to the
corresponding precondition.  Announcements reduce by the standard clauses
with the quantifier clause guarded by the announced formula; greatest
fixpoints are encoded with the propositional quantifier first.

Every recursive event-translation call strictly decreases the pair
(quantifier count, size) lexicographically: the quantifier case trades
one binder for a quantifier-free disjunction, all other cases recurse on
smaller formulas.  The check is enforced at run time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    InputNotSentenceFragment,
    PreconditionNotBaseMso,
    ProdupdError,
    UnknownEvent,
)
from .models import EventModel
from .syntax import (
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
    all_props,
    children,
    classify,
    conj,
    contains_node,
    disj,
    formula_size,
    free_props,
    fresh_props,
    quantifier_count,
    rebuild,
    substitute,
)


@dataclass
class TranslationStep:
    rule: str
    at: str

    def to_jsonable(self) -> dict:
        return {"rule": self.rule, "at": self.at}


@dataclass
class TranslationReport:
    """Witness of one elimination run: the formulas, the size and
    quantifier metrics, and the trace of rewrite rules applied."""

    input: Formula
    output: Formula
    input_size: int
    output_size: int
    input_eps: int
    output_eps: int
    steps: list[TranslationStep] = field(default_factory=list)

    def to_jsonable(self) -> dict:
        from .parser import print_formula

        return {
            "input": print_formula(self.input),
            "output": print_formula(self.output),
            "input_size": self.input_size,
            "output_size": self.output_size,
            "input_eps": self.input_eps,
            "output_eps": self.output_eps,
            "steps": [s.to_jsonable() for s in self.steps],
        }


def expand_foralls(phi: Formula) -> Formula:
    """Replace every universal propositional quantifier by its negation
    expansion, so downstream rules only meet the existential binder."""
    parts = tuple(expand_foralls(c) for c in children(phi))
    out = rebuild(phi, parts)
    if isinstance(out, ForallProp):
        return Not(ExistsProp(out.var, Not(out.body)))
    return out


def fold_constants(phi: Formula) -> Formula:
    """Boolean constant folding, nothing else."""
    parts = tuple(fold_constants(c) for c in children(phi))
    out = rebuild(phi, parts)
    if isinstance(out, Not):
        if isinstance(out.body, Top):
            return Bottom()
        if isinstance(out.body, Bottom):
            return Top()
    elif isinstance(out, And):
        if isinstance(out.left, Bottom) or isinstance(out.right, Bottom):
            return Bottom()
        if isinstance(out.left, Top):
            return out.right
        if isinstance(out.right, Top):
            return out.left
    elif isinstance(out, Or):
        if isinstance(out.left, Top) or isinstance(out.right, Top):
            return Top()
        if isinstance(out.left, Bottom):
            return out.right
        if isinstance(out.right, Bottom):
            return out.left
    elif isinstance(out, Implies):
        if isinstance(out.left, Bottom) or isinstance(out.right, Top):
            return Top()
        if isinstance(out.left, Top):
            return out.right
        if isinstance(out.right, Bottom):
            return Not(out.left)
    return out


def _measure(phi: Formula) -> tuple[int, int]:
    return (quantifier_count(phi), formula_size(phi))


def _record(steps, rule: str, alpha: str, psi: Formula):
    if steps is not None:
        from .parser import print_formula

        steps.append(TranslationStep(rule, print_formula(ActionDiamond(alpha, psi))))


def translate_event(
    a: EventModel,
    alpha: str,
    psi: Formula,
    *,
    steps: list | None = None,
    measure_log: list | None = None,
) -> Formula:
    """Base-language formula equivalent to `<alpha> psi`.

    `psi` may contain nominals but no event diamonds, announcements or
    fixpoints.  `measure_log` collects (parent, child) measure pairs for
    every recursive call; the strict lexicographic decrease is checked
    regardless.
    """
    if alpha not in a.pre:
        raise UnknownEvent(f"unknown event {alpha!r}")
    if contains_node(psi, (ActionDiamond, Announce, Nu)):
        raise InputNotSentenceFragment(
            "event translation takes formulas without dynamic or fixpoint nodes"
        )
    prepared = expand_foralls(psi)
    if prepared is not psi:
        _record(steps, "expand-forall", alpha, psi)
    return _tr_event(a, alpha, prepared, steps, measure_log, None)


def _tr_event(a, alpha, psi, steps, log, parent) -> Formula:
    m = _measure(psi)
    if parent is not None:
        if log is not None:
            log.append((parent, m))
        if not m < parent:
            raise ProdupdError(
                f"translation measure did not decrease: {parent} -> {m}"
            )
    pre = a.pre[alpha]
    if isinstance(psi, (Atom, Top, Bottom)):
        _record(steps, "atom", alpha, psi)
        return And(pre, psi)
    if isinstance(psi, Nominal):
        if psi.index == a.index_of(alpha):
            _record(steps, "nominal-match", alpha, psi)
            return pre
        _record(steps, "nominal-mismatch", alpha, psi)
        return Bottom()
    if isinstance(psi, Not):
        _record(steps, "negation", alpha, psi)
        return And(pre, Not(_tr_event(a, alpha, psi.body, steps, log, m)))
    if isinstance(psi, And):
        _record(steps, "conjunction", alpha, psi)
        return And(
            _tr_event(a, alpha, psi.left, steps, log, m),
            _tr_event(a, alpha, psi.right, steps, log, m),
        )
    if isinstance(psi, Or):
        _record(steps, "disjunction", alpha, psi)
        return Or(
            _tr_event(a, alpha, psi.left, steps, log, m),
            _tr_event(a, alpha, psi.right, steps, log, m),
        )
    if isinstance(psi, Implies):
        _record(steps, "implication", alpha, psi)
        return And(
            pre,
            Implies(
                _tr_event(a, alpha, psi.left, steps, log, m),
                _tr_event(a, alpha, psi.right, steps, log, m),
            ),
        )
    if isinstance(psi, Box):
        _record(steps, "box", alpha, psi)
        parts = [
            Box(Implies(a.pre[b], _tr_event(a, b, psi.body, steps, log, m)))
            for b in a.events
            if (alpha, b) in a.relation
        ]
        return And(pre, conj(parts))
    if isinstance(psi, Diamond):
        _record(steps, "diamond", alpha, psi)
        parts = [
            Diamond(_tr_event(a, b, psi.body, steps, log, m))
            for b in a.events
            if (alpha, b) in a.relation
        ]
        return And(pre, disj(parts))
    if isinstance(psi, Global):
        _record(steps, "global", alpha, psi)
        parts = [
            Global(Implies(a.pre[b], _tr_event(a, b, psi.body, steps, log, m)))
            for b in a.events
        ]
        return And(pre, conj(parts))
    if isinstance(psi, ExistsGlobal):
        _record(steps, "somewhere", alpha, psi)
        parts = [
            ExistsGlobal(_tr_event(a, b, psi.body, steps, log, m)) for b in a.events
        ]
        return And(pre, disj(parts))
    if isinstance(psi, ExistsProp):
        _record(steps, "quantifier", alpha, psi)
        n = len(a.events)
        avoid = set(all_props(psi))
        for f in a.pre.values():
            avoid |= all_props(f)
        names = fresh_props(n, avoid)
        tagged = disj([And(Atom(names[i]), Nominal(i)) for i in range(n)])
        body = substitute(psi.body, psi.var, tagged)
        guards = [
            Global(Implies(Atom(names[i]), a.pre[a.events[i]])) for i in range(n)
        ]
        inner = _tr_event(a, alpha, body, steps, log, m)
        out = conj(guards + [inner])
        for name in reversed(names):
            out = ExistsProp(name, out)
        return out
    raise InputNotSentenceFragment(f"unsupported node {type(psi).__name__}")


def translate_announcement(
    announced: Formula, psi: Formula, *, steps: list | None = None
) -> Formula:
    """Base-language formula equivalent to `<!announced> psi`.

    The announced formula must be in the base language.  `psi` may contain
    nominals (they are untouched by relativisation) and nested
    announcements, but no event diamonds or fixpoints.
    """
    if classify(announced) is not LanguageTag.BASE_MSO:
        raise PreconditionNotBaseMso("announced formula is not in the base language")
    if contains_node(psi, (ActionDiamond, Nu)):
        raise InputNotSentenceFragment(
            "announcement translation takes formulas without event or fixpoint nodes"
        )
    prepared = expand_foralls(psi)
    return _tr_ann(announced, prepared, steps)


def _ann_record(steps, rule: str, announced: Formula, psi: Formula):
    if steps is not None:
        from .parser import print_formula

        steps.append(TranslationStep(rule, print_formula(Announce(announced, psi))))


def _tr_ann(a: Formula, psi: Formula, steps) -> Formula:
    if isinstance(psi, (Atom, Top, Bottom, Nominal)):
        _ann_record(steps, "ann-atom", a, psi)
        return And(a, psi)
    if isinstance(psi, Not):
        _ann_record(steps, "ann-negation", a, psi)
        return And(a, Not(_tr_ann(a, psi.body, steps)))
    if isinstance(psi, And):
        _ann_record(steps, "ann-conjunction", a, psi)
        return And(_tr_ann(a, psi.left, steps), _tr_ann(a, psi.right, steps))
    if isinstance(psi, Or):
        _ann_record(steps, "ann-disjunction", a, psi)
        return Or(_tr_ann(a, psi.left, steps), _tr_ann(a, psi.right, steps))
    if isinstance(psi, Implies):
        _ann_record(steps, "ann-implication", a, psi)
        return And(
            a, Implies(_tr_ann(a, psi.left, steps), _tr_ann(a, psi.right, steps))
        )
    if isinstance(psi, Box):
        _ann_record(steps, "ann-box", a, psi)
        return And(a, Box(Implies(a, _tr_ann(a, psi.body, steps))))
    if isinstance(psi, Diamond):
        _ann_record(steps, "ann-diamond", a, psi)
        return And(a, Diamond(_tr_ann(a, psi.body, steps)))
    if isinstance(psi, Global):
        _ann_record(steps, "ann-global", a, psi)
        return And(a, Global(Implies(a, _tr_ann(a, psi.body, steps))))
    if isinstance(psi, ExistsGlobal):
        _ann_record(steps, "ann-somewhere", a, psi)
        return And(a, ExistsGlobal(_tr_ann(a, psi.body, steps)))
    if isinstance(psi, ExistsProp):
        var, body = psi.var, psi.body
        if var in free_props(a):
            fresh = fresh_props(1, all_props(a) | all_props(psi))[0]
            body = substitute(body, var, Atom(fresh))
            _ann_record(steps, "alpha-rename", a, psi)
            var = fresh
        _ann_record(steps, "ann-quantifier", a, psi)
        return ExistsProp(
            var, And(Global(Implies(Atom(var), a)), _tr_ann(a, body, steps))
        )
    if isinstance(psi, Announce):
        # rewrite the inner announcement first; the equivalence it produces
        # holds in every model, the relativised one included
        _ann_record(steps, "ann-nested", a, psi)
        inner = _tr_ann(psi.announced, psi.body, steps)
        return _tr_ann(a, inner, steps)
    raise InputNotSentenceFragment(f"unsupported node {type(psi).__name__}")


def _report_eps(phi: Formula) -> int:
    # lenient binder count for reporting: fixpoints and announcements are
    # still present before elimination, where the strict measure is not
    # yet defined
    base = 1 if isinstance(phi, (ExistsProp, ForallProp, Nu)) else 0
    return base + sum(_report_eps(c) for c in children(phi))


def eliminate_all(a: EventModel, phi: Formula, *, simplify: bool = False) -> TranslationReport:
    """Eliminate every fixpoint, announcement and event diamond, innermost
    first, producing a base-language formula and a full rewrite trace."""
    tag = classify(phi)
    if tag is LanguageTag.SENTENCE_ONLY:
        raise InputNotSentenceFragment(
            "nominals outside the scope of an event diamond cannot be evaluated"
        )
    steps: list[TranslationStep] = []

    def rec(f: Formula) -> Formula:
        if isinstance(f, Nu):
            body = rec(f.body)
            if steps is not None:
                from .parser import print_formula

                steps.append(TranslationStep("nu-encode", print_formula(f)))
            return ExistsProp(
                f.var, And(Atom(f.var), Global(Implies(Atom(f.var), body)))
            )
        if isinstance(f, Announce):
            announced = rec(f.announced)
            body = rec(f.body)
            return translate_announcement(announced, body, steps=steps)
        if isinstance(f, ActionDiamond):
            body = rec(f.body)
            return translate_event(a, f.event, body, steps=steps)
        return rebuild(f, tuple(rec(c) for c in children(f)))

    out = rec(phi)
    if simplify:
        folded = fold_constants(out)
        if folded != out:
            steps.append(TranslationStep("simplify", "boolean constant folding"))
        out = folded
    if classify(out) is not LanguageTag.BASE_MSO or contains_node(out, Nominal):
        raise ProdupdError("elimination produced a non-base formula")
    return TranslationReport(
        input=phi,
        output=out,
        input_size=formula_size(phi),
        output_size=formula_size(out),
        input_eps=_report_eps(phi),
        output_eps=quantifier_count(out),
        steps=steps,
    )


def singleton_point_schema(var: str, body: Formula, *, literal: bool = False) -> Formula:
    """Schema asserting a singleton witness set for `var` making the body
    true: the witness is non-empty and every non-empty subset of it is the
    whole of it.

    With `literal=True` the subset premise drops the non-emptiness guard;
    that variant is unsatisfiable (the empty subset forces the witness
    empty against its own non-emptiness) and is kept only as a pinned
    regression target.
    """
    avoid = all_props(body) | {var}
    q = "q" if ("q" not in avoid) else fresh_props(1, avoid)[0]
    p = Atom(var)
    qa = Atom(q)
    if literal:
        premise: Formula = Global(Implies(qa, p))
    else:
        premise = And(ExistsGlobal(qa), Global(Implies(qa, p)))
    guard = ForallProp(q, Implies(premise, Global(Implies(p, qa))))
    return ExistsProp(var, And(ExistsGlobal(p), And(guard, body)))
