"""Formula AST and the syntactic toolbox built on it.

The core connectives are atoms, action nominals, negation, conjunction,
the relational box, the propositional existential quantifier, the global
modality, event diamonds, announcements and the greatest fixpoint.  The
usual derived connectives (or, implication, diamond, the universal
propositional quantifier, the "somewhere" modality, the constants) are
first-class display nodes so that rewritten output stays readable; every
measure and every semantic clause treats them by their expansions.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import InputNotSentenceFragment, PositivityViolation

FRESH_PREFIX = "_f"


class Formula:
    """Base class for formula nodes.  Instances are immutable and hashable."""

    __slots__ = ()

    def __str__(self) -> str:
        from .parser import print_formula

        return print_formula(self)


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class Nominal(Formula):
    """Nullary modality true at product worlds built from the i-th event."""

    index: int


@dataclass(frozen=True, slots=True)
class Top(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Box(Formula):
    body: Formula


@dataclass(frozen=True, slots=True)
class Diamond(Formula):
    body: Formula


@dataclass(frozen=True, slots=True)
class Global(Formula):
    """Universal modality: true iff the body holds at every world."""

    body: Formula


@dataclass(frozen=True, slots=True)
class ExistsGlobal(Formula):
    """Somewhere modality, the dual of Global."""

    body: Formula


@dataclass(frozen=True, slots=True)
class ExistsProp(Formula):
    """Second-order quantifier over subsets of the domain."""

    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class ForallProp(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class Nu(Formula):
    """Greatest fixpoint binder; the body must be positive in the variable."""

    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class ActionDiamond(Formula):
    """Event modality <e>: the event's precondition holds here and the body
    holds at the corresponding world of the product model."""

    event: str
    body: Formula


@dataclass(frozen=True, slots=True)
class Announce(Formula):
    """Announcement modality <!A>: A holds here and the body holds at the
    same world of the model relativised to A."""

    announced: Formula
    body: Formula


TOP = Top()
BOTTOM = Bottom()

_BINDERS = (ExistsProp, ForallProp, Nu)
_UNARY = (Not, Box, Diamond, Global, ExistsGlobal)
_BINARY = (And, Or, Implies)
_LEAVES = (Atom, Nominal, Top, Bottom)
_MU_NODES = (Atom, Top, Bottom, Not, And, Or, Implies, Box, Diamond, Nu)


class LanguageTag(Enum):
    BASE_MSO = "BaseMso"
    ACTION_MSO = "ActionMso"
    SCOPED_NOMINALS = "ScopedNominals"
    SENTENCE_ONLY = "SentenceOnly"
    MU_FRAGMENT = "MuFragment"


def children(phi: Formula) -> tuple[Formula, ...]:
    if isinstance(phi, _LEAVES):
        return ()
    if isinstance(phi, _UNARY):
        return (phi.body,)
    if isinstance(phi, _BINARY):
        return (phi.left, phi.right)
    if isinstance(phi, _BINDERS):
        return (phi.body,)
    if isinstance(phi, ActionDiamond):
        return (phi.body,)
    if isinstance(phi, Announce):
        return (phi.announced, phi.body)
    raise TypeError(f"not a formula node: {phi!r}")


def rebuild(phi: Formula, parts: tuple[Formula, ...]) -> Formula:
    """Rebuild a node with new children, reusing the original when unchanged."""
    if parts == children(phi):
        return phi
    if isinstance(phi, _UNARY):
        return type(phi)(parts[0])
    if isinstance(phi, _BINARY):
        return type(phi)(parts[0], parts[1])
    if isinstance(phi, _BINDERS):
        return type(phi)(phi.var, parts[0])
    if isinstance(phi, ActionDiamond):
        return ActionDiamond(phi.event, parts[0])
    if isinstance(phi, Announce):
        return Announce(parts[0], parts[1])
    return phi


def conj(parts) -> Formula:
    """Right-nested conjunction; the empty conjunction is the true constant."""
    parts = list(parts)
    if not parts:
        return TOP
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def disj(parts) -> Formula:
    """Right-nested disjunction; the empty disjunction is the false constant."""
    parts = list(parts)
    if not parts:
        return BOTTOM
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


def contains_node(phi: Formula, kinds) -> bool:
    if isinstance(phi, kinds):
        return True
    return any(contains_node(c, kinds) for c in children(phi))


def free_props(phi: Formula) -> frozenset[str]:
    """Propositions occurring free; quantifiers and fixpoints bind."""
    if isinstance(phi, Atom):
        return frozenset((phi.name,))
    if isinstance(phi, _BINDERS):
        return free_props(phi.body) - {phi.var}
    out: frozenset[str] = frozenset()
    for c in children(phi):
        out |= free_props(c)
    return out


def all_props(phi: Formula) -> frozenset[str]:
    """Every proposition name occurring anywhere, bound or free."""
    if isinstance(phi, Atom):
        return frozenset((phi.name,))
    out: frozenset[str] = frozenset()
    if isinstance(phi, _BINDERS):
        out |= {phi.var}
    for c in children(phi):
        out |= all_props(c)
    return out


def formula_size(phi: Formula) -> int:
    return 1 + sum(formula_size(c) for c in children(phi))


def quantifier_count(phi: Formula) -> int:
    """Number of propositional existential quantifiers, counting the
    universal quantifier through its negation expansion.

    Fixpoint and announcement nodes are rejected: the measure is only
    defined once they have been rewritten away.
    """
    if isinstance(phi, (Nu, Announce)):
        raise InputNotSentenceFragment(
            f"quantifier count undefined on {type(phi).__name__} nodes"
        )
    base = 1 if isinstance(phi, (ExistsProp, ForallProp)) else 0
    return base + sum(quantifier_count(c) for c in children(phi))


def modal_depth(phi: Formula) -> int:
    """Nesting depth of the relational modalities (box and diamond)."""
    step = 1 if isinstance(phi, (Box, Diamond)) else 0
    return step + max((modal_depth(c) for c in children(phi)), default=0)


def fresh_props(count: int, avoid) -> list[str]:
    """`count` pairwise-distinct reserved names disjoint from `avoid`.

    User-visible propositions may not begin with an underscore, so names
    drawn from the reserved pool can only collide with earlier fresh names.
    """
    avoid = set(avoid)
    out: list[str] = []
    k = 0
    while len(out) < count:
        name = f"{FRESH_PREFIX}{k}"
        k += 1
        if name in avoid:
            continue
        out.append(name)
        avoid.add(name)
    return out


def substitute(phi: Formula, target: str, replacement: Formula) -> Formula:
    """Capture-avoiding substitution of `replacement` for free `target`.

    Binders that would capture a free proposition of the replacement are
    renamed deterministically to reserved fresh names.
    """
    repl_free = free_props(replacement)

    def go(f: Formula) -> Formula:
        if target not in free_props(f):
            return f
        if isinstance(f, Atom):
            return replacement if f.name == target else f
        if isinstance(f, _BINDERS):
            # target is free in f, hence distinct from the binder variable
            if f.var in repl_free:
                avoid = all_props(f.body) | repl_free | {target, f.var}
                fresh = fresh_props(1, avoid)[0]
                renamed = substitute(f.body, f.var, Atom(fresh))
                return type(f)(fresh, go(renamed))
            return type(f)(f.var, go(f.body))
        return rebuild(f, tuple(go(c) for c in children(f)))

    return go(phi)


def alpha_equal(f: Formula, g: Formula) -> bool:
    """Structural equality up to renaming of bound propositions."""

    def go(x, y, mx, my, depth):
        if type(x) is not type(y):
            return False
        if isinstance(x, Atom):
            sx, sy = mx.get(x.name), my.get(y.name)
            if sx is None and sy is None:
                return x.name == y.name
            return sx == sy
        if isinstance(x, Nominal):
            return x.index == y.index
        if isinstance(x, ActionDiamond) and x.event != y.event:
            return False
        if isinstance(x, _BINDERS):
            mx2 = dict(mx)
            my2 = dict(my)
            mx2[x.var] = depth
            my2[y.var] = depth
            return go(x.body, y.body, mx2, my2, depth + 1)
        cx, cy = children(x), children(y)
        return len(cx) == len(cy) and all(
            go(a, b, mx, my, depth) for a, b in zip(cx, cy)
        )

    return go(f, g, {}, {}, 0)


def _polarity_ok(phi: Formula, var: str, positive: bool) -> bool:
    if isinstance(phi, Atom):
        return positive if phi.name == var else True
    if isinstance(phi, Not):
        return _polarity_ok(phi.body, var, not positive)
    if isinstance(phi, Implies):
        return _polarity_ok(phi.left, var, not positive) and _polarity_ok(
            phi.right, var, positive
        )
    if isinstance(phi, _BINDERS):
        if phi.var == var:
            return True
        return _polarity_ok(phi.body, var, positive)
    if isinstance(phi, Announce):
        # the announced formula shapes the surviving domain, where the
        # variable acts with both polarities
        if var in free_props(phi.announced):
            return False
        return _polarity_ok(phi.body, var, positive)
    return all(_polarity_ok(c, var, positive) for c in children(phi))


def is_positive_in(phi: Formula, var: str) -> bool:
    """True iff every free occurrence of `var` sits under an even number of
    negations (implication antecedents count as one)."""
    return _polarity_ok(phi, var, True)


def check_nu_positivity(phi: Formula) -> None:
    if isinstance(phi, Nu) and not is_positive_in(phi.body, phi.var):
        raise PositivityViolation(
            f"fixpoint body is not positive in {phi.var!r}"
        )
    for c in children(phi):
        check_nu_positivity(c)


def _mu_grammar_only(phi: Formula) -> bool:
    if not isinstance(phi, _MU_NODES):
        return False
    return all(_mu_grammar_only(c) for c in children(phi))


def _has_unscoped_nominal(phi: Formula, scoped: bool = False) -> bool:
    if isinstance(phi, Nominal):
        return not scoped
    if isinstance(phi, ActionDiamond):
        return _has_unscoped_nominal(phi.body, True)
    if isinstance(phi, Announce):
        # the announced formula is evaluated on the current model, so an
        # announcement does not scope nominals
        return _has_unscoped_nominal(phi.announced, scoped) or _has_unscoped_nominal(
            phi.body, scoped
        )
    return any(_has_unscoped_nominal(c, scoped) for c in children(phi))


def classify(phi: Formula) -> LanguageTag:
    """Least language stratum admitting the formula.

    Raises PositivityViolation when some fixpoint body is not positive in
    its variable.  Pure fixpoint formulas (fixpoints over box/boolean/atom
    material only) report the fixpoint fragment; otherwise placement in
    the chain depends on nominals and dynamic modalities alone, since
    fixpoints and announcements are always eliminable.
    """
    check_nu_positivity(phi)
    if contains_node(phi, Nu) and _mu_grammar_only(phi):
        return LanguageTag.MU_FRAGMENT
    if _has_unscoped_nominal(phi):
        return LanguageTag.SENTENCE_ONLY
    if contains_node(phi, Nominal):
        return LanguageTag.SCOPED_NOMINALS
    if contains_node(phi, (ActionDiamond, Announce)):
        return LanguageTag.ACTION_MSO
    return LanguageTag.BASE_MSO


def subformula_positions(phi: Formula) -> list[tuple[int, ...]]:
    """Pre-order paths of all subformulas; the root is the empty path."""
    out: list[tuple[int, ...]] = []

    def go(f, path):
        out.append(path)
        for i, c in enumerate(children(f)):
            go(c, path + (i,))

    go(phi, ())
    return out


def subformula_at(phi: Formula, path: tuple[int, ...]) -> Formula:
    for i in path:
        phi = children(phi)[i]
    return phi


def replace_subformula(phi: Formula, path: tuple[int, ...], new: Formula) -> Formula:
    if not path:
        return new
    parts = list(children(phi))
    parts[path[0]] = replace_subformula(parts[path[0]], path[1:], new)
    return rebuild(phi, tuple(parts))
