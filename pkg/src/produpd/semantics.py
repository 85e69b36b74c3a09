"""Exhaustive model checking over finite (tagged) models.

Quantifiers enumerate all subsets of the domain (in ascending bit order
over the world ordering), the universal modality checks the whole domain,
event diamonds build the product model and announcements relativise, and
the greatest fixpoint is computed by descending iteration.  World sets
are integer bitmasks; every subformula's extension is memoised against
the valuations of just the propositions it depends on, and quantifier
enumeration is restricted to subsets of any `U (p -> A)` guard conjunct,
which is sound because other subsets falsify the guard outright.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    BudgetExceeded,
    NominalOutsideProductContext,
    PositivityViolation,
    UnknownEvent,
    WorldOutOfModel,
)
from .models import (
    EventModel,
    KripkeModel,
    TaggedModel,
    as_tagged,
    pair_world,
    product_from_extensions,
    relativise,
)
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
    Nominal,
    Not,
    Nu,
    Or,
    Top,
    contains_node,
    free_props,
    is_positive_in,
)

DEFAULT_QUANTIFIER_WORLDS = 16
DEFAULT_TOTAL_ENUMERATIONS = 2_000_000

# memoise a node only while its valuation key stays small
_MEMO_ARITY_CAP = 3


@dataclass(frozen=True)
class EvalBudget:
    """Caps on the exponential parts of evaluation.

    `max_worlds_for_quantifier` bounds the domain size any single subset
    enumeration may range over; `max_total_subset_enumerations` bounds the
    number of subsets tried across one evaluation, nested quantifiers and
    built submodels included.
    """

    max_worlds_for_quantifier: int = DEFAULT_QUANTIFIER_WORLDS
    max_total_subset_enumerations: int = DEFAULT_TOTAL_ENUMERATIONS

    def __post_init__(self):
        if self.max_worlds_for_quantifier <= 0:
            raise ValueError("max_worlds_for_quantifier must be positive")
        if self.max_total_subset_enumerations <= 0:
            raise ValueError("max_total_subset_enumerations must be positive")


class _Work:
    __slots__ = ("ticks",)

    def __init__(self):
        self.ticks = 0


class Evaluator:
    """Evaluation session over one (tagged) model.

    Holds the bitmask encoding, the per-node memo, and the product /
    relativised child sessions, so repeated queries against the same
    model share all intermediate work.  `events` supplies the ambient
    event model that event diamonds and nominal indices refer to.
    """

    def __init__(self, model, events: EventModel | None = None, budget=None, _work=None):
        tagged = as_tagged(model)
        self.model: KripkeModel = tagged.model
        self.tags = tagged.tags
        self.events = events
        self.budget = budget if budget is not None else EvalBudget()
        self.worlds = list(self.model.worlds)
        self.n = len(self.worlds)
        self.full = (1 << self.n) - 1
        self.index = {w: i for i, w in enumerate(self.worlds)}
        self.succ = [0] * self.n
        for u, v in self.model.relation:
            self.succ[self.index[u]] |= 1 << self.index[v]
        self.base_val = {p: self.mask_of(xs) for p, xs in self.model.valuation.items()}
        self.tag_mask: dict[str, int] = {}
        for w, e in self.tags.items():
            self.tag_mask[e] = self.tag_mask.get(e, 0) | (1 << self.index[w])
        self._work = _work if _work is not None else _Work()
        self._memo: dict = {}
        self._deps: dict = {}
        self._guards: dict = {}
        self._products: dict = {}
        self._relativised: dict = {}
        self._submasks: dict = {}
        self._parent_index: list[int] = []
        self._pre_props: frozenset[str] = frozenset()
        if events is not None:
            acc: frozenset[str] = frozenset()
            for e in events.events:
                acc |= free_props(events.pre[e])
            self._pre_props = acc

    # -- mask plumbing -------------------------------------------------

    def mask_of(self, worlds) -> int:
        m = 0
        for w in worlds:
            i = self.index.get(w)
            if i is None:
                raise WorldOutOfModel(f"world {w!r} not in the model")
            m |= 1 << i
        return m

    def worlds_of(self, mask: int) -> frozenset[str]:
        return frozenset(w for i, w in enumerate(self.worlds) if (mask >> i) & 1)

    def _from_parent(self, parent: "Evaluator", mask: int) -> int:
        out = 0
        for i, pi in enumerate(self._parent_index):
            if (mask >> pi) & 1:
                out |= 1 << i
        return out

    def _to_parent(self, mask: int) -> int:
        out = 0
        for i, pi in enumerate(self._parent_index):
            if (mask >> i) & 1:
                out |= 1 << pi
        return out

    def _tick(self):
        self._work.ticks += 1
        if self._work.ticks > self.budget.max_total_subset_enumerations:
            raise BudgetExceeded(
                "subset enumeration budget exhausted "
                f"({self.budget.max_total_subset_enumerations} subsets)"
            )

    def _submask_list(self, mask: int) -> list[int]:
        got = self._submasks.get(mask)
        if got is None:
            got = []
            s = mask
            while True:
                got.append(s)
                if s == 0:
                    break
                s = (s - 1) & mask
            got.reverse()
            self._submasks[mask] = got
        return got

    # -- dependency bookkeeping ----------------------------------------

    def _node_deps(self, phi: Formula) -> tuple[str, ...]:
        key = id(phi)
        got = self._deps.get(key)
        if got is None:
            deps = free_props(phi)
            if contains_node(phi, ActionDiamond):
                # the product domain also varies with precondition props
                deps |= self._pre_props
            got = (phi, tuple(sorted(deps)))
            self._deps[key] = got
        return got[1]

    # -- public surface --------------------------------------------------

    def extension(self, phi: Formula, env=None) -> frozenset[str]:
        return self.worlds_of(self._eval(phi, dict(env) if env else {}))

    def extension_mask(self, phi: Formula, env=None) -> int:
        return self._eval(phi, dict(env) if env else {})

    def holds(self, world: str, phi: Formula) -> bool:
        if world not in self.index:
            raise WorldOutOfModel(f"world {world!r} not in the model")
        return bool((self._eval(phi, {}) >> self.index[world]) & 1)

    # -- the evaluator ---------------------------------------------------

    def _eval(self, phi: Formula, env: dict) -> int:
        deps = self._node_deps(phi)
        if env:
            key = tuple((p, env[p]) for p in deps if p in env)
        else:
            key = ()
        mk = (id(phi), key)
        hit = self._memo.get(mk)
        if hit is not None:
            return hit
        result = self._eval_node(phi, env)
        if len(key) <= _MEMO_ARITY_CAP:
            self._memo[mk] = result
        return result

    def _eval_node(self, phi: Formula, env: dict) -> int:
        if isinstance(phi, Atom):
            got = env.get(phi.name)
            if got is not None:
                return got
            return self.base_val.get(phi.name, 0)
        if isinstance(phi, And):
            left = self._eval(phi.left, env)
            if left == 0:
                return 0
            return left & self._eval(phi.right, env)
        if isinstance(phi, Not):
            return self.full & ~self._eval(phi.body, env)
        if isinstance(phi, Or):
            left = self._eval(phi.left, env)
            if left == self.full:
                return left
            return left | self._eval(phi.right, env)
        if isinstance(phi, Implies):
            return (self.full & ~self._eval(phi.left, env)) | self._eval(phi.right, env)
        if isinstance(phi, Box):
            body = self._eval(phi.body, env)
            out = 0
            for i in range(self.n):
                if self.succ[i] & ~body == 0:
                    out |= 1 << i
            return out
        if isinstance(phi, Diamond):
            body = self._eval(phi.body, env)
            out = 0
            for i in range(self.n):
                if self.succ[i] & body:
                    out |= 1 << i
            return out
        if isinstance(phi, Global):
            return self.full if self._eval(phi.body, env) == self.full else 0
        if isinstance(phi, ExistsGlobal):
            return self.full if self._eval(phi.body, env) != 0 else 0
        if isinstance(phi, Top):
            return self.full
        if isinstance(phi, Bottom):
            return 0
        if isinstance(phi, ExistsProp):
            return self._eval_exists(phi, env)
        if isinstance(phi, ForallProp):
            return self._eval_forall(phi, env)
        if isinstance(phi, Nu):
            return self._eval_nu(phi, env)
        if isinstance(phi, Nominal):
            return self._eval_nominal(phi)
        if isinstance(phi, ActionDiamond):
            return self._eval_action(phi, env)
        if isinstance(phi, Announce):
            return self._eval_announce(phi, env)
        raise TypeError(f"not a formula node: {phi!r}")

    def _check_quantifier_domain(self):
        if self.n > self.budget.max_worlds_for_quantifier:
            raise BudgetExceeded(
                f"quantifier over {self.n} worlds exceeds the budget of "
                f"{self.budget.max_worlds_for_quantifier}"
            )

    def _guard_bodies(self, phi: ExistsProp) -> list[Formula]:
        # Conjuncts of shape U (var -> A) force every witness subset below
        # the extension of A, so enumeration may be restricted to those.
        # The scan descends through conjunctions and through intermediate
        # binders of other variables: a guard conjunct that mentions no
        # intervening binder falsifies the whole inner body for oversized
        # witnesses regardless of the inner choices.
        got = self._guards.get(id(phi))
        if got is None:
            bodies = []
            stack: list[tuple[Formula, frozenset[str]]] = [(phi.body, frozenset())]
            while stack:
                f, shadowed = stack.pop()
                if isinstance(f, And):
                    stack.append((f.left, shadowed))
                    stack.append((f.right, shadowed))
                elif isinstance(f, ExistsProp) and f.var != phi.var:
                    stack.append((f.body, shadowed | {f.var}))
                elif (
                    isinstance(f, Global)
                    and isinstance(f.body, Implies)
                    and isinstance(f.body.left, Atom)
                    and f.body.left.name == phi.var
                    and not free_props(f.body.right) & (shadowed | {phi.var})
                ):
                    bodies.append(f.body.right)
            got = (phi, bodies)
            self._guards[id(phi)] = got
        return got[1]

    def _eval_exists(self, phi: ExistsProp, env: dict) -> int:
        self._check_quantifier_domain()
        guard = self.full
        for rhs in self._guard_bodies(phi):
            guard &= self._eval(rhs, env)
        result = 0
        sub_env = dict(env)
        for x in self._submask_list(guard):
            self._tick()
            sub_env[phi.var] = x
            result |= self._eval(phi.body, sub_env)
            if result == self.full:
                break
        return result

    def _eval_forall(self, phi: ForallProp, env: dict) -> int:
        self._check_quantifier_domain()
        result = self.full
        sub_env = dict(env)
        for x in self._submask_list(self.full):
            self._tick()
            sub_env[phi.var] = x
            result &= self._eval(phi.body, sub_env)
            if result == 0:
                break
        return result

    def _eval_nu(self, phi: Nu, env: dict) -> int:
        x = self.full
        sub_env = dict(env)
        while True:
            sub_env[phi.var] = x
            y = self._eval(phi.body, sub_env)
            if y == x:
                return x
            if y & ~x:
                raise PositivityViolation(
                    f"fixpoint iteration for {phi.var!r} is not descending; "
                    "the body is not monotone here"
                )
            x = y

    def _eval_nominal(self, phi: Nominal) -> int:
        if self.n == 0:
            return 0
        if not self.tags:
            raise NominalOutsideProductContext(
                f"nominal j{phi.index} evaluated on a model without event tags"
            )
        if self.events is None:
            raise NominalOutsideProductContext(
                f"nominal j{phi.index} needs an ambient event model to resolve"
            )
        if phi.index >= len(self.events.events):
            raise UnknownEvent(
                f"nominal j{phi.index} has no event in a model with "
                f"{len(self.events.events)} events"
            )
        return self.tag_mask.get(self.events.events[phi.index], 0)

    def _product_session(self, env: dict) -> "Evaluator":
        key = tuple((p, env[p]) for p in sorted(self._pre_props) if p in env)
        sess = self._products.get(key)
        if sess is None:
            pre_ext = {
                e: self.worlds_of(self._eval(self.events.pre[e], env))
                for e in self.events.events
            }
            tm, pairs = product_from_extensions(
                self.model, self.events, pre_ext, with_pairs=True
            )
            sess = Evaluator(tm, self.events, self.budget, self._work)
            sess._parent_index = [self.index[w] for w, _ in pairs]
            self._products[key] = sess
        return sess

    def _eval_action(self, phi: ActionDiamond, env: dict) -> int:
        if self.events is None:
            raise UnknownEvent(
                f"event diamond <{phi.event}> needs an ambient event model"
            )
        if phi.event not in self.events.pre:
            raise UnknownEvent(f"unknown event {phi.event!r}")
        prod = self._product_session(env)
        child_env = {p: prod._from_parent(self, m) for p, m in env.items()}
        body = prod._eval(phi.body, child_env)
        out = 0
        for i, w in enumerate(self.worlds):
            j = prod.index.get(pair_world(w, phi.event))
            if j is not None and (body >> j) & 1:
                out |= 1 << i
        return out

    def _eval_announce(self, phi: Announce, env: dict) -> int:
        a_mask = self._eval(phi.announced, env)
        sess = self._relativised.get(a_mask)
        if sess is None:
            keep = self.worlds_of(a_mask)
            sub = relativise(self.model, keep)
            tags = {w: e for w, e in self.tags.items() if w in keep} if self.tags else {}
            sess = Evaluator(TaggedModel(sub, tags), self.events, self.budget, self._work)
            sess._parent_index = [self.index[w] for w in sub.worlds]
            self._relativised[a_mask] = sess
        child_env = {p: sess._from_parent(self, m) for p, m in env.items()}
        body = sess._eval(phi.body, child_env)
        return a_mask & sess._to_parent(body)


def extension(model, phi: Formula, budget=None, events: EventModel | None = None):
    """The set of worlds where the formula holds."""
    return Evaluator(model, events=events, budget=budget).extension(phi)


def holds(model, world: str, phi: Formula, budget=None, events: EventModel | None = None):
    """Membership of `world` in the formula's extension."""
    ev = Evaluator(model, events=events, budget=budget)
    return ev.holds(world, phi)


def gfp_oracle(model: KripkeModel, var: str, body: Formula, budget=None):
    """Union of every subset on which the body holds throughout under the
    corresponding valuation override: the greatest-fixpoint extension,
    computed by flat subset enumeration as an independent cross-check."""
    if not is_positive_in(body, var):
        raise PositivityViolation(f"fixpoint body is not positive in {var!r}")
    ev = Evaluator(model, budget=budget)
    ev._check_quantifier_domain()
    total = 0
    for x in ev._submask_list(ev.full):
        ev._tick()
        if x & ~ev._eval(body, {var: x}) == 0:
            total |= x
    return ev.worlds_of(total)
