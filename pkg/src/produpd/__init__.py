"""Model checking and modality elimination for quantified modal logic
over finite Kripke models under product update."""

from .errors import (
    BudgetExceeded,
    EmptyDomain,
    EmptyEventSet,
    InputNotSentenceFragment,
    NominalOutsideProductContext,
    NotABisimulation,
    ParseError,
    PositivityViolation,
    PreconditionNotBaseMso,
    ProdupdError,
    UnknownEvent,
    UnknownWorldInRelation,
    UnknownWorldInValuation,
    WorldOutOfModel,
)
from .syntax import (
    TOP,
    BOTTOM,
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
    alpha_equal,
    classify,
    formula_size,
    free_props,
    fresh_props,
    modal_depth,
    quantifier_count,
    substitute,
)
from .models import (
    EventModel,
    KripkeModel,
    PointedModel,
    TaggedModel,
    announcement_event_model,
    generated_submodel_k,
    product_update,
    relativise,
    with_valuation,
)
from .parser import (
    SourceSpan,
    dump_event_model,
    dump_model,
    dump_tagged_model,
    parse_event_model,
    parse_formula,
    parse_model,
    parse_tagged_model,
    print_formula,
)
from .semantics import EvalBudget, Evaluator, extension, gfp_oracle, holds
from .translator import (
    TranslationReport,
    TranslationStep,
    eliminate_all,
    singleton_point_schema,
    translate_announcement,
    translate_event,
)
from .analysis import (
    Bisimulation,
    DegreeCheckResult,
    check_degree,
    greatest_bisimulation,
    is_bisimulation,
    k_star,
    lift_bisimulation,
)
from .harness import (
    FuzzConfig,
    FuzzReport,
    duplicate_world,
    random_event_model,
    random_formula,
    random_model,
    run_fuzz,
)

__version__ = "0.1.0"
