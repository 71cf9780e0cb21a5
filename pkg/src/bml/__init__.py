"""Reference kernel for bounded modal logic: syntax, relational context
engine, substitution, typing, beta-normalization, Kripke-style model
checking, and the bridge to the plain-box S4 calculus."""

from .contexts import RelKind, build_graph, derives, dom_c, pos, wf_context, wf_formula
from .kernel import check, eta_expand, infer
from .parsing import (
    parse_context,
    parse_formula,
    parse_judgment,
    parse_lambox_judgment,
    parse_term,
)
from .printing import print_context, print_formula, print_judgment, print_term
from .reduction import beta_step, classify, is_subformula, normalize
from .semantics import consequence_on, load_model, satisfies, satisfies_context
from .substitute import ClsSubst, VarSubst, subst_cls, subst_var
from .syntax import (
    App,
    Atom,
    Box,
    CApp,
    CLam,
    Classifier,
    Cls,
    Context,
    EMPTY,
    Forall,
    Hyp,
    INITIAL,
    Imp,
    Lam,
    Open,
    Quo,
    Shut,
    Unq,
    Var,
    alpha_eq,
    free_classifiers,
    free_variables,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
