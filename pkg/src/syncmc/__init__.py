"""Model checking synchronized products of labeled transition systems.

The package splits into:

- ``lts``: components, constraints, explicit products, class indices
- ``formulas`` / ``parser``: formula ASTs and their concrete syntax
- ``evaluator``: brute-force model checking on explicit graphs
- ``composer``: the product-to-components translation and its verification
- ``gadgets``: small worked constructions (two-stack machines as a product
  of pushdowns, Turing machines as ground tree rewriting against a star,
  grid arithmetic and grid/line translations)
"""

from .errors import (Caps, DEFAULT_CAPS, FormulaSyntaxError,
                     ResourceLimitError, SignatureError, SpecError,
                     SyncmcError)
from .formulas import (FO, FO_R, FO_REG, FO_TC, And, Edge, Equal, Exists,
                       FalseF, Forall, FragmentDescriptor, Implies, Not, Or,
                       ReachRegex, ReachSet, TC, TrueF, canonical_text,
                       classify, desugar_reach, free_vars, normalize,
                       substitute, to_text)
from .parser import parse_formula
from .evaluator import (Evaluator, evaluate, reach_set, tc_base_relation,
                        tc_relation, warshall_closure)
from .lts import (EPS, LabelAlphabet, LabeledTransitionSystem, ProductSpec,
                  SyncConstraint, build_product, enabled_vertices,
                  is_finitely_synchronized, load_spec, render_sync_label,
                  save_spec, sim_classes, spec_from_json, spec_to_json,
                  split_product_vertex)
from .composer import (ComposedForm, SyncProfile, compose, eval_composed,
                       profile_from_explicit, verify_composition)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
