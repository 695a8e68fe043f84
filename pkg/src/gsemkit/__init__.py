"""Causal models with generalized outcome sets: language, semantics, axioms and proofs."""

from .core import Assignment, Intervention, NULL, Signature, model_class
from .errors import (CapExceeded, DisallowedIntervention, FormulaSyntaxError, GsemError,
                     ModelFormatError, NotInLanguage, UnknownVariable)
from .formats import format_gsem, format_sem, load_model, parse_model, parse_signature
from .lang import parse_event, parse_formula, parse_intervention, print_formula
from .model import Gsem, Sem, enumerate_gsems, enumerate_sems, equivalent, sem_to_gsem, solve_sem
from .properties import (classify, count_outcomes_class, is_acyclic_acyc1, is_acyclic_acyc2,
                         is_acyclic_sem, is_coherent)
from .semantics import check, l_equivalent, valid_in_model
from .axioms import AXplus, AXstar_basic_A, instantiate, soundness_report, system_by_name
from .proof import check_derivation, parse_derivation
from .decide import satisfiable, sem_satisfiable, sem_validity, validity

__version__ = "0.1.0"
