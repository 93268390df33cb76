"""Strong normalization of untyped lambda terms with the EXternal Abstract
Machine, its pool templates, and the machines and strategies it is checked
against."""
import sys

from .bmam import bmam_run
from .estimators import MachineNormalizer, run_machine
from .exam import ExamState, exam_init, exam_readback, exam_run, exam_step, enabled, is_final
from .mam import mam_run
from .pools import TEMPLATES, make_pool
from .strategies import FuelExhausted, external_redexes, least_level_redexes, normalize
from .syntax import App, Hole, Lam, Var, alpha_eq, parse, pretty
from .trace import Label, Trace

# terms are walked recursively; deep spines need more than the default frames
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))

__all__ = [
    "App", "ExamState", "FuelExhausted", "Hole", "Label", "Lam", "MachineNormalizer", "TEMPLATES",
    "Trace", "Var", "alpha_eq", "bmam_run", "enabled", "exam_init", "exam_readback", "exam_run",
    "exam_step", "external_redexes", "is_final", "least_level_redexes", "make_pool", "mam_run",
    "normalize", "parse", "pretty", "run_machine",
]
