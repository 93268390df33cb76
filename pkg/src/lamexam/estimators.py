"""Scikit-learn style front end: a transformer mapping terms to normal forms."""
from __future__ import annotations

from typing import List, Optional

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .bmam import bmam_run
from .exam import exam_run
from .mam import mam_run
from .syntax import pretty, tidy
from .trace import FINAL, Trace
from .validation import check_machine, check_natural, check_template, check_terms


def run_machine(term, machine: str = "exam", template: str = "stack", seed: int = 0, fuel: int = 2000,
                keep_states: bool = False, snapshots: bool = False, chooser=None) -> Trace:
    """Run one of the three machines on ``term``; ``template`` and ``seed`` only matter for the EXAM."""
    if machine == "mam":
        return mam_run(term, fuel=fuel, keep_states=keep_states, snapshots=snapshots)
    if machine == "bmam":
        return bmam_run(term, fuel=fuel, keep_states=keep_states, snapshots=snapshots)
    return exam_run(term, template, seed=seed, fuel=fuel, chooser=chooser,
                    keep_states=keep_states, snapshots=snapshots)


class MachineNormalizer(TransformerMixin, BaseEstimator):
    """Reduces each input term with the configured machine.

    ``transform`` returns the printed results, with ``None`` for runs that
    exhaust their fuel.  With ``machine="mam"`` the result is the weak head
    normal form.  The per-term traces of the last call are kept in
    ``traces_``.

    >>> MachineNormalizer(template="stack").fit_transform(["(\\\\x. x) y"])
    ['y']
    """

    def __init__(self, machine: str = "exam", template: str = "stack", seed: int = 0, fuel: int = 2000):
        self.machine = machine
        self.template = template
        self.seed = seed
        self.fuel = fuel

    def _validate_params(self) -> None:
        check_machine(self.machine)
        check_template(self.template)
        if self.template == "interactive":
            raise ValueError("the interactive template needs a chooser; use the command line")
        check_natural(self.seed, "seed")
        check_natural(self.fuel, "fuel")

    def fit(self, X, y=None):
        self._validate_params()
        self.n_terms_seen_ = len(check_terms(X))
        return self

    def transform(self, X) -> List[Optional[str]]:
        check_is_fitted(self, "n_terms_seen_")
        self._validate_params()
        self.traces_ = [
            run_machine(t, self.machine, self.template, self.seed, self.fuel) for t in check_terms(X)
        ]
        return [pretty(tidy(tr.result)) if tr.outcome == FINAL else None for tr in self.traces_]

    def beta_counts(self) -> List[int]:
        check_is_fitted(self, "traces_")
        return [tr.beta_count for tr in self.traces_]
