"""Transition labels and run traces, with a line-delimited JSON encoding."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from .syntax import Address, HoleName, Term, format_address, parse, parse_address, pretty


class Label(str, Enum):
    SEA_APP = "sea_app"
    BETA = "beta"
    SUB = "sub"
    SEA_LAM = "sea_lam"
    SEA_VAR = "sea_var"
    # backtracking phases of the extended MAM
    DOWN_UP = "down_up"
    UP_DOWN = "up_down"
    UP_LAM = "up_lam"
    UP_APP = "up_app"

    @property
    def is_beta(self) -> bool:
        return self is Label.BETA

    def __str__(self) -> str:
        return self.value


FINAL = "final"
FUEL_EXHAUSTED = "fuel_exhausted"


@dataclass
class TraceStep:
    label: Label
    job: Optional[HoleName] = None
    address: Optional[Address] = None
    snapshot: Optional[Dict[str, str]] = None


@dataclass
class Trace:
    machine: str
    initial: Term
    steps: List[TraceStep] = field(default_factory=list)
    outcome: str = FINAL
    result: Optional[Term] = None
    template: Optional[str] = None
    seed: Optional[int] = None
    fuel: Optional[int] = None
    final_snapshot: Optional[Dict[str, str]] = None
    # machine states, kept only when a run asks for them; never serialized
    states: List[Any] = field(default_factory=list, repr=False, compare=False)

    @property
    def beta_count(self) -> int:
        return sum(1 for s in self.steps if s.label is Label.BETA)

    @property
    def overhead_count(self) -> int:
        return len(self.steps) - self.beta_count

    def count(self, label: Label) -> int:
        return sum(1 for s in self.steps if s.label is label)

    @property
    def finished(self) -> bool:
        return self.outcome == FINAL

    # -- records ---------------------------------------------------------

    def to_records(self) -> List[Dict[str, Any]]:
        header = {
            "record": "header",
            "machine": self.machine,
            "template": self.template,
            "seed": self.seed,
            "fuel": self.fuel,
            "initial": pretty(self.initial),
        }
        rows: List[Dict[str, Any]] = [header]
        for s in self.steps:
            row: Dict[str, Any] = {"record": "step", "label": s.label.value}
            row["job"] = s.job.id if s.job is not None else None
            row["address"] = format_address(s.address) if s.address is not None else None
            if s.snapshot is not None:
                row["snapshot"] = s.snapshot
            rows.append(row)
        footer: Dict[str, Any] = {
            "record": "end",
            "outcome": self.outcome,
            "result": pretty(self.result) if self.result is not None else None,
            "beta": self.beta_count,
            "overhead": self.overhead_count,
        }
        if self.final_snapshot is not None:
            footer["snapshot"] = self.final_snapshot
        rows.append(footer)
        return rows

    def dumps(self) -> str:
        return "\n".join(json.dumps(r, ensure_ascii=False) for r in self.to_records()) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Trace":
        records = [json.loads(line) for line in text.splitlines() if line.strip()]
        if not records or records[0].get("record") != "header":
            raise ValueError("trace must start with a header record")
        head = records[0]
        trace = cls(
            machine=head["machine"],
            initial=parse(head["initial"]),
            template=head.get("template"),
            seed=head.get("seed"),
            fuel=head.get("fuel"),
        )
        for rec in records[1:]:
            if rec["record"] == "step":
                trace.steps.append(TraceStep(
                    label=Label(rec["label"]),
                    job=HoleName(rec["job"]) if rec.get("job") is not None else None,
                    address=parse_address(rec["address"]) if rec.get("address") is not None else None,
                    snapshot=rec.get("snapshot"),
                ))
            elif rec["record"] == "end":
                trace.outcome = rec["outcome"]
                trace.result = parse(rec["result"]) if rec.get("result") is not None else None
                trace.final_snapshot = rec.get("snapshot")
                if rec.get("beta") != trace.beta_count or rec.get("overhead") != trace.overhead_count:
                    raise ValueError("step counts do not match the step records")
        return trace
