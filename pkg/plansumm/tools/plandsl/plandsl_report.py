# plansumm/tools/plandsl/plandsl_report.py

"""JSON summary reports: emitting and reading back."""

from __future__ import annotations

import json
from typing import Any, Dict, Iterable, List, Union

from plansumm.core.config import REPORT_INDENT
from plansumm.core.errors import DslSyntaxError
from plansumm.core.logic import Variable, render

from plansumm.tools.summarize.models import EPSILON, SummaryInfo, SummaryTable

from .models import EventType
from .plandsl_core import parse_formula, parse_literal, parse_steps

_KIND_ORDER = {"primitive": 0, "body": 1, "event": 2}


def _kind(info: SummaryInfo) -> str:
    if isinstance(info.subject, EventType):
        return "event"
    if isinstance(info.subject, str):
        return "body"
    return "primitive"


def summary_row(info: SummaryInfo, with_kind: bool = False) -> Dict[str, Any]:
    row = {
        "subject": info.label,
        "params": [render(v) for v in info.params],
        "precondition": render(info.precondition),
        "must": sorted(render(l) for l in info.must),
        "mentioned": sorted(render(l) for l in info.mentioned),
    }
    if with_kind:
        row["kind"] = _kind(info)
    return row


def emit_report(
    summaries: Union[SummaryTable, Iterable[SummaryInfo]],
    include_all: bool = False,
    indent: int = REPORT_INDENT,
) -> str:
    """Deterministic JSON report, newline-terminated. With `include_all` the
    plan-body and primitive rows of a table are listed too."""
    if isinstance(summaries, SummaryTable):
        infos: List[SummaryInfo] = list(summaries)
        if include_all:
            infos += list(summaries.bodies.values()) + list(summaries.primitives.values())
    else:
        infos = list(summaries)
    rows = [summary_row(info, include_all) for info in infos]
    rows.sort(key=lambda r: (_KIND_ORDER.get(r.get("kind", "event")), r["subject"]))
    return json.dumps({"summaries": rows}, indent=indent, sort_keys=True, ensure_ascii=False) + "\n"


def _subject(row: Dict[str, Any]):
    kind = row.get("kind", "event")
    text = row["subject"]
    if kind == "event":
        name, _, arity = text.rpartition("/")
        if not name or not arity.isdigit():
            raise DslSyntaxError(1, 1, f"an event subject name/arity, got {text!r}")
        return EventType(name, int(arity))
    if kind == "body":
        return text
    steps = parse_steps(text)
    if len(steps) != 1:
        raise DslSyntaxError(1, 1, f"a single primitive step, got {text!r}")
    return steps[0]


def parse_report(text: str) -> List[SummaryInfo]:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise DslSyntaxError(e.lineno, e.colno, f"a JSON report ({e.msg})") from e
    infos = []
    for row in document.get("summaries", []):
        precondition = row["precondition"]
        infos.append(SummaryInfo(
            _subject(row),
            tuple(Variable(p.lstrip("?")) for p in row["params"]),
            EPSILON if precondition == "epsilon" else parse_formula(precondition),
            frozenset(parse_literal(l) for l in row["must"]),
            frozenset(parse_literal(l) for l in row["mentioned"]),
        ))
    return infos
