"""Instance JSON and report files.

Instance schema::

    {"agents": [{"x": "<rational>", "pref": "f1" | "f2" | "both"}, ...],
     "alternatives": ["<rational>", ...]}

A ``<rational>`` is a decimal string (converted exactly) or ``"p/q"``.
"""

from __future__ import annotations

import csv
import io as _stdio
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

from .model import Agent, Instance, InstanceError, Preference, format_rational, to_rational


class InstanceFormatError(ValueError):
    """Malformed instance document; the message names the offending field."""


def instance_to_dict(inst: Instance) -> dict:
    return {
        "agents": [{"x": format_rational(a.x), "pref": a.pref.value} for a in inst.agents],
        "alternatives": [format_rational(a) for a in inst.alternatives],
    }


def _rational_field(value: Any, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int, Fraction)):
        raise InstanceFormatError(f"{where}: expected a rational string, got {value!r}")
    try:
        return to_rational(value)
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"{where}: {exc}") from None


def instance_from_dict(doc: Any) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceFormatError("instance: expected a JSON object")
    for key in ("agents", "alternatives"):
        if key not in doc:
            raise InstanceFormatError(f"{key}: missing field")
        if not isinstance(doc[key], list):
            raise InstanceFormatError(f"{key}: expected a list")
    agents = []
    for i, a in enumerate(doc["agents"]):
        if not isinstance(a, dict):
            raise InstanceFormatError(f"agents[{i}]: expected an object")
        if "x" not in a:
            raise InstanceFormatError(f"agents[{i}].x: missing field")
        if "pref" not in a:
            raise InstanceFormatError(f"agents[{i}].pref: missing field")
        x = _rational_field(a["x"], f"agents[{i}].x")
        try:
            pref = Preference.parse(a["pref"])
        except ValueError as exc:
            raise InstanceFormatError(f"agents[{i}].pref: {exc}") from None
        agents.append(Agent(x, pref))
    alts = [_rational_field(v, f"alternatives[{k}]") for k, v in enumerate(doc["alternatives"])]
    try:
        return Instance(tuple(agents), tuple(alts))
    except InstanceError as exc:
        field = "agents" if "agent" in str(exc) else "alternatives"
        raise InstanceFormatError(f"{field}: {exc}") from None


def dumps_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), sort_keys=True)


def loads_instance(text: str) -> Instance:
    try:
        # numbers keep their decimal text so 1.03 becomes exactly 103/100
        doc = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"invalid JSON: {exc}") from None
    return instance_from_dict(doc)


def read_corpus(path: str | os.PathLike) -> list[Instance]:
    """A single instance file, a JSON-lines file, or a directory of ``*.json``."""
    p = Path(path)
    if p.is_dir():
        return [loads_instance(f.read_text()) for f in sorted(p.glob("*.json"))]
    text = p.read_text()
    if p.suffix == ".jsonl":
        return [loads_instance(line) for line in text.splitlines() if line.strip()]
    return [loads_instance(text)]


def write_atomic(path: str | os.PathLike, text: str) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=p.parent, prefix=f".{p.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, p)
    except BaseException:
        os.unlink(tmp)
        raise


def write_corpus(instances: Sequence[Instance], out: str | os.PathLike) -> list[Path]:
    """``out`` ending in ``.jsonl`` gets one line per instance; otherwise a
    directory of ``instance_00000.json`` files."""
    p = Path(out)
    if p.suffix == ".jsonl":
        write_atomic(p, "".join(dumps_instance(i) + "\n" for i in instances))
        return [p]
    paths = []
    for k, inst in enumerate(instances):
        f = p / f"instance_{k:05d}.json"
        write_atomic(f, dumps_instance(inst) + "\n")
        paths.append(f)
    return paths


def dumps_report(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def csv_text(rows: Iterable[dict], columns: Sequence[str]) -> str:
    buf = _stdio.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()
