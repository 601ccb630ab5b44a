"""Canonical JSON for charts, atlases, traces and Tor inputs."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

from .chart import Chart, DivisorLabel
from .divisorialify import Atlas
from .errors import InputError
from .ktheory import HModule
from .transforms import StackyBlowUpSequence, sequence_to_json, step_from_json
from .zlinalg import present


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def load_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _ints(x: Any, what: str) -> list[int]:
    if not isinstance(x, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in x):
        raise InputError(f"{what} must be a list of integers, got {x!r}")
    return x


def chart_from_json(obj: Mapping) -> Chart:
    """Read a chart; the group may be any list of cyclic orders and is normalized."""
    try:
        orders = _ints(obj["group"]["invariant_factors"], "group.invariant_factors")
        coords = obj["coordinates"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"chart is missing field {exc}") from exc
    if not isinstance(coords, list):
        raise InputError("coordinates must be a list")
    pres = present(orders)
    chars = []
    divisors = []
    for pos, entry in enumerate(coords):
        if not isinstance(entry, Mapping):
            raise InputError(f"coordinate {pos} must be an object")
        chi = _ints(entry.get("character"), f"coordinates[{pos}].character")
        if len(chi) != len(orders):
            raise InputError(f"coordinates[{pos}].character has length {len(chi)}, expected {len(orders)}")
        chars.append(pres.image(chi))
        name = entry.get("divisor")
        if name is not None:
            key = entry.get("order_key", [pos])
            divisors.append((DivisorLabel(tuple(_ints(key, f"coordinates[{pos}].order_key")), str(name)), pos))
    return Chart(pres.group, tuple(chars), tuple(divisors))


def chart_to_json(c: Chart) -> dict:
    labels = {i: lab for lab, i in c.divisors}
    coords = []
    for i, chi in enumerate(c.characters):
        entry: dict = {"character": list(chi)}
        if i in labels:
            entry["divisor"] = labels[i].name
            entry["order_key"] = list(labels[i].order_key)
        coords.append(entry)
    return {"group": {"invariant_factors": list(c.group.invariant_factors)}, "coordinates": coords}


def atlas_from_json(obj: Mapping) -> Atlas:
    """Accept either a single chart (id "0") or ``{"charts": {id: chart}}``."""
    if not isinstance(obj, Mapping):
        raise InputError("expected a JSON object")
    if "charts" not in obj:
        return Atlas.single(chart_from_json(obj))
    charts = obj["charts"]
    if not isinstance(charts, Mapping):
        raise InputError("charts must be an object mapping chart ids to charts")
    history = StackyBlowUpSequence(tuple(step_from_json(s) for s in obj.get("history", [])))
    order = obj.get("chart_order", list(charts))
    if sorted(map(str, order)) != sorted(map(str, charts)):
        raise InputError("chart_order must list exactly the chart ids")
    return Atlas([(str(cid), chart_from_json(charts[cid])) for cid in order], history)


def atlas_to_json(atlas: Atlas) -> dict:
    return {
        "dimension": atlas.dim,
        "chart_order": atlas.ids(),
        "charts": {cid: chart_to_json(c) for cid, c in atlas.charts},
        "history": sequence_to_json(atlas.history),
    }


def hmodule_from_json(obj: Mapping) -> HModule:
    try:
        orders = _ints(obj["invariant_factors"], "invariant_factors")
        action = obj["action"]
        p = obj["p"]
        h = obj["h"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"Tor input is missing field {exc}") from exc
    if not isinstance(action, list):
        raise InputError("action must be a list of rows")
    rows = [_ints(r, "action row") for r in action]
    if not isinstance(p, int) or not isinstance(h, int):
        raise InputError("p and h must be integers")
    return HModule.from_orders(orders, rows, p, h)
