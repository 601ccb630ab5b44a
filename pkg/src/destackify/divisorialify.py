"""Divisorialification of chart atlases and the destackification scaffold.

The main loop blows up, in every chart where it is attained, the locus of
maximal divisorial index. Each round lowers the global maximum, so at most
``dim`` rounds are needed. Certificates carry witnesses that
:func:`verify_certificate` re-checks from scratch.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .chart import (
    Chart,
    DivisorLabel,
    is_divisorial,
    max_divisorial_locus,
    stabilizer_dual,
)
from .config import DEFAULT_CAPS, Caps
from .errors import (
    DestackifyError,
    EngineError,
    InputError,
    InvariantViolation,
    PreconditionError,
    ResourceError,
)
from .transforms import (
    Blowup,
    Root,
    StackyBlowUpSequence,
    Step,
    blow_up,
    normalize_sequence,
    rigidify,
    root_stack,
)
from .zlinalg import FinAbGroup, GroupElement, present, subgroup_combination

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Atlas:
    """Charts of a common dimension keyed by chart id, in a fixed order."""

    charts: tuple[tuple[str, Chart], ...]
    history: StackyBlowUpSequence = field(default_factory=StackyBlowUpSequence)

    def __init__(self, charts: Mapping[str, Chart] | Iterable[tuple[str, Chart]], history=None) -> None:
        items = tuple(charts.items()) if isinstance(charts, Mapping) else tuple(charts)
        if not items:
            raise InputError("an atlas needs at least one chart")
        ids = [cid for cid, _ in items]
        if len(set(ids)) != len(ids):
            raise InputError(f"duplicate chart ids in {ids}")
        dims = {c.dim for _, c in items}
        if len(dims) != 1:
            raise InputError(f"charts have different dimensions {sorted(dims)}")
        object.__setattr__(self, "charts", items)
        object.__setattr__(self, "history", history or StackyBlowUpSequence())

    @classmethod
    def single(cls, chart: Chart, chart_id: str = "0") -> Atlas:
        return cls({chart_id: chart})

    @property
    def dim(self) -> int:
        return self.charts[0][1].dim

    def __getitem__(self, chart_id: str) -> Chart:
        for cid, c in self.charts:
            if cid == chart_id:
                return c
        raise KeyError(chart_id)

    def ids(self) -> list[str]:
        return [cid for cid, _ in self.charts]

    def labels(self) -> list[DivisorLabel]:
        return [lab for _, c in self.charts for lab, _ in c.divisors]

    def check_caps(self, caps: Caps) -> None:
        for _, c in self.charts:
            caps.check_chart(c.dim, c.group.order)


def _exceptional_label(atlas: Atlas, step_no: int) -> DivisorLabel:
    labels = atlas.labels()
    top = max((lab.order_key[0] for lab in labels if lab.order_key), default=-1) + 1
    name = f"E{step_no}"
    taken = {lab.name for lab in labels}
    while name in taken:
        name += "'"
    return DivisorLabel((top,), name)


def apply_step(atlas: Atlas, step: Step) -> tuple[Atlas, Step, tuple]:
    """Apply one stacky blow-up to every chart it touches.

    Returns the new atlas, the step with its label and centers filled in,
    and provenance ``child id -> (parent id, pivot)``.
    """
    step_no = len(atlas.history) + 1
    prov: list[tuple[str, tuple[str, int | None]]] = []
    out: list[tuple[str, Chart]] = []
    if isinstance(step, Blowup):
        centers = dict(step.centers)
        unknown = set(centers) - set(atlas.ids())
        if unknown:
            raise InputError(f"blow-up names unknown charts {sorted(unknown)}")
        label = _exceptional_label(atlas, step_no)
        if step.label:
            label = DivisorLabel(label.order_key, step.label)
        for cid, c in atlas.charts:
            center = centers.get(cid, ())
            if not center:
                out.append((cid, c))
                continue
            for p, child in zip(sorted(center), blow_up(c, center, label)):
                out.append((f"{cid}/{p}", child))
                prov.append((f"{cid}/{p}", (cid, p)))
        done: Step = Blowup({cid: centers.get(cid, ()) for cid in atlas.ids()}, label.name)
    elif isinstance(step, Root):
        touched = {}
        for cid, c in atlas.charts:
            if any(lab.name == step.label for lab, _ in c.divisors):
                touched[cid] = [c.label_coord(step.label)]
                out.append((cid, root_stack(c, step.label, step.order)))
                prov.append((cid, (cid, None)))
            else:
                out.append((cid, c))
        if not touched:
            raise InputError(f"no chart carries divisor {step.label!r}")
        done = Root(step.label, step.order, touched)
    else:
        raise InputError(f"not a step: {step!r}")
    history = StackyBlowUpSequence(
        atlas.history.steps + (done,), atlas.history.provenance + (tuple(prov),)
    )
    return Atlas(out, history), done, tuple(prov)


def global_max(atlas: Atlas) -> int:
    return max(max_divisorial_locus(c)[0] for _, c in atlas.charts)


def divisorialification(
    atlas: Atlas, max_steps: int | None = None, caps: Caps = DEFAULT_CAPS
) -> tuple[Atlas, StackyBlowUpSequence]:
    """Blow up the maximal divisorial-index locus until the atlas is divisorial.

    Charts whose local maximum is below the global one get an empty center in
    that round. Returns the final atlas and the sequence of this run.
    """
    atlas.check_caps(caps)
    bound = atlas.dim if max_steps is None else max_steps
    start = len(atlas.history)
    previous = None
    rounds = 0
    while True:
        loci = [(cid, max_divisorial_locus(c)) for cid, c in atlas.charts]
        m = max(mi for _, (mi, _) in loci)
        if previous is not None and m >= previous:
            raise InvariantViolation(f"divisorial index did not drop: {previous} -> {m}")
        if m == 0:
            break
        if rounds >= bound:
            if bound >= atlas.dim:
                raise InvariantViolation(f"not divisorial after {rounds} rounds in dimension {atlas.dim}")
            log.info("stopping after max_steps=%d rounds with index %d left", bound, m)
            break
        centers = {cid: (j if mi == m else ()) for cid, (mi, j) in loci}
        log.debug("round %d: max index %d, centers %s", rounds + 1, m, centers)
        atlas, _, _ = apply_step(atlas, Blowup(centers))
        previous = m
        rounds += 1
    run = StackyBlowUpSequence(atlas.history.steps[start:], atlas.history.provenance[start:])
    return atlas, run


def replay(atlas: Atlas, seq: StackyBlowUpSequence) -> list[Atlas]:
    """Atlases before and after each step of ``seq``."""
    out = [atlas]
    for step in seq.steps:
        atlas, _, _ = apply_step(atlas, step)
        out.append(atlas)
    return out


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class Certificate:
    kind: str  # Divisorial | Rigidified | CoarseSmooth | StabilizerTrivialOffDivisor
    holds: bool
    evidence: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"kind": self.kind, "holds": self.holds, "evidence": self.evidence}


def _witness(x: GroupElement, gens: list[GroupElement], m: FinAbGroup) -> list[int] | None:
    return subgroup_combination(x, gens, m)


def divisorial_certificate(atlas: Atlas) -> Certificate:
    """For every character, an integer combination of divisor characters."""
    evidence = {}
    holds = True
    for cid, c in atlas.charts:
        div = sorted(c.divisor_coords)
        gens = [c.characters[i] for i in div]
        combos = [_witness(chi, gens, c.group) for chi in c.characters]
        holds &= all(w is not None for w in combos)
        evidence[cid] = {"divisor_coords": div, "combinations": combos}
    return Certificate("Divisorial", holds, evidence)


def abelianization_report(atlas: Atlas, caps: Caps = DEFAULT_CAPS) -> tuple[Atlas, Certificate]:
    """Rigidify every chart and certify diagonalizable, off-divisor-trivial stabilizers."""
    bad = [cid for cid, c in atlas.charts if not is_divisorial(c)]
    if bad:
        raise PreconditionError(f"charts {bad} are not divisorial")
    charts = []
    evidence = {}
    for cid, c in atlas.charts:
        r = rigidify(c)
        charts.append((cid, r))
        div = sorted(r.divisor_coords)
        gens = [r.characters[i] for i in div]
        basis = [tuple(int(i == j) for j in range(r.group.rank)) for i in range(r.group.rank)]
        free = [i for i in range(r.dim) if i not in r.divisor_coords]
        if len(free) <= caps.max_table_dim:
            off = [
                sorted(set(div) | set(extra))
                for k in range(len(free) + 1)
                for extra in itertools.combinations(free, k)
            ]
        else:
            off = [div]
        evidence[cid] = {
            "group": list(r.group.invariant_factors),
            "characters": [list(x) for x in r.characters],
            "divisor_coords": div,
            "generator_combinations": [_witness(b, gens, r.group) for b in basis],
            "off_divisor_orbit_types": off,
            "off_divisor_stabilizers": [list(stabilizer_dual(r, s).invariant_factors) for s in off],
        }
    cert = Certificate("Rigidified", True, evidence)
    if not verify_certificate(cert):
        raise InvariantViolation("rigidification certificate failed verification")
    return Atlas(charts, atlas.history), cert


def coarse_smoothness(c: Chart, caps: Caps = DEFAULT_CAPS) -> tuple[bool, list[tuple[int, ...]]]:
    """Hilbert basis of the invariant monoid ``{v in N^n : sum v_i chi_i = 0}``.

    Coordinates with trivial character split off as unit vectors. For the rest
    a minimal generator satisfies ``v_i <= order(chi_i)``: ``order(chi_i) e_i``
    is itself invariant, so anything above it decomposes. The coarse chart is
    smooth iff the basis has ``n`` elements.
    """
    m = c.group
    caps.check_chart(c.dim, m.order)
    orders = [m.element_order(chi) for chi in c.characters]
    nt = [i for i, o in enumerate(orders) if o > 1]
    if len(nt) > caps.max_hilbert_dim:
        raise ResourceError(f"{len(nt)} nontrivial coordinates exceed cap max_hilbert_dim={caps.max_hilbert_dim}")
    box = 1
    for i in nt:
        box *= orders[i] + 1
    if box > caps.max_hilbert_box:
        raise ResourceError(f"Hilbert basis search box {box} exceeds cap max_hilbert_box={caps.max_hilbert_box}")

    def unit(i: int, scale: int = 1) -> tuple[int, ...]:
        return tuple(scale if j == i else 0 for j in range(c.dim))

    basis = [unit(i) for i in range(c.dim) if orders[i] == 1]
    # multiples[i][t] = t * chi_i
    multiples = {i: [m.scale(t, c.characters[i]) for t in range(orders[i] + 1)] for i in nt}
    found: list[tuple[int, ...]] = []
    candidates = sorted(itertools.product(*(range(orders[i] + 1) for i in nt)), key=lambda v: (sum(v), v))
    for v in candidates[1:]:
        total = m.zero()
        for i, t in zip(nt, v):
            total = m.add(total, multiples[i][t])
        if any(total):
            continue
        if any(all(a <= b for a, b in zip(f, v)) for f in found):
            continue
        found.append(v)
    for v in found:
        full = [0] * c.dim
        for i, t in zip(nt, v):
            full[i] = t
        basis.append(tuple(full))
    for i in nt:
        if unit(i, orders[i]) not in basis:
            raise InvariantViolation(f"order(chi_{i}) e_{i} missing from the Hilbert basis")
    basis.sort(reverse=True)
    return len(basis) == c.dim, basis


def root_form(c: Chart) -> dict[str, int] | None:
    """Root orders when ``c`` is an iterated root stack of its coarse chart.

    That is the case when the group is the direct sum of the cyclic groups
    generated by the divisor characters and all other characters vanish.
    """
    m = c.group
    if any(any(chi) for i, chi in enumerate(c.characters) if i not in c.divisor_coords):
        return None
    orders = {lab.name: m.element_order(c.characters[i]) for lab, i in c.divisors}
    prod = math.prod(orders.values())
    gens = [c.characters[i] for i in sorted(c.divisor_coords)]
    basis = [tuple(int(i == j) for j in range(m.rank)) for i in range(m.rank)]
    if prod != m.order or not all(subgroup_combination(b, gens, m) is not None for b in basis):
        return None
    return {name: o for name, o in orders.items() if o > 1}


def coarse_certificate(atlas: Atlas, caps: Caps = DEFAULT_CAPS) -> Certificate:
    evidence = {}
    holds = True
    for cid, c in atlas.charts:
        smooth, basis = coarse_smoothness(c, caps)
        holds &= smooth
        evidence[cid] = {
            "group": list(c.group.invariant_factors),
            "characters": [list(x) for x in c.characters],
            "smooth": smooth,
            "hilbert_basis": [list(v) for v in basis],
            "root_orders": root_form(c),
        }
    return Certificate("CoarseSmooth", holds, evidence)


def verify_certificate(cert: Certificate) -> bool:
    """Re-check a certificate from its evidence alone."""
    if cert.kind == "Rigidified":
        for ev in cert.evidence.values():
            m = FinAbGroup(tuple(ev["group"]))
            chars = [m.reduce(x) for x in ev["characters"]]
            gens = [chars[i] for i in ev["divisor_coords"]]
            for k, combo in enumerate(ev["generator_combinations"]):
                if combo is None:
                    return False
                total = m.zero()
                for a, g in zip(combo, gens):
                    total = m.add(total, m.scale(a, g))
                if total != tuple(int(i == k) for i in range(m.rank)):
                    return False
            if any(math.prod(s) != 1 for s in ev["off_divisor_stabilizers"]):
                return False
        return cert.holds
    if cert.kind == "Divisorial":
        return cert.holds and all(
            all(w is not None for w in ev["combinations"]) for ev in cert.evidence.values()
        )
    if cert.kind == "CoarseSmooth":
        ok = True
        for ev in cert.evidence.values():
            m = FinAbGroup(tuple(ev["group"]))
            chars = [m.reduce(x) for x in ev["characters"]]
            for v in ev["hilbert_basis"]:
                total = m.zero()
                for a, chi in zip(v, chars):
                    total = m.add(total, m.scale(a, chi))
                if any(total):
                    return False
            ok &= ev["smooth"] == (len(ev["hilbert_basis"]) == len(chars))
        return ok and cert.holds == all(ev["smooth"] for ev in cert.evidence.values())
    raise InputError(f"unknown certificate kind {cert.kind!r}")


# ---------------------------------------------------------------------------
# destackification driver

Engine = Callable[[Atlas], Iterable[Step]]


def identity_engine(atlas: Atlas) -> list[Step]:
    return []


def destackify_driver(
    atlas: Atlas, engine: Engine = identity_engine, caps: Caps = DEFAULT_CAPS
) -> tuple[Atlas, StackyBlowUpSequence, Certificate]:
    """Divisorialify, rigidify, run ``engine``, then certify the coarse charts.

    The engine sees the rigidified atlas and returns stacky blow-up steps,
    which are applied and validated one at a time.
    """
    atlas, _ = divisorialification(atlas, caps=caps)
    atlas, _ = abelianization_report(atlas, caps)
    for step in engine(atlas):
        try:
            atlas, _, _ = apply_step(atlas, step)
        except DestackifyError as exc:
            raise EngineError(f"engine step {step!r} rejected: {exc}") from exc
    return atlas, atlas.history, coarse_certificate(atlas, caps)


# ---------------------------------------------------------------------------
# functoriality


@dataclass(frozen=True)
class AddTrivialCoordinate:
    count: int = 1


@dataclass(frozen=True)
class AddGerbeFactor:
    factors: tuple[int, ...]


Twist = AddTrivialCoordinate | AddGerbeFactor


def twist_chart(c: Chart, twist: Twist) -> Chart:
    if isinstance(twist, AddTrivialCoordinate):
        if twist.count < 0:
            raise InputError("count must be nonnegative")
        zero = c.group.zero()
        return Chart(c.group, c.characters + (zero,) * twist.count, c.divisors)
    pres = present(c.group.invariant_factors + tuple(twist.factors))
    extra = len(twist.factors)
    return Chart(pres.group, tuple(pres.image(list(chi) + [0] * extra) for chi in c.characters), c.divisors)


def twist_atlas(atlas: Atlas, twist: Twist) -> Atlas:
    return Atlas([(cid, twist_chart(c, twist)) for cid, c in atlas.charts])


def functoriality_check(atlas: Atlas, twist: Twist, caps: Caps = DEFAULT_CAPS) -> bool:
    """Whether divisorialification commutes with the twist, step for step."""
    _, seq = divisorialification(Atlas(atlas.charts), caps=caps)
    _, tseq = divisorialification(twist_atlas(atlas, twist), caps=caps)
    a = normalize_sequence(seq).steps
    b = normalize_sequence(tseq).steps
    if len(a) != len(b):
        return False
    return all(
        type(x) is type(y) and x.centers == y.centers and x.label == y.label for x, y in zip(a, b)
    )


__all__ = [
    "AddGerbeFactor",
    "AddTrivialCoordinate",
    "Atlas",
    "Certificate",
    "abelianization_report",
    "apply_step",
    "coarse_certificate",
    "coarse_smoothness",
    "destackify_driver",
    "divisorial_certificate",
    "divisorialification",
    "functoriality_check",
    "global_max",
    "identity_engine",
    "replay",
    "root_form",
    "twist_atlas",
    "verify_certificate",
]
