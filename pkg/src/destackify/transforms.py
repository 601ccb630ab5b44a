"""Blow-ups, root stacks and rigidification of charts; blow-up sequences."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .chart import Chart, DivisorLabel, is_divisorial, stabilizer_dual
from .errors import InputError, InvariantViolation, PreconditionError
from .zlinalg import FinAbGroup, cokernel, in_subgroup, subgroup


def next_label(existing: Iterable[DivisorLabel], name: str | None = None) -> DivisorLabel:
    """A label ordered strictly after every label in ``existing``."""
    existing = list(existing)
    top = max((lab.order_key[0] for lab in existing if lab.order_key), default=-1) + 1
    if name is None:
        name = f"E{top}"
        taken = {lab.name for lab in existing}
        while name in taken:
            name += "'"
    return DivisorLabel((top,), name)


def blow_up(c: Chart, center: Iterable[int], label: DivisorLabel | None = None) -> list[Chart]:
    """Blow up the coordinate subspace ``V(x_j : j in center)``.

    Returns one chart per pivot ``p`` in ascending order. In the pivot chart
    the coordinates are ``x_p`` and ``x_j / x_p``, so characters in the center
    shift by ``-chi_p``; the exceptional divisor sits on ``x_p`` and the strict
    transform of a divisor on ``x_p`` leaves the chart.
    """
    j = sorted(set(center))
    if not j:
        raise InputError("blow-up center must be nonempty")
    if any(not 0 <= i < c.dim for i in j):
        raise InputError(f"center {j} out of range for n={c.dim}")
    if label is None:
        label = next_label(lab for lab, _ in c.divisors)
    elif any(lab >= label or lab.order_key == label.order_key for lab, _ in c.divisors):
        raise InputError(f"exceptional label {label.name} must come after existing labels")
    m = c.group
    out = []
    for p in j:
        chi_p = c.characters[p]
        chars = tuple(
            m.add(chi, m.scale(-1, chi_p)) if i in j and i != p else chi
            for i, chi in enumerate(c.characters)
        )
        divs = tuple((lab, i) for lab, i in c.divisors if i != p) + ((label, p),)
        out.append(Chart(m, chars, divs))
    return out


def root_stack(c: Chart, name: str, r: int) -> Chart:
    """Adjoin an r-th root of the divisor ``name``.

    The new character group is ``(M + Z) / <(chi_i, -r)>`` and the root
    coordinate gets the class of ``(0, 1)``.
    """
    if int(r) != r or r < 2:
        raise InputError(f"root order must be an integer >= 2, got {r}")
    i = c.label_coord(name)
    m = c.group
    k = m.rank
    rels = [col + [0] for col in m.relations()]
    rels.append(list(c.characters[i]) + [-r])
    pres = cokernel(rels, k + 1)
    chars = tuple(
        pres.image([0] * k + [1]) if j == i else pres.image(list(chi) + [0])
        for j, chi in enumerate(c.characters)
    )
    new = Chart(pres.group, chars, c.divisors)
    if new.group.order != r * m.order:
        raise InvariantViolation("root stack did not multiply the group order by r")
    return new


def rigidify(c: Chart) -> Chart:
    """Quotient out the generic stabilizer of a divisorial chart.

    The new group is the subgroup generated by the divisor characters; all
    characters lie in it by divisoriality.
    """
    if not is_divisorial(c):
        raise PreconditionError("rigidify needs a divisorial chart")
    gens = [c.characters[i] for i in sorted(c.divisor_coords)]
    sub = subgroup(c.group, gens)
    if sub.group.order == c.group.order:
        # already rigid; keep the presentation so rigidify is idempotent
        return c
    out = Chart(sub.group, tuple(sub.coords(chi) for chi in c.characters), c.divisors)
    div_gens = [out.characters[i] for i in sorted(out.divisor_coords)]
    if not all(in_subgroup(x, div_gens, out.group) for x in _standard_basis(out.group)):
        raise InvariantViolation("divisor characters do not generate the rigidified group")
    if not is_divisorial(out):
        raise InvariantViolation("rigidified chart is not divisorial")
    # stabilizers at orbit types containing the divisor coordinates are
    # quotients of this one, so checking it covers them all
    if stabilizer_dual(out, out.divisor_coords).order != 1:
        raise InvariantViolation("rigidified chart has stabilizers off the divisor")
    return out


def _standard_basis(m: FinAbGroup) -> list[tuple[int, ...]]:
    return [tuple(int(i == j) for j in range(m.rank)) for i in range(m.rank)]


# ---------------------------------------------------------------------------
# blow-up sequences


def _freeze_centers(centers: Mapping[str, Iterable[int]] | None):
    if centers is None:
        return None
    return tuple(sorted((cid, tuple(sorted(set(cs)))) for cid, cs in centers.items()))


@dataclass(frozen=True)
class Blowup:
    """An ordinary blow-up; ``centers`` maps chart ids to coordinate sets."""

    centers: tuple[tuple[str, tuple[int, ...]], ...]
    label: str = ""

    def __init__(self, centers: Mapping[str, Iterable[int]], label: str = "") -> None:
        object.__setattr__(self, "centers", _freeze_centers(centers))
        object.__setattr__(self, "label", label)

    @property
    def order(self) -> int:
        return 1

    def is_empty(self) -> bool:
        return not any(cs for _, cs in self.centers)


@dataclass(frozen=True)
class Root:
    """A root stack of order ``order`` along the divisor ``label``.

    ``centers`` records the charts (and coordinates) it touched once applied;
    None means not yet applied.
    """

    label: str
    order: int
    centers: tuple[tuple[str, tuple[int, ...]], ...] | None = None

    def __init__(self, label: str, order: int, centers: Mapping[str, Iterable[int]] | None = None) -> None:
        if int(order) != order or order < 2:
            raise InputError(f"root order must be an integer >= 2, got {order}")
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "order", int(order))
        object.__setattr__(self, "centers", _freeze_centers(centers))

    def is_empty(self) -> bool:
        return self.centers is not None and not any(cs for _, cs in self.centers)


Step = Union[Blowup, Root]


@dataclass(frozen=True)
class StackyBlowUpSequence:
    steps: tuple[Step, ...] = ()
    # per step: child chart id -> (parent chart id, pivot or None)
    provenance: tuple[tuple[tuple[str, tuple[str, int | None]], ...], ...] = field(default=(), compare=False)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)


def _prune(step: Step) -> Step:
    if isinstance(step, Blowup):
        return Blowup({cid: cs for cid, cs in step.centers if cs}, step.label)
    if step.centers is None:
        return step
    return Root(step.label, step.order, {cid: cs for cid, cs in step.centers if cs})


def normalize_sequence(seq: StackyBlowUpSequence) -> StackyBlowUpSequence:
    """Delete steps with empty centers everywhere; drop empty per-chart entries."""
    kept = [(s, p) for s, p in zip(seq.steps, seq.provenance or [()] * len(seq.steps)) if not s.is_empty()]
    return StackyBlowUpSequence(
        tuple(_prune(s) for s, _ in kept),
        tuple(p for _, p in kept) if seq.provenance else (),
    )


def step_to_json(step: Step) -> dict:
    centers = None if step.centers is None else {cid: list(cs) for cid, cs in step.centers}
    kind = "blowup" if isinstance(step, Blowup) else "root"
    return {"kind": kind, "centers": centers, "label": step.label, "order": step.order}


def step_from_json(obj: Mapping) -> Step:
    try:
        kind = obj["kind"]
        if kind == "blowup":
            return Blowup({str(k): [int(x) for x in v] for k, v in obj["centers"].items()}, str(obj.get("label", "")))
        if kind == "root":
            centers = obj.get("centers")
            return Root(
                str(obj["label"]),
                int(obj["order"]),
                None if centers is None else {str(k): [int(x) for x in v] for k, v in centers.items()},
            )
    except (KeyError, TypeError, AttributeError) as exc:
        raise InputError(f"malformed step {obj!r}: {exc}") from exc
    raise InputError(f"unknown step kind {obj.get('kind')!r}")


def sequence_to_json(seq: StackyBlowUpSequence) -> list[dict]:
    return [step_to_json(s) for s in seq.steps]
