"""Frequent sequential patterns, process variants, and section grouping.

Mining uses prefix projection (pattern growth): each frequent item extends
the current prefix and the database is projected to the suffixes after its
first occurrence.  Support is counted per trace (a trace contributes at most
once to a pattern, however often the pattern occurs inside it).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import VprError
from .step_mapper import KmSubprocess, Step, StepKind


class EmptyDatabase(VprError):
    pass


class InvalidSupport(VprError):
    pass


class EmptySteps(VprError):
    pass


@dataclass(frozen=True)
class StepSequence:
    trace_id: str
    kinds: tuple[StepKind, ...]

    def __post_init__(self):
        if not self.kinds:
            raise ValueError(f"trace {self.trace_id!r} has no steps")


def sequence_from_steps(trace_id: str, steps: Sequence[Step]) -> StepSequence:
    return StepSequence(trace_id=trace_id, kinds=tuple(s.kind for s in steps))


@dataclass(frozen=True)
class Pattern:
    kinds: tuple[StepKind, ...]
    support: int


@dataclass(frozen=True)
class Variant:
    kinds: tuple[StepKind, ...]
    count: int
    trace_ids: tuple[str, ...]


@dataclass(frozen=True)
class Section:
    """A maximal run of consecutive steps sharing one KM subprocess."""

    index: int
    subprocess: KmSubprocess
    title: str
    step_indices: tuple[int, ...]


def _kind_sort_key(kinds: tuple[StepKind, ...]) -> tuple[str, ...]:
    return tuple(k.value for k in kinds)


def mine_patterns(db: Sequence[StepSequence], min_support: int,
                  max_len: int) -> list[Pattern]:
    """All subsequence patterns of length <= max_len with trace-support >=
    min_support, sorted by (support desc, length asc, kinds lexicographic)."""
    if not db:
        raise EmptyDatabase("pattern mining needs at least one trace")
    if min_support < 1 or min_support > len(db):
        raise InvalidSupport(
            f"min_support must be in [1, {len(db)}], got {min_support}")
    if max_len < 1:
        raise InvalidSupport(f"max_len must be >= 1, got {max_len}")

    traces = [seq.kinds for seq in db]
    found: list[Pattern] = []

    def grow(prefix: tuple[StepKind, ...],
             projected: list[tuple[int, int]]) -> None:
        # Count, per candidate item, the traces whose suffix still contains it.
        support: Counter[StepKind] = Counter()
        for trace_idx, pos in projected:
            support.update(set(traces[trace_idx][pos:]))
        for item, count in sorted(support.items(),
                                  key=lambda kv: kv[0].value):
            if count < min_support:
                continue
            grown = prefix + (item,)
            found.append(Pattern(kinds=grown, support=count))
            if len(grown) == max_len:
                continue
            narrowed = []
            for trace_idx, pos in projected:
                trace = traces[trace_idx]
                for j in range(pos, len(trace)):
                    if trace[j] is item:
                        narrowed.append((trace_idx, j + 1))
                        break
            grow(grown, narrowed)

    grow((), [(i, 0) for i in range(len(traces))])
    found.sort(key=lambda p: (-p.support, len(p.kinds), _kind_sort_key(p.kinds)))
    return found


def compute_variants(db: Sequence[StepSequence]) -> list[Variant]:
    """One variant per distinct complete kind-sequence; counts sum to |db|."""
    if not db:
        raise EmptyDatabase("variant analysis needs at least one trace")
    groups: dict[tuple[StepKind, ...], list[str]] = {}
    for seq in db:
        groups.setdefault(seq.kinds, []).append(seq.trace_id)
    variants = [Variant(kinds=kinds, count=len(ids), trace_ids=tuple(ids))
                for kinds, ids in groups.items()]
    variants.sort(key=lambda v: (-v.count, _kind_sort_key(v.kinds)))
    return variants


def default_min_support(db_size: int) -> int:
    return -(-db_size // 2)  # ceil(0.5 * |db|)


DEFAULT_MAX_LEN = 5


def sectionize(steps: Sequence[Step],
               title_fn: Callable[[KmSubprocess, int], str] | None = None,
               ) -> list[Section]:
    """Group steps into maximal runs of equal subprocess."""
    if not steps:
        raise EmptySteps("cannot sectionize an empty step list")
    if title_fn is None:
        title_fn = lambda sub, k: f"{sub.label} ({k} steps)"

    sections: list[Section] = []
    start = 0
    for i in range(1, len(steps) + 1):
        if i < len(steps) and steps[i].subprocess is steps[start].subprocess:
            continue
        indices = tuple(range(start, i))
        sections.append(Section(
            index=len(sections),
            subprocess=steps[start].subprocess,
            title=title_fn(steps[start].subprocess, len(indices)),
            step_indices=indices,
        ))
        start = i
    return sections
