"""Coalesce raw events into labeled process steps and classify them into
knowledge-management subprocesses.

Classification is rule-driven: an ordered list of first-match-wins rules maps
each event to a step kind, then maximal runs of events with the same kind,
same URL host+path and small inter-event gaps merge into one step.
"""

from __future__ import annotations

import dataclasses
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from urllib.parse import urlsplit

from .errors import VprError
from .event_log import EmptyLog, EventKind, EventLog, RawEvent


class StepKind(Enum):
    NAVIGATE = "NAVIGATE"
    SEARCH = "SEARCH"
    FILL = "FILL"
    UPLOAD = "UPLOAD"
    ANNOTATE = "ANNOTATE"
    HIGHLIGHT = "HIGHLIGHT"
    APPLY_RESOURCE = "APPLY_RESOURCE"
    APPLY_RECOMMENDATION = "APPLY_RECOMMENDATION"
    UNKNOWN = "UNKNOWN"


class KmProcess(Enum):
    ACCESS = "Access"
    STORE = "Store"
    SHARING = "Sharing"
    APPLICATION = "Application"

    @property
    def label(self) -> str:
        return f"Knowledge {self.value}"


class KmSubprocess(Enum):
    NAVIGATION = "Navigation"
    SEARCH = "Search"
    FILLING_INFORMATION = "FillingInformation"
    UPLOADING_RESOURCES = "UploadingResources"
    DOCUMENT_ANNOTATION = "DocumentAnnotation"
    HIGHLIGHT_INFORMATION = "HighlightInformation"
    INTERACT_WITH_RESOURCES = "InteractWithResources"
    RELY_ON_RECOMMENDATIONS = "RelyOnRecommendations"
    NO_PROCESS = "NoProcess"

    @property
    def parent(self) -> KmProcess | None:
        return _SUBPROCESS_PARENT[self]

    @property
    def label(self) -> str:
        return _SUBPROCESS_LABEL[self]


_SUBPROCESS_PARENT = {
    KmSubprocess.NAVIGATION: KmProcess.ACCESS,
    KmSubprocess.SEARCH: KmProcess.ACCESS,
    KmSubprocess.FILLING_INFORMATION: KmProcess.STORE,
    KmSubprocess.UPLOADING_RESOURCES: KmProcess.STORE,
    KmSubprocess.DOCUMENT_ANNOTATION: KmProcess.SHARING,
    KmSubprocess.HIGHLIGHT_INFORMATION: KmProcess.SHARING,
    KmSubprocess.INTERACT_WITH_RESOURCES: KmProcess.APPLICATION,
    KmSubprocess.RELY_ON_RECOMMENDATIONS: KmProcess.APPLICATION,
    KmSubprocess.NO_PROCESS: None,
}

_SUBPROCESS_LABEL = {
    KmSubprocess.NAVIGATION: "Navigation",
    KmSubprocess.SEARCH: "Search",
    KmSubprocess.FILLING_INFORMATION: "Filling information",
    KmSubprocess.UPLOADING_RESOURCES: "Uploading resources",
    KmSubprocess.DOCUMENT_ANNOTATION: "Document annotation",
    KmSubprocess.HIGHLIGHT_INFORMATION: "Highlight information",
    KmSubprocess.INTERACT_WITH_RESOURCES: "Interact with resources",
    KmSubprocess.RELY_ON_RECOMMENDATIONS: "Rely on recommendations",
    KmSubprocess.NO_PROCESS: "No process",
}

_TAXONOMY = {
    StepKind.NAVIGATE: KmSubprocess.NAVIGATION,
    StepKind.SEARCH: KmSubprocess.SEARCH,
    StepKind.FILL: KmSubprocess.FILLING_INFORMATION,
    StepKind.UPLOAD: KmSubprocess.UPLOADING_RESOURCES,
    StepKind.ANNOTATE: KmSubprocess.DOCUMENT_ANNOTATION,
    StepKind.HIGHLIGHT: KmSubprocess.HIGHLIGHT_INFORMATION,
    StepKind.APPLY_RESOURCE: KmSubprocess.INTERACT_WITH_RESOURCES,
    StepKind.APPLY_RECOMMENDATION: KmSubprocess.RELY_ON_RECOMMENDATIONS,
    StepKind.UNKNOWN: KmSubprocess.NO_PROCESS,
}

# Plain-language labels surfaced to end users in captions and renders.
PLAIN_LABELS = {
    StepKind.NAVIGATE: "Go to",
    StepKind.SEARCH: "Find",
    StepKind.FILL: "Fill in",
    StepKind.UPLOAD: "Upload",
    StepKind.ANNOTATE: "Annotate",
    StepKind.HIGHLIGHT: "Highlight",
    StepKind.APPLY_RESOURCE: "Use resource",
    StepKind.APPLY_RECOMMENDATION: "Follow suggestion",
    StepKind.UNKNOWN: "Other action",
}


def taxonomy(kind: StepKind) -> KmSubprocess:
    """Fixed total mapping from step kind to KM subprocess."""
    return _TAXONOMY[kind]


class AssetDirMissing(VprError):
    pass


@dataclass(frozen=True)
class ContextAsset:
    kind: str  # Screenshot | Link | Annotation | HighlightedText
    payload: str
    anchor: tuple[int, int] | None = None


@dataclass(frozen=True)
class Step:
    """A maximal contiguous run of events sharing one classified action."""

    index: int
    kind: StepKind
    subprocess: KmSubprocess
    event_span: tuple[int, int]  # half-open range into the source log
    primary_url: str
    summary: str
    start_ts: int
    end_ts: int
    context: tuple[ContextAsset, ...] = ()

    def __post_init__(self):
        if self.event_span[0] >= self.event_span[1]:
            raise ValueError("event_span must be non-empty")
        if self.end_ts < self.start_ts:
            raise ValueError("end_ts must be >= start_ts")
        if self.subprocess is not taxonomy(self.kind):
            raise ValueError("subprocess must agree with taxonomy(kind)")


@dataclass(frozen=True)
class Rule:
    step: StepKind
    on: frozenset[EventKind] | None = None
    url: re.Pattern | None = None
    element: re.Pattern | None = None
    text: re.Pattern | None = None

    def matches(self, e: RawEvent) -> bool:
        if self.on is not None and e.kind not in self.on:
            return False
        if self.url is not None and not self.url.search(e.url):
            return False
        if self.element is not None:
            hit = any(v and self.element.search(v)
                      for v in (e.element_kind, e.element_name))
            if not hit:
                return False
        if self.text is not None:
            if not (e.element_text and self.text.search(e.element_text)):
                return False
        return True


DEFAULT_COALESCE_GAP_MS = 10_000


@dataclass(frozen=True)
class MappingRules:
    """Ordered first-match-wins rules; an UNKNOWN catch-all is implicit."""

    rules: tuple[Rule, ...]
    coalesce_gap_ms: int = DEFAULT_COALESCE_GAP_MS


def _compile(pattern: str | None) -> re.Pattern | None:
    return re.compile(pattern, re.IGNORECASE) if pattern else None


def rules_from_dict(doc: dict) -> MappingRules:
    rules = []
    for i, raw in enumerate(doc.get("rules", [])):
        try:
            step = StepKind(raw["step"])
        except (KeyError, ValueError):
            raise ValueError(f"rule {i}: missing or unknown step kind") from None
        on = None
        if raw.get("on"):
            on = frozenset(EventKind.from_wire(k) for k in raw["on"])
        rules.append(Rule(
            step=step,
            on=on,
            url=_compile(raw.get("url")),
            element=_compile(raw.get("element")),
            text=_compile(raw.get("text")),
        ))
    return MappingRules(
        rules=tuple(rules),
        coalesce_gap_ms=int(doc.get("coalesce_gap_ms", DEFAULT_COALESCE_GAP_MS)),
    )


def load_rules(path: str | Path) -> MappingRules:
    with open(path, encoding="utf-8") as fh:
        return rules_from_dict(json.load(fh))


def default_rules() -> MappingRules:
    doc = json.loads(resources.files("vprkit").joinpath("rules/default.json")
                     .read_text(encoding="utf-8"))
    return rules_from_dict(doc)


def classify_event(e: RawEvent, rules: MappingRules) -> StepKind:
    """Step kind of the first matching rule, else UNKNOWN."""
    for rule in rules.rules:
        if rule.matches(e):
            return rule.step
    return StepKind.UNKNOWN


def _host_path(url: str) -> str:
    parts = urlsplit(url)
    return parts.netloc + parts.path


def _truncate(text: str, limit: int = 40) -> str:
    return text if len(text) <= limit else text[: limit - 3] + "..."


def _summarize(kind: StepKind, events: list[RawEvent]) -> str:
    first = events[0]
    label = PLAIN_LABELS[kind]
    location = _host_path(first.url)

    def element() -> str:
        for e in events:
            if e.element_name:
                return e.element_name
            if e.element_text:
                return _truncate(e.element_text)
        return location

    if kind is StepKind.NAVIGATE:
        body = f"{label} {location}"
    elif kind is StepKind.SEARCH:
        typed = "".join(e.key_value for e in events
                        if e.kind is EventKind.KEYUP and e.key_value
                        and len(e.key_value) == 1)
        body = f"{label} '{typed.strip() or element()}'"
    elif kind is StepKind.FILL:
        body = f"{label} {element()}"
    elif kind is StepKind.UPLOAD:
        body = f"{label} {element()}"
    elif kind is StepKind.ANNOTATE:
        body = f"{label} {element()}"
    elif kind is StepKind.HIGHLIGHT:
        sel = next((e.selected_text for e in events if e.selected_text), "")
        body = f'{label} "{_truncate(sel)}"' if sel else f"{label} text on {location}"
    elif kind in (StepKind.APPLY_RESOURCE, StepKind.APPLY_RECOMMENDATION):
        body = f"{label} '{element()}'"
    else:
        body = f"{label} ({first.kind.value}) on {location}"

    if len(events) > 1:
        body += f" ({len(events)} actions)"
    return body


def map_steps(log: EventLog, rules: MappingRules) -> list[Step]:
    """Partition the event list into steps.

    Consecutive events merge while they share the classified kind, the URL
    host+path, and an inter-event gap of at most ``coalesce_gap_ms``.  A
    SELECT classified HIGHLIGHT is promoted to ANNOTATE when the immediately
    following event is classified ANNOTATE inside the same coalescing window
    (one-step lookahead only).
    """
    events = log.events
    if not events:
        raise EmptyLog("cannot map an empty log")

    kinds = [classify_event(e, rules) for e in events]
    for i in range(len(events) - 1):
        if (kinds[i] is StepKind.HIGHLIGHT
                and events[i].kind is EventKind.SELECT
                and kinds[i + 1] is StepKind.ANNOTATE
                and _host_path(events[i].url) == _host_path(events[i + 1].url)
                and events[i + 1].timestamp - events[i].timestamp <= rules.coalesce_gap_ms):
            kinds[i] = StepKind.ANNOTATE

    steps: list[Step] = []
    start = 0
    for i in range(1, len(events) + 1):
        boundary = i == len(events) or (
            kinds[i] is not kinds[start]
            or _host_path(events[i].url) != _host_path(events[start].url)
            or events[i].timestamp - events[i - 1].timestamp > rules.coalesce_gap_ms
        )
        if not boundary:
            continue
        span = list(events[start:i])
        steps.append(Step(
            index=len(steps),
            kind=kinds[start],
            subprocess=taxonomy(kinds[start]),
            event_span=(start, i),
            primary_url=span[0].url,
            summary=_summarize(kinds[start], span),
            start_ts=span[0].timestamp,
            end_ts=span[-1].timestamp,
        ))
        start = i
    return steps


def attach_context(steps: list[Step], log: EventLog,
                   asset_dir: str | Path) -> list[Step]:
    """Harvest contextual assets from each step's event span.

    Screenshot refs become Screenshot assets, URLs other than the step's
    primary URL become deduplicated Links, selections become HighlightedText
    and new values typed inside ANNOTATE steps become Annotations.  Step
    identity, order and spans are unchanged.
    """
    if not Path(asset_dir).is_dir():
        raise AssetDirMissing(f"asset directory {asset_dir!s} does not exist")

    out: list[Step] = []
    for step in steps:
        assets: list[ContextAsset] = []
        seen_urls = {step.primary_url}
        for e in log.events[step.event_span[0]:step.event_span[1]]:
            if e.screenshot_ref:
                assets.append(ContextAsset("Screenshot", e.screenshot_ref,
                                           anchor=e.coords))
            if e.url not in seen_urls:
                seen_urls.add(e.url)
                assets.append(ContextAsset("Link", e.url))
            if e.selected_text:
                assets.append(ContextAsset("HighlightedText", e.selected_text))
            if (step.kind is StepKind.ANNOTATE and e.kind is EventKind.CHANGE
                    and e.new_value):
                assets.append(ContextAsset("Annotation", e.new_value))
        out.append(dataclasses.replace(step, context=tuple(assets)))
    return out
