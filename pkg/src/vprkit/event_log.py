"""Parsing, validation and synthesis of captured browser interaction logs.

The wire format is JSON Lines: one event object per line with required keys
``kind``, ``ts`` (UTC milliseconds), ``url`` and ``actor``, plus kind-specific
optional keys (``x``/``y``, ``key``, ``sel``, ``dx``/``dy``, ``val``, ...).
Unknown keys are preserved on the event and round-trip through serialization.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import IO, Iterable

from .errors import VprError


class EventKind(Enum):
    """The closed set of ten interaction kinds a capture may contain."""

    CLICK = "click"
    KEYUP = "keyup"
    SELECT = "select"
    SCROLL = "scroll"
    SWITCH_TAB = "switch-tab"
    FOCUS = "focus"
    CHANGE = "change"
    SUBMIT = "submit"
    NAVIGATE = "navigate"
    CLOSE = "close"

    @classmethod
    def from_wire(cls, value: str) -> "EventKind":
        if value == "switchtab":  # accepted alias for "switch-tab"
            return cls.SWITCH_TAB
        return cls(value)


class MalformedRecord(VprError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class UnknownEventKind(VprError):
    def __init__(self, line_no: int, value: object):
        super().__init__(f"line {line_no}: unknown event kind {value!r}")
        self.line_no = line_no
        self.value = value


class MissingField(VprError):
    def __init__(self, line_no: int, field_name: str):
        super().__init__(f"line {line_no}: missing required field {field_name!r}")
        self.line_no = line_no
        self.field = field_name


class EmptyLog(VprError):
    pass


class UnknownProfile(VprError):
    pass


@dataclass(frozen=True)
class RawEvent:
    """One captured browser interaction."""

    kind: EventKind
    timestamp: int  # milliseconds since epoch, UTC
    url: str
    actor_id: str
    element_name: str | None = None
    element_kind: str | None = None
    element_text: str | None = None
    coords: tuple[int, int] | None = None
    key_value: str | None = None
    selected_text: str | None = None
    scroll_dx: int | None = None
    scroll_dy: int | None = None
    new_value: str | None = None
    screenshot_ref: str | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.timestamp <= 0:
            raise ValueError("timestamp must be positive")
        if not self.url:
            raise ValueError("url must be non-empty")
        if self.coords is not None and (self.coords[0] < 0 or self.coords[1] < 0):
            raise ValueError("coords must be non-negative")


@dataclass(frozen=True)
class EventLog:
    """An immutable, timestamp-ordered sequence of events for one actor."""

    events: tuple[RawEvent, ...]
    actor_id: str
    task_title: str = ""
    capture_notes: str | None = None

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class Diagnostic:
    """A non-fatal finding produced by validate_log."""

    code: str
    message: str
    index: int | None = None


# Fields that must accompany each kind on the wire; scroll needs dx *or* dy.
_KIND_REQUIRES = {
    EventKind.CLICK: ("x", "y"),
    EventKind.KEYUP: ("key",),
    EventKind.SELECT: ("sel",),
    EventKind.CHANGE: ("val",),
}

_OPTIONAL_KEYS = (
    "el_name", "el_kind", "el_text", "x", "y", "key", "sel", "dx", "dy",
    "val", "shot",
)


def _event_from_record(record: dict, line_no: int) -> RawEvent:
    for key in ("kind", "ts", "url", "actor"):
        if key not in record:
            raise MissingField(line_no, key)

    kind_raw = record["kind"]
    if not isinstance(kind_raw, str):
        raise UnknownEventKind(line_no, kind_raw)
    try:
        kind = EventKind.from_wire(kind_raw)
    except ValueError:
        raise UnknownEventKind(line_no, kind_raw) from None

    ts = record["ts"]
    if isinstance(ts, bool) or not isinstance(ts, (int, float)) or ts <= 0:
        raise MalformedRecord(line_no, f"timestamp must be a positive integer, got {ts!r}")

    url = record["url"]
    if not isinstance(url, str) or not url:
        raise MalformedRecord(line_no, "url must be a non-empty string")

    actor = record["actor"]
    if not isinstance(actor, str) or not actor:
        raise MalformedRecord(line_no, "actor must be a non-empty string")

    for required in _KIND_REQUIRES.get(kind, ()):
        if record.get(required) is None:
            raise MissingField(line_no, required)
    if kind is EventKind.SCROLL and record.get("dx") is None and record.get("dy") is None:
        raise MissingField(line_no, "dx")

    coords = None
    if record.get("x") is not None or record.get("y") is not None:
        x, y = record.get("x"), record.get("y")
        if not isinstance(x, int) or not isinstance(y, int) or x < 0 or y < 0:
            raise MalformedRecord(line_no, "x and y must be non-negative integers")
        coords = (x, y)

    for name in ("dx", "dy"):
        value = record.get(name)
        if value is not None and not isinstance(value, int):
            raise MalformedRecord(line_no, f"{name} must be an integer")

    extra = {k: v for k, v in record.items()
             if k not in ("kind", "ts", "url", "actor") and k not in _OPTIONAL_KEYS}
    return RawEvent(
        kind=kind,
        timestamp=int(ts),
        url=url,
        actor_id=actor,
        element_name=record.get("el_name"),
        element_kind=record.get("el_kind"),
        element_text=record.get("el_text"),
        coords=coords,
        key_value=record.get("key"),
        selected_text=record.get("sel"),
        scroll_dx=record.get("dx"),
        scroll_dy=record.get("dy"),
        new_value=record.get("val"),
        screenshot_ref=record.get("shot"),
        extra=extra,
    )


def _iter_lines(source: bytes | str | IO) -> Iterable[str]:
    if isinstance(source, bytes):
        yield from source.decode("utf-8").splitlines()
    elif isinstance(source, str):
        yield from source.splitlines()
    else:
        for line in source:
            yield line.decode("utf-8") if isinstance(line, bytes) else line


def parse_log(source: bytes | str | IO, *, strict: bool = True,
              task_title: str = "") -> EventLog:
    """Parse a JSON-Lines event stream into a timestamp-sorted EventLog.

    Out-of-order input is auto-sorted (stably, preserving input order on
    ties) and noted in ``capture_notes``.  In strict mode any malformed line
    raises; otherwise bad lines are skipped and an empty result is allowed.
    """
    events: list[RawEvent] = []
    skipped = 0
    for line_no, line in enumerate(_iter_lines(source), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            if not isinstance(record, dict):
                raise MalformedRecord(line_no, "record is not an object")
        except json.JSONDecodeError as exc:
            if strict:
                raise MalformedRecord(line_no, f"invalid JSON ({exc.msg})") from None
            skipped += 1
            continue
        except MalformedRecord:
            if strict:
                raise
            skipped += 1
            continue
        try:
            events.append(_event_from_record(record, line_no))
        except VprError:
            if strict:
                raise
            skipped += 1
            continue
        if events[-1].actor_id != events[0].actor_id:
            raise MalformedRecord(
                line_no,
                f"actor {events[-1].actor_id!r} differs from {events[0].actor_id!r}",
            )

    if not events:
        if strict:
            raise EmptyLog("no valid event records in input")
        return EventLog(events=(), actor_id="", task_title=task_title)

    ordered = sorted(events, key=lambda e: e.timestamp)  # sorted() is stable
    notes = []
    if ordered != events:
        out_of_order = sum(1 for a, b in zip(events, events[1:]) if b.timestamp < a.timestamp)
        notes.append(f"input reordered ({out_of_order} out-of-order boundaries)")
    if skipped:
        notes.append(f"skipped {skipped} invalid lines")

    return EventLog(
        events=tuple(ordered),
        actor_id=ordered[0].actor_id,
        task_title=task_title,
        capture_notes="; ".join(notes) if notes else None,
    )


def serialize_log(log: EventLog) -> bytes:
    """Serialize to canonical JSON Lines; re-parsing yields an equal log."""
    out = []
    for e in log.events:
        record: dict = {"kind": e.kind.value, "ts": e.timestamp, "url": e.url,
                        "actor": e.actor_id}
        optional = (
            ("el_name", e.element_name), ("el_kind", e.element_kind),
            ("el_text", e.element_text),
            ("x", e.coords[0] if e.coords else None),
            ("y", e.coords[1] if e.coords else None),
            ("key", e.key_value), ("sel", e.selected_text),
            ("dx", e.scroll_dx), ("dy", e.scroll_dy),
            ("val", e.new_value), ("shot", e.screenshot_ref),
        )
        for name, value in optional:
            if value is not None:
                record[name] = value
        for name in sorted(e.extra):
            record[name] = e.extra[name]
        out.append(json.dumps(record, separators=(",", ":"), ensure_ascii=False))
    return ("\n".join(out) + "\n").encode("utf-8")


DEFAULT_IDLE_GAP_MS = 120_000


def validate_log(log: EventLog, *, asset_dir: str | Path | None = None,
                 idle_gap_ms: int = DEFAULT_IDLE_GAP_MS) -> list[Diagnostic]:
    """Return warnings for a parsed log; never raises on content."""
    diagnostics: list[Diagnostic] = []
    for i, (a, b) in enumerate(zip(log.events, log.events[1:])):
        if a.timestamp == b.timestamp:
            diagnostics.append(Diagnostic(
                "duplicate-timestamp",
                f"events {i} and {i + 1} share timestamp {a.timestamp}", i))
        elif b.timestamp - a.timestamp > idle_gap_ms:
            gap_s = (b.timestamp - a.timestamp) / 1000
            diagnostics.append(Diagnostic(
                "idle-gap", f"{gap_s:.1f} s idle before event {i + 1}", i + 1))
    for i, e in enumerate(log.events):
        scheme = e.url.split(":", 1)[0].lower()
        if scheme not in ("http", "https"):
            diagnostics.append(Diagnostic(
                "non-http-url", f"event {i} has URL scheme {scheme!r}", i))
        if e.screenshot_ref and asset_dir is not None:
            if not (Path(asset_dir) / e.screenshot_ref).is_file():
                diagnostics.append(Diagnostic(
                    "dangling-asset",
                    f"screenshot {e.screenshot_ref!r} not found in asset directory", i))
    return diagnostics


# --- Synthetic logs ---------------------------------------------------------
#
# Deterministic fixture generator standing in for the capture extension.
# Each profile is a looped backbone of realistic interaction segments; the
# RNG only varies the texture (burst lengths, gaps, URLs, screenshots).

SYNTH_BASE_TS = 1_740_000_000_000  # fixed origin so outputs are reproducible

_PROFILE_TITLES = {
    "marking_correction": "Documenting marking corrections",
    "poll_creation": "Creating an online poll activity",
}


def _marking_segments():
    lms = "https://lms.example.edu"
    repo = "https://repository.example.edu"
    return [
        ("navigate", lms + "/courses/fit1045/marking"),
        ("scroll", lms + "/courses/fit1045/marking"),
        ("search", repo + "/policies", "grading policy"),
        ("navigate", repo + "/policies/assessment-integrity"),
        ("highlight", repo + "/policies/assessment-integrity"),
        ("annotate", repo + "/policies/assessment-integrity"),
        ("fill", lms + "/courses/fit1045/marking/gradebook", "grade"),
        ("apply_resource", lms + "/help/marking"),
        ("navigate", lms + "/courses/fit1045/students"),
        ("apply_recommendation", repo + "/policies"),
        ("submit", lms + "/courses/fit1045/marking/gradebook"),
    ]


def _poll_segments():
    polls = "https://polls.example.com"
    lms = "https://lms.example.edu"
    return [
        ("navigate", polls + "/dashboard"),
        ("click", polls + "/dashboard", "New poll", "button"),
        ("fill", polls + "/poll/new", "question"),
        ("fill", polls + "/poll/new", "option-1"),
        ("search", polls + "/templates", "quick quiz"),
        ("upload", polls + "/poll/new/upload"),
        ("scroll", polls + "/poll/new"),
        ("fill", polls + "/poll/new", "option-2"),
        ("submit", polls + "/poll/new"),
        ("navigate", lms + "/courses/fit1045/activities"),
    ]


_PROFILE_SEGMENTS = {
    "marking_correction": _marking_segments,
    "poll_creation": _poll_segments,
}


class _SynthState:
    def __init__(self, rng: random.Random, actor: str):
        self.rng = rng
        self.actor = actor
        self.ts = SYNTH_BASE_TS
        self.events: list[RawEvent] = []
        self.shot_count = 0

    def tick(self, lo=300, hi=4000):
        self.ts += self.rng.randint(lo, hi)

    def emit(self, kind: EventKind, url: str, **fields):
        self.tick()
        self.events.append(RawEvent(kind=kind, timestamp=self.ts, url=url,
                                    actor_id=self.actor, **fields))

    def maybe_shot(self) -> str | None:
        if self.rng.random() < 0.3:
            self.shot_count += 1
            return f"shot-{self.shot_count:03d}.png"
        return None


def _emit_segment(state: _SynthState, segment: tuple) -> None:
    rng = state.rng
    name, url = segment[0], segment[1]
    if name == "navigate":
        state.emit(EventKind.NAVIGATE, url)
        for _ in range(rng.randint(0, 2)):
            state.emit(EventKind.SCROLL, url, scroll_dy=rng.randint(-900, 900))
    elif name == "scroll":
        for _ in range(rng.randint(1, 3)):
            state.emit(EventKind.SCROLL, url, scroll_dy=rng.randint(-900, 900))
    elif name == "search":
        query = segment[2]
        state.emit(EventKind.CLICK, url, coords=(rng.randint(0, 1200), rng.randint(0, 700)),
                   element_name="search", element_kind="input",
                   screenshot_ref=state.maybe_shot())
        for ch in query[: rng.randint(4, len(query))]:
            state.emit(EventKind.KEYUP, url, key_value=ch,
                       element_name="search", element_kind="input")
    elif name == "highlight":
        state.emit(EventKind.SELECT, url,
                   selected_text=rng.choice([
                       "submit grades within 10 working days",
                       "late penalty of 5% per day",
                       "moderation meeting before release",
                   ]))
    elif name == "annotate":
        state.emit(EventKind.SELECT, url, selected_text="applies to special consideration")
        state.emit(EventKind.CHANGE, url, element_name="notes", element_kind="textarea",
                   new_value=rng.choice([
                       "check rubric section 2 first",
                       "ask CE before changing any mark",
                       "see last semester's precedent",
                   ]))
    elif name == "fill":
        field_name = segment[2]
        state.emit(EventKind.FOCUS, url, element_name=field_name, element_kind="input")
        for _ in range(rng.randint(3, 8)):
            state.emit(EventKind.KEYUP, url, key_value=rng.choice("abcdefghino rst"),
                       element_name=field_name, element_kind="input")
    elif name == "upload":
        state.emit(EventKind.CHANGE, url, element_name="attachment", element_kind="file",
                   new_value="results.png")
        state.emit(EventKind.SUBMIT, url)
    elif name == "click":
        text, el_kind = segment[2], segment[3]
        state.emit(EventKind.CLICK, url, coords=(rng.randint(0, 1200), rng.randint(0, 700)),
                   element_text=text, element_kind=el_kind,
                   screenshot_ref=state.maybe_shot())
    elif name == "apply_resource":
        state.emit(EventKind.CLICK, url, coords=(rng.randint(0, 1200), rng.randint(0, 700)),
                   element_text="Video tutorial: moderation", element_kind="link")
    elif name == "apply_recommendation":
        state.emit(EventKind.CLICK, url, coords=(rng.randint(0, 1200), rng.randint(0, 700)),
                   element_name="recommended-for-you", element_kind="card")
    elif name == "submit":
        state.emit(EventKind.SUBMIT, url)
        if rng.random() < 0.4:
            state.emit(EventKind.SWITCH_TAB, url)
    else:  # pragma: no cover - segment table is fixed
        raise AssertionError(name)


def synth_log(seed: int, n_events: int, profile: str) -> EventLog:
    """Generate a deterministic synthetic capture for one of the two tasks."""
    if profile not in _PROFILE_SEGMENTS:
        raise UnknownProfile(f"unknown profile {profile!r}; "
                             f"expected one of {sorted(_PROFILE_SEGMENTS)}")
    if n_events <= 0:
        raise EmptyLog("n_events must be positive")

    rng = random.Random(f"{profile}:{seed}")
    state = _SynthState(rng, actor=f"expert-{profile.split('_')[0]}")
    backbone = _PROFILE_SEGMENTS[profile]()
    i = 0
    while len(state.events) < n_events:
        _emit_segment(state, backbone[i % len(backbone)])
        state.tick(2_000, 25_000)  # pause between segments
        i += 1
    return EventLog(
        events=tuple(state.events[:n_events]),
        actor_id=state.actor,
        task_title=_PROFILE_TITLES[profile],
    )
