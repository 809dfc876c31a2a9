import json

import pytest

from vprkit.event_log import EventKind, EventLog, RawEvent
from vprkit.pattern_miner import sectionize
from vprkit.step_mapper import Step, StepKind, taxonomy
from vprkit.vpr_model import build_document

# Auto-filled kind-conditional fields so tests can build events tersely.
_KIND_DEFAULTS = {
    EventKind.CLICK: {"coords": (10, 20)},
    EventKind.KEYUP: {"key_value": "a"},
    EventKind.SELECT: {"selected_text": "some text"},
    EventKind.SCROLL: {"scroll_dy": 100},
    EventKind.CHANGE: {"new_value": "updated"},
}


def ev(kind: EventKind, ts: int, url: str = "https://lms.example.edu/x",
       actor: str = "T1", **fields) -> RawEvent:
    defaults = dict(_KIND_DEFAULTS.get(kind, {}))
    defaults.update(fields)
    return RawEvent(kind=kind, timestamp=ts, url=url, actor_id=actor, **defaults)


def make_log(events, actor: str = "T1", title: str = "Fixture task") -> EventLog:
    return EventLog(events=tuple(events), actor_id=actor, task_title=title)


def record_line(**kw) -> str:
    record = {"kind": "click", "ts": 1000, "url": "https://lms/x", "actor": "T1",
              "x": 10, "y": 20}
    record.update(kw)
    return json.dumps({k: v for k, v in record.items() if v is not None})


def mk_step(index: int, kind: StepKind, *, url: str = "https://lms.example.edu/x",
            summary: str | None = None, start_ts: int | None = None,
            context=()) -> Step:
    start = start_ts if start_ts is not None else 1000 + index * 1000
    return Step(
        index=index,
        kind=kind,
        subprocess=taxonomy(kind),
        event_span=(index, index + 1),
        primary_url=url,
        summary=summary or f"{kind.value.lower()} step {index}",
        start_ts=start,
        end_ts=start + 500,
        context=tuple(context),
    )


def mk_doc(kinds, title="How to do the task", patterns=(), variants=(), steps=None):
    if steps is None:
        steps = [mk_step(i, k) for i, k in enumerate(kinds)]
    sections = sectionize(steps)
    return build_document(steps, sections, patterns, variants, title,
                          actor_id="expert-1")


@pytest.fixture
def asset_dir(tmp_path):
    d = tmp_path / "assets"
    d.mkdir()
    (d / "s1.png").write_bytes(bytes.fromhex(
        "89504e470d0a1a0a0000000d4948445200000001000000010802000000907753de"
        "0000000c4944415478da633871e2040004b4025928d352ec"
        "0000000049454e44ae426082"))
    return d
