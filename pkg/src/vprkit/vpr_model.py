"""Renderer-independent document model for a visual process representation.

A VprDocument bundles the ordered steps, their section grouping, mined
patterns and variants, asset references and emphasis metadata.  Documents
serialize to a stable JSON form (``*.vpr.json``) with a mandatory version
field; serialization is byte-deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .errors import VprError
from .pattern_miner import Pattern, Section, Variant
from .step_mapper import ContextAsset, KmSubprocess, Step, StepKind

SCHEMA_NAME = "vpr-document"
SCHEMA_VERSION = 1


class InconsistentSections(VprError):
    pass


class MissingTitle(VprError):
    pass


class SchemaVersionMismatch(VprError):
    pass


class CorruptDocument(VprError):
    pass


@dataclass(frozen=True)
class Glyph:
    step_kind: StepKind
    symbol_id: str
    vector_markup: str  # inline SVG fragment, 24x24 viewBox
    caption_template: str


_STROKE = 'fill="none" stroke="currentColor" stroke-width="2" stroke-linecap="round" stroke-linejoin="round"'

_GLYPHS: dict[StepKind, Glyph] = {
    StepKind.NAVIGATE: Glyph(
        StepKind.NAVIGATE, "glyph-navigate",
        f'<g {_STROKE}><circle cx="12" cy="12" r="9"/>'
        '<polygon points="15.5,8.5 13.5,13.5 8.5,15.5 10.5,10.5" fill="currentColor" stroke="none"/></g>',
        "Go to {target}"),
    StepKind.SEARCH: Glyph(
        StepKind.SEARCH, "glyph-search",
        f'<g {_STROKE}><circle cx="10" cy="10" r="6"/><line x1="14.5" y1="14.5" x2="20" y2="20"/></g>',
        "Find {target}"),
    StepKind.FILL: Glyph(
        StepKind.FILL, "glyph-fill",
        f'<g {_STROKE}><rect x="4" y="4" width="16" height="16" rx="2"/>'
        '<line x1="7" y1="9" x2="17" y2="9"/><line x1="7" y1="13" x2="17" y2="13"/>'
        '<line x1="7" y1="17" x2="13" y2="17"/></g>',
        "Fill in {target}"),
    StepKind.UPLOAD: Glyph(
        StepKind.UPLOAD, "glyph-upload",
        f'<g {_STROKE}><path d="M4 17v3h16v-3"/><line x1="12" y1="4" x2="12" y2="14"/>'
        '<polyline points="8,8 12,4 16,8"/></g>',
        "Upload {target}"),
    StepKind.ANNOTATE: Glyph(
        StepKind.ANNOTATE, "glyph-annotate",
        f'<g {_STROKE}><path d="M5 3h10l4 4v14H5z"/><path d="M9 15l6-6 2 2-6 6H9z"/></g>',
        "Annotate {target}"),
    StepKind.HIGHLIGHT: Glyph(
        StepKind.HIGHLIGHT, "glyph-highlight",
        f'<g {_STROKE}><path d="M8 14l7-7 3 3-7 7H8z"/><line x1="4" y1="20" x2="20" y2="20"/></g>',
        "Highlight {target}"),
    StepKind.APPLY_RESOURCE: Glyph(
        StepKind.APPLY_RESOURCE, "glyph-apply-resource",
        f'<g {_STROKE}><circle cx="12" cy="12" r="9"/>'
        '<polygon points="10,8 16,12 10,16" fill="currentColor" stroke="none"/></g>',
        "Use resource {target}"),
    StepKind.APPLY_RECOMMENDATION: Glyph(
        StepKind.APPLY_RECOMMENDATION, "glyph-apply-recommendation",
        '<g fill="currentColor"><path d="M12 3l2.2 6.2L20 12l-5.8 2.8L12 21l-2.2-6.2L4 12l5.8-2.8z"/></g>',
        "Follow suggestion {target}"),
    StepKind.UNKNOWN: Glyph(
        StepKind.UNKNOWN, "glyph-unknown",
        f'<g {_STROKE}><path d="M9 9a3 3 0 1 1 4.5 2.6c-1 .6-1.5 1.2-1.5 2.4"/>'
        '<line x1="12" y1="17.5" x2="12" y2="17.6"/></g>',
        "Other action {target}"),
}


def glyph_for(kind: StepKind) -> Glyph:
    """Total lookup from step kind to its pictographic glyph."""
    return _GLYPHS[kind]


@dataclass(frozen=True)
class Panel:
    step_index: int
    glyph: str  # symbol_id
    caption: str
    emphasized: bool
    context_visible: bool


@dataclass(frozen=True)
class VprDocument:
    title: str
    actor_id: str
    sections: tuple[Section, ...]
    steps: tuple[Step, ...]
    patterns: tuple[Pattern, ...]
    variants: tuple[Variant, ...]
    assets: dict[str, str]  # screenshot ref -> relative path in asset dir
    decision_points: tuple[int, ...]
    created_at: int  # milliseconds since epoch


def _check_consistency(steps: Sequence[Step], sections: Sequence[Section]) -> None:
    covered: list[int] = []
    for section in sections:
        for idx in section.step_indices:
            if idx < 0 or idx >= len(steps):
                raise InconsistentSections(
                    f"section {section.index} references step {idx} "
                    f"but only {len(steps)} steps exist")
            if steps[idx].subprocess is not section.subprocess:
                raise InconsistentSections(
                    f"step {idx} has subprocess {steps[idx].subprocess.value}, "
                    f"section {section.index} expects {section.subprocess.value}")
        covered.extend(section.step_indices)
    if covered != list(range(len(steps))):
        raise InconsistentSections("sections do not partition the step range")


def build_document(steps: Sequence[Step], sections: Sequence[Section],
                   patterns: Sequence[Pattern], variants: Sequence[Variant],
                   title: str, asset_dir: str | None = None, *,
                   actor_id: str = "") -> VprDocument:
    """Assemble and validate a document.

    Decision points are the first step of every section whose parent KM
    process differs from the previous section's parent (the opening section
    always qualifies); they get the emphasis treatment when rendered.
    """
    if not title:
        raise MissingTitle("document title must be non-empty")
    _check_consistency(steps, sections)

    decision_points: list[int] = []
    previous_parent: object = ()  # sentinel distinct from any parent incl. None
    for section in sections:
        parent = section.subprocess.parent
        if parent != previous_parent:
            decision_points.append(section.step_indices[0])
        previous_parent = parent

    # Asset table keeps relative refs; bytes are resolved against the asset
    # directory at render time, never embedded here.
    assets: dict[str, str] = {}
    for step in steps:
        for asset in step.context:
            if asset.kind == "Screenshot" and asset.payload not in assets:
                assets[asset.payload] = asset.payload

    return VprDocument(
        title=title,
        actor_id=actor_id,
        sections=tuple(sections),
        steps=tuple(steps),
        patterns=tuple(patterns),
        variants=tuple(variants),
        assets=assets,
        decision_points=tuple(decision_points),
        created_at=max(s.end_ts for s in steps),
    )


def build_panels(doc: VprDocument, context_visible: bool) -> list[Panel]:
    """One panel per step, in step order."""
    emphasized = set(doc.decision_points)
    return [Panel(step_index=s.index,
                  glyph=glyph_for(s.kind).symbol_id,
                  caption=s.summary,
                  emphasized=s.index in emphasized,
                  context_visible=context_visible)
            for s in doc.steps]


def _step_to_dict(s: Step) -> dict:
    return {
        "index": s.index,
        "kind": s.kind.value,
        "subprocess": s.subprocess.value,
        "event_span": list(s.event_span),
        "primary_url": s.primary_url,
        "summary": s.summary,
        "start_ts": s.start_ts,
        "end_ts": s.end_ts,
        "context": [
            {"kind": a.kind, "payload": a.payload,
             "anchor": list(a.anchor) if a.anchor else None}
            for a in s.context
        ],
    }


def serialize_document(doc: VprDocument) -> bytes:
    payload = {
        "schema": SCHEMA_NAME,
        "version": SCHEMA_VERSION,
        "title": doc.title,
        "actor_id": doc.actor_id,
        "created_at": doc.created_at,
        "steps": [_step_to_dict(s) for s in doc.steps],
        "sections": [
            {"index": sec.index, "subprocess": sec.subprocess.value,
             "title": sec.title, "step_indices": list(sec.step_indices)}
            for sec in doc.sections
        ],
        "patterns": [
            {"kinds": [k.value for k in p.kinds], "support": p.support}
            for p in doc.patterns
        ],
        "variants": [
            {"kinds": [k.value for k in v.kinds], "count": v.count,
             "trace_ids": list(v.trace_ids)}
            for v in doc.variants
        ],
        "assets": doc.assets,
        "decision_points": list(doc.decision_points),
    }
    return (json.dumps(payload, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def deserialize_document(data: bytes | str) -> VprDocument:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        payload = json.loads(data)
    except json.JSONDecodeError as exc:
        raise CorruptDocument(f"invalid JSON: {exc.msg}") from None
    if not isinstance(payload, dict) or payload.get("schema") != SCHEMA_NAME:
        raise CorruptDocument("not a vpr document")
    if payload.get("version") != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"expected version {SCHEMA_VERSION}, got {payload.get('version')!r}")

    try:
        steps = tuple(
            Step(
                index=s["index"],
                kind=StepKind(s["kind"]),
                subprocess=KmSubprocess(s["subprocess"]),
                event_span=tuple(s["event_span"]),
                primary_url=s["primary_url"],
                summary=s["summary"],
                start_ts=s["start_ts"],
                end_ts=s["end_ts"],
                context=tuple(
                    ContextAsset(kind=a["kind"], payload=a["payload"],
                                 anchor=tuple(a["anchor"]) if a.get("anchor") else None)
                    for a in s["context"]
                ),
            )
            for s in payload["steps"]
        )
        sections = tuple(
            Section(index=sec["index"],
                    subprocess=KmSubprocess(sec["subprocess"]),
                    title=sec["title"],
                    step_indices=tuple(sec["step_indices"]))
            for sec in payload["sections"]
        )
        patterns = tuple(
            Pattern(kinds=tuple(StepKind(k) for k in p["kinds"]),
                    support=p["support"])
            for p in payload["patterns"]
        )
        variants = tuple(
            Variant(kinds=tuple(StepKind(k) for k in v["kinds"]),
                    count=v["count"], trace_ids=tuple(v["trace_ids"]))
            for v in payload["variants"]
        )
        doc = VprDocument(
            title=payload["title"],
            actor_id=payload["actor_id"],
            sections=sections,
            steps=steps,
            patterns=patterns,
            variants=variants,
            assets=dict(payload["assets"]),
            decision_points=tuple(payload["decision_points"]),
            created_at=payload["created_at"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptDocument(f"malformed document field: {exc}") from None

    if not doc.title:
        raise CorruptDocument("document title must be non-empty")
    try:
        _check_consistency(doc.steps, doc.sections)
    except InconsistentSections as exc:
        raise CorruptDocument(str(exc)) from None
    return doc
