"""Emit a VprDocument as one of the four prototype formats.

P1: textual list of steps            P2: pictorial panels
P3: textual list + contextual data   P4: pictorial panels + contextual data

The interactive output is a single self-contained HTML file: styles, the
serialized document payload (script block ``vpr-data``) and the viewer
runtime are all inlined, and screenshots are base64-embedded by default so
the file opens offline with zero network requests.  The static output is a
plain SVG of the same layout without interactivity.

P1 and P3 renders differ only by added context lines (same for P2/P4), so
caption text is guaranteed identical across the with/without-context pair.
"""

from __future__ import annotations

import base64
import html
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

from .errors import VprError
from .step_mapper import PLAIN_LABELS, KmSubprocess
from .vpr_model import VprDocument, build_panels, glyph_for, serialize_document

FORMATS = ("P1", "P2", "P3", "P4")
OUTPUT_KINDS = ("InteractiveDocument", "StaticVector")


class UnresolvedAsset(VprError):
    def __init__(self, paths: list[str]):
        super().__init__("unresolved asset(s): " + ", ".join(paths))
        self.paths = paths


class UnsupportedFormatCombination(VprError):
    """Reserved: format/output combinations degrade gracefully instead."""


class EmptyDocument(VprError):
    pass


# Section colors: one shade per KM subprocess, hue shared per parent process
# (blue = Access, green = Store, amber = Sharing, purple = Application).
PALETTES: dict[str, dict[KmSubprocess, str]] = {
    "km4": {
        KmSubprocess.NAVIGATION: "#1d4ed8",
        KmSubprocess.SEARCH: "#3b82f6",
        KmSubprocess.FILLING_INFORMATION: "#15803d",
        KmSubprocess.UPLOADING_RESOURCES: "#22c55e",
        KmSubprocess.DOCUMENT_ANNOTATION: "#b45309",
        KmSubprocess.HIGHLIGHT_INFORMATION: "#f59e0b",
        KmSubprocess.INTERACT_WITH_RESOURCES: "#7e22ce",
        KmSubprocess.RELY_ON_RECOMMENDATIONS: "#a855f7",
        KmSubprocess.NO_PROCESS: "#6b7280",
    },
}


@dataclass(frozen=True)
class RenderConfig:
    format: str = "P1"
    embed_assets: bool = True
    color_scheme: str = "km4"
    section_colors: bool = True
    output_kind: str = "InteractiveDocument"
    asset_dir: str | None = None

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.output_kind not in OUTPUT_KINDS:
            raise ValueError(f"output_kind must be one of {OUTPUT_KINDS}")
        if self.color_scheme not in PALETTES:
            raise ValueError(f"unknown color scheme {self.color_scheme!r}")

    @property
    def include_context(self) -> bool:
        return self.format in ("P3", "P4")

    @property
    def pictorial(self) -> bool:
        return self.format in ("P2", "P4")


def default_runtime_js() -> str:
    """Viewer runtime bundle: the built bundle if installed, else the stub."""
    assets = resources.files("vprkit").joinpath("assets")
    bundle = assets.joinpath("viewer.bundle.js")
    if bundle.is_file():
        return bundle.read_text(encoding="utf-8")
    return assets.joinpath("viewer.stub.js").read_text(encoding="utf-8")


def stub_runtime_js() -> str:
    return (resources.files("vprkit").joinpath("assets/viewer.stub.js")
            .read_text(encoding="utf-8"))


_CSS = """
:root { --accent: #dc2626; --ink: #1f2430; --muted: #5b6472; --line: #e3e6ea; }
* { box-sizing: border-box; }
body { margin: 0; font: 16px/1.55 system-ui, sans-serif; color: var(--ink); background: #f6f7f9; }
.wrap { max-width: 760px; margin: 0 auto; padding: 0 16px 64px; }
header.doc { padding: 28px 0 8px; }
header.doc h1 { margin: 0 0 4px; font-size: 1.6rem; }
header.doc .meta { color: var(--muted); margin: 0; font-size: .9rem; }
.common-path { margin: 10px 0 0; font-size: .85rem; color: var(--muted); }
.common-path .chip { display: inline-block; border: 1px solid var(--line); border-radius: 999px; padding: 1px 10px; margin: 0 4px 4px 0; background: #fff; }
nav.overview { position: sticky; top: 0; display: flex; flex-wrap: wrap; gap: 6px; padding: 10px 0; background: #f6f7f9ee; border-bottom: 1px solid var(--line); z-index: 5; }
.ov-entry { --sec: #6b7280; display: inline-flex; align-items: center; gap: 6px; padding: 3px 10px; border-radius: 999px; border: 1px solid var(--line); background: #fff; color: var(--ink); text-decoration: none; font-size: .82rem; }
.ov-entry .ov-dot { width: 10px; height: 10px; border-radius: 50%; background: var(--sec); }
.ov-entry.active { border-color: var(--sec); box-shadow: inset 0 0 0 1px var(--sec); }
.ov-entry.done .ov-label::after { content: " \\2713"; color: #16a34a; }
.ov-progress { color: var(--muted); font-size: .75rem; }
section.sec { margin-top: 28px; }
section.sec > h2 { --sec: #6b7280; font-size: 1.05rem; margin: 0 0 10px; padding-left: 10px; border-left: 5px solid var(--sec); }
ol.steps { margin: 0; padding-left: 28px; }
ol.steps li.step { margin: 6px 0; padding: 6px 8px 6px 4px; border-radius: 6px; background: #fff; border: 1px solid var(--line); }
li.step.emphasized, figure.panel.emphasized { border-left: 4px solid var(--accent); }
li.step.completed .cap, figure.panel.completed figcaption .cap { text-decoration: line-through; color: var(--muted); }
.panels { display: grid; grid-template-columns: repeat(auto-fill, minmax(200px, 1fr)); gap: 12px; }
figure.panel { margin: 0; padding: 12px; background: #fff; border: 1px solid var(--line); border-radius: 10px; }
figure.panel svg.glyph { width: 40px; height: 40px; color: #334155; }
figure.panel figcaption { margin-top: 6px; font-size: .92rem; }
figure.panel .num, li.step .num { color: var(--muted); font-weight: 600; margin-right: 6px; }
.context { margin-top: 8px; padding-top: 6px; border-top: 1px dashed var(--line); font-size: .85rem; }
.context img.shot { max-width: 160px; max-height: 110px; border: 1px solid var(--line); border-radius: 4px; margin: 2px 6px 2px 0; vertical-align: top; cursor: zoom-in; }
.context a.ctx-link { display: inline-block; margin-right: 10px; color: #1d4ed8; word-break: break-all; }
.context mark.ctx-hl { background: #fef08a; padding: 0 3px; }
.context .ctx-note { display: block; color: #7c5c10; font-style: italic; }
body.ctx-off .context { display: none; }
.check { float: right; margin-left: 8px; font-size: .8rem; border: 1px solid var(--line); background: #fff; border-radius: 4px; cursor: pointer; }
.vpr-error-banner { background: #fee2e2; color: #991b1b; padding: 12px 16px; border: 1px solid #fca5a5; border-radius: 6px; margin: 16px 0; }
.vpr-zoom-overlay { position: fixed; inset: 0; background: #0009; display: flex; align-items: center; justify-content: center; z-index: 50; cursor: zoom-out; }
.vpr-zoom-overlay img { max-width: 92vw; max-height: 92vh; border-radius: 6px; background: #fff; }
.toolbar { margin: 10px 0 0; }
.toolbar button { font-size: .82rem; padding: 3px 10px; border: 1px solid var(--line); background: #fff; border-radius: 999px; cursor: pointer; }
"""


def _palette(cfg: RenderConfig) -> dict[KmSubprocess, str]:
    return PALETTES[cfg.color_scheme]


def _fmt_created(ms: int) -> str:
    dt = datetime.fromtimestamp(ms / 1000, tz=timezone.utc)
    return dt.strftime("%Y-%m-%d %H:%M UTC")


def render_overview(doc: VprDocument, cfg: RenderConfig | None = None) -> str:
    """Overview navigation strip: one anchor per section, in order."""
    cfg = cfg or RenderConfig()
    palette = _palette(cfg)
    parts = ['<nav class="overview" id="overview">']
    for sec in doc.sections:
        style = (f' style="--sec:{palette[sec.subprocess]}"'
                 if cfg.section_colors else "")
        parts.append(
            f'<a class="ov-entry" href="#section-{sec.index}"'
            f' data-section="{sec.index}"{style}>'
            f'<span class="ov-dot"></span>'
            f'<span class="ov-label">{html.escape(sec.title)}</span>'
            f'<span class="ov-progress"></span></a>'
        )
    parts.append("</nav>")
    return "\n".join(parts)


def _resolve_asset_src(ref: str, cfg: RenderConfig,
                       missing: list[str]) -> str:
    if not cfg.embed_assets:
        base = cfg.asset_dir if cfg.asset_dir else "assets"
        return f"{Path(base).as_posix()}/{ref}"
    if cfg.asset_dir is None:
        missing.append(ref)
        return ""
    path = Path(cfg.asset_dir) / ref
    if not path.is_file():
        missing.append(str(path))
        return ""
    payload = base64.b64encode(path.read_bytes()).decode("ascii")
    suffix = path.suffix.lstrip(".").lower() or "png"
    if suffix == "jpg":
        suffix = "jpeg"
    if suffix == "svg":
        suffix = "svg+xml"
    return f"data:image/{suffix};base64,{payload}"


def _context_line(step, cfg: RenderConfig, missing: list[str]) -> str:
    """One context block per step, on a single line so that with/without
    context renders differ by whole added lines only."""
    bits = [f'<a class="ctx-link primary" href="{html.escape(step.primary_url, quote=True)}">'
            f'{html.escape(step.primary_url)}</a>']
    for asset in step.context:
        if asset.kind == "Screenshot":
            src = _resolve_asset_src(asset.payload, cfg, missing)
            bits.append(f'<img class="shot" alt="screenshot {html.escape(asset.payload, quote=True)}"'
                        f' src="{src}">')
        elif asset.kind == "Link":
            url = html.escape(asset.payload, quote=True)
            bits.append(f'<a class="ctx-link" href="{url}">{html.escape(asset.payload)}</a>')
        elif asset.kind == "HighlightedText":
            bits.append(f'<mark class="ctx-hl">{html.escape(asset.payload)}</mark>')
        elif asset.kind == "Annotation":
            bits.append(f'<span class="ctx-note">Note: {html.escape(asset.payload)}</span>')
    return '<div class="context">' + "".join(bits) + "</div>"


def _common_path_fragment(doc: VprDocument) -> str:
    if not doc.patterns:
        return ""
    top_support = max(p.support for p in doc.patterns)
    candidates = [p for p in doc.patterns if p.support == top_support]
    best = max(candidates, key=lambda p: (len(p.kinds),
                                          tuple(k.value for k in p.kinds)))
    chips = "".join(f'<span class="chip">{html.escape(PLAIN_LABELS[k])}</span>'
                    for k in best.kinds)
    note = ""
    if len(doc.variants) > 1:
        note = (f'<span class="variant-note">{len(doc.variants)} variants'
                " observed</span>")
    return (f'<p class="common-path">Common path '
            f'(seen in {best.support} trace{"s" if best.support != 1 else ""}): '
            f"{chips}{note}</p>")


def _render_html(doc: VprDocument, cfg: RenderConfig, runtime_js: str) -> bytes:
    palette = _palette(cfg)
    missing: list[str] = []
    panels = build_panels(doc, cfg.include_context)
    emphasized = set(doc.decision_points)

    out: list[str] = []
    push = out.append
    push("<!DOCTYPE html>")
    push('<html lang="en">')
    push("<head>")
    push('<meta charset="utf-8">')
    push('<meta name="viewport" content="width=device-width, initial-scale=1">')
    push(f"<title>{html.escape(doc.title)}</title>")
    push(f"<style>{_CSS}</style>")
    push("</head>")
    push("<body>")
    push('<div class="wrap">')
    push('<header class="doc">')
    push(f"<h1>{html.escape(doc.title)}</h1>")
    meta = f"Expert workflow of {html.escape(doc.actor_id)}" if doc.actor_id else "Expert workflow"
    push(f'<p class="meta">{meta} &middot; captured {_fmt_created(doc.created_at)} '
         f"&middot; {len(doc.steps)} steps in {len(doc.sections)} sections</p>")
    common = _common_path_fragment(doc)
    if common:
        push(common)
    push("</header>")
    push(render_overview(doc, cfg))
    push('<div class="toolbar" id="toolbar"></div>')
    push("<main>")

    for sec in doc.sections:
        style = (f' style="--sec:{palette[sec.subprocess]}"'
                 if cfg.section_colors else "")
        push(f'<section class="sec" id="section-{sec.index}" '
             f'data-section="{sec.index}">')
        push(f"<h2{style}>{html.escape(sec.title)}</h2>")
        if not cfg.pictorial:
            push(f'<ol class="steps" start="{sec.step_indices[0] + 1}">')
            for idx in sec.step_indices:
                step = doc.steps[idx]
                classes = "step emphasized" if idx in emphasized else "step"
                push(f'<li class="{classes}" data-step="{idx}">'
                     f'<span class="cap">{html.escape(step.summary)}</span></li>')
                if cfg.include_context:
                    push(_context_line(step, cfg, missing))
            push("</ol>")
        else:
            push('<div class="panels">')
            for idx in sec.step_indices:
                step = doc.steps[idx]
                panel = panels[idx]
                classes = "panel emphasized" if panel.emphasized else "panel"
                glyph = glyph_for(step.kind)
                push(f'<figure class="{classes}" data-step="{idx}">'
                     f'<svg class="glyph" viewBox="0 0 24 24" role="img" '
                     f'aria-label="{html.escape(glyph.symbol_id, quote=True)}">'
                     f"{glyph.vector_markup}</svg>"
                     f'<figcaption><span class="num">{idx + 1}</span>'
                     f'<span class="cap">{html.escape(panel.caption)}</span>'
                     f"</figcaption></figure>")
                if cfg.include_context:
                    push(_context_line(step, cfg, missing))
            push("</div>")
        push("</section>")

    push("</main>")
    push("</div>")

    if missing:
        raise UnresolvedAsset(sorted(set(missing)))

    payload = serialize_document(doc).decode("utf-8").replace("</", "<\\/")
    push(f'<script type="application/json" id="vpr-data">{payload}</script>')
    push(f'<script id="vpr-runtime">{runtime_js}</script>')
    push("</body>")
    push("</html>")
    return ("\n".join(out) + "\n").encode("utf-8")


# --- Static vector output ---------------------------------------------------

_SVG_W = 900
_PANEL_W = 260
_PANEL_H = 96


def _svg_text(x: int, y: int, text: str, cls: str) -> str:
    return f'<text x="{x}" y="{y}" class="{cls}">{html.escape(text)}</text>'


def _render_svg(doc: VprDocument, cfg: RenderConfig) -> bytes:
    palette = _palette(cfg)
    emphasized = set(doc.decision_points)
    body: list[str] = []
    y = 48
    body.append(_svg_text(24, y, doc.title, "title"))
    y += 22
    subtitle = f"{len(doc.steps)} steps in {len(doc.sections)} sections"
    body.append(_svg_text(24, y, subtitle, "muted"))
    y += 24

    # overview strip
    x = 24
    for sec in doc.sections:
        w = 14 + 7 * len(sec.title)
        if x + w > _SVG_W - 24:
            x, y = 24, y + 30
        color = palette[sec.subprocess] if cfg.section_colors else "#6b7280"
        body.append(f'<rect x="{x}" y="{y - 14}" width="{w}" height="22" rx="11" '
                    f'fill="{color}" fill-opacity="0.15" stroke="{color}"/>')
        body.append(_svg_text(x + 7, y + 2, sec.title, "ov"))
        x += w + 8
    y += 40

    for sec in doc.sections:
        color = palette[sec.subprocess] if cfg.section_colors else "#6b7280"
        body.append(f'<rect x="24" y="{y - 16}" width="5" height="20" fill="{color}"/>')
        body.append(_svg_text(38, y, sec.title, "sec"))
        y += 16

        if cfg.pictorial:
            x = 38
            row_h = 0
            for idx in sec.step_indices:
                step = doc.steps[idx]
                if x + _PANEL_W > _SVG_W - 24:
                    x, y = 38, y + _PANEL_H + 12
                stroke = "#dc2626" if idx in emphasized else "#c9ced6"
                weight = ' stroke-width="2.5"' if idx in emphasized else ""
                body.append(f'<rect x="{x}" y="{y}" width="{_PANEL_W}" height="{_PANEL_H}"'
                            f' rx="10" fill="#ffffff" stroke="{stroke}"{weight}/>')
                glyph = glyph_for(step.kind)
                body.append(f'<g transform="translate({x + 12},{y + 12})" color="#334155">'
                            f'<svg width="32" height="32" viewBox="0 0 24 24">'
                            f"{glyph.vector_markup}</svg></g>")
                caption = f"{idx + 1}. {step.summary}"
                body.append(_svg_text(x + 12, y + 66, _clip(caption, 34), "cap"))
                if cfg.include_context and step.context:
                    body.append(_svg_text(x + 12, y + 84,
                                          _clip(_context_summary(step), 34), "ctx"))
                x += _PANEL_W + 12
                row_h = _PANEL_H
            y += row_h + 28 if row_h else 8
        else:
            for idx in sec.step_indices:
                step = doc.steps[idx]
                cls = "cap emph" if idx in emphasized else "cap"
                body.append(_svg_text(44, y, f"{idx + 1}. {step.summary}", cls))
                y += 20
                if cfg.include_context and step.context:
                    body.append(_svg_text(60, y, _clip(_context_summary(step), 90), "ctx"))
                    y += 18
            y += 16

    height = y + 24
    css = ("text { font-family: system-ui, sans-serif; fill: #1f2430; }"
           ".title { font-size: 22px; font-weight: 700; }"
           ".sec { font-size: 15px; font-weight: 600; }"
           ".ov { font-size: 12px; } .cap { font-size: 13px; }"
           ".emph { fill: #dc2626; font-weight: 600; }"
           ".muted { font-size: 12px; fill: #5b6472; }"
           ".ctx { font-size: 11px; fill: #5b6472; font-style: italic; }")
    svg = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" '
           f'height="{height}" viewBox="0 0 {_SVG_W} {height}">'
           f"<style>{css}</style>"
           f'<rect width="{_SVG_W}" height="{height}" fill="#f6f7f9"/>'
           + "".join(body) + "</svg>\n")
    return svg.encode("utf-8")


def _clip(text: str, limit: int) -> str:
    return text if len(text) <= limit else text[: limit - 3] + "..."


def _context_summary(step) -> str:
    counts: dict[str, int] = {}
    for a in step.context:
        counts[a.kind] = counts.get(a.kind, 0) + 1
    parts = [f"{n} {kind.lower()}{'s' if n > 1 else ''}"
             for kind, n in sorted(counts.items())]
    return "context: " + ", ".join(parts)


def render(doc: VprDocument, cfg: RenderConfig,
           runtime_js: str | None = None) -> bytes:
    """Render the document per the config; byte-deterministic for fixed
    (doc, cfg, runtime bundle)."""
    if not doc.steps:
        raise EmptyDocument("document has no steps to render")
    if cfg.output_kind == "StaticVector":
        return _render_svg(doc, cfg)
    if runtime_js is None:
        runtime_js = default_runtime_js()
    return _render_html(doc, cfg, runtime_js)
