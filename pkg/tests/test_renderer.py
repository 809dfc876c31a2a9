import difflib
import json
import re
from pathlib import Path

import pytest

from vprkit.renderer import (
    EmptyDocument,
    RenderConfig,
    UnresolvedAsset,
    render,
    render_overview,
    stub_runtime_js,
)
from vprkit.step_mapper import ContextAsset, StepKind
from vprkit.vpr_model import VprDocument, deserialize_document, glyph_for

from conftest import mk_doc, mk_step

N, S, A = StepKind.NAVIGATE, StepKind.SEARCH, StepKind.ANNOTATE

GOLDEN_DIR = Path(__file__).parent / "golden"
STUB = stub_runtime_js()


def fixture_doc(asset_dir=None):
    steps = [
        mk_step(0, N, url="https://lms.example.edu/courses"),
        mk_step(1, S, context=[ContextAsset("Link", "https://repo.example.edu/p?x=2"),
                               ContextAsset("HighlightedText", "grading policy")]),
        mk_step(2, A, context=[ContextAsset("Screenshot", "s1.png", anchor=(3, 4)),
                               ContextAsset("Annotation", "ask the CE first")]),
    ]
    return mk_doc(None, steps=steps)


def cfg(fmt, asset_dir=None, **kw):
    return RenderConfig(format=fmt, asset_dir=str(asset_dir) if asset_dir else None, **kw)


def li_count(markup: str) -> int:
    return markup.count('<li class="step')


def panel_count(markup: str) -> int:
    return markup.count('<figure class="panel')


def captions(markup: str) -> list[str]:
    return re.findall(r'<span class="cap">(.*?)</span>', markup)


# --- structural counts ------------------------------------------------------

def test_p1_textual_list_without_context(asset_dir):
    doc = fixture_doc()
    markup = render(doc, cfg("P1"), runtime_js=STUB).decode()
    assert li_count(markup) == 3
    assert panel_count(markup) == 0
    assert "<img" not in markup
    assert '<div class="context">' not in markup


def test_p2_panels_with_dictionary_glyphs(asset_dir):
    doc = fixture_doc()
    markup = render(doc, cfg("P2"), runtime_js=STUB).decode()
    assert panel_count(markup) == 3
    assert li_count(markup) == 0
    for step in doc.steps:
        assert glyph_for(step.kind).symbol_id in markup


def test_p3_adds_only_context_lines(asset_dir):
    doc = fixture_doc()
    p1 = render(doc, cfg("P1"), runtime_js=STUB).decode().splitlines()
    p3 = render(doc, cfg("P3", asset_dir), runtime_js=STUB).decode().splitlines()
    diff = list(difflib.unified_diff(p1, p3, lineterm="", n=0))
    removed = [l for l in diff if l.startswith("-") and not l.startswith("---")]
    added = [l for l in diff if l.startswith("+") and not l.startswith("+++")]
    assert removed == []
    assert added, "P3 must add context blocks"
    assert all(l.startswith('+<div class="context">') for l in added)


def test_p4_adds_only_context_lines_over_p2(asset_dir):
    doc = fixture_doc()
    p2 = render(doc, cfg("P2"), runtime_js=STUB).decode().splitlines()
    p4 = render(doc, cfg("P4", asset_dir), runtime_js=STUB).decode().splitlines()
    diff = list(difflib.unified_diff(p2, p4, lineterm="", n=0))
    removed = [l for l in diff if l.startswith("-") and not l.startswith("---")]
    added = [l for l in diff if l.startswith("+") and not l.startswith("+++")]
    assert removed == []
    assert all(l.startswith('+<div class="context">') for l in added)


def test_captions_identical_across_context_pairs(asset_dir):
    doc = fixture_doc()
    assert captions(render(doc, cfg("P1"), runtime_js=STUB).decode()) == \
        captions(render(doc, cfg("P3", asset_dir), runtime_js=STUB).decode())
    assert captions(render(doc, cfg("P2"), runtime_js=STUB).decode()) == \
        captions(render(doc, cfg("P4", asset_dir), runtime_js=STUB).decode())


def test_caption_order_matches_steps(asset_dir):
    doc = fixture_doc()
    assert captions(render(doc, cfg("P1"), runtime_js=STUB).decode()) == \
        [s.summary for s in doc.steps]


# --- emphasis, overview, links ----------------------------------------------

def test_decision_points_get_emphasis_class():
    doc = fixture_doc()
    markup = render(doc, cfg("P1"), runtime_js=STUB).decode()
    assert markup.count('class="step emphasized"') == len(doc.decision_points)


def test_overview_lists_sections_in_order():
    doc = fixture_doc()
    fragment = render_overview(doc)
    anchors = re.findall(r'href="#section-(\d+)"', fragment)
    assert anchors == [str(sec.index) for sec in doc.sections]


def test_overview_single_section():
    fragment = render_overview(mk_doc([N, N]))
    assert fragment.count("ov-entry") == 1


def test_overview_adjacent_colors_differ():
    # Adjacent sections always differ in subprocess, and the palette assigns
    # each subprocess its own shade, so neighbours never share a color.
    doc = mk_doc([N, S, A])
    fragment = render_overview(doc)
    colors = re.findall(r'--sec:(#[0-9a-f]{6})', fragment)
    assert len(colors) == 3
    assert colors[0] != colors[1] and colors[1] != colors[2]


def test_overview_colors_omitted_when_disabled():
    fragment = render_overview(mk_doc([N, S]), RenderConfig(section_colors=False))
    assert "--sec:" not in fragment


def test_link_assets_render_exactly_once_per_step(asset_dir):
    doc = fixture_doc()
    markup = render(doc, cfg("P3", asset_dir), runtime_js=STUB).decode()
    assert markup.count('href="https://repo.example.edu/p?x=2"') == 1


# --- embedded payload and determinism ----------------------------------------

def extract_payload(markup: str) -> str:
    m = re.search(r'<script type="application/json" id="vpr-data">(.*?)</script>',
                  markup, re.S)
    assert m, "vpr-data block missing"
    return m.group(1).replace("<\\/", "</")


def test_embedded_payload_round_trips(asset_dir):
    doc = fixture_doc()
    markup = render(doc, cfg("P4", asset_dir), runtime_js=STUB).decode()
    assert deserialize_document(extract_payload(markup)) == doc


def test_render_is_deterministic(asset_dir):
    doc = fixture_doc()
    for fmt in ("P1", "P2", "P3", "P4"):
        first = render(doc, cfg(fmt, asset_dir), runtime_js=STUB)
        second = render(doc, cfg(fmt, asset_dir), runtime_js=STUB)
        assert first == second


def test_runtime_is_inlined():
    markup = render(fixture_doc(), cfg("P1"), runtime_js=STUB).decode()
    assert '<script id="vpr-runtime">' in markup
    assert "vpr viewer runtime stub" in markup


def test_no_network_references(asset_dir):
    markup = render(fixture_doc(), cfg("P4", asset_dir), runtime_js=STUB).decode()
    assert "<link" not in markup
    assert 'src="http' not in markup


# --- errors -----------------------------------------------------------------

def test_unresolved_asset_lists_paths(tmp_path):
    empty = tmp_path / "assets"
    empty.mkdir()
    with pytest.raises(UnresolvedAsset) as err:
        render(fixture_doc(), cfg("P4", empty), runtime_js=STUB)
    assert any("s1.png" in p for p in err.value.paths)


def test_missing_assets_fine_without_context_format(tmp_path):
    markup = render(fixture_doc(), cfg("P2"), runtime_js=STUB)
    assert markup


def test_empty_document_rejected():
    doc = VprDocument(title="t", actor_id="", sections=(), steps=(),
                      patterns=(), variants=(), assets={}, decision_points=(),
                      created_at=1)
    with pytest.raises(EmptyDocument):
        render(doc, cfg("P1"), runtime_js=STUB)
    with pytest.raises(EmptyDocument):
        render(doc, cfg("P1", output_kind="StaticVector"), runtime_js=STUB)


# --- static vector ----------------------------------------------------------

@pytest.mark.parametrize("fmt", ["P1", "P2", "P3", "P4"])
def test_static_vector_renders_every_format(fmt, asset_dir):
    doc = fixture_doc()
    svg = render(doc, cfg(fmt, asset_dir, output_kind="StaticVector")).decode()
    assert svg.startswith("<svg")
    assert "<script" not in svg  # no interactivity, degraded gracefully
    for step in doc.steps:
        assert str(step.index + 1) + "." in svg


def test_static_vector_deterministic(asset_dir):
    doc = fixture_doc()
    c = cfg("P2", asset_dir, output_kind="StaticVector")
    assert render(doc, c) == render(doc, c)


# --- golden files -----------------------------------------------------------

@pytest.mark.parametrize("fmt,suffix", [("P1", "html"), ("P2", "html"),
                                        ("P3", "html"), ("P4", "html"),
                                        ("P2", "svg")])
def test_golden_files(fmt, suffix, asset_dir):
    doc = fixture_doc()
    kind = "StaticVector" if suffix == "svg" else "InteractiveDocument"
    out = render(doc, cfg(fmt, asset_dir, output_kind=kind), runtime_js=STUB)
    golden = GOLDEN_DIR / f"fixture-{fmt.lower()}.vpr.{suffix}"
    if not golden.exists():  # pragma: no cover - first generation
        golden.parent.mkdir(parents=True, exist_ok=True)
        golden.write_bytes(out)
    assert out == golden.read_bytes()
