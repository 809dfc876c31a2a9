"""Acceptance suite: one test per release criterion, each printing a
PASS line (run with -s or look at the verbose test report)."""

import difflib
import math
import random
import time
from itertools import product
from pathlib import Path

import pytest
from scipy import stats as scipy_stats

from vprkit.cli import main
from vprkit.evalstats import (
    AnswerKeyEntry,
    ResponseRecord,
    bonferroni,
    likert_summary,
    pairwise_compare,
    score_responses,
)
from vprkit.event_log import synth_log
from vprkit.pattern_miner import (
    StepSequence,
    compute_variants,
    mine_patterns,
    sectionize,
    sequence_from_steps,
)
from vprkit.renderer import RenderConfig, render, stub_runtime_js
from vprkit.step_mapper import StepKind, default_rules, map_steps

from conftest import mk_doc, mk_step

GOLDEN_DIR = Path(__file__).parent / "golden"
STUB = stub_runtime_js()


def _ok(name: str):
    print(f"ACCEPTANCE {name}: PASS")


def test_bonferroni_known_answers():
    cases = [(0.054, 6, 0.324), (0.076, 6, 0.456), (0.162, 6, 0.972)]
    bonferroni(0.5, 2)  # warm up
    start = time.perf_counter()
    results = [bonferroni(p, m) for p, m, _ in cases]
    elapsed = time.perf_counter() - start
    for (_, _, expected), got in zip(cases, results):
        assert round(got, 3) == expected
    assert elapsed < 1e-3, f"took {elapsed * 1e3:.3f} ms"
    _ok("bonferroni known-answers (exact to 3 decimals, <1 ms)")


def test_ols_equals_pooled_t_on_1000_datasets():
    rng = random.Random(20240101)
    for _ in range(1000):
        n_a, n_b = rng.randint(3, 50), rng.randint(3, 50)
        a = [rng.gauss(10, 3) for _ in range(n_a)]
        b = [rng.gauss(10.5, 3) for _ in range(n_b)]
        _, t, p, _ = pairwise_compare(a, b)
        # independent oracle: textbook pooled two-sample t
        mean_a, mean_b = sum(a) / n_a, sum(b) / n_b
        var_a = sum((x - mean_a) ** 2 for x in a) / (n_a - 1)
        var_b = sum((x - mean_b) ** 2 for x in b) / (n_b - 1)
        sp = math.sqrt(((n_a - 1) * var_a + (n_b - 1) * var_b) / (n_a + n_b - 2))
        t_pooled = (mean_b - mean_a) / (sp * math.sqrt(1 / n_a + 1 / n_b))
        assert abs(t - t_pooled) < 1e-9
        df = n_a + n_b - 2
        assert abs(p - 2 * scipy_stats.t.sf(abs(t), df)) < 1e-12
    _ok("OLS t equals pooled two-sample t on 1000 datasets (1e-9)")


def test_effect_size_oracle():
    coef, t, p, d = pairwise_compare([1, 2, 3], [3, 4, 5])
    assert d == -2.0  # pooled sd is exactly 1
    assert coef == 2.0
    coef, t, p, d = pairwise_compare([4, 5, 6, 7], [4, 5, 6, 7])
    assert d == 0.0 and t == 0.0 and p == 1.0
    _ok("effect-size oracle (d = -2 exactly; identical groups give 0)")


def _is_subsequence(pattern, trace):
    it = iter(trace)
    return all(any(item is x for x in it) for item in pattern)


def _brute_force(db, min_support, max_len, alphabet):
    expected = {}
    for length in range(1, max_len + 1):
        for candidate in product(alphabet, repeat=length):
            support = sum(1 for seq in db
                          if _is_subsequence(candidate, seq.kinds))
            if support >= min_support:
                expected[candidate] = support
    return expected


def test_spm_oracle_equivalence_and_anti_monotonicity():
    rng = random.Random(777)
    alphabet = [StepKind.NAVIGATE, StepKind.SEARCH, StepKind.FILL,
                StepKind.ANNOTATE, StepKind.UPLOAD]
    start = time.perf_counter()
    for _ in range(500):
        size = rng.randint(1, 8)
        db = [StepSequence(trace_id=f"t{i}",
                           kinds=tuple(rng.choice(alphabet)
                                       for _ in range(rng.randint(1, 6))))
              for i in range(size)]
        min_support = min(rng.choice([1, 2, 3]), size)
        max_len = rng.randint(1, 4)
        mined = mine_patterns(db, min_support, max_len)
        got = {p.kinds: p.support for p in mined}
        assert got == _brute_force(db, min_support, max_len, alphabet)
        # anti-monotonicity over every mined pattern (prefix support counted
        # by the independent subsequence test, so length caps cannot hide it)
        for p in mined:
            for cut in range(1, len(p.kinds)):
                prefix_support = sum(
                    1 for seq in db if _is_subsequence(p.kinds[:cut], seq.kinds))
                assert prefix_support >= p.support
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"suite took {elapsed:.1f} s"
    _ok(f"SPM oracle equivalence + anti-monotonicity, 500 dbs in {elapsed:.1f} s")


def test_partition_fuzzing_500_synth_logs():
    rules = default_rules()
    sequences = []
    for seed in range(500):
        profile = "poll_creation" if seed % 2 else "marking_correction"
        log = synth_log(seed, 10 + (seed % 71), profile)
        steps = map_steps(log, rules)
        spans = [s.event_span for s in steps]
        assert spans[0][0] == 0 and spans[-1][1] == len(log.events)
        assert all(a < b for a, b in spans)
        assert all(prev[1] == cur[0] for prev, cur in zip(spans, spans[1:]))
        sections = sectionize(steps)
        flat = [i for sec in sections for i in sec.step_indices]
        assert flat == list(range(len(steps)))
        for left, right in zip(sections, sections[1:]):
            assert left.subprocess is not right.subprocess
        sequences.append(sequence_from_steps(f"trace-{seed}", steps))
    variants = compute_variants(sequences)
    assert sum(v.count for v in variants) == len(sequences)
    _ok("partition fuzzing over 500 synth logs + variant conservation")


def _ten_step_doc():
    kinds = [StepKind.NAVIGATE, StepKind.NAVIGATE, StepKind.SEARCH,
             StepKind.FILL, StepKind.FILL, StepKind.UPLOAD, StepKind.ANNOTATE,
             StepKind.HIGHLIGHT, StepKind.APPLY_RESOURCE, StepKind.UNKNOWN]
    return mk_doc(kinds)


def test_renderer_structural_counts_and_goldens(asset_dir):
    doc = _ten_step_doc()
    outputs = {}
    for fmt in ("P1", "P2", "P3", "P4"):
        cfg = RenderConfig(format=fmt, asset_dir=str(asset_dir))
        first = render(doc, cfg, runtime_js=STUB)
        assert first == render(doc, cfg, runtime_js=STUB)
        outputs[fmt] = first.decode()
        golden = GOLDEN_DIR / f"acceptance-{fmt.lower()}.vpr.html"
        if not golden.exists():  # pragma: no cover - first generation
            golden.parent.mkdir(parents=True, exist_ok=True)
            golden.write_bytes(first)
        assert first == golden.read_bytes()

    assert outputs["P1"].count('<li class="step') == 10
    assert outputs["P3"].count('<li class="step') == 10
    assert outputs["P2"].count('<figure class="panel') == 10
    assert outputs["P4"].count('<figure class="panel') == 10

    for plain, ctx in (("P1", "P3"), ("P2", "P4")):
        diff = list(difflib.unified_diff(outputs[plain].splitlines(),
                                         outputs[ctx].splitlines(),
                                         lineterm="", n=0))
        body = [l for l in diff if l[:3] not in ("---", "+++")
                and l[:1] in "+-" ]
        assert body and all(l.startswith('+<div class="context">') for l in body)
    _ok("renderer structural counts, context-only diffs, golden files")


def test_end_to_end_determinism_from_seed_7(tmp_path):
    start = time.perf_counter()
    artifacts = {}
    for run in ("first", "second"):
        work = tmp_path / run
        log = work / "poll.jsonl"
        assert main(["synth", "--seed", "7", "--n", "50",
                     "--profile", "poll_creation", "--out", str(log)]) == 0
        model = work / "poll.vpr.json"
        assert main(["mine", str(log), "--out", str(model),
                     "--asset-dir", str(work / "assets"),
                     "--title", "Creating an online poll activity"]) == 0
        for fmt in ("p1", "p2", "p3", "p4"):
            out = work / f"poll-{fmt}.vpr.html"
            assert main(["render", str(model), "--format", fmt,
                         "--out", str(out), "--asset-dir", str(work / "assets"),
                         "--runtime", "stub"]) == 0
            artifacts.setdefault(fmt, []).append(out.read_bytes())
    elapsed = time.perf_counter() - start

    for fmt, (first, second) in artifacts.items():
        assert first == second, f"{fmt} not byte-stable"
        golden = GOLDEN_DIR / "e2e" / f"seed7-{fmt}.vpr.html"
        if not golden.exists():  # pragma: no cover - first generation
            golden.parent.mkdir(parents=True, exist_ok=True)
            golden.write_bytes(first)
        assert first == golden.read_bytes()
    assert elapsed < 5.0, f"pipeline took {elapsed:.1f} s"
    _ok(f"end-to-end synth->mine->render determinism in {elapsed:.1f} s")


def test_scoring_ceiling_and_likert():
    layout = {1: {"A": 10, "B": 8}, 2: {"A": 9, "B": 7}}  # 18 and 16 total
    key, records = {}, []
    for task, parts in layout.items():
        for part, count in parts.items():
            for i in range(count):
                qid = f"t{task}{part}q{i}"
                key[qid] = AnswerKeyEntry(qid, "c", task, part)
                records.append(ResponseRecord("p1", "P2", task, part, qid, "c", 45.0))
    rows = score_responses(records, key)
    assert sum(r.score for r in rows if r.task == 1) == 18
    assert sum(r.score for r in rows if r.task == 2) == 16

    ratings = [5] * 11 + [4] * 12 + [3] * 9 + [2] * 5 + [1] * 3  # 23 of 40
    assert likert_summary({"Q1": ratings}) == {"Q1": 57.5}
    _ok("scoring ceilings 18/16 and 57.5% likert fixture")
