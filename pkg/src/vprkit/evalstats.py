"""Prototype-comparison statistics: scoring, exclusion, pairwise regression,
effect sizes, correlations and Likert summaries.

Group comparisons are run as single-regressor OLS fits on a binary indicator
(1 for the second prototype of the pair), which is algebraically the pooled
two-sample t-test; Cohen's d uses the pooled standard deviation with the
first-minus-second sign convention, i.e. opposite in sign to the regression
coefficient.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

from scipy import stats as _scipy_stats

from .errors import VprError

PROTOTYPES = ("P1", "P2", "P3", "P4")
TASKS = (1, 2)
PARTS = ("A", "B")


class UnknownQuestion(VprError):
    pass


class DuplicateResponse(VprError):
    pass


class DegenerateVariance(VprError):
    pass


class TooFewSamples(VprError):
    pass


class ConstantSeries(VprError):
    pass


class OutOfRangeRating(VprError):
    pass


class InsufficientGroups(VprError):
    pass


class SchemaError(VprError):
    def __init__(self, column: str, detail: str = ""):
        message = f"missing or invalid column {column!r}"
        if detail:
            message += f": {detail}"
        super().__init__(message)
        self.column = column


@dataclass(frozen=True)
class ResponseRecord:
    participant_id: str
    prototype: str  # P1..P4
    task: int  # 1 or 2
    part: str  # A or B
    question_id: str
    answer: str
    time_sec: float


@dataclass(frozen=True)
class AnswerKeyEntry:
    question_id: str
    correct_answer: str
    task: int
    part: str


@dataclass(frozen=True)
class ScoreRow:
    participant_id: str
    prototype: str
    task: int
    part: str
    score: int
    total_time_sec: float
    mean_time_per_q: float
    n_questions: int


@dataclass(frozen=True)
class ComparisonRow:
    pair: tuple[str, str]
    coef: float
    t: float
    p: float
    corrected_p: float
    cohens_d: float
    n_a: int
    n_b: int


def score_responses(records: Sequence[ResponseRecord],
                    answer_key: dict[str, AnswerKeyEntry]) -> list[ScoreRow]:
    """Count correct answers per (participant, task, part).

    Raises UnknownQuestion for a response whose question is not in the key
    and DuplicateResponse when a (participant, task, part, question) repeats.
    """
    seen: set[tuple[str, int, str, str]] = set()
    groups: dict[tuple[str, int, str], dict] = {}
    for r in records:
        entry = answer_key.get(r.question_id)
        if entry is None:
            raise UnknownQuestion(f"question {r.question_id!r} not in answer key")
        key = (r.participant_id, entry.task, entry.part, r.question_id)
        if key in seen:
            raise DuplicateResponse(
                f"participant {r.participant_id!r} answered {r.question_id!r} twice")
        seen.add(key)
        group = groups.setdefault((r.participant_id, entry.task, entry.part), {
            "prototype": r.prototype, "score": 0, "time": 0.0, "n": 0,
        })
        if group["prototype"] != r.prototype:
            raise SchemaError("prototype",
                              f"participant {r.participant_id!r} appears under "
                              f"{group['prototype']} and {r.prototype}")
        if r.answer.strip() == entry.correct_answer.strip():
            group["score"] += 1
        group["time"] += r.time_sec
        group["n"] += 1

    rows = []
    for (participant, task, part), g in sorted(groups.items()):
        rows.append(ScoreRow(
            participant_id=participant,
            prototype=g["prototype"],
            task=task,
            part=part,
            score=g["score"],
            total_time_sec=g["time"],
            mean_time_per_q=g["time"] / g["n"],
            n_questions=g["n"],
        ))
    return rows


def exclude_fast(rows: Sequence[ScoreRow],
                 threshold_sec: float = 30.0) -> tuple[list[ScoreRow], list[ScoreRow]]:
    """Partition rows into (kept, excluded) by the fast-responder rule.

    A participant is excluded for a task when their mean time per question
    over that task (both parts pooled) is strictly below the threshold; the
    exclusion removes both parts of that task only.
    """
    totals: dict[tuple[str, int], list[float]] = {}
    for row in rows:
        bucket = totals.setdefault((row.participant_id, row.task), [0.0, 0])
        bucket[0] += row.total_time_sec
        bucket[1] += row.n_questions
    fast = {key for key, (time, n) in totals.items()
            if n > 0 and time / n < threshold_sec}
    kept = [r for r in rows if (r.participant_id, r.task) not in fast]
    excluded = [r for r in rows if (r.participant_id, r.task) in fast]
    return kept, excluded


def pairwise_compare(scores_a: Sequence[float],
                     scores_b: Sequence[float]) -> tuple[float, float, float, float]:
    """Compare two groups; returns (coef, t, p, cohens_d).

    The fit is ordinary least squares of the pooled scores on a 0/1
    indicator that is 1 for the second group, so ``coef`` is
    mean(b) - mean(a).  Cohen's d is (mean(a) - mean(b)) / pooled sd and
    therefore has the opposite sign of ``coef``.
    """
    n_a, n_b = len(scores_a), len(scores_b)
    if n_a < 2 or n_b < 2:
        raise TooFewSamples(f"need at least 2 samples per group, got {n_a} and {n_b}")

    y = list(scores_a) + list(scores_b)
    x = [0.0] * n_a + [1.0] * n_b
    n = n_a + n_b
    x_bar = sum(x) / n
    y_bar = sum(y) / n
    sxx = sum((xi - x_bar) ** 2 for xi in x)
    sxy = sum((xi - x_bar) * (yi - y_bar) for xi, yi in zip(x, y))
    coef = sxy / sxx
    intercept = y_bar - coef * x_bar
    rss = sum((yi - intercept - coef * xi) ** 2 for xi, yi in zip(x, y))
    df = n - 2

    sigma2 = rss / df  # equals the pooled variance of the two groups
    if sigma2 <= 0.0:
        raise DegenerateVariance("pooled variance is zero")
    se = math.sqrt(sigma2 / sxx)
    t = coef / se
    p = 2.0 * float(_scipy_stats.t.sf(abs(t), df))
    d = -coef / math.sqrt(sigma2)
    return coef, t, p, d


def bonferroni(p: float, m: int) -> float:
    """Multiply the p-value by the family size, capped at 1."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    if m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    return min(1.0, m * p)


def correlate(times: Sequence[float], scores: Sequence[float]) -> float:
    """Pearson correlation coefficient between two equal-length series."""
    if len(times) != len(scores):
        raise ValueError("series must have equal lengths")
    if len(times) < 2:
        raise TooFewSamples("need at least 2 observations")
    n = len(times)
    t_bar = sum(times) / n
    s_bar = sum(scores) / n
    st = sum((t - t_bar) ** 2 for t in times)
    ss = sum((s - s_bar) ** 2 for s in scores)
    if st == 0.0 or ss == 0.0:
        raise ConstantSeries("correlation undefined for a constant series")
    cov = sum((t - t_bar) * (s - s_bar) for t, s in zip(times, scores))
    return cov / math.sqrt(st * ss)


def likert_summary(ratings: dict[str, Sequence[int]]) -> dict[str, float]:
    """Per-question percentage of ratings that agree or strongly agree
    (>= 4 on the 1-5 scale), rounded to one decimal place."""
    out: dict[str, float] = {}
    for question, values in ratings.items():
        for v in values:
            if not 1 <= v <= 5:
                raise OutOfRangeRating(
                    f"question {question!r} has rating {v}, expected 1-5")
        agree = sum(1 for v in values if v >= 4)
        out[question] = round(100.0 * agree / len(values), 1) if values else 0.0
    return out


# --- Report assembly --------------------------------------------------------

@dataclass
class Report:
    prototypes: list[str]
    score_tables: dict[tuple[int, str], list[ComparisonRow]]
    time_tables: dict[int, list[ComparisonRow]]
    correlations: dict[str, dict[tuple[int, str], float | None]]
    likert: dict[str, dict[str, float]]
    excluded: dict[int, list[str]]


def _pair_rows(groups: dict[str, list[float]]) -> list[ComparisonRow]:
    present = sorted(k for k, v in groups.items() if len(v) >= 2)
    pairs = list(combinations(present, 2))
    m = len(pairs)
    rows: list[ComparisonRow] = []
    for a, b in pairs:
        try:
            coef, t, p, d = pairwise_compare(groups[a], groups[b])
        except (TooFewSamples, DegenerateVariance):
            continue
        rows.append(ComparisonRow(
            pair=(a, b), coef=coef, t=t, p=p,
            corrected_p=bonferroni(p, m), cohens_d=d,
            n_a=len(groups[a]), n_b=len(groups[b]),
        ))
    return rows


def build_report(rows: Sequence[ScoreRow],
                 likert_ratings: dict[str, dict[str, Sequence[int]]] | None = None,
                 threshold_sec: float = 30.0) -> Report:
    """Assemble the full comparison report from scored rows.

    For every (task, part) family the C(k,2) prototype pairs are compared on
    scores; completion time is compared per task on total task time; the
    Bonferroni family size m is the number of pairs within the family.
    """
    prototypes = sorted({r.prototype for r in rows})
    if len(prototypes) < 2:
        raise InsufficientGroups(
            f"need at least 2 prototypes, got {len(prototypes)}")

    kept, excluded_rows = exclude_fast(rows, threshold_sec)
    excluded: dict[int, list[str]] = {task: [] for task in TASKS}
    for row in excluded_rows:
        if row.participant_id not in excluded.setdefault(row.task, []):
            excluded[row.task].append(row.participant_id)

    score_tables: dict[tuple[int, str], list[ComparisonRow]] = {}
    for task in TASKS:
        for part in PARTS:
            family = [r for r in kept if r.task == task and r.part == part]
            if not family:
                continue
            groups: dict[str, list[float]] = {}
            for r in family:
                groups.setdefault(r.prototype, []).append(float(r.score))
            score_tables[(task, part)] = _pair_rows(groups)

    time_tables: dict[int, list[ComparisonRow]] = {}
    for task in TASKS:
        per_participant: dict[tuple[str, str], float] = {}
        for r in kept:
            if r.task == task:
                key = (r.prototype, r.participant_id)
                per_participant[key] = per_participant.get(key, 0.0) + r.total_time_sec
        if not per_participant:
            continue
        groups = {}
        for (prototype, _), total in sorted(per_participant.items()):
            groups.setdefault(prototype, []).append(total)
        time_tables[task] = _pair_rows(groups)

    correlations: dict[str, dict[tuple[int, str], float | None]] = {}
    for prototype in prototypes:
        cells: dict[tuple[int, str], float | None] = {}
        for task in TASKS:
            for part in PARTS:
                series = [(r.total_time_sec, float(r.score)) for r in kept
                          if r.prototype == prototype and r.task == task
                          and r.part == part]
                if len(series) < 2:
                    cells[(task, part)] = None
                    continue
                try:
                    cells[(task, part)] = correlate([s[0] for s in series],
                                                    [s[1] for s in series])
                except ConstantSeries:
                    cells[(task, part)] = None
        correlations[prototype] = cells

    likert: dict[str, dict[str, float]] = {}
    if likert_ratings:
        for prototype in sorted(likert_ratings):
            likert[prototype] = likert_summary(likert_ratings[prototype])

    return Report(prototypes=prototypes, score_tables=score_tables,
                  time_tables=time_tables, correlations=correlations,
                  likert=likert, excluded=excluded)


REPORT_COLUMNS = ("Coef", "t", "P>|t|", "Corrected p", "Cohen's d")


def _row_to_dict(row: ComparisonRow) -> dict:
    return {
        "pair": f"{row.pair[0]} vs {row.pair[1]}",
        "coef": row.coef,
        "t": row.t,
        "p": row.p,
        "corrected_p": row.corrected_p,
        "cohens_d": row.cohens_d,
        "n_a": row.n_a,
        "n_b": row.n_b,
    }


def report_to_dict(report: Report) -> dict:
    return {
        "columns": list(REPORT_COLUMNS),
        "prototypes": report.prototypes,
        "scores": {
            f"task{task}_part{part}": [_row_to_dict(r) for r in rows]
            for (task, part), rows in sorted(report.score_tables.items())
        },
        "completion_time": {
            f"task{task}": [_row_to_dict(r) for r in rows]
            for task, rows in sorted(report.time_tables.items())
        },
        "correlations": {
            prototype: {f"task{task}_part{part}": value
                        for (task, part), value in sorted(cells.items())}
            for prototype, cells in report.correlations.items()
        },
        "likert_agreement_pct": report.likert,
        "excluded_participants": {f"task{t}": ids
                                  for t, ids in sorted(report.excluded.items())},
    }


def _format_table(title: str, rows: list[ComparisonRow]) -> list[str]:
    lines = [title, "-" * len(title)]
    cohens = "Cohen's d"
    header = f"{'Pair':<10} {'Coef':>9} {'t':>8} {'P>|t|':>7} {'Corrected p':>12} {cohens:>10}"
    lines.append(header)
    for row in rows:
        lines.append(
            f"{row.pair[0] + ' vs ' + row.pair[1]:<10} {row.coef:>9.4f} "
            f"{row.t:>8.3f} {row.p:>7.3f} {row.corrected_p:>12.3f} "
            f"{row.cohens_d:>10.3f}")
    lines.append("")
    return lines


def format_report_text(report: Report) -> str:
    lines: list[str] = []
    for (task, part), rows in sorted(report.score_tables.items()):
        lines.extend(_format_table(f"Task {task} Part {part}: score comparisons", rows))
    for task, rows in sorted(report.time_tables.items()):
        lines.extend(_format_table(f"Task {task}: completion time comparisons", rows))

    lines.append("Time-on-task vs score correlations (Pearson r)")
    lines.append("----------------------------------------------")
    cells = sorted({key for c in report.correlations.values() for key in c})
    header = f"{'Prototype':<10}" + "".join(
        f"  T{task} Part {part:<2}" for task, part in cells)
    lines.append(header)
    for prototype in report.prototypes:
        row = f"{prototype:<10}"
        for key in cells:
            value = report.correlations.get(prototype, {}).get(key)
            row += f"  {value:>9.3f}" if value is not None else f"  {'n/a':>9}"
        lines.append(row)
    lines.append("")

    if report.likert:
        lines.append("Likert agreement (% rating 4 or 5)")
        lines.append("----------------------------------")
        questions = sorted({q for qs in report.likert.values() for q in qs})
        lines.append(f"{'Prototype':<10}" + "".join(f" {q:>8}" for q in questions))
        for prototype, values in sorted(report.likert.items()):
            row = f"{prototype:<10}"
            for q in questions:
                row += (f" {values[q]:>7.1f}%" if q in values else f" {'n/a':>8}")
            lines.append(row)
        lines.append("")

    for task, ids in sorted(report.excluded.items()):
        if ids:
            lines.append(f"Excluded from task {task} (fast responders): "
                         + ", ".join(ids))
    return "\n".join(lines).rstrip() + "\n"


# --- Delimited input --------------------------------------------------------

_RESPONSE_COLUMNS = ("participant_id", "prototype", "task", "part",
                     "question_id", "answer", "time_sec")
_ANSWER_COLUMNS = ("question_id", "correct_answer", "task", "part")
_LIKERT_COLUMNS = ("participant_id", "prototype", "question_id", "rating")


def _check_columns(fieldnames: Iterable[str] | None, required: tuple[str, ...]):
    present = set(fieldnames or ())
    for column in required:
        if column not in present:
            raise SchemaError(column)


def _parse_task(value: str, line_no: int) -> int:
    try:
        task = int(value)
    except ValueError:
        raise SchemaError("task", f"line {line_no}: {value!r} is not an integer") from None
    if task not in TASKS:
        raise SchemaError("task", f"line {line_no}: task must be 1 or 2")
    return task


def _parse_part(value: str, line_no: int) -> str:
    part = value.strip().upper()
    if part not in PARTS:
        raise SchemaError("part", f"line {line_no}: part must be A or B")
    return part


def read_responses(path: str | Path) -> list[ResponseRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _check_columns(reader.fieldnames, _RESPONSE_COLUMNS)
        records = []
        for i, row in enumerate(reader, start=2):
            prototype = row["prototype"].strip()
            if prototype not in PROTOTYPES:
                raise SchemaError("prototype",
                                  f"line {i}: {prototype!r} is not one of {PROTOTYPES}")
            try:
                time_sec = float(row["time_sec"])
            except ValueError:
                raise SchemaError("time_sec", f"line {i}: not a number") from None
            if time_sec < 0:
                raise SchemaError("time_sec", f"line {i}: must be >= 0")
            records.append(ResponseRecord(
                participant_id=row["participant_id"].strip(),
                prototype=prototype,
                task=_parse_task(row["task"], i),
                part=_parse_part(row["part"], i),
                question_id=row["question_id"].strip(),
                answer=row["answer"],
                time_sec=time_sec,
            ))
    return records


def read_answer_key(path: str | Path) -> dict[str, AnswerKeyEntry]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _check_columns(reader.fieldnames, _ANSWER_COLUMNS)
        key: dict[str, AnswerKeyEntry] = {}
        for i, row in enumerate(reader, start=2):
            question_id = row["question_id"].strip()
            if question_id in key:
                raise SchemaError("question_id", f"line {i}: duplicate {question_id!r}")
            key[question_id] = AnswerKeyEntry(
                question_id=question_id,
                correct_answer=row["correct_answer"],
                task=_parse_task(row["task"], i),
                part=_parse_part(row["part"], i),
            )
    return key


def read_likert(path: str | Path) -> dict[str, dict[str, list[int]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _check_columns(reader.fieldnames, _LIKERT_COLUMNS)
        ratings: dict[str, dict[str, list[int]]] = {}
        for i, row in enumerate(reader, start=2):
            prototype = row["prototype"].strip()
            if prototype not in PROTOTYPES:
                raise SchemaError("prototype",
                                  f"line {i}: {prototype!r} is not one of {PROTOTYPES}")
            try:
                rating = int(row["rating"])
            except ValueError:
                raise SchemaError("rating", f"line {i}: not an integer") from None
            ratings.setdefault(prototype, {}).setdefault(
                row["question_id"].strip(), []).append(rating)
    return ratings
