"""Report rows, discrepancy annotations and CSV/JSON emitters."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from importlib import resources
from typing import Iterable, Sequence

from . import published
from .criterion import (
    QUARTER,
    SearchInterval,
    as_fraction,
    first_primes_reciprocal_sum,
    interval_for_omega,
    optimal_k,
    sig_round,
)
from .search import SearchReport
from .tree import DivisorConstraint, prime_divisor_tree

CSV_COLUMNS = ("index", "omega", "k", "p", "witness_lo", "witness_hi")
ANNOTATION_COLUMNS = ("source", "item", "published", "recomputed", "agrees")


@dataclass(frozen=True)
class Annotation:
    """One published value next to its recomputation."""

    source: str
    item: str
    published: str
    recomputed: str
    agrees: bool


def _sig_digits(s: str) -> int:
    mant = s.split("e")[0].replace(".", "").lstrip("0")
    return max(1, len(mant))


def _display_like(value, template: str, up: bool) -> str:
    """``value`` rounded (outward) to as many significant digits as ``template`` shows."""
    return sig_round(value, _sig_digits(template), up=up)


def _same_number(a: str, b: str) -> bool:
    return Fraction(a) == Fraction(b)


# ---------------------------------------------------------------------------
# criterion table


@dataclass(frozen=True)
class IntervalRow:
    omega: int
    k: int
    lower: int
    upper: int
    empty: bool
    lower_display: str
    upper_display: str


def criterion_rows(omegas: Iterable[int], epsilon=QUARTER, odd_only: bool = True) -> list[IntervalRow]:
    rows = []
    for w in omegas:
        iv = interval_for_omega(w, epsilon, odd_only)
        lo, hi = iv.display()
        rows.append(IntervalRow(w, iv.k_used, iv.lower, iv.upper, iv.empty, lo, hi))
    return rows


def interval_annotations(epsilon=QUARTER) -> list[Annotation]:
    out = []
    for w, (plo, phi) in sorted(published.INTERVALS.items(), reverse=True):
        iv = interval_for_omega(w, epsilon)
        rlo = _display_like(iv.lower, plo, up=False)
        rhi = _display_like(iv.upper, phi, up=True)
        out.append(Annotation("omega_intervals", f"omega={w} lower", plo, rlo, _same_number(plo, rlo)))
        out.append(Annotation("omega_intervals", f"omega={w} upper", phi, rhi, _same_number(phi, rhi)))
    iv47 = interval_for_omega(47, epsilon)
    out.append(
        Annotation(
            "omega_intervals",
            "omega=47 upper",
            published.OMEGA47_UPPER,
            sig_round(iv47.upper, 3, up=True),
            _same_number(published.OMEGA47_UPPER, _display_like(iv47.upper, published.OMEGA47_UPPER, True)),
        )
    )
    for (lo, hi), k in published.K_REGIMES.items():
        for odd_only, label in ((True, "odd-tail"), (False, "full-tail")):
            ks = sorted({optimal_k(w, epsilon, first_primes_reciprocal_sum(w), odd_only)[0] for w in range(lo, hi + 1)})
            out.append(
                Annotation("k_regimes", f"omega={lo}..{hi} k ({label})", str(k), "/".join(map(str, ks)), ks == [k])
            )
    return out


# ---------------------------------------------------------------------------
# divisor tree


def tree_annotations(leaves: dict[int, list[DivisorConstraint]]) -> list[Annotation]:
    """Compare published branches with recomputed leaves, matching on (omega, excluded)."""
    out = []
    for w, excluded, forced, level, D in published.BRANCHES:
        if w not in leaves:
            continue
        item = f"omega={w} excluded={{{','.join(map(str, excluded))}}}"
        match = [c for c in leaves[w] if tuple(c.excluded) == tuple(excluded)]
        if match:
            c = match[0]
            out.append(Annotation("divisor_branches", item + " D", str(D), str(c.D), c.D == D))
            pf, rf = ",".join(map(str, forced)), ",".join(map(str, c.forced))
            out.append(Annotation("divisor_branches", item + " forced", pf, rf, tuple(forced) == tuple(c.forced)))
            if c.D != D:
                out.append(Annotation("divisor_branches", item + " leaf", f"D={D}", _where(leaves, D), False))
            if math.prod(forced) != D:
                out.append(
                    Annotation("divisor_branches", item + " D vs forced product", str(D), str(math.prod(forced)), False)
                )
            continue
        out.append(Annotation("divisor_branches", item + " leaf", f"D={D}", _where(leaves, D), False))
    return out


def _where(leaves: dict[int, list[DivisorConstraint]], D: int) -> str:
    """Every recomputed leaf with divisor D, or "none"."""
    hits = [c for w in sorted(leaves, reverse=True) for c in leaves[w] if c.D == D]
    return ";".join(f"omega={c.omega} excluded={{{','.join(map(str, c.excluded))}}}" for c in hits) or "none"


# ---------------------------------------------------------------------------
# searches


def count_annotations(report: SearchReport, published_mode: bool) -> list[Annotation]:
    out = []
    for w, D, initial, final in published.BRANCH_COUNTS:
        if w != report.omega or D != report.D:
            continue
        mode = "published-mode" if published_mode else "sound-mode"
        out.append(Annotation("branch_counts", f"omega={w} D={D} initial ({mode})", str(initial), str(report.initial_count), initial == report.initial_count))
        out.append(Annotation("branch_counts", f"omega={w} D={D} final ({mode})", str(final), str(report.final_count), final == report.final_count))
        if D == published.FLAGSHIP_D:
            prose = published.FLAGSHIP_FINAL_PROSE
            out.append(Annotation("branch_counts", f"omega={w} D={D} final (running text)", str(prose), str(report.final_count), prose == report.final_count))
    return out


def report_rows(report: SearchReport) -> list[tuple[int, int, int, int, int, int]]:
    return [(i, r.omega, r.k, r.p, r.n, r.n + 1) for i, r in enumerate(report.records, 1)]


def to_csv(rows: Iterable[Sequence], columns: Sequence[str] = CSV_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([int(x) if isinstance(x, bool) else x for x in row])
    return buf.getvalue()


def parse_csv(text: str) -> tuple[list[str], list[list[str]]]:
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


def annotations_csv(annotations: Iterable[Annotation]) -> str:
    return to_csv(((a.source, a.item, a.published, a.recomputed, a.agrees) for a in annotations), ANNOTATION_COLUMNS)


def report_json(report: SearchReport, epsilon, annotations: Sequence[Annotation] = ()) -> dict:
    eps = as_fraction(epsilon)
    return {
        "omega": report.omega,
        "epsilon_num": eps.numerator,
        "epsilon_den": eps.denominator,
        "branch_d": report.D,
        "complete": report.complete,
        "counts": {
            "initial": report.initial_count,
            "certified": report.certified_count,
            "final": report.final_count,
        },
        "initial_first": report.initial_first,
        "initial_last": report.initial_last,
        "witnesses": [
            {"omega": r.omega, "k": r.k, "p": r.p, "witness_lo": r.n, "witness_hi": r.n + 1, "extended": r.extended}
            for r in report.records
        ],
        "annotations": [asdict(a) for a in annotations],
    }


def report_schema() -> dict:
    return json.loads(resources.files("qnrnp").joinpath("report.schema.json").read_text())


def text_table(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    rows = [[str(x) for x in r] for r in rows]
    widths = [max([len(h)] + [len(r[i]) for r in rows]) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(wd) for h, wd in zip(header, widths))]
    lines.append("  ".join("-" * wd for wd in widths))
    lines += ["  ".join(c.rjust(wd) for c, wd in zip(r, widths)) for r in rows]
    return "\n".join(lines) + "\n"


def tree_leaves(omegas: Iterable[int], epsilon=QUARTER) -> dict[int, list[DivisorConstraint]]:
    return {w: prime_divisor_tree(w, epsilon) for w in omegas}


def interval_text(iv: SearchInterval) -> str:
    lo, hi = iv.display()
    return "empty" if iv.empty else f"({lo}, {hi})"
