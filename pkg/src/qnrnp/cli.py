"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 a prime without a witness
pair, 3 a corrupt checkpoint.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path

from . import reporting
from .checkpoint import checkpoint_load
from .criterion import (
    SearchInterval,
    as_fraction,
    evaluate_prime,
    interval_for_omega,
    large_omega_crossover,
    large_omega_detail,
    prime_reciprocal_sum,
)
from .errors import ConfigError, CorruptCheckpoint, NoValidK, NotPrime, WitnessNotFound
from .ntheory import euler_phi, factorize, is_prime
from .search import (
    HALF,
    conjecture_scan,
    direct_scan,
    execute,
    find_consecutive_qnrnps,
    job_from_id,
    run_branch,
    run_published_branch,
)
from .tree import prime_divisor_tree

EXIT_OK, EXIT_CONFIG, EXIT_NO_WITNESS, EXIT_CORRUPT = 0, 1, 2, 3
FORMATS = ("text", "csv", "json")


@dataclass
class RunConfig:
    """Flat run configuration; one key=value line per field when serialized."""

    epsilon: Fraction = Fraction(1, 4)
    omega: tuple[int, int] | None = None
    interval: tuple[int, int] | None = None
    workers: int = 1
    checkpoint_dir: str | None = None
    format: str = "text"
    bound: int | None = None
    scan_limit: int | None = None
    branch: int | None = None
    published_mode: bool = False
    out: str | None = None

    def validate(self) -> "RunConfig":
        if not 0 < self.epsilon < HALF:
            raise ConfigError(f"epsilon must lie in (0, 1/2), got {self.epsilon}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}")
        if self.omega and not 1 <= self.omega[0] <= self.omega[1]:
            raise ConfigError(f"bad omega range {self.omega}")
        if self.interval and not 2 <= self.interval[0] <= self.interval[1]:
            raise ConfigError(f"bad interval {self.interval}")
        return self

    def snapshot(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if isinstance(v, Fraction):
                v = f"{v.numerator}/{v.denominator}"
            elif isinstance(v, tuple):
                v = f"{v[0]}-{v[1]}" if f.name == "omega" else f"{v[0]}:{v[1]}"
            lines.append(f"{f.name}={v}")
        return "\n".join(lines) + "\n"


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    try:
        if key == "epsilon":
            if "." in raw:
                raise ConfigError("epsilon must be an exact fraction such as 1/4")
            return Fraction(raw)
        if key == "omega":
            lo, _, hi = raw.partition("-")
            return (int(lo), int(hi or lo))
        if key == "interval":
            lo, sep, hi = raw.partition(":")
            if not sep:
                raise ConfigError("interval must be LO:HI")
            return (int(Fraction(lo)), int(Fraction(hi)))
        if key in ("workers", "bound", "scan_limit", "branch"):
            return int(Fraction(raw))
        if key == "published_mode":
            return raw.lower() in ("1", "true", "yes", "on")
        return raw
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc


def load_config_file(path: str) -> dict:
    values = {}
    known = {f.name for f in fields(RunConfig)}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in known:
            raise ConfigError(f"{path}:{lineno}: expected key=value with a known key")
        values[key] = _parse_value(key, raw)
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    values = load_config_file(args.config) if args.config else {}
    for f in fields(RunConfig):
        raw = getattr(args, f.name, None)
        if raw is None or raw is False:
            continue
        values[f.name] = raw if isinstance(raw, bool) else _parse_value(f.name, str(raw))
    return RunConfig(**values).validate()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; flags override it")
    common.add_argument("--epsilon", help="exact fraction, default 1/4")
    common.add_argument("--omega", help="single value or LO-HI range")
    common.add_argument("--interval", help="LO:HI, both inclusive; 2.2e11 style is accepted")
    common.add_argument("--workers", help="worker processes (default 1)")
    common.add_argument("--checkpoint-dir", dest="checkpoint_dir")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--bound", help="scan bound")
    common.add_argument("--scan-limit", dest="scan_limit", help="largest n tried as the start of a pair")
    common.add_argument("--out", help="directory for report files and the config snapshot")

    parser = _Parser(prog="qnrnp", description="Consecutive QNRNP verification toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("criterion-table", parents=[common], help="search interval per omega")
    sub.add_parser("tree", parents=[common], help="divisor-tree leaves and published-value annotations")
    s = sub.add_parser("search", parents=[common], help="tree-branch or direct search with witness verification")
    s.add_argument("--branch", help="D of the tree leaf to run (tree mode)")
    s.add_argument(
        "--published-mode",
        dest="published_mode",
        action="store_true",
        help="squarefree p-1, exclusions ignored, displayed root interval",
    )
    v = sub.add_parser("verify", parents=[common], help="check one prime")
    v.add_argument("p", type=int)
    sub.add_parser("large-omega", parents=[common], help="closed-form check for large omega")
    c = sub.add_parser("conjecture-scan", parents=[common], help="runs of QNRNPs below a bound")
    c.add_argument("--conjecture", choices=("A", "B"), default="A", help="A: run of 3 at ratio 1/4; B: run of 2 at ratio 4/15")
    sub.add_parser("resume", parents=[common], help="continue every checkpoint in --checkpoint-dir")
    return parser


# ---------------------------------------------------------------------------
# output helpers


def _emit(cfg: RunConfig, name: str, text: str) -> None:
    if cfg.out:
        d = Path(cfg.out)
        d.mkdir(parents=True, exist_ok=True)
        (d / name).write_text(text)
        (d / "config.txt").write_text(cfg.snapshot())
    else:
        sys.stdout.write(text)


def _ext(cfg: RunConfig) -> str:
    return {"text": "txt", "csv": "csv", "json": "json"}[cfg.format]


def _omegas(cfg: RunConfig, default: tuple[int, int]) -> range:
    lo, hi = cfg.omega or default
    return range(lo, hi + 1)


# ---------------------------------------------------------------------------
# commands


def cmd_criterion_table(cfg: RunConfig) -> int:
    rows = reporting.criterion_rows(_omegas(cfg, (2, 47)), cfg.epsilon)
    annotations = reporting.interval_annotations(cfg.epsilon) if cfg.epsilon == Fraction(1, 4) else []
    if cfg.format == "json":
        payload = {
            "epsilon_num": cfg.epsilon.numerator,
            "epsilon_den": cfg.epsilon.denominator,
            "rows": [r.__dict__ for r in rows],
            "annotations": [a.__dict__ for a in annotations],
        }
        text = json.dumps(payload, indent=2) + "\n"
    elif cfg.format == "csv":
        text = reporting.to_csv(
            ((r.omega, r.k, r.lower, r.upper, r.empty) for r in rows), ("omega", "k", "lower", "upper", "empty")
        )
        if annotations:
            text += "\n" + reporting.annotations_csv(annotations)
    else:
        body = [
            (r.omega, r.k, r.lower_display, r.upper_display, "empty (certified)" if r.empty else "search")
            for r in rows
        ]
        text = reporting.text_table(("omega", "k", "lower", "upper", "status"), body)
        if annotations:
            text += "\n" + _annotation_text(annotations)
    _emit(cfg, f"criterion_table.{_ext(cfg)}", text)
    return EXIT_OK


def _annotation_text(annotations) -> str:
    return reporting.text_table(
        ("source", "item", "published", "recomputed", "agrees"),
        ((a.source, a.item, a.published, a.recomputed, "yes" if a.agrees else "NO") for a in annotations),
    )


def cmd_tree(cfg: RunConfig) -> int:
    leaves = reporting.tree_leaves(_omegas(cfg, (10, 14)), cfg.epsilon)
    annotations = reporting.tree_annotations(leaves) if cfg.epsilon == Fraction(1, 4) else []
    header = ("omega", "level", "excluded", "forced", "D", "residual")
    rows = [
        (
            c.omega,
            c.level,
            " ".join(map(str, c.excluded)) or "-",
            " ".join(map(str, c.forced)),
            c.D,
            reporting.interval_text(c.residual_interval),
        )
        for w in sorted(leaves, reverse=True)
        for c in leaves[w]
    ]
    if cfg.format == "json":
        text = json.dumps(
            {"leaves": [dict(zip(header, r)) for r in rows], "annotations": [a.__dict__ for a in annotations]}, indent=2
        ) + "\n"
    elif cfg.format == "csv":
        text = reporting.to_csv(rows, header) + "\n" + reporting.annotations_csv(annotations)
    else:
        text = reporting.text_table(header, rows) + "\n" + _annotation_text(annotations)
    _emit(cfg, f"tree.{_ext(cfg)}", text)
    return EXIT_OK


def _render_report(cfg: RunConfig, report, annotations=()) -> str:
    if cfg.format == "json":
        return json.dumps(reporting.report_json(report, cfg.epsilon, annotations), indent=2) + "\n"
    if cfg.format == "csv":
        return reporting.to_csv(reporting.report_rows(report))
    head = (
        f"omega={report.omega} D={report.D} initial={report.initial_count} "
        f"certified={report.certified_count} final={report.final_count} complete={report.complete}\n"
    )
    text = head + reporting.text_table(reporting.CSV_COLUMNS, reporting.report_rows(report))
    if annotations:
        text += "\n" + _annotation_text(annotations)
    return text


def cmd_search(cfg: RunConfig) -> int:
    opts = dict(workers=cfg.workers, checkpoint_dir=cfg.checkpoint_dir)
    if cfg.branch is not None:
        if not cfg.omega or cfg.omega[0] != cfg.omega[1]:
            raise ConfigError("--branch needs a single --omega")
        w = cfg.omega[0]
        if cfg.published_mode:
            report = run_published_branch(w, cfg.branch, cfg.epsilon, **opts)
        else:
            leaves = [c for c in prime_divisor_tree(w, cfg.epsilon) if c.D == cfg.branch]
            if not leaves:
                raise ConfigError(f"no leaf with D={cfg.branch} at omega={w}")
            iv = None
            if cfg.interval:
                iv = SearchInterval(w, cfg.interval[0], cfg.interval[1], 0, leaves[0].D)
            report = run_branch(leaves[0], cfg.epsilon, interval=iv, **opts)
        annotations = reporting.count_annotations(report, cfg.published_mode) if report.complete else []
        _emit(cfg, f"search_w{w}_D{cfg.branch}.{_ext(cfg)}", _render_report(cfg, report, annotations))
        return EXIT_OK
    if cfg.interval:
        lo, hi = cfg.interval
        omega = cfg.omega or (1, 64)
    elif cfg.omega and cfg.omega[1] <= 9:
        iv = interval_for_omega(cfg.omega[1], cfg.epsilon)
        lo, hi, omega = 2, iv.upper, cfg.omega
    else:
        raise ConfigError("search needs --interval (direct mode) or --omega with --branch (tree mode)")
    report = direct_scan((lo, hi), omega, cfg.epsilon, **opts)
    _emit(cfg, f"direct_{lo}_{hi}.{_ext(cfg)}", _render_report(cfg, report))
    return EXIT_OK


def cmd_verify(cfg: RunConfig, p: int) -> int:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p < 5:
        print(f"p={p}: too small to have two QNRNPs")
        return EXIT_OK
    f = factorize(p - 1)
    ratio = Fraction(euler_phi(f), p - 1)
    w = len(f.factors)
    bound = HALF - cfg.epsilon
    print(f"p={p}")
    print(f"p-1 = {' * '.join(f'{q}^{e}' if e > 1 else str(q) for q, e in f.factors)}")
    print(f"omega(p-1)={w} phi(p-1)/(p-1)={ratio} ~ {float(ratio):.6f}")
    if ratio <= bound:
        print(f"hypothesis phi(p-1)/(p-1) <= {bound}: holds")
    else:
        print(f"warning: hypothesis phi(p-1)/(p-1) <= {bound} does not hold; scanning anyway", file=sys.stderr)
    try:
        ev = evaluate_prime(w, f.primes, cfg.epsilon)
        certified = ev.certifies(p)
        print(
            f"criterion: k={ev.params.k} P={float(prime_reciprocal_sum(f.primes)):.6f} "
            f"threshold~{float(ev.threshold):.4e} certified={certified}"
        )
    except NoValidK:
        print("criterion: no k gives a positive theta")
    limit = cfg.scan_limit if cfg.scan_limit is not None else p - 2
    pair = find_consecutive_qnrnps(p, f, min(limit, p - 2))
    print(f"witness: {pair[0]}, {pair[1]}" if pair else f"witness: none with n <= {min(limit, p - 2)}")
    return EXIT_OK


def cmd_large_omega(cfg: RunConfig) -> int:
    bound = cfg.bound or 2000
    if cfg.omega:
        rows = [large_omega_detail(w, cfg.epsilon) for w in _omegas(cfg, (6, bound))]
        print(reporting.text_table(("omega", "k", "P_upper", "holds", "log10_margin"),
                                   ((r.omega, r.k, f"{r.P_upper:.6f}", r.holds, f"{r.log10_margin:.3f}") for r in rows)), end="")
        return EXIT_OK
    first = large_omega_crossover(cfg.epsilon, bound)
    if first is None:
        print(f"the check does not hold at omega={bound}")
    else:
        d = large_omega_detail(first, cfg.epsilon)
        print(f"holds for every omega in [{first}, {bound}]; at omega={first}: k={d.k}, margin {d.log10_margin:.3f} decades")
    return EXIT_OK


def cmd_conjecture_scan(cfg: RunConfig, which: str) -> int:
    run_length, ratio = (3, Fraction(1, 4)) if which == "A" else (2, Fraction(4, 15))
    bound = cfg.bound or 10**6
    rep = conjecture_scan(bound, run_length, ratio, cfg.workers)
    first = rep.first_examples[0] if rep.first_examples else None
    lines = [
        f"conjecture {which}: run of {run_length} when phi(p-1)/(p-1) <= {ratio}, p <= {bound}",
        f"primes checked: {rep.checked}",
    ]
    if first:
        lines.append(f"first: p={first.p} run starts at n={first.n}")
    lines.append(f"counterexamples: {' '.join(map(str, rep.counterexamples))}" if rep.counterexamples else f"verified to {bound}")
    _emit(cfg, f"conjecture_{which}.txt", "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_resume(cfg: RunConfig) -> int:
    if not cfg.checkpoint_dir:
        raise ConfigError("resume needs --checkpoint-dir")
    paths = sorted(Path(cfg.checkpoint_dir).glob("*.qncp"))
    if not paths:
        raise ConfigError(f"no checkpoints in {cfg.checkpoint_dir}")
    for path in paths:
        job = job_from_id(checkpoint_load(path).job_id)
        cfg.epsilon = job.epsilon
        report = execute(job, workers=cfg.workers, checkpoint_dir=cfg.checkpoint_dir)
        _emit(cfg, f"{path.stem}.{_ext(cfg)}", _render_report(cfg, report))
    return EXIT_OK


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        if args.command == "criterion-table":
            return cmd_criterion_table(cfg)
        if args.command == "tree":
            return cmd_tree(cfg)
        if args.command == "search":
            return cmd_search(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, args.p)
        if args.command == "large-omega":
            return cmd_large_omega(cfg)
        if args.command == "conjecture-scan":
            return cmd_conjecture_scan(cfg, args.conjecture)
        if args.command == "resume":
            return cmd_resume(cfg)
    except (ConfigError, NotPrime) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except WitnessNotFound as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_WITNESS
    except CorruptCheckpoint as exc:
        print(f"error: corrupt checkpoint: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
