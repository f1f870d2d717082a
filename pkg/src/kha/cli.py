"""Command-line front end: `kha <command> QUIVER.json [flags]`.

Every command prints a deterministic report (text or JSON) and exits 0 only
when every check it ran passed.  Malformed input and out-of-scope requests
exit 2 with the underlying error message on stderr.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import series
from .arith import ParseError, PoleError, parse, to_text
from .fixedpoint import (
    DegenerateFixedPoint, FixedPointModule, ModuleVector, UnsupportedScope, relation_suite,
)
from .parallel import pmap
from .quiver import Quiver, QuiverConfigError, load_quiver
from .rmatrix import U_AUX, block_matrix, limit_checks, limit_vector
from .shuffle import ShuffleElement, parse_word, shuffle_mul, wheel_check, word_to_shuffle
from .taut import MAX_ENTRY, ef_commutator_grid, residue_check

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class WorkbenchConfig:
    quiver_path: Path
    quiver: Quiver
    w: tuple
    vmax: int | None
    dmin: int
    dmax: int
    order: int
    fmt: str

    @property
    def name(self) -> str:
        return self.quiver_path.stem

    @property
    def degrees(self) -> range:
        return range(self.dmin, self.dmax + 1)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def build_config(args) -> WorkbenchConfig:
    quiver = load_quiver(args.quiver)
    n = len(quiver.vertices)
    w = _int_list(args.w) if args.w is not None else [1] * n
    if len(w) == 1 and n > 1:
        w = w * n
    if len(w) != n:
        raise UsageError(f"--w has {len(w)} entries but the quiver has {n} vertices")
    if any(x < 0 or x > MAX_ENTRY for x in w):
        raise UsageError(f"--w entries must lie in [0, {MAX_ENTRY}]")
    if args.vmax is not None and not 0 <= args.vmax <= MAX_ENTRY:
        raise UsageError(f"--vmax must lie in [0, {MAX_ENTRY}]")
    if args.dmin > args.dmax:
        raise UsageError("--dmin must not exceed --dmax")
    if max(abs(args.dmin), abs(args.dmax)) > 6:
        raise UsageError("degree range must lie in [-6, 6]")
    if args.order < 1:
        raise UsageError("--order must be positive")
    return WorkbenchConfig(Path(args.quiver), quiver, tuple(w), args.vmax, args.dmin, args.dmax, args.order, args.format)


def parse_label(module: FixedPointModule, text: str | None):
    """'1,2|' -> ((1, 2), ()) ; empty or missing text is the vacuum."""
    if not text:
        return module.vacuum()
    parts = text.split("|")
    if len(parts) != len(module.quiver.vertices):
        raise UsageError(f"label {text!r} needs {len(module.quiver.vertices)} '|'-separated subsets")
    return module.check_label([_int_list(p) for p in parts])


def format_label(label) -> str:
    return "|".join(",".join(map(str, s)) for s in label)


def parse_element(quiver: Quiver, text: str) -> ShuffleElement:
    """A generator word like '1:0,1:-1', or an explicit 'EXPR@n1,n2' with its degree."""
    if "@" in text:
        expr, deg = text.rsplit("@", 1)
        return ShuffleElement(quiver, _int_list(deg), parse(expr))
    return word_to_shuffle(quiver, parse_word(text))


# -- output --------------------------------------------------------------------

def emit(cfg_fmt: str, payload: dict, text_lines: list[str]) -> None:
    if cfg_fmt == "json":
        sys.stdout.write(json.dumps({"schema": SCHEMA, **payload}, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write("\n".join(text_lines) + "\n")


def _verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def _report_lines(report) -> list[str]:
    lines = []
    for rel, tally in report.summary().items():
        lines.append(f"{rel}: {tally['passed']}/{tally['checked']} passed")
    for c in report.failures():
        lines.append("FAIL " + json.dumps(c.to_json(), sort_keys=True))
    for s in report.skipped:
        lines.append(f"skipped {s['relation']}: {s['reason']}")
    return lines


def _merge_reports(reports):
    from .fixedpoint import RelationReport

    out = RelationReport()
    for r in reports:
        out.checks.extend(r.checks)
        out.skipped.extend(r.skipped)
    return out


# -- commands ------------------------------------------------------------------

def cmd_shuffle_mul(cfg: WorkbenchConfig, args) -> int:
    left = parse_element(cfg.quiver, args.left)
    right = parse_element(cfg.quiver, args.right)
    product = shuffle_mul(left, right)
    value = to_text(product.value)
    emit(cfg.fmt, {"command": "shuffle-mul", "quiver": cfg.name, "degree": list(product.degree), "value": value}, [value])
    return EXIT_OK


def cmd_wheel_check(cfg: WorkbenchConfig, args) -> int:
    element = parse_element(cfg.quiver, args.element)
    report = wheel_check(element)
    lines = [f"{_verdict(report.passed)} wheel conditions ({report.checked} specializations{', vacuous' if report.vacuous else ''})"]
    if report.violation:
        lines.append("violated at " + report.violation["specialization"] + " -> " + report.violation["value"])
    emit(cfg.fmt, {"command": "wheel-check", "quiver": cfg.name, "degree": list(element.degree), **report.to_json()}, lines)
    return EXIT_OK if report.passed else EXIT_FAIL


def _apply_operator(module: FixedPointModule, op_text: str, x: ModuleVector, literal: bool) -> ModuleVector:
    kind, _, rest = op_text.partition(":")
    if kind in ("e", "f"):
        try:
            i, d = rest.rsplit(":", 1)
            d = int(d)
        except ValueError:
            raise UsageError(f"operator {op_text!r}: expected {kind}:VERTEX:DEGREE") from None
        return (module.e if kind == "e" else module.f)(i, d, x)
    if kind == "fword":
        return module.act_word_f(parse_word(rest), x)
    if kind == "shuffle":
        return module.act_shuffle(parse_element(module.quiver, rest), x, literal=literal)
    if kind == "diag":
        parts = rest.split(":")
        if len(parts) not in (2, 3):
            raise UsageError(f"operator {op_text!r}: expected diag:KIND:VERTEX[:PARAM]")
        param = int(parts[2]) if len(parts) == 3 else 1
        return module.act_diagonal(parts[0], parts[1], x, param)
    raise UsageError(f"unknown operator {op_text!r}; use e:, f:, fword:, shuffle: or diag:")


def cmd_act(cfg: WorkbenchConfig, args) -> int:
    module = FixedPointModule(cfg.quiver, cfg.w)
    label = parse_label(module, args.label)
    image = _apply_operator(module, args.operator, module.vector(label), args.literal)
    lines = [f"I[{format_label(lab)}]: {to_text(c)}" for lab, c in image.items()] or ["0"]
    emit(cfg.fmt, {"command": "act", "quiver": cfg.name, "w": list(cfg.w), "operator": args.operator,
                   "label": [list(s) for s in label], "result": image.to_json()}, lines)
    return EXIT_OK


def _relations_task(task):
    quiver, w, vmax, dmin, dmax, scope, rel = task
    return relation_suite(quiver, w, vmax, dmin, dmax, rel5_scope=scope, relations=[rel])


def cmd_verify_relations(cfg: WorkbenchConfig, args) -> int:
    if args.rel5_scope == "full" and cfg.quiver.has_edges():
        raise UnsupportedScope("unsupported: non-Grassmannian fixed points")
    tasks = [(cfg.quiver, cfg.w, cfg.vmax, cfg.dmin, cfg.dmax, args.rel5_scope, rel) for rel in range(6)]
    report = _merge_reports(pmap(_relations_task, tasks))
    lines = _report_lines(report) + [f"{_verdict(report.passed)} {len(report.checks)} checks"]
    emit(cfg.fmt, {"command": "verify-relations", "quiver": cfg.name, "w": list(cfg.w), "passed": report.passed,
                   "summary": report.summary(), "skipped": report.skipped,
                   "checks": [c.to_json() for c in report.checks]}, lines)
    return EXIT_OK if report.passed else EXIT_FAIL


def _action_task(task):
    quiver, i, v, w, ds = task
    grid = ef_commutator_grid(quiver, i, v, w, ds, ds)
    rows = [(d, k, lhs == rhs) for (d, k), (lhs, rhs) in sorted(grid.items())]
    return rows, residue_check(quiver, i, v, w)


def cmd_verify_action(cfg: WorkbenchConfig, args) -> int:
    Q = cfg.quiver
    top = cfg.vmax if cfg.vmax is not None else max(cfg.w)
    sectors = list(itertools.product(range(top + 1), repeat=len(Q.vertices)))
    tasks = [(Q, i, v, cfg.w, list(cfg.degrees)) for i in Q.vertices for v in sectors]
    results = pmap(_action_task, tasks)
    rows, lines, ok = [], [], True
    for (_, i, v, w, _), (grid, residues) in zip(tasks, results):
        for d, k, passed in grid:
            ok &= passed
            rows.append({"quiver": cfg.name, "i": i, "d": d, "k": k, "v": list(v), "w": list(w), "passed": passed})
            lines.append(f"{cfg.name} i={i} d={d} k={k} v={list(v)} w={list(w)} {_verdict(passed)}")
        for kind, passed in residues.items():
            ok &= passed
            rows.append({"quiver": cfg.name, "i": i, "residue": kind, "v": list(v), "w": list(w), "passed": passed})
            lines.append(f"{cfg.name} i={i} residue={kind} v={list(v)} w={list(w)} {_verdict(passed)}")
    lines.append(f"{_verdict(ok)} {len(rows)} checks")
    emit(cfg.fmt, {"command": "verify-action", "quiver": cfg.name, "passed": ok, "rows": rows}, lines)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_rmatrix(cfg: WorkbenchConfig, args) -> int:
    module = FixedPointModule(cfg.quiver, cfg.w)
    i = args.i or cfg.quiver.vertices[0]
    cfg.quiver.index(i)
    v = _int_list(args.v) if args.v else [0] * len(cfg.quiver.vertices)
    rows = block_matrix(module, args.block, i, v)
    ok = True
    extra: dict = {}
    lines = []
    for row in rows:
        entry = row["entry"]
        if args.limit:
            entry = series.limit(entry, U_AUX, args.limit)
        elif args.series:
            exp = series.expand_at(entry, U_AUX, args.series, order=cfg.order)
            entry = " + ".join(f"({to_text(c)})*u^{e}" for e, c in exp.items() if not c.is_zero()) or "0"
        row["entry"] = entry if isinstance(entry, str) else to_text(entry)
        lines.append(f"I[{format_label(row['source'])}] -> I[{format_label(row['target'])}]: {row['entry']}")
    if args.limit:
        report = limit_checks(cfg.quiver, i, cfg.w, cfg.vmax)
        relevant = [c for c in report.checks if c.params.get("u") == args.limit]
        ok = all(c.passed for c in relevant)
        extra = {"checks": [c.to_json() for c in relevant], "skipped": report.skipped}
        lines += [f"{c.relation} v={c.params['v']} label={c.params['label']} {_verdict(c.passed)}" for c in relevant]
        lines += [f"skipped {s['relation']}: {s['reason']}" for s in report.skipped]
        lines.append(f"{_verdict(ok)} {len(relevant)} limit checks at u -> {args.limit}")
    emit(cfg.fmt, {"command": "rmatrix", "quiver": cfg.name, "w": list(cfg.w), "i": i, "block": args.block,
                   "v": list(v), "limit": args.limit, "passed": ok, "entries": rows, **extra}, lines)
    return EXIT_OK if ok else EXIT_FAIL


def _pair_task(task):
    quiver, w, v = task
    module = FixedPointModule(quiver, w)
    labels = module.basis(v)
    gram = module.gram_matrix(v)
    diag = [to_text(gram[n][n]) for n in range(len(labels))]
    off = all(gram[a][b].is_zero() for a in range(len(labels)) for b in range(len(labels)) if a != b)
    nonzero = all(not gram[n][n].is_zero() for n in range(len(labels)))
    return labels, diag, off and nonzero


def cmd_pair(cfg: WorkbenchConfig, args) -> int:
    module = FixedPointModule(cfg.quiver, cfg.w)
    sectors = module.sectors(cfg.vmax)
    results = pmap(_pair_task, [(cfg.quiver, cfg.w, v) for v in sectors])
    ok, out, lines = True, [], []
    for v, (labels, diag, perfect) in zip(sectors, results):
        ok &= perfect
        out.append({"v": list(v), "diagonal": [{"label": [list(s) for s in lab], "value": d} for lab, d in zip(labels, diag)],
                    "perfect": perfect})
        lines.append(f"v={list(v)} {_verdict(perfect)}")
        lines += [f"  <I[{format_label(lab)}], I[{format_label(lab)}]> = {d}" for lab, d in zip(labels, diag)]
    emit(cfg.fmt, {"command": "pair", "quiver": cfg.name, "w": list(cfg.w), "passed": ok, "sectors": out}, lines)
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "shuffle-mul": cmd_shuffle_mul,
    "wheel-check": cmd_wheel_check,
    "act": cmd_act,
    "verify-relations": cmd_verify_relations,
    "verify-action": cmd_verify_action,
    "rmatrix": cmd_rmatrix,
    "pair": cmd_pair,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("quiver", help="quiver JSON file")
    common.add_argument("--w", help="framing vector, comma separated (a single entry is broadcast)")
    common.add_argument("--vmax", type=int, help="largest dimension entry per vertex")
    common.add_argument("--dmin", type=int, default=-2)
    common.add_argument("--dmax", type=int, default=2)
    common.add_argument("--order", type=int, default=series.DEFAULT_ORDER, help="series truncation order")
    common.add_argument("--format", choices=("text", "json"), default="text")

    parser = argparse.ArgumentParser(prog="kha", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("shuffle-mul", parents=[common], help="shuffle product of two elements")
    p.add_argument("left", help="word such as 1:0,1:-1 or EXPR@degree")
    p.add_argument("right")

    p = sub.add_parser("wheel-check", parents=[common], help="test the wheel conditions")
    p.add_argument("element")

    p = sub.add_parser("act", parents=[common], help="apply an operator to a fixed-point basis vector")
    p.add_argument("operator", help="e:I:D, f:I:D, fword:WORD, shuffle:WORD or diag:KIND:I[:PARAM]")
    p.add_argument("--label", default="", help="fixed point, e.g. '1,2|' (default: vacuum)")
    p.add_argument("--literal", action="store_true", help="divide shuffle actions by prod n_i!")

    p = sub.add_parser("verify-relations", parents=[common], help="defining relations on the fixed basis")
    p.add_argument("--rel5-scope", choices=("auto", "vacuum", "full"), default="auto")

    sub.add_parser("verify-action", parents=[common], help="symbolic e/f commutator identity")

    p = sub.add_parser("rmatrix", parents=[common], help="R-matrix blocks for an auxiliary framing")
    p.add_argument("--i", help="vertex of the auxiliary framing (default: first vertex)")
    p.add_argument("--block", choices=("diag", "f", "e", "lower", "raise"), default="diag")
    p.add_argument("--v", help="source sector, comma separated (default: vacuum)")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--limit", choices=("0", "inf"))
    mode.add_argument("--series", choices=("0", "inf"), help="print the expansion up to --order terms")

    sub.add_parser("pair", parents=[common], help="Gram matrix of the modified pairing")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg, args)
    except (QuiverConfigError, UsageError, UnsupportedScope, DegenerateFixedPoint, ParseError, PoleError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
