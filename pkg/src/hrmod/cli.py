"""``hrmod`` command-line interface.

Every subcommand prints a JSON report (``gen`` prints a model file instead).
Index sets on the command line are 1-based; reports use 1-based labels too.

Exit codes: 0 success / statement holds, 1 usage or I/O error, 2 negative
verdict on valid input (invalid model, CI fails or is indeterminate, Markov
violations), 3 equivalent criteria disagree.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .elliptope import evaluate_triples, points_from_fields, sample_f3, sample_red_locus, write_csv
from .errors import BadGraph, BadIndexSets, BadKernel, CriterionDisagreement, HRModError, NotSymmetric, TooLarge, ValidationError
from .generate import laplacian_precision, make_rng, random_connected_graph, random_points_variogram
from .graphs import parse_graph
from .independence import CIStatement, Verdict, check_global_markov, ci_general_mhr, ci_sigma2, ci_singleton, pairwise_markov_graph
from .model import Variogram, check_precision, validate_variogram, variogram_from_precision
from .setfunctions import MHR_DEFAULT_REPS, MHR_REPS, SIGMA2_DEFAULT_REPS, SIGMA2_REPS, m_hr, m_hr_rep, sigma2, sigma2_rep
from .tolerance import DEFAULT_TOL

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NEGATIVE = 2
EXIT_DISAGREE = 3

MAX_ALL_SUBSETS_D = 12
FILE_SYMMETRY_TOL = 1e-12
FILE_ROWSUM_TOL = 1e-9

VERDICTS = ("holds", "fails", "indeterminate")

REPORT_SCHEMA = {
    "type": "object",
    "required": ["command", "version", "input", "tolerance", "results"],
    "properties": {
        "command": {"enum": ["validate", "setfn", "ci", "markov", "elliptope"]},
        "version": {"type": "string"},
        "input": {
            "type": "object",
            "required": ["sha256"],
            "properties": {"sha256": {"type": "string", "pattern": "^[0-9a-f]{64}$"}},
        },
        "tolerance": {
            "type": "object",
            "required": ["tol", "source"],
            "properties": {"tol": {"type": "number", "exclusiveMinimum": 0}, "source": {"enum": ["flag", "env", "default"]}},
        },
        "results": {"type": "object"},
        "verdict": {"enum": list(VERDICTS)},
        "error": {
            "type": "object",
            "required": ["type", "message"],
            "properties": {"type": {"type": "string"}, "message": {"type": "string"}},
        },
    },
}

MODEL_SCHEMA = {
    "type": "object",
    "required": ["d", "kind", "matrix"],
    "properties": {
        "d": {"type": "integer", "minimum": 2},
        "kind": {"enum": ["variogram", "precision"]},
        "matrix": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
        "name": {"type": "string"},
    },
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _tolerance(args) -> tuple[float, str]:
    if args.tol is not None:
        if not args.tol > 0:
            raise UsageError("--tol must be positive")
        return float(args.tol), "flag"
    raw = os.environ.get("HRMOD_TOL", "").strip()
    if raw:
        try:
            value = float(raw)
        except ValueError as exc:
            raise UsageError(f"HRMOD_TOL is not a number: {raw!r}") from exc
        if not value > 0:
            raise UsageError("HRMOD_TOL must be positive")
        return value, "env"
    return DEFAULT_TOL, "default"


def _clean(x):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None, tuples to lists."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if hasattr(x, "value") and isinstance(getattr(x, "value"), str):
        return x.value
    return x


# -- model files -------------------------------------------------------------


class ModelFileError(Exception):
    """Unreadable or structurally malformed model file."""


def read_model_file(path: str) -> tuple[dict, bytes]:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ModelFileError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(raw)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFileError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelFileError("model file must be a JSON object")
    for key in ("d", "kind", "matrix"):
        if key not in doc:
            raise ModelFileError(f"model file is missing {key!r}")
    d, kind, matrix = doc["d"], doc["kind"], doc["matrix"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 2:
        raise ModelFileError("'d' must be an integer >= 2")
    if kind not in ("variogram", "precision"):
        raise ModelFileError("'kind' must be 'variogram' or 'precision'")
    if "name" in doc and not isinstance(doc["name"], str):
        raise ModelFileError("'name' must be a string")
    if not isinstance(matrix, list) or len(matrix) != d or any(not isinstance(r, list) or len(r) != d for r in matrix):
        raise ModelFileError(f"'matrix' must be a {d}x{d} array")
    for row in matrix:
        for v in row:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ModelFileError("matrix entries must be numbers")
    return doc, raw


def model_variogram(doc: dict, tol: float) -> Variogram:
    """Certify the model in ``doc``; raises a ValidationError subclass."""
    M = np.array(doc["matrix"], dtype=float)
    asym = float(np.max(np.abs(M - M.T)))
    if asym > FILE_SYMMETRY_TOL * max(1.0, float(np.max(np.abs(M)))):
        raise NotSymmetric(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    if doc["kind"] == "variogram":
        return validate_variogram(M, tol)
    rows = float(np.max(np.abs(M.sum(axis=1))))
    if rows > FILE_ROWSUM_TOL * max(1.0, float(np.max(np.abs(M)))):
        raise BadKernel(f"precision row sums must vanish (max |row sum| {rows:.3e})")
    check_precision(M, tol)
    return variogram_from_precision(M, tol)


def model_file(matrix: np.ndarray, kind: str, name: str | None = None) -> dict:
    doc = {"d": int(matrix.shape[0]), "kind": kind, "matrix": [[float(v) for v in row] for row in matrix]}
    if name:
        doc["name"] = name
    return doc


# -- index sets --------------------------------------------------------------


def parse_index_set(text: str, d: int, name: str = "set") -> tuple[int, ...]:
    """``"2,4"`` (or ``"24"`` when d <= 9) to the 0-based tuple ``(1, 3)``."""
    text = (text or "").strip()
    if not text:
        raise UsageError(f"{name} must be nonempty")
    if "," in text or d > 9:
        parts = [t.strip() for t in text.split(",")]
    else:
        parts = list(text)
    try:
        labels = [int(t) for t in parts]
    except ValueError as exc:
        raise UsageError(f"cannot parse {name} {text!r}") from exc
    if len(set(labels)) != len(labels):
        raise UsageError(f"{name} has repeated indices")
    for v in labels:
        if not 1 <= v <= d:
            raise UsageError(f"{name} index {v} out of range 1..{d}")
    return tuple(sorted(v - 1 for v in labels))


def _one_based(I) -> list[int]:
    return [int(i) + 1 for i in I]


def _label(I) -> str:
    return ",".join(str(i) for i in _one_based(I))


# -- reports -----------------------------------------------------------------


def _report(command: str, digest: str, tol: float, source: str, results: dict, **extra) -> dict:
    out = {
        "command": command,
        "version": __version__,
        "input": {"sha256": digest},
        "tolerance": {"tol": tol, "source": source},
        "results": results,
    }
    out.update(extra)
    return _clean(out)


def _emit(report: dict, stream=None) -> None:
    stream = stream or sys.stdout
    stream.write(json.dumps(report, indent=2, sort_keys=False) + "\n")


def _digest(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


def _error(exc: BaseException) -> dict:
    return {"type": type(exc).__name__, "message": str(exc)}


def _load(args, tol):
    doc, raw = read_model_file(args.file)
    return doc, _digest(raw), model_variogram(doc, tol)


# -- subcommands -------------------------------------------------------------


def cmd_validate(args, tol, source) -> int:
    doc, raw = read_model_file(args.file)
    digest = _digest(raw)
    results = {"kind": doc["kind"], "d": doc["d"], "name": doc.get("name")}
    try:
        var = model_variogram(doc, tol)
    except ValidationError as exc:
        results.update(valid=False, reasons=[type(exc).__name__])
        eig = getattr(exc, "eigenvalue", None)
        if eig is not None:
            results["offending_eigenvalue"] = eig
        _emit(_report("validate", digest, tol, source, results, error=_error(exc)))
        return EXIT_NEGATIVE
    results.update(valid=True, reasons=[])
    if doc["kind"] == "precision":
        results["variogram"] = var.gamma
    _emit(_report("validate", digest, tol, source, results))
    return EXIT_OK


def _subsets(spec: str, d: int) -> list[tuple[int, ...]]:
    if spec.strip() == "all":
        if d > MAX_ALL_SUBSETS_D:
            raise UsageError(f"--subsets=all supports d <= {MAX_ALL_SUBSETS_D}")
        out = [I for r in range(1, d + 1) for I in itertools.combinations(range(d), r)]
    else:
        out = [parse_index_set(t, d, "subset") for t in spec.split(";") if t.strip()]
        if not out:
            raise UsageError("no subsets given")
    return sorted(set(out))


def _reps(spec: str | None, fn: str) -> tuple[str, ...]:
    allowed = MHR_REPS if fn == "mhr" else SIGMA2_REPS
    default = MHR_DEFAULT_REPS if fn == "mhr" else SIGMA2_DEFAULT_REPS
    if spec is None or spec == "none":
        return ()
    if spec == "default":
        return default
    if spec == "all":
        return allowed
    reps = tuple(r.strip() for r in spec.split(",") if r.strip())
    bad = [r for r in reps if r not in allowed]
    if bad:
        raise UsageError(f"unknown representation(s) {bad}; choose from {list(allowed)}")
    return reps


def cmd_setfn(args, tol, source) -> int:
    doc, digest, var = _load(args, tol)
    d = var.dim
    subsets = _subsets(args.subsets, d)
    reps = _reps(args.reps, args.fn)
    f = m_hr if args.fn == "mhr" else sigma2
    frep = m_hr_rep if args.fn == "mhr" else sigma2_rep
    table = []
    for I in subsets:
        row = {"I": _one_based(I), "value": f(var, I)}
        if reps:
            per, skipped = {}, {}
            for r in reps:
                if len(I) < 2:
                    skipped[r] = "needs |I| >= 2"
                    continue
                try:
                    per[r] = frep(var, I, r)
                except HRModError as exc:
                    skipped[r] = str(exc)
            row["reps"] = per
            if skipped:
                row["skipped"] = skipped
        table.append(row)
    results = {"fn": args.fn, "d": d, "subsets": table}
    _emit(_report("setfn", digest, tol, source, results))
    return EXIT_OK


def _verdict_dict(v) -> dict:
    return {
        "method": v.method,
        "verdict": v.verdict.value,
        "diagnostics": v.diagnostics,
        "applicability": v.applicability,
    }


def cmd_ci(args, tol, source) -> int:
    doc, digest, var = _load(args, tol)
    d = var.dim
    A = parse_index_set(args.A, d, "--A")
    B = parse_index_set(args.B, d, "--B")
    C = parse_index_set(args.C, d, "--C")
    try:
        stmt = CIStatement(A, B, C)
    except BadIndexSets as exc:
        raise UsageError(str(exc)) from exc
    statement = {"A": _one_based(A), "B": _one_based(B), "C": _one_based(C)}
    results: dict = {"statement": statement, "method": args.method, "criteria": {}}
    try:
        if args.method == "singleton":
            if len(A) != 1 or len(B) != 1:
                raise UsageError("--method singleton needs |A| = |B| = 1")
            v = ci_singleton(var, A[0], B[0], C, tol)
            results["criteria"]["singleton"] = _verdict_dict(v)
            final = v.verdict
        elif args.method == "sigma2":
            v = ci_sigma2(var, stmt, tol)
            results["criteria"]["sigma2"] = _verdict_dict(v)
            final = v.verdict
        else:
            v = ci_general_mhr(var, stmt, tol)
            results["criteria"]["mhr"] = _verdict_dict(v)
            final = v.verdict
            if args.method == "auto":
                s = ci_sigma2(var, stmt, tol)
                results["criteria"]["sigma2"] = _verdict_dict(s)
                decided = {Verdict.HOLDS, Verdict.FAILS}
                if s.applicability.get("applicable") and s.verdict in decided and final in decided and s.verdict != final:
                    raise CriterionDisagreement(
                        "m_HR and sigma2 criteria disagree",
                        {"mhr": final.value, "sigma2": s.verdict.value},
                    )
    except CriterionDisagreement as exc:
        results["residuals"] = exc.residuals
        _emit(_report("ci", digest, tol, source, results, error=_error(exc)))
        return EXIT_DISAGREE
    results["holds"] = final is Verdict.HOLDS if final is not Verdict.INDETERMINATE else None
    _emit(_report("ci", digest, tol, source, results, verdict=final.value))
    return EXIT_OK if final is Verdict.HOLDS else EXIT_NEGATIVE


def _graph_edges(graph) -> list[dict]:
    out = []
    for i, j in graph.sorted_edges():
        e = {"edge": [i + 1, j + 1]}
        if graph.weights is not None:
            e["weight"] = graph.weights[(i, j)]
        out.append(e)
    return out


def cmd_markov(args, tol, source) -> int:
    doc, digest, var = _load(args, tol)
    d = var.dim
    pairwise = pairwise_markov_graph(var, tol)
    results: dict = {"d": d, "pairwise_graph": _graph_edges(pairwise)}
    code = EXIT_OK
    if args.graph:
        try:
            graph = parse_graph(args.graph, d)
        except BadGraph as exc:
            raise UsageError(str(exc)) from exc
        rep = check_global_markov(var, graph, max_d=args.max_d, tol=tol)
        sweep = rep.as_dict()
        sweep["graph_edges"] = [[i + 1, j + 1] for i, j in rep.graph_edges]
        for entry in sweep["violations"] + sweep["indeterminate"]:
            for k in ("A", "B", "C"):
                entry[k] = _one_based(entry[k])
        results["global_markov"] = sweep
        if not rep.passed:
            code = EXIT_NEGATIVE
    _emit(_report("markov", digest, tol, source, results))
    return code


def cmd_gen(args, tol, source) -> int:
    if args.mode == "points":
        if args.d is None:
            raise UsageError("--mode points needs --d")
        if args.d < 2:
            raise UsageError("--d must be at least 2")
        if args.graph:
            raise UsageError("--graph only applies to --mode laplacian")
        G = random_points_variogram(args.d, make_rng(args.seed)).gamma
        doc = model_file(G, "variogram", args.name)
    else:
        rng = make_rng(args.seed)
        if args.graph:
            try:
                graph = parse_graph(args.graph, args.d)
            except BadGraph as exc:
                raise UsageError(str(exc)) from exc
        else:
            if args.d is None or args.d < 2:
                raise UsageError("--mode laplacian without --graph needs --d >= 2")
            graph = random_connected_graph(args.d, rng)
        if graph.n < 2:
            raise UsageError("graph needs at least two vertices")
        try:
            theta = laplacian_precision(graph, rng)
        except BadGraph as exc:
            raise UsageError(str(exc)) from exc
        doc = model_file(theta, "precision", args.name)
    sys.stdout.write(json.dumps(doc) + "\n")
    return EXIT_OK


def cmd_elliptope(args, tol, source) -> int:
    if args.n <= 0:
        raise UsageError("--n must be positive")
    filters = {f.strip() for f in (args.filters or "").split(",") if f.strip()}
    bad = filters - {"emtp2", "boundary"}
    if bad:
        raise UsageError(f"unknown filter(s) {sorted(bad)}; choose from emtp2, boundary")
    sample = sample_f3(
        args.n,
        args.seed,
        emtp2="emtp2" in filters,
        boundary_only="boundary" in filters,
        normalize=args.normalize,
        tol=tol,
    )
    try:
        with open(args.out, "w", newline="") as fh:
            rows = write_csv(sample.points, fh)
        red_rows = None
        if args.red_out:
            red = sample_red_locus(args.red_n or args.n, args.seed, tol)
            with open(args.red_out, "w", newline="") as fh:
                red_rows = write_csv(points_from_fields(evaluate_triples(red, tol)), fh)
    except OSError as exc:
        raise ModelFileError(f"cannot write output: {exc.strerror}") from exc
    params = {"n": args.n, "seed": args.seed, "filters": sorted(filters), "normalize": args.normalize}
    digest = _digest(json.dumps(params, sort_keys=True).encode())
    results = {
        "params": params,
        "drawn": sample.drawn,
        "in_f3": sample.in_f3,
        "acceptance_rate": sample.acceptance_rate,
        "counts": sample.counts,
        "rows_written": rows,
        "out": args.out,
    }
    if red_rows is not None:
        results.update(red_locus_rows=red_rows, red_out=args.red_out)
    _emit(_report("elliptope", digest, tol, source, results))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hrmod", description="Hüsler-Reiss models: set functions, extremal CI, elliptope.")
    p.add_argument("--version", action="version", version=f"hrmod {__version__}")
    p.add_argument("--tol", type=float, default=None, help="relative tolerance (default: $HRMOD_TOL or 1e-9)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", help="check a model file")
    s.add_argument("file")

    s = sub.add_parser("setfn", help="evaluate m_HR or sigma2 on subsets")
    s.add_argument("file")
    s.add_argument("--fn", choices=("mhr", "sigma2"), default="mhr")
    s.add_argument("--subsets", default="all", help="'all' or 1-based sets separated by ';', e.g. '1,2,4;2,4'")
    s.add_argument("--reps", default=None, help="'default', 'all', 'none' or a comma list of representations")

    s = sub.add_parser("ci", help="decide an extremal conditional independence statement")
    s.add_argument("file")
    s.add_argument("--A", required=True)
    s.add_argument("--B", required=True)
    s.add_argument("--C", required=True)
    s.add_argument("--method", choices=("auto", "mhr", "sigma2", "singleton"), default="auto")

    s = sub.add_parser("markov", help="pairwise Markov graph and global Markov sweep")
    s.add_argument("file")
    s.add_argument("--graph", default=None, help="cycleN, pathN, completeN, starN or an edge list like '1-2,2-3'")
    s.add_argument("--max-d", dest="max_d", type=int, default=7)

    s = sub.add_parser("gen", help="print a random model file")
    s.add_argument("--mode", choices=("points", "laplacian"), required=True)
    s.add_argument("--d", type=int, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--graph", default=None)
    s.add_argument("--name", default=None)

    s = sub.add_parser("elliptope", help="sample the 3-dimensional Hüsler-Reiss elliptope")
    s.add_argument("--n", type=int, required=True, help="number of uniform draws from [0,4]^3")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--filters", default="", help="comma list of: emtp2, boundary")
    s.add_argument("--normalize", action="store_true", help="rescale accepted points to sigma2 = 1")
    s.add_argument("--out", required=True)
    s.add_argument("--red-out", dest="red_out", default=None, help="also write the excluded boundary locus")
    s.add_argument("--red-n", dest="red_n", type=int, default=None)
    return p


COMMANDS = {
    "validate": cmd_validate,
    "setfn": cmd_setfn,
    "ci": cmd_ci,
    "markov": cmd_markov,
    "gen": cmd_gen,
    "elliptope": cmd_elliptope,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol, source = _tolerance(args)
        return COMMANDS[args.command](args, tol, source)
    except (UsageError, ModelFileError, TooLarge) as exc:
        print(f"hrmod: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"hrmod: invalid model: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CriterionDisagreement as exc:
        print(f"hrmod: criteria disagree: {exc}", file=sys.stderr)
        return EXIT_DISAGREE


if __name__ == "__main__":
    sys.exit(main())
