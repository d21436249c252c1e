"""Command-line entry point: ``rimcheck COMMAND ...``.

Exit codes: 0 success, 1 usage error, 2 data or validation error,
3 conflicting derivations, 4 corpus failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from rimcheck import __version__
from rimcheck.blockdata import (
    BlockDataError,
    BlockRecord,
    CartanMatrix,
    Exactness,
    InconsistentCounts,
    clifford_counts,
    dumps_json,
    format_gap_display,
    load_gap_matrix_file,
    record_from_dict,
    validate_block,
)
from rimcheck.corpus import CorpusError, corpus_dir, load_registry, verify_corpus
from rimcheck.exactmat import DimensionError, IntMatrix, transpose_multiply
from rimcheck.kawata import (
    MatrixTooLarge,
    WrongExactness,
    classify_pattern,
    detect_patterns,
    exclude_by_lower_bounds,
    heart_report,
)
from rimcheck.verdict import (
    ConflictingDerivations,
    DossierError,
    NotInFamily,
    ParameterError,
    SimpleFactorRef,
    apply_rules,
    classify_simple_group,
    load_dossier,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CONFLICT, EXIT_CORPUS = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- input helpers -------------------------------------------------------

def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DataError(f"cannot read {path}: {e.strerror}") from None
    except UnicodeDecodeError:
        raise DataError(f"{path}: not UTF-8 text") from None


def _load_input(path: str, default_exactness: Exactness):
    """Accept a block record, a Cartan object, a bare JSON matrix, or GAP display text.

    Returns (record or None, IntMatrix, exactness, labels or None).
    """
    text = _read(path)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        m = load_gap_matrix_file(text)
        return None, m, default_exactness, None
    if isinstance(obj, list):
        return None, IntMatrix.from_rows(obj), default_exactness, None
    if isinstance(obj, dict) and "group_id" in obj:
        rec = record_from_dict(obj)
        return rec, rec.cartan.matrix, rec.cartan.exactness, list(rec.labels)
    if isinstance(obj, dict) and "matrix" in obj:
        ex = Exactness(obj["exactness"]) if "exactness" in obj else default_exactness
        return None, IntMatrix.from_rows(obj["matrix"]), ex, obj.get("labels")
    raise DataError(f"{path}: expected a block record, a matrix object, or a list of rows")


def _load_record(path: str) -> BlockRecord:
    try:
        obj = json.loads(_read(path))
    except json.JSONDecodeError as e:
        raise DataError(f"{path}: invalid JSON: {e}") from None
    if not isinstance(obj, dict):
        raise DataError(f"{path}: expected a block record object")
    return record_from_dict(obj)


# --- commands ------------------------------------------------------------
# Each returns (exit code, json payload, text lines).

def cmd_cartan(args):
    text = _read(args.file)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        obj = None
    if isinstance(obj, dict) and "group_id" in obj:
        rec = record_from_dict(obj)
        if rec.decomposition is None:
            raise DataError(f"{args.file}: record has no decomposition matrix")
        d = rec.decomposition.matrix
    elif isinstance(obj, dict) and "matrix" in obj:
        d = IntMatrix.from_rows(obj["matrix"])
    elif isinstance(obj, list):
        d = IntMatrix.from_rows(obj)
    else:
        d = load_gap_matrix_file(text)
    c = transpose_multiply(d)
    return EXIT_OK, {"exactness": "exact", "matrix": c.to_rows()}, [format_gap_display(c)]


def cmd_kawata(args):
    rec, m, ex, labels = _load_input(args.file, Exactness.EXACT)
    cartan = CartanMatrix(m, ex)
    pats = detect_patterns(cartan, allow_large=args.allow_large)
    labels = labels or [f"phi{j + 1}" for j in range(m.cols)]
    wild = rec.wild if rec is not None else None
    items, lines = [], []
    for p in pats:
        kind = classify_pattern(p)
        heart = heart_report(p, labels, m.cols)
        items.append(dict(p.to_dict(), kind=kind.value, report=heart.to_dict()))
        lines.append(f"pattern s={p.s} T={list(p.t_set)} n={p.n}: {kind.value}")
        lines.extend("  " + ln for ln in heart.describe().splitlines())
    if not pats:
        lines.append("no patterns; every simple module lies at the end of its component "
                     "(given the block is wild)")
    else:
        lines.append("T is listed in ascending column order; the order of S_2..S_n along the "
                     "component is not visible in the Cartan matrix")
        if any(classify_pattern(p).value == "CandidateOnly" for p in pats):
            lines.append("patterns with n >= 3 are a necessary condition only")
    if wild is False:
        lines.append("note: block is not asserted wild; the criterion does not apply")
    return EXIT_OK, {"patterns": items, "wild": wild}, lines


def cmd_exclude(args):
    _, m, ex, _ = _load_input(args.file, Exactness.LOWER_BOUND)
    res = exclude_by_lower_bounds(CartanMatrix(m, ex), allow_large=args.allow_large)
    if res.excluded:
        lines = ["Excluded: no Cartan matrix with these lower bounds has the uniserial pattern"]
    else:
        w = res.witness
        lines = [f"NotExcluded: bounds are consistent with s={w.s} T={list(w.t_set)} n={w.n}",
                 "(the witness says nothing about the true Cartan matrix)"]
    return EXIT_OK, res.to_dict(), lines


def cmd_validate(args):
    rec = _load_record(args.file)
    rep = validate_block(rec)
    lines = [f"{rep.group_id}: {'ok' if rep.ok else 'flags raised'}",
             f"  column nonzero counts: {rep.column_nonzero_counts}",
             f"  diagonal lower bounds: {rep.diagonal_lower_bounds}",
             f"  diagonal entries equal to 2: {rep.diagonal_two}"]
    if rep.brauer_expected is not None:
        lines.append(f"  min nu_p(dim): expected {rep.brauer_expected}, observed {rep.brauer_observed}")
    for f in rep.flags:
        lines.append(f"  FLAG {f}")
    for s in rep.skipped:
        lines.append(f"  skipped {s['check']}: {s['reason']}")
    return EXIT_OK, rep.to_dict(), lines


def cmd_clifford(args):
    c = clifford_counts(args.n_B, args.n_b, args.q)
    payload = {"n_B": args.n_B, "n_b": args.n_b, "q": c.q, "m": c.m, "ell": c.ell, "flags": list(c.flags)}
    lines = [f"m = {c.m}, ell = {c.ell}"] + [f"FLAG {f}" for f in c.flags]
    return EXIT_OK, payload, lines


def _parse_params(items) -> dict:
    out = {}
    for it in items:
        key, sep, val = it.partition("=")
        if not sep or not key:
            raise UsageError(f"parameter {it!r} is not KEY=VALUE")
        try:
            out[key] = int(val)
        except ValueError:
            raise UsageError(f"parameter {key} must be an integer, got {val!r}") from None
    return out


def cmd_classify(args):
    m = classify_simple_group(SimpleFactorRef(args.family, _parse_params(args.params)))
    cond = ", ".join(m.conditions) or "no side condition"
    return EXIT_OK, m.to_dict(), [f"{m.family} {m.params}: family {m.case} ({cond})"]


def _registry_dir(path: Optional[str], fallback: Path) -> Path:
    return Path(path) if path else fallback


def cmd_verdict(args):
    dossier = load_dossier(_read(args.dossier).encode())
    here = Path(args.dossier).parent
    blocks, _ = load_registry(_registry_dir(args.blocks, here))
    _, dossiers = load_registry(_registry_dir(args.dossiers, here))
    v = apply_rules(dossier, blocks, dossiers, principal=not args.non_principal)
    return EXIT_OK, v.to_dict(), [v.describe()]


def cmd_corpus(args):
    rep = verify_corpus(args.pattern, root=args.corpus_dir, workers=args.workers)
    code = EXIT_OK if rep.ok else EXIT_CORPUS
    return code, rep.to_dict(), [rep.describe()]


def cmd_parse(args):
    m = load_gap_matrix_file(_read(args.file))
    rows = m.to_rows()
    return EXIT_OK, rows, [dumps_json(rows)]


# --- wiring --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS lets the options go before or after the command without the
    # subcommand's defaults clobbering a value given up front.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    common.add_argument("--no-banner", action="store_true", default=argparse.SUPPRESS,
                        help="omit the version line in text mode")

    ap = _Parser(prog="rimcheck", parents=[common],
                 description="Cartan-matrix criteria for simple modules at the "
                             "end of their stable AR components.")
    ap.add_argument("--version", action="version", version=f"rimcheck {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("cartan", parents=[common], help="print transpose(D) * D")
    p.add_argument("file")
    p.set_defaults(func=cmd_cartan)

    p = sub.add_parser("kawata", parents=[common], help="find uniserial Cartan patterns")
    p.add_argument("file")
    p.add_argument("--allow-large", action="store_true")
    p.set_defaults(func=cmd_kawata)

    p = sub.add_parser("exclude", parents=[common], help="lower-bound exclusion of patterns")
    p.add_argument("file")
    p.add_argument("--allow-large", action="store_true")
    p.set_defaults(func=cmd_exclude)

    p = sub.add_parser("validate", parents=[common], help="consistency report for a block record")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("clifford", parents=[common], help="solve for the Clifford counts m and ell")
    p.add_argument("n_B", type=int)
    p.add_argument("n_b", type=int)
    p.add_argument("q", type=int)
    p.set_defaults(func=cmd_clifford)

    p = sub.add_parser("classify", parents=[common], help="p = 3 simple group family check")
    p.add_argument("family")
    p.add_argument("params", nargs="*", metavar="KEY=VALUE")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verdict", parents=[common], help="apply the rule catalog to a dossier")
    p.add_argument("dossier")
    p.add_argument("--blocks", help="directory of *.block.json files (default: the dossier's directory)")
    p.add_argument("--dossiers", help="directory of related *.dossier.json files "
                                      "(default: the dossier's directory)")
    p.add_argument("--non-principal", action="store_true",
                   help="treat blocks as non-principal; disables principal-block rules")
    p.set_defaults(func=cmd_verdict)

    p = sub.add_parser("corpus", parents=[common], help="bundled corpus operations")
    csub = p.add_subparsers(dest="corpus_command", required=True, parser_class=_Parser)
    v = csub.add_parser("verify", parents=[common], help="re-run every corpus check")
    v.add_argument("pattern", nargs="?", help="glob over entry ids")
    v.add_argument("--corpus-dir", type=Path, default=None,
                   help=f"corpus location (default: $RIMCHECK_CORPUS_DIR or {corpus_dir()})")
    v.add_argument("--workers", type=int, default=4)
    v.set_defaults(func=cmd_corpus)

    p = sub.add_parser("parse", parents=[common], help="GAP display text to a JSON matrix")
    p.add_argument("file")
    p.set_defaults(func=cmd_parse)
    return ap


def _err(msg: str) -> None:
    print(f"rimcheck: {msg}", file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.format = getattr(args, "format", "text")
    args.no_banner = getattr(args, "no_banner", False)
    try:
        code, payload, lines = args.func(args)
    except UsageError as e:
        _err(str(e))
        return EXIT_USAGE
    except ConflictingDerivations as e:
        _err(str(e))
        if args.format == "json":
            print(json.dumps(e.to_dict(), sort_keys=True), file=sys.stderr)
        return EXIT_CONFLICT
    except (DataError, BlockDataError, DimensionError, DossierError, CorpusError, WrongExactness,
            MatrixTooLarge, InconsistentCounts, NotInFamily, ParameterError, ValueError) as e:
        _err(f"{type(e).__name__}: {e}")
        return EXIT_DATA
    if args.format == "json":
        print(dumps_json(payload))
    else:
        if not args.no_banner:
            print(f"rimcheck {__version__}")
        print("\n".join(lines))
    return code


if __name__ == "__main__":
    sys.exit(main())
