"""Bundled case data and the harness that re-runs every check against it.

The manifest lists entries with a check name, the data files it reads and
the expected outcome.  Data files use the block record and dossier schemas.
Entries whose data came from an external character-table oracle must carry
a ``provenance`` string in their block file naming the command used.
"""

from __future__ import annotations

import fnmatch
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from rimcheck.blockdata import BlockRecord, Exactness, load_block_record, nonperiodicity_certificate, validate_block
from rimcheck.exactmat import IntMatrix, transpose_multiply
from rimcheck.kawata import detect_patterns, exclude_by_lower_bounds
from rimcheck.verdict import (
    ConflictingDerivations,
    GroupDossier,
    SimpleFactorRef,
    apply_rules,
    classify_simple_group,
    load_dossier,
    replay,
)

ENV_VAR = "RIMCHECK_CORPUS_DIR"
MANIFEST = "manifest.json"


class CorpusError(Exception):
    pass


def corpus_dir(override: Optional[os.PathLike] = None) -> Path:
    if override is not None:
        return Path(override)
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path(str(resources.files("rimcheck.corpus") / "data"))


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    check: str
    expected: dict
    provenance: str
    block_file: Optional[str] = None
    dossier_file: Optional[str] = None
    params: dict = field(default_factory=dict)

    @property
    def is_oracle(self) -> bool:
        return self.provenance.startswith("ORACLE")


@dataclass
class EntryResult:
    id: str
    check: str
    status: str            # pass | fail | skipped
    citation: str
    expected: str
    observed: str = ""
    detail: str = ""

    def to_dict(self) -> dict:
        return dict(vars(self))


@dataclass
class CorpusReport:
    results: list[EntryResult]

    @property
    def passed(self) -> int:
        return sum(r.status == "pass" for r in self.results)

    @property
    def failed(self) -> int:
        return sum(r.status == "fail" for r in self.results)

    @property
    def skipped(self) -> int:
        return sum(r.status == "skipped" for r in self.results)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_dict(self) -> dict:
        return {"passed": self.passed, "failed": self.failed, "skipped": self.skipped,
                "results": [r.to_dict() for r in self.results]}

    def describe(self) -> str:
        lines = []
        for r in self.results:
            line = f"{r.status.upper():7} {r.id:22} {r.check:20} expected {r.expected}"
            if r.observed and r.status != "pass":
                line += f", observed {r.observed}"
            lines.append(line)
            lines.append(f"        cite: {r.citation}")
            if r.detail:
                lines.append(f"        {r.detail}")
        lines.append(f"{self.passed} passed, {self.failed} failed, {self.skipped} skipped")
        return "\n".join(lines)


def load_manifest(root: Path) -> list[CorpusEntry]:
    path = root / MANIFEST
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CorpusError(f"no corpus manifest at {path}") from None
    entries = []
    seen = set()
    for raw in obj["entries"]:
        e = CorpusEntry(id=raw["id"], check=raw["check"], expected=raw["expected"],
                        provenance=raw["provenance"], block_file=raw.get("block_file"),
                        dossier_file=raw.get("dossier_file"), params=raw.get("params", {}))
        if e.id in seen:
            raise CorpusError(f"duplicate corpus id {e.id}")
        if e.is_oracle and (e.provenance == "ORACLE" or "(" not in e.provenance):
            raise CorpusError(f"{e.id}: ORACLE provenance must name its oracle")
        seen.add(e.id)
        entries.append(e)
    return entries


def _stem(name: str, suffix: str) -> str:
    return name[: -len(suffix)] if name.endswith(suffix) else name


def load_registry(root: Path):
    """All block records (keyed by file stem) and dossiers (keyed by name)."""
    blocks = {}
    for p in sorted(root.glob("*.block.json")):
        blocks[_stem(p.name, ".block.json")] = load_block_record(p.read_bytes())
    dossiers = {}
    for p in sorted(root.glob("*.dossier.json")):
        d = load_dossier(p.read_bytes())
        dossiers[d.name] = d
    return blocks, dossiers


def _fmt_matrix(m: IntMatrix) -> str:
    return json.dumps(m.to_rows())


def _run(entry: CorpusEntry, root: Path, blocks, dossiers) -> EntryResult:
    exp = entry.expected
    res = EntryResult(entry.id, entry.check, "fail", exp.get("citation", ""), exp.get("outcome", ""))
    rec: Optional[BlockRecord] = None
    if entry.block_file is not None:
        path = root / entry.block_file
        if not path.exists():
            res.status, res.detail = "skipped", f"missing data file {entry.block_file}"
            return res
        rec = load_block_record(path.read_bytes())
        if entry.is_oracle and not rec.provenance:
            res.detail = f"{entry.block_file} lacks a provenance header"
            return res
    dossier: Optional[GroupDossier] = None
    if entry.dossier_file is not None:
        path = root / entry.dossier_file
        if not path.exists():
            res.status, res.detail = "skipped", f"missing data file {entry.dossier_file}"
            return res
        dossier = load_dossier(path.read_bytes())

    check = CHECKS.get(entry.check)
    if check is None:
        res.detail = f"unknown check {entry.check!r}"
        return res
    observed, ok, detail = check(entry, rec, dossier, blocks, dossiers)
    res.observed = observed
    res.detail = detail
    res.status = "pass" if ok else "fail"
    return res


def _check_lower_bound_exclusion(entry, rec, dossier, blocks, dossiers):
    want = IntMatrix.from_rows(entry.expected["matrix"])
    got = transpose_multiply(rec.decomposition.matrix)
    excl = exclude_by_lower_bounds(rec.cartan) if rec.cartan.exactness is Exactness.LOWER_BOUND else None
    outcome = "Excluded" if excl and excl.excluded else "NotExcluded"
    diffs = [f"({i},{j}): {got[i, j]} != {want[i, j]}"
             for i in range(want.rows) for j in range(want.cols)
             if got.shape == want.shape and got[i, j] != want[i, j]]
    if got.shape != want.shape:
        diffs = [f"shape {got.shape} != {want.shape}"]
    ok = not diffs and outcome == entry.expected["outcome"]
    return outcome, ok, "; ".join(diffs)


def _check_no_diagonal_two(entry, rec, dossier, blocks, dossiers):
    rep = validate_block(rec)
    pats = detect_patterns(rec.cartan)
    outcome = "NoDiagonalTwo" if not rep.diagonal_two else f"DiagonalTwoAt{rep.diagonal_two}"
    ok = outcome == entry.expected["outcome"] and not pats
    return outcome, ok, f"diagonal = {list(rec.cartan.matrix.diagonal())}"


def _check_no_patterns(entry, rec, dossier, blocks, dossiers):
    pats = detect_patterns(rec.cartan)
    outcome = "NoPatterns" if not pats else f"{len(pats)}Patterns"
    detail = "" if not pats else json.dumps([p.to_dict() for p in pats])
    return outcome, outcome == entry.expected["outcome"], detail


def _check_column_count(entry, rec, dossier, blocks, dossiers):
    k = entry.params["min_positive"]
    rep = validate_block(rec)
    counts = rep.column_nonzero_counts
    diag = rec.cartan.matrix.diagonal()
    ok_cols = min(counts) >= k
    ok_diag = all(x >= k for x in diag)
    outcome = f"AllColumnsAtLeast{k}" if ok_cols and ok_diag else "ColumnCountViolated"
    return (outcome, outcome == entry.expected["outcome"] and not detect_patterns(rec.cartan),
            f"column counts = {counts}, diagonal = {list(diag)}")


def _check_nonperiodic(entry, rec, dossier, blocks, dossiers):
    if rec.simple_dims is None:
        return "NoDims", False, "record has no simple_dims"
    certs = [nonperiodicity_certificate(d, rec.prime, rec.p_rank) for d in rec.simple_dims]
    outcome = "AllNonPeriodic" if all(certs) else "NotCertified"
    return outcome, outcome == entry.expected["outcome"], f"dims = {list(rec.simple_dims)}"


def _check_verdict(entry, rec, dossier, blocks, dossiers):
    try:
        v = apply_rules(dossier, blocks, dossiers)
    except ConflictingDerivations as e:
        return "ConflictingDerivations", entry.expected["outcome"] == "ConflictingDerivations", str(e)
    replay(v, dossier, blocks, dossiers)
    rules = entry.expected.get("rules", [])
    fired = _all_rule_ids(v)
    missing = [r for r in rules if r not in fired]
    ok = v.status.value == entry.expected["outcome"] and not missing
    detail = "rules fired: " + ", ".join(fired)
    if missing:
        detail += f"; expected rules missing: {missing}"
    return v.status.value, ok, detail


def _all_rule_ids(v) -> list[str]:
    out = []
    for s in v.trace:
        out.append(s.rule_id)
        for sub in s.support:
            out.extend(_all_rule_ids(sub))
    return list(dict.fromkeys(out))


def _check_family(entry, rec, dossier, blocks, dossiers):
    p = entry.params
    m = classify_simple_group(SimpleFactorRef(p["family"], p.get("params")))
    return m.case, m.case == entry.expected["outcome"], f"conditions: {list(m.conditions)}"


CHECKS = {
    "lower_bound_exclusion": _check_lower_bound_exclusion,
    "no_diagonal_two": _check_no_diagonal_two,
    "no_patterns": _check_no_patterns,
    "column_count": _check_column_count,
    "nonperiodic": _check_nonperiodic,
    "verdict": _check_verdict,
    "family": _check_family,
}


def verify_corpus(pattern: Optional[str] = None, root: Optional[os.PathLike] = None,
                  workers: int = 4) -> CorpusReport:
    """Run every manifest entry whose id matches the glob ``pattern``.

    Results come back in manifest order regardless of worker scheduling.
    """
    base = corpus_dir(root)
    entries = load_manifest(base)
    if pattern:
        entries = [e for e in entries if fnmatch.fnmatchcase(e.id, pattern)]
    if not entries:
        return CorpusReport([])
    blocks, dossiers = load_registry(base)

    def run(e):
        try:
            return _run(e, base, blocks, dossiers)
        except Exception as exc:  # report, don't abort the sweep
            return EntryResult(e.id, e.check, "fail", e.expected.get("citation", ""),
                               e.expected.get("outcome", ""), "error", f"{type(exc).__name__}: {exc}")

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(run, entries))
    return CorpusReport(results)
