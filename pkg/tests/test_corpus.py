import json
import shutil

import pytest

from conftest import CARTAN4, DELTA4, DELTA5
from oracles import naive_transpose_multiply, valuation
from rimcheck.blockdata import load_block_record, validate_block
from rimcheck.corpus import (
    ENV_VAR,
    CorpusError,
    corpus_dir,
    load_manifest,
    load_registry,
    verify_corpus,
)

ORACLE_STEMS = ["a7_p3", "a8_p3", "m11_p3", "m22_p3", "m23_p3", "hs_p3", "on_p3", "psl3_4_p3"]


def test_full_corpus_passes():
    rep = verify_corpus()
    assert rep.ok, rep.describe()
    assert rep.passed >= 23
    ids = [r.id for r in rep.results]
    assert ids == [e.id for e in load_manifest(corpus_dir())]


def test_gl4_filter_is_single_pass():
    rep = verify_corpus("gl4*")
    assert [(r.id, r.status) for r in rep.results] == [("gl4_unipotent", "pass")]


def test_psl2_9_cites_defining_characteristic():
    rep = verify_corpus("psl2_9")
    (r,) = rep.results
    assert r.status == "pass" and r.observed == "AllAtEnd"
    assert "R3" in r.detail


def test_empty_match():
    rep = verify_corpus("no_such_entry*")
    assert rep.results == [] and rep.ok


def test_missing_file_skips():
    (r,) = verify_corpus("psp4_8_p3").results
    assert r.status == "skipped" and "missing data file" in r.detail


def test_oracle_files_carry_provenance():
    for stem in ORACLE_STEMS:
        rec = load_block_record((corpus_dir() / f"{stem}.block.json").read_bytes())
        assert rec.provenance and "CharacterTable" in rec.provenance
        assert validate_block(rec).flags == []


def test_oracle_cartan_is_transpose_product():
    for stem in ORACLE_STEMS:
        obj = json.loads((corpus_dir() / f"{stem}.block.json").read_text())
        rec = load_block_record(json.dumps(obj))
        assert rec.cartan.matrix.to_rows() == naive_transpose_multiply(obj["decomposition"]["matrix"])


def test_gl_files_hold_the_printed_deltas():
    gl4 = load_block_record((corpus_dir() / "gl4_unipotent.block.json").read_bytes())
    gl5 = load_block_record((corpus_dir() / "gl5_unipotent.block.json").read_bytes())
    assert gl4.decomposition.matrix.to_rows() == DELTA4
    assert gl5.decomposition.matrix.to_rows() == DELTA5
    assert gl4.cartan.matrix.to_rows() == CARTAN4


# Unipotent degrees of GL_n(q) from the hook formula, computed here
# independently of tools/make_gl_blocks.py.
def _hooks(shape):
    conj = [sum(1 for r in shape if r > j) for j in range(shape[0])]
    return [shape[i] - j + conj[j] - i - 1 for i in range(len(shape)) for j in range(shape[i])]


def _unipotent_degree(shape, q):
    n = sum(shape)
    num = q ** sum(i * r for i, r in enumerate(shape))
    for i in range(1, n + 1):
        num *= q ** i - 1
    den = 1
    for h in _hooks(shape):
        den *= q ** h - 1
    assert num % den == 0
    return num // den


@pytest.mark.parametrize("stem,q,shapes", [
    ("gl4_unipotent", 5, [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]),
    ("gl5_unipotent", 2, [(5,), (3, 2), (3, 1, 1), (2, 2, 1), (1, 1, 1, 1, 1)]),
])
def test_gl_simple_dims_reproduce_unipotent_degrees(stem, q, shapes):
    rec = load_block_record((corpus_dir() / f"{stem}.block.json").read_bytes())
    dims = rec.simple_dims
    degrees = [_unipotent_degree(s, q) for s in shapes]
    for i, row in enumerate(rec.decomposition.matrix.to_rows()):
        assert sum(a * b for a, b in zip(row, dims)) == degrees[i]
    assert all(valuation(x, 3) == 0 for x in dims)


def test_env_override(tmp_path, monkeypatch):
    src = corpus_dir()
    for p in src.glob("*.json"):
        shutil.copy(p, tmp_path / p.name)
    monkeypatch.setenv(ENV_VAR, str(tmp_path))
    assert corpus_dir() == tmp_path
    assert verify_corpus("gl5*").ok


def _tweak_manifest(tmp_path, edit):
    for p in corpus_dir().glob("*.json"):
        shutil.copy(p, tmp_path / p.name)
    m = json.loads((tmp_path / "manifest.json").read_text())
    edit(m)
    (tmp_path / "manifest.json").write_text(json.dumps(m))
    return tmp_path


def test_mismatch_reports_diff(tmp_path):
    def edit(m):
        m["entries"][0]["expected"]["matrix"][0][0] = 5
    root = _tweak_manifest(tmp_path, edit)
    (r,) = verify_corpus("gl4*", root=root).results
    assert r.status == "fail" and "(0,0): 4 != 5" in r.detail


def test_wrong_expected_outcome_fails(tmp_path):
    def edit(m):
        for e in m["entries"]:
            if e["id"] == "m11_p3":
                e["expected"]["outcome"] = "1Patterns"
    root = _tweak_manifest(tmp_path, edit)
    rep = verify_corpus("m11*", root=root)
    assert rep.failed == 1 and not rep.ok


def test_oracle_block_without_provenance_fails(tmp_path):
    root = _tweak_manifest(tmp_path, lambda m: None)
    obj = json.loads((root / "a7_p3.block.json").read_text())
    del obj["provenance"]
    (root / "a7_p3.block.json").write_text(json.dumps(obj))
    (r,) = verify_corpus("a7*", root=root).results
    assert r.status == "fail" and "provenance" in r.detail


def test_oracle_entry_must_name_oracle(tmp_path):
    def edit(m):
        m["entries"][2]["provenance"] = "ORACLE"
    root = _tweak_manifest(tmp_path, edit)
    with pytest.raises(CorpusError):
        load_manifest(root)


def test_missing_manifest(tmp_path):
    with pytest.raises(CorpusError):
        verify_corpus(root=tmp_path)


def test_registry_keys():
    blocks, dossiers = load_registry(corpus_dir())
    assert "gl4_unipotent" in blocks and "PSL2(9)" in dossiers


def test_report_is_deterministic():
    a = verify_corpus(workers=1).to_dict()
    b = verify_corpus(workers=8).to_dict()
    assert a == b
