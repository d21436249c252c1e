import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import CARTAN4, DELTA5
from oracles import forward_clifford
from rimcheck.blockdata import (
    Exactness,
    GapParseError,
    InconsistentCounts,
    SchemaError,
    ValidationError,
    clifford_counts,
    dump_block_record,
    format_gap_display,
    load_block_record,
    load_gap_matrix_file,
    nonperiodicity_certificate,
    parse_gap_display,
    validate_block,
)
from rimcheck.corpus import corpus_dir
from rimcheck.exactmat import DimensionError, IntMatrix


def record(**over):
    base = {"group_id": "G", "prime": 3, "block_tag": "principal", "defect": 1,
            "group_p_valuation": 1, "p_rank": 1, "wild": False}
    base.update(over)
    return json.dumps(base).encode()


def dec(matrix, ordinary=None, brauer=None):
    return {"ordinary_labels": ordinary or [f"chi{i}" for i in range(len(matrix))],
            "brauer_labels": brauer or [f"phi{j}" for j in range(len(matrix[0]))],
            "matrix": matrix}


# --- loading -------------------------------------------------------------

def test_load_gl4_corpus_file():
    rec = load_block_record((corpus_dir() / "gl4_unipotent.block.json").read_bytes())
    assert rec.cartan.matrix == IntMatrix.from_rows(CARTAN4)
    assert rec.cartan.exactness is Exactness.LOWER_BOUND
    assert rec.decomposition.ordinary_labels[0] == "(4)"


def test_decomposition_only_gets_exact_cartan():
    rec = load_block_record(record(decomposition=dec([[1]])))
    assert rec.cartan.matrix.to_rows() == [[1]]
    assert rec.cartan.exactness is Exactness.EXACT


def test_inconsistent_cartan_rejected():
    with pytest.raises(ValidationError) as e:
        load_block_record(record(decomposition=dec([[1, 0], [1, 1]]),
                                 cartan={"exactness": "exact", "matrix": [[2, 1], [1, 2]]}))
    assert e.value.invariant == "cartan_matches_decomposition"


@pytest.mark.parametrize("obj,field", [
    ({"drop": "group_id"}, "group_id"),
    ({"group_id": 5}, "group_id"),
    ({"wild": 1}, "wild"),
    ({"prime": True}, "prime"),
    ({"colour": "red"}, "colour"),
    ({"cartan": {"exactness": "roughly", "matrix": [[1]]}}, "cartan.exactness"),
    ({"cartan": {"exactness": "exact"}}, "cartan.matrix"),
    ({"decomposition": {"matrix": [[1]], "brauer_labels": ["a"]}}, "decomposition.ordinary_labels"),
    ({"decomposition": dec([[1, 2], [3]])}, "decomposition.matrix"),
    ({"decomposition": dec([[1.5]])}, "decomposition.matrix"),
    ({"simple_dims": ["7"]}, "simple_dims"),
])
def test_schema_errors_name_the_field(obj, field):
    base = json.loads(record(decomposition=dec([[1]])))
    base.update(obj)
    if obj.get("drop"):
        del base[obj["drop"]], base["drop"]
    with pytest.raises(SchemaError) as e:
        load_block_record(json.dumps(base))
    assert e.value.field == field


def test_not_json():
    with pytest.raises(SchemaError):
        load_block_record(b"{nope")
    with pytest.raises(SchemaError):
        load_block_record(b"\xff\xfe")


@pytest.mark.parametrize("over,invariant", [
    ({}, "data_present"),
    ({"prime": 4, "decomposition": dec([[1]])}, "prime"),
    ({"defect": 3, "decomposition": dec([[1]])}, "defect_le_valuation"),
    ({"p_rank": 2, "decomposition": dec([[1]])}, "p_rank_le_valuation"),
    ({"decomposition": dec([[1, 0], [1, 0]])}, "decomposition.no_zero_column"),
    ({"decomposition": dec([[1, -1]])}, "decomposition.nonnegative"),
    ({"decomposition": dec([[1]], ordinary=["a", "b"])}, "decomposition.label_lengths"),
    ({"cartan": {"exactness": "exact", "matrix": [[1, 2], [3, 1]]}}, "cartan.symmetric"),
    ({"cartan": {"exactness": "exact", "matrix": [[0]]}}, "cartan.exact_diagonal"),
    ({"cartan": {"exactness": "exact", "matrix": [[1, 2]]}}, "cartan.square"),
    ({"cartan": {"exactness": "lower_bound", "matrix": [[1, -1], [-1, 1]]}}, "cartan.nonnegative"),
    ({"decomposition": dec([[1]]), "simple_dims": [1, 2]}, "simple_dims.aligned"),
    ({"decomposition": dec([[1]]), "simple_dims": [0]}, "simple_dims.positive"),
])
def test_validation_errors_name_the_invariant(over, invariant):
    with pytest.raises(ValidationError) as e:
        load_block_record(record(**over))
    assert e.value.invariant == invariant


def test_lower_bound_cartan_may_have_zero_diagonal():
    rec = load_block_record(record(cartan={"exactness": "lower_bound", "matrix": [[0, 0], [0, 1]]}))
    assert rec.cartan.exactness is Exactness.LOWER_BOUND


def test_roundtrip_corpus_files():
    for path in sorted(corpus_dir().glob("*.block.json")):
        rec = load_block_record(path.read_bytes())
        assert load_block_record(dump_block_record(rec)) == rec


small_dec = st.integers(1, 5).flatmap(lambda c: st.lists(
    st.lists(st.integers(0, 3), min_size=c, max_size=c), min_size=1, max_size=6)).filter(
    lambda rows: all(any(r[j] for r in rows) for j in range(len(rows[0]))))


@settings(max_examples=150, deadline=None)
@given(small_dec, st.booleans(), st.sampled_from([2, 3, 5]), st.text(max_size=20))
def test_roundtrip_property(rows, wild, p, notes):
    obj = json.loads(record(prime=p, wild=wild, notes=notes, decomposition=dec(rows)))
    rec = load_block_record(json.dumps(obj))
    again = load_block_record(dump_block_record(rec))
    assert again == rec
    assert dump_block_record(again) == dump_block_record(rec)


@settings(max_examples=150, deadline=None)
@given(small_dec.filter(lambda rows: True).map(lambda rows: [[min(x, 1) for x in r] for r in rows])
       .filter(lambda rows: all(any(r[j] for r in rows) for j in range(len(rows[0])))))
def test_zero_one_diagonal_equals_column_counts(rows):
    rec = load_block_record(record(decomposition=dec(rows)))
    rep = validate_block(rec)
    assert list(rec.cartan.matrix.diagonal()) == rep.column_nonzero_counts


# --- GAP display ---------------------------------------------------------

def test_parse_simple():
    assert parse_gap_display("[ [ 2, 1 ], [ 1, 3 ] ]").to_rows() == [[2, 1], [1, 3]]


def test_parse_delta5_with_layout():
    text = """[ [ 1, 0, 0, 0, 0 ],
      [ 0, 1, 0, 0, 0 ],
  [ 1,1,1,0,0 ],[0,  1, 1, 1, 0],
\t[ +1, 0, 1, 0, 1 ] ]
"""
    assert parse_gap_display(text) == IntMatrix.from_rows(DELTA5)


def test_parse_ragged():
    with pytest.raises(DimensionError, match="ragged row 2"):
        parse_gap_display("[ [1,2], [3] ]")


@pytest.mark.parametrize("text,offset", [
    ("[ [1,2], [3,4] ] x", 17),
    ("[ [1,2] [3,4] ]", 8),
    ("[ [1,,2] ]", 5),
    ("[ [1,2], ", 9),
    ("[ [1;2] ]", 4),
    ("[ [] ]", 3),
    ("[ ]", 2),
    ("  1", 2),
    ("[ [ é ] ]", 4),
    ("[ [ 1 ], é ]", 9),
])
def test_parse_errors_carry_byte_offset(text, offset):
    with pytest.raises(GapParseError) as e:
        parse_gap_display(text)
    assert e.value.offset == offset


def test_parse_negative_and_big():
    m = parse_gap_display("[[-3, 123456789012345678901234567890]]")
    assert m[0, 1] == 123456789012345678901234567890 and m[0, 0] == -3


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6).flatmap(lambda c: st.lists(
    st.lists(st.integers(-10 ** 6, 10 ** 6), min_size=c, max_size=c), min_size=1, max_size=6)))
def test_gap_roundtrip(rows):
    m = IntMatrix.from_rows(rows)
    assert parse_gap_display(format_gap_display(m)) == m


def test_comment_lines_skipped():
    assert load_gap_matrix_file("# made by hand\n[ [ 1 ] ]\n").to_rows() == [[1]]


# --- validation report ---------------------------------------------------

def test_validate_gl4():
    rec = load_block_record((corpus_dir() / "gl4_unipotent.block.json").read_bytes())
    rep = validate_block(rec)
    assert rep.column_nonzero_counts == [4, 3, 2, 2, 1]
    assert rep.diagonal_lower_bounds == [4, 3, 2, 2, 1]
    assert rep.diagonal_two == [2, 3]
    assert rep.flags == []
    assert any(s["check"] == "brauer_valuation" for s in rep.skipped)


def test_brauer_violation_flagged():
    # every simple dimension divisible by 3^a with positive defect
    rec = load_block_record(record(defect=1, group_p_valuation=1, decomposition=dec([[1, 0], [0, 1], [1, 1]]),
                                   simple_dims=[3, 6]))
    rep = validate_block(rec)
    assert "BrauerViolation" in rep.flags
    assert rep.brauer_expected == 0 and rep.brauer_observed == 1


def test_defect_zero_block_clean():
    rec = load_block_record(record(defect=0, group_p_valuation=2, cartan={"exactness": "exact", "matrix": [[1]]},
                                   simple_dims=[9]))
    rep = validate_block(rec)
    assert rep.flags == []
    assert rep.brauer_expected == rep.brauer_observed == 2
    assert rep.ok
    assert any(s["check"] == "column_counts" for s in rep.skipped)


def test_report_dict_is_json():
    rec = load_block_record(record(decomposition=dec([[1]])))
    json.dumps(validate_block(rec).to_dict())


# --- Clifford counts -----------------------------------------------------

def test_clifford_examples():
    c = clifford_counts(7, 5, 3)
    assert (c.m, c.ell) == (2, 1)
    assert forward_clifford(2, 1, 3) == (7, 5)
    c = clifford_counts(4, 4, 3)
    assert (c.m, c.ell) == (1, 1)
    with pytest.raises(InconsistentCounts):
        clifford_counts(5, 3, 3)


def test_clifford_m_zero_flagged():
    c = clifford_counts(2, 6, 3)
    assert (c.m, c.ell) == (0, 2)
    assert c.flags == ("m_zero",)


def test_clifford_negative_solution():
    # integral but negative: n_B = 1, n_b = 9, q = 2 -> m = (2 - 9)/3 not integral; use q=3
    with pytest.raises(InconsistentCounts):
        clifford_counts(1, 9, 2)
    with pytest.raises(InconsistentCounts, match="negative"):
        clifford_counts(1, 11, 3)   # m = (3 - 11)/8 = -1, ell = (33 - 1)/8 = 4


def test_clifford_bad_q():
    with pytest.raises(ValueError):
        clifford_counts(3, 3, 4)
    with pytest.raises(ValueError):
        clifford_counts(0, 3, 3)


def test_clifford_random_inverse():
    rng = random.Random(5)
    for _ in range(500):
        q = rng.choice([2, 3, 5, 7, 11])
        m, ell = rng.randint(0, 80), rng.randint(0, 80)
        if m == ell == 0:
            continue
        c = clifford_counts(*forward_clifford(m, ell, q), q)
        assert (c.m, c.ell) == (m, ell)


# --- nonperiodicity ------------------------------------------------------

@pytest.mark.parametrize("dim,p,a,want", [
    (154, 3, 2, True),
    (9, 3, 2, False),
    (6, 3, 3, True),
    (27, 3, 3, False),
    (25, 5, 2, False),
    (7, 5, 2, True),
])
def test_nonperiodicity(dim, p, a, want):
    assert nonperiodicity_certificate(dim, p, a) is want


def test_nonperiodicity_precondition():
    with pytest.raises(ValueError):
        nonperiodicity_certificate(4, 3, 1)
