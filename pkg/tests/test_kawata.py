import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import CARTAN4, CARTAN5
from gen import exact, lower, pattern_rich, random_completion, random_filler, random_symmetric
from oracles import brute_force_consistent, brute_force_patterns
from rimcheck.blockdata import CartanMatrix, Exactness
from rimcheck.exactmat import DimensionError, IntMatrix
from rimcheck.kawata import (
    MAX_COLUMNS,
    KawataPattern,
    MatrixTooLarge,
    PatternKind,
    WrongExactness,
    classify_pattern,
    detect_patterns,
    exclude_by_lower_bounds,
    find_patterns,
    heart_report,
    pattern_holds,
    synth_pattern_matrix,
)

EXAMPLE4 = [[2, 1, 1, 0], [1, 2, 1, 0], [1, 1, 3, 1], [0, 0, 1, 2]]


def as_tuples(pats):
    return [(p.n, p.t_set, p.s) for p in pats]


# --- detection -----------------------------------------------------------

def test_two_by_two_both_ways():
    assert as_tuples(detect_patterns(exact([[2, 1], [1, 2]]))) == [(2, (0,), 1), (2, (1,), 0)]


def test_four_by_four_example():
    got = as_tuples(detect_patterns(exact(EXAMPLE4)))
    assert (3, (0, 1), 2) in got
    assert (2, (3,), 2) in got
    assert got == brute_force_patterns(EXAMPLE4)


@pytest.mark.parametrize("rows", [[[1]], [[3, 1], [1, 2]], [[2]], [[2, 0], [0, 2]]])
def test_small_cases_match_oracle(rows):
    assert as_tuples(detect_patterns(exact(rows))) == brute_force_patterns(rows)


def test_identity_has_none():
    assert detect_patterns(exact([[1 if i == j else 0 for j in range(4)] for i in range(4)])) == []


def test_diagonal_gate():
    # no diagonal entry equal to 2 means no pattern, whatever the rest looks like
    rng = random.Random(11)
    for _ in range(300):
        rows = random_symmetric(rng, rng.randint(1, 7))
        for i in range(len(rows)):
            if rows[i][i] == 2:
                rows[i][i] = 3
        assert find_patterns(IntMatrix.from_rows(rows)) == []


def test_every_pattern_satisfies_shape():
    rng = random.Random(3)
    for _ in range(300):
        c = exact(pattern_rich(rng, rng.randint(2, 7)))
        for p in detect_patterns(c):
            assert pattern_holds(c.matrix, p.s, p.t_set)


def test_oracle_equivalence_sample():
    rng = random.Random(1)
    for _ in range(1500):
        size = rng.randint(1, 7)
        rows = pattern_rich(rng, size) if rng.random() < 0.7 else random_symmetric(rng, size, min_diag=1)
        assert as_tuples(detect_patterns(exact(rows))) == brute_force_patterns(rows)


def test_bare_matrix_search_allows_zero_diagonal():
    rng = random.Random(2)
    for _ in range(1500):
        rows = random_symmetric(rng, rng.randint(1, 7))
        assert as_tuples(find_patterns(IntMatrix.from_rows(rows))) == brute_force_patterns(rows)


def test_bare_search_needs_square():
    with pytest.raises(DimensionError):
        find_patterns(IntMatrix.from_rows([[2, 1]]))


sym8 = st.integers(1, 6).flatmap(lambda n: st.lists(
    st.integers(0, 3), min_size=n * (n + 1) // 2, max_size=n * (n + 1) // 2).map(
    lambda vals, n=n: _fill(n, vals)))


def _fill(n, vals):
    rows = [[0] * n for _ in range(n)]
    it = iter(vals)
    for i in range(n):
        for j in range(i, n):
            rows[i][j] = rows[j][i] = next(it)
    return rows


@settings(max_examples=300, deadline=None)
@given(sym8)
def test_oracle_equivalence_property(rows):
    assert as_tuples(find_patterns(IntMatrix.from_rows(rows))) == brute_force_patterns(rows)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 7))
def test_permutation_equivariance(seed, size):
    rng = random.Random(seed)
    rows = pattern_rich(rng, size)
    perm = list(range(size))
    rng.shuffle(perm)
    m = IntMatrix.from_rows(rows)
    moved = CartanMatrix(m.permuted(perm), Exactness.EXACT)
    # new index i is old index perm[i]
    inv = {old: new for new, old in enumerate(perm)}
    want = sorted(KawataPattern.make(inv[p.s], [inv[t] for t in p.t_set])
                  for p in detect_patterns(exact(rows)))
    assert detect_patterns(moved) == want


def test_output_sorted_and_unique():
    rng = random.Random(8)
    for _ in range(200):
        pats = detect_patterns(exact(pattern_rich(rng, 6)))
        assert pats == sorted(set(pats))


def test_rejects_lower_bound_input():
    with pytest.raises(WrongExactness):
        detect_patterns(lower([[2]]))
    with pytest.raises(WrongExactness):
        exclude_by_lower_bounds(exact([[2]]))


def test_size_cap():
    big = IntMatrix.identity(MAX_COLUMNS + 1)
    with pytest.raises(MatrixTooLarge):
        detect_patterns(CartanMatrix(big))
    assert detect_patterns(CartanMatrix(big), allow_large=True) == []


# --- pattern objects -----------------------------------------------------

def test_pattern_validation():
    with pytest.raises(ValueError):
        KawataPattern(2, (), 0)
    with pytest.raises(ValueError):
        KawataPattern(2, (1,), 1)
    with pytest.raises(ValueError):
        KawataPattern(3, (1,), 0)
    with pytest.raises(ValueError):
        KawataPattern(3, (2, 1), 0)
    assert KawataPattern.make(0, {3, 1}) == KawataPattern(3, (1, 3), 0)


def test_classification():
    pats = detect_patterns(exact([[2, 1], [1, 3]]))
    assert pats == [KawataPattern(2, (0,), 1)]
    assert classify_pattern(pats[0]) is PatternKind.CONFIRMED_OFF_RIM
    assert classify_pattern(KawataPattern(3, (0, 1), 2)) is PatternKind.CANDIDATE_ONLY
    for p in detect_patterns(exact([[2, 1], [1, 2]])):
        assert classify_pattern(p) is PatternKind.CONFIRMED_OFF_RIM


# --- heart report --------------------------------------------------------

def test_heart_n2():
    rep = heart_report(KawataPattern(2, (0,), 1), ["S2", "S"])
    assert rep.uniserial_ladder == ("S2",)
    assert rep.pim_ladders == {"S2": ("S2", "S", "S2")}
    assert rep.remainder_label == "V"


def test_heart_n4_cycles():
    rep = heart_report(KawataPattern.make(0, [1, 2, 3]), ["S", "A", "B", "C"])
    assert rep.s_label == "S"
    assert rep.uniserial_ladder == ("A", "B", "C")
    assert rep.pim_ladders == {
        "A": ("A", "B", "C", "S", "A"),
        "B": ("B", "C", "S", "A", "B"),
        "C": ("C", "S", "A", "B", "C"),
    }


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 8), st.data())
def test_ladder_lengths(n, data):
    total = data.draw(st.integers(n, n + 3))
    cols = data.draw(st.permutations(range(total)))
    pat = KawataPattern.make(cols[0], cols[1:n])
    rep = heart_report(pat, [f"x{i}" for i in range(total)], total)
    assert len(rep.uniserial_ladder) == n - 1
    assert all(len(v) == n + 1 and v[0] == v[-1] == k for k, v in rep.pim_ladders.items())


def test_heart_label_mismatch():
    with pytest.raises(ValueError):
        heart_report(KawataPattern(2, (0,), 1), ["a", "b"], size=3)
    with pytest.raises(ValueError):
        heart_report(KawataPattern(2, (0,), 4), ["a", "b"])


# --- lower-bound exclusion -----------------------------------------------

def test_gl_products_excluded():
    assert exclude_by_lower_bounds(lower(CARTAN4)).excluded
    assert exclude_by_lower_bounds(lower(CARTAN5)).excluded


def test_not_excluded_with_witness():
    res = exclude_by_lower_bounds(lower([[2, 1], [1, 1]]))
    assert not res.excluded
    assert res.witness == KawataPattern(2, (0,), 1)


def test_witness_is_least_consistent_assignment():
    rng = random.Random(21)
    for _ in range(800):
        rows = random_symmetric(rng, rng.randint(1, 6), (0, 1, 2, 3), (4, 3, 2, 1))
        res = exclude_by_lower_bounds(lower(rows))
        oracle = brute_force_consistent(rows)
        assert res.excluded == (not oracle)
        if oracle:
            w = res.witness
            assert (w.n, w.t_set, w.s) == oracle[0]


def test_exclusion_soundness_sample():
    rng = random.Random(4)
    checked = 0
    while checked < 50:
        rows = random_symmetric(rng, rng.randint(2, 6), (0, 1, 2, 3), (3, 3, 3, 1))
        if not exclude_by_lower_bounds(lower(rows)).excluded:
            continue
        checked += 1
        for _ in range(100):
            assert detect_patterns(random_completion(rng, rows)) == []


def test_exact_pattern_is_never_excluded():
    # a matrix that has a pattern, read as its own lower bound, must survive
    rng = random.Random(6)
    for _ in range(300):
        rows = pattern_rich(rng, rng.randint(2, 6))
        if detect_patterns(exact(rows)):
            assert not exclude_by_lower_bounds(lower(rows)).excluded


# --- generator -----------------------------------------------------------

def test_synth_matches_example():
    c = synth_pattern_matrix(3, 4, IntMatrix.from_rows([[3, 1], [1, 2]]))
    assert c.matrix.to_rows() == EXAMPLE4


def test_synth_roundtrip():
    rng = random.Random(9)
    for _ in range(300):
        n = rng.randint(2, 6)
        ell = rng.randint(1, 4)
        c = synth_pattern_matrix(n, n - 1 + ell, random_filler(rng, ell))
        assert KawataPattern.make(n - 1, range(n - 1)) in detect_patterns(c)


@pytest.mark.parametrize("args", [
    (1, 3, [[2, 0, 0], [0, 1, 0], [0, 0, 1]]),
    (3, 2, [[2]]),
    (2, 3, [[2]]),
    (2, 2, [[1]]),
    (2, 3, [[2, 1], [0, 2]]),
    (2, 3, [[2, -1], [-1, 2]]),
])
def test_synth_rejects(args):
    n, total, filler = args
    with pytest.raises(ValueError):
        synth_pattern_matrix(n, total, IntMatrix.from_rows(filler))
