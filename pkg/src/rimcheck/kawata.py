"""Kawata's Cartan-matrix shape: detection, classification, lower-bound
exclusion and a generator of planted instances.

A pattern is a pair (s, T): T a nonempty set of column indices, s a column
outside T, such that every t in T has C[t][t] = 2, C[t][t'] = 1 for the other
members t' of T, C[t][s] = 1, and C[t][j] = 0 everywhere else.  The block of
rows/columns outside T is unconstrained.  Indices are 0-based throughout.

The order S_2, ..., S_n of the simples indexed by T is determined by Heller
translates, which a Cartan matrix cannot see; T is therefore kept sorted
ascending and read in that order wherever a ladder is printed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

from rimcheck.blockdata import CartanMatrix, Exactness
from rimcheck.exactmat import DimensionError, IntMatrix, is_symmetric

MAX_COLUMNS = 64


class WrongExactness(ValueError):
    pass


class MatrixTooLarge(ValueError):
    pass


@dataclass(frozen=True, order=True)
class KawataPattern:
    # field order gives the canonical sort key (n, t_set, s)
    n: int
    t_set: tuple[int, ...]
    s: int

    def __post_init__(self):
        if not self.t_set:
            raise ValueError("t_set must be nonempty")
        if list(self.t_set) != sorted(set(self.t_set)):
            raise ValueError(f"t_set must be strictly ascending, got {self.t_set}")
        if self.s in self.t_set:
            raise ValueError(f"s={self.s} lies in t_set")
        if self.n != len(self.t_set) + 1:
            raise ValueError(f"n={self.n} but |t_set|={len(self.t_set)}")

    @classmethod
    def make(cls, s: int, t_set) -> "KawataPattern":
        t = tuple(sorted(t_set))
        return cls(len(t) + 1, t, s)

    def to_dict(self) -> dict:
        return {"s": self.s, "t_set": list(self.t_set), "n": self.n}


def pattern_holds(c: IntMatrix, s: int, t_set) -> bool:
    """Check the four shape constraints of (s, T) directly against C."""
    t_set = set(t_set)
    if not t_set or s in t_set:
        return False
    for t in t_set:
        for j in range(c.cols):
            if j == t:
                want = 2
            elif j in t_set or j == s:
                want = 1
            else:
                want = 0
            if c[t, j] != want:
                return False
    return True


def _check_input(c: CartanMatrix, want: Exactness, allow_large: bool) -> IntMatrix:
    if c.exactness is not want:
        other = "exclude_by_lower_bounds" if want is Exactness.EXACT else "detect_patterns"
        raise WrongExactness(f"matrix is {c.exactness.value}; use {other} instead")
    m = c.matrix
    if m.cols > MAX_COLUMNS and not allow_large:
        raise MatrixTooLarge(f"{m.cols} columns exceeds the cap of {MAX_COLUMNS}; pass allow_large=True")
    return m


def detect_patterns(c: CartanMatrix, allow_large: bool = False) -> list[KawataPattern]:
    """Return every pattern (s, T) in an exact Cartan matrix, sorted by (n, T, s).

    An empty result means no simple module of a wild block with this Cartan
    matrix can lie off the end of its component.
    """
    return find_patterns(_check_input(c, Exactness.EXACT, allow_large))


def find_patterns(m: IntMatrix) -> list[KawataPattern]:
    """Pattern search on a bare square integer matrix, without Cartan checks."""
    if not m.is_square:
        raise DimensionError(f"pattern search needs a square matrix, got {m.rows}x{m.cols}")
    size = m.rows

    # Each row of a T-member is completely determined by the pattern, so the
    # closed support {t} | supp(t) must equal T | {s} for every t in T.
    closed = {}
    for t in range(size):
        row = m.row(t)
        if row[t] != 2:
            continue
        if any(x not in (0, 1) for j, x in enumerate(row) if j != t):
            continue
        closed[t] = frozenset(j for j, x in enumerate(row) if j == t or x == 1)

    found = set()
    for t, u in closed.items():
        for s in u:
            if s == t:
                continue
            t_set = u - {s}
            if all(closed.get(x) == u for x in t_set):
                found.add(KawataPattern.make(s, t_set))
    return sorted(found)


class PatternKind(str, enum.Enum):
    CONFIRMED_OFF_RIM = "ConfirmedOffRim"
    CANDIDATE_ONLY = "CandidateOnly"


def classify_pattern(pat: KawataPattern) -> PatternKind:
    """n = 2 is sufficient for S to sit on the second row; n >= 3 is only
    a necessary condition."""
    return PatternKind.CONFIRMED_OFF_RIM if pat.n == 2 else PatternKind.CANDIDATE_ONLY


@dataclass(frozen=True)
class HeartReport:
    s_label: str
    uniserial_ladder: tuple[str, ...]
    remainder_label: str
    pim_ladders: dict

    def to_dict(self) -> dict:
        return {
            "s": self.s_label,
            "heart": {"uniserial_summand": list(self.uniserial_ladder),
                      "remainder": self.remainder_label,
                      "remainder_nonzero": True},
            "pim_ladders": {k: list(v) for k, v in self.pim_ladders.items()},
        }

    def describe(self) -> str:
        lines = [f"heart(P({self.s_label})) = [{', '.join(self.uniserial_ladder)}] (+) "
                 f"{self.remainder_label}, {self.remainder_label} != 0 indecomposable"]
        for k, v in self.pim_ladders.items():
            lines.append(f"P({k}) = [{', '.join(v)}]")
        return "\n".join(lines)


def heart_report(pat: KawataPattern, labels: Sequence[str], size: Optional[int] = None) -> HeartReport:
    """Predicted Loewy structure around a pattern.

    ``labels`` name the columns of the source matrix; pass ``size`` to have
    the label count checked against it.
    """
    if size is not None and len(labels) != size:
        raise ValueError(f"{len(labels)} labels for a {size}-column matrix")
    idx = list(pat.t_set) + [pat.s]
    if max(idx) >= len(labels):
        raise ValueError(f"pattern index {max(idx)} has no label ({len(labels)} labels)")
    ladder = [labels[t] for t in pat.t_set]   # S_2, ..., S_n
    s = labels[pat.s]
    cycle = ladder + [s]                      # S_2, ..., S_n, S
    pims = {}
    for i, name in enumerate(ladder):
        # S_i, S_{i+1}, ..., S_n, S, S_2, ..., S_i  (length n + 1)
        pims[name] = tuple(cycle[i:] + cycle[:i] + [name])
    return HeartReport(s, tuple(ladder), "V", pims)


@dataclass(frozen=True)
class ExclusionResult:
    excluded: bool
    witness: Optional[KawataPattern] = None

    def to_dict(self) -> dict:
        return {"excluded": self.excluded,
                "witness": self.witness.to_dict() if self.witness else None}


def exclude_by_lower_bounds(c: CartanMatrix, allow_large: bool = False) -> ExclusionResult:
    """Decide whether any Cartan matrix entrywise >= ``c`` could carry a pattern.

    (T, s) is consistent with the bounds when every t in T has lb[t][t] <= 2,
    lb[t][t'] <= 1 on T | {s}, and lb[t][j] = 0 elsewhere.  For a seed t0 and
    a choice of s, the smallest consistent T is the closure of {t0} under
    "the nonzero off-diagonal support of t, minus s"; if that closure fails,
    every larger T containing t0 fails too, so the search is exhaustive.
    A witness, if any, is the least one in (n, T, s) order and says nothing
    about the true Cartan matrix.
    """
    lb = _check_input(c, Exactness.LOWER_BOUND, allow_large)
    size = lb.rows
    cand = {}
    for t in range(size):
        row = lb.row(t)
        if row[t] > 2 or any(x > 1 for j, x in enumerate(row) if j != t):
            continue
        cand[t] = frozenset(j for j, x in enumerate(row) if j != t and x > 0)

    best = None
    for t0 in cand:
        for s in range(size):
            if s == t0:
                continue
            t_set = {t0}
            todo = [t0]
            ok = True
            while todo and ok:
                t = todo.pop()
                for j in cand[t]:
                    if j == s or j in t_set:
                        continue
                    if j not in cand:
                        ok = False
                        break
                    t_set.add(j)
                    todo.append(j)
            if ok and s not in t_set:
                pat = KawataPattern.make(s, t_set)
                if best is None or pat < best:
                    best = pat
    if best is None:
        return ExclusionResult(True)
    return ExclusionResult(False, best)


def synth_pattern_matrix(n: int, total: int, filler: IntMatrix) -> CartanMatrix:
    """Build a Cartan matrix with the planted pattern T = {0..n-2}, s = n-1.

    ``filler`` (size total - n + 1) fills the unconstrained block spanned by
    s and the remaining columns; filler[0][0] plays C[s][s].
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if total < n:
        raise ValueError(f"total={total} < n={n}")
    k = total - n + 1
    if filler.shape != (k, k):
        raise ValueError(f"filler must be {k}x{k}, got {filler.rows}x{filler.cols}")
    if not is_symmetric(filler):
        raise ValueError("filler is not symmetric")
    if any(x < 0 for x in filler.entries):
        raise ValueError("filler has a negative entry")
    if filler[0, 0] < 2:
        raise ValueError("filler[0][0] (the s diagonal) must be >= 2")
    t = n - 1
    rows = [[0] * total for _ in range(total)]
    for i in range(t):
        for j in range(t):
            rows[i][j] = 2 if i == j else 1
        rows[i][t] = rows[t][i] = 1
    for i in range(k):
        for j in range(k):
            rows[t + i][t + j] = filler[i, j]
    return CartanMatrix(IntMatrix.from_rows(rows), Exactness.EXACT)
