"""Block records: decomposition/Cartan data for one block of one group at one
prime, with JSON ingestion, GAP list-display parsing and consistency checks."""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from typing import Any, Optional, Union

from rimcheck.exactmat import DimensionError, IntMatrix, is_symmetric, transpose_multiply


class BlockDataError(Exception):
    pass


class SchemaError(BlockDataError):
    """Input does not match the block record JSON schema."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


class ValidationError(BlockDataError):
    """Input is well-formed but violates a record invariant."""

    def __init__(self, invariant: str, message: str):
        self.invariant = invariant
        super().__init__(f"{invariant}: {message}")


class GapParseError(BlockDataError):
    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} at byte offset {offset}")


class InconsistentCounts(BlockDataError):
    pass


class Exactness(str, enum.Enum):
    EXACT = "exact"
    LOWER_BOUND = "lower_bound"


def nu(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is undefined")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class DecompositionMatrix:
    matrix: IntMatrix
    ordinary_labels: tuple[str, ...]
    brauer_labels: tuple[str, ...]

    def __post_init__(self):
        m = self.matrix
        if m.rows == 0 or m.cols == 0:
            raise ValidationError("decomposition.nonempty", "decomposition matrix is empty")
        if len(self.ordinary_labels) != m.rows:
            raise ValidationError(
                "decomposition.label_lengths",
                f"{len(self.ordinary_labels)} ordinary labels for {m.rows} rows")
        if len(self.brauer_labels) != m.cols:
            raise ValidationError(
                "decomposition.label_lengths",
                f"{len(self.brauer_labels)} brauer labels for {m.cols} columns")
        if any(x < 0 for x in m.entries):
            raise ValidationError("decomposition.nonnegative", "negative decomposition number")
        for j in range(m.cols):
            if not any(m.col(j)):
                raise ValidationError("decomposition.no_zero_column",
                                      f"column {j} ({self.brauer_labels[j]}) is zero")


@dataclass(frozen=True)
class CartanMatrix:
    matrix: IntMatrix
    exactness: Exactness = Exactness.EXACT

    def __post_init__(self):
        m = self.matrix
        if not m.is_square or m.rows == 0:
            raise ValidationError("cartan.square", f"cartan matrix is {m.rows}x{m.cols}")
        if not is_symmetric(m):
            raise ValidationError("cartan.symmetric", "cartan matrix is not symmetric")
        if any(x < 0 for x in m.entries):
            raise ValidationError("cartan.nonnegative", "negative cartan entry")
        if self.exactness is Exactness.EXACT and any(x < 1 for x in m.diagonal()):
            raise ValidationError("cartan.exact_diagonal", "exact cartan matrix has a diagonal entry < 1")

    @property
    def size(self) -> int:
        return self.matrix.rows


@dataclass(frozen=True)
class BlockRecord:
    group_id: str
    prime: int
    block_tag: str
    defect: int
    group_p_valuation: int
    p_rank: int
    wild: bool
    decomposition: Optional[DecompositionMatrix] = None
    cartan: Optional[CartanMatrix] = None
    simple_dims: Optional[tuple[int, ...]] = None
    notes: Optional[str] = None
    provenance: Optional[str] = None

    def __post_init__(self):
        if not is_prime(self.prime):
            raise ValidationError("prime", f"{self.prime} is not a prime")
        if self.defect < 0 or self.group_p_valuation < 0 or self.p_rank < 0:
            raise ValidationError("nonnegative_invariants", "defect, valuation and p-rank must be >= 0")
        if self.defect > self.group_p_valuation:
            raise ValidationError("defect_le_valuation",
                                  f"defect {self.defect} > group_p_valuation {self.group_p_valuation}")
        if self.p_rank > self.group_p_valuation:
            raise ValidationError("p_rank_le_valuation",
                                  f"p_rank {self.p_rank} > group_p_valuation {self.group_p_valuation}")
        if self.decomposition is None and self.cartan is None:
            raise ValidationError("data_present", "need a decomposition or a cartan matrix")
        if self.decomposition is not None and self.cartan is not None:
            if self.cartan.matrix != transpose_multiply(self.decomposition.matrix):
                raise ValidationError("cartan_matches_decomposition",
                                      "provided cartan matrix differs from D^T D")
        if self.simple_dims is not None:
            if any(d < 1 for d in self.simple_dims):
                raise ValidationError("simple_dims.positive", "simple module dimensions must be positive")
            n = self.n_simples
            if len(self.simple_dims) != n:
                raise ValidationError("simple_dims.aligned",
                                      f"{len(self.simple_dims)} dimensions for {n} simple modules")

    @property
    def n_simples(self) -> int:
        if self.cartan is not None:
            return self.cartan.size
        return self.decomposition.matrix.cols

    @property
    def labels(self) -> list[str]:
        if self.decomposition is not None:
            return list(self.decomposition.brauer_labels)
        return [f"phi{j + 1}" for j in range(self.n_simples)]


# --- JSON schema ---------------------------------------------------------

_TOP_KEYS = {"group_id", "prime", "block_tag", "defect", "group_p_valuation", "p_rank", "wild",
             "decomposition", "cartan", "simple_dims", "notes", "provenance"}
_REQUIRED = ("group_id", "prime", "block_tag", "defect", "group_p_valuation", "p_rank", "wild")


def _expect(obj: dict, key: str, kind, where: str, required: bool = True):
    name = f"{where}{key}"
    if key not in obj:
        if required:
            raise SchemaError(name, "missing field")
        return None
    v = obj[key]
    ok = (type(v) is int) if kind is int else isinstance(v, kind)
    if not ok:
        raise SchemaError(name, f"expected {kind.__name__}, got {type(v).__name__}")
    return v


def _matrix_from_json(v: Any, name: str) -> IntMatrix:
    if not isinstance(v, list) or not all(isinstance(r, list) for r in v):
        raise SchemaError(name, "expected a list of lists of int")
    for i, r in enumerate(v):
        for x in r:
            if type(x) is not int:
                raise SchemaError(name, f"row {i + 1} has non-integer entry {x!r}")
    try:
        return IntMatrix.from_rows(v)
    except DimensionError as e:
        raise SchemaError(name, str(e)) from None


def _labels(v: Any, name: str) -> tuple[str, ...]:
    if not isinstance(v, list) or not all(isinstance(x, str) for x in v):
        raise SchemaError(name, "expected a list of strings")
    return tuple(v)


def record_from_dict(obj: Any) -> BlockRecord:
    if not isinstance(obj, dict):
        raise SchemaError("<root>", "expected a JSON object")
    extra = sorted(set(obj) - _TOP_KEYS)
    if extra:
        raise SchemaError(extra[0], "unknown field")
    kw = {}
    for key in _REQUIRED:
        kind = {"group_id": str, "block_tag": str, "wild": bool}.get(key, int)
        kw[key] = _expect(obj, key, kind, "")
    for key in ("notes", "provenance"):
        kw[key] = _expect(obj, key, str, "", required=False)

    dec = _expect(obj, "decomposition", dict, "", required=False)
    if dec is not None:
        extra = sorted(set(dec) - {"ordinary_labels", "brauer_labels", "matrix"})
        if extra:
            raise SchemaError(f"decomposition.{extra[0]}", "unknown field")
        for key in ("ordinary_labels", "brauer_labels", "matrix"):
            if key not in dec:
                raise SchemaError(f"decomposition.{key}", "missing field")
        kw["decomposition"] = DecompositionMatrix(
            _matrix_from_json(dec["matrix"], "decomposition.matrix"),
            _labels(dec["ordinary_labels"], "decomposition.ordinary_labels"),
            _labels(dec["brauer_labels"], "decomposition.brauer_labels"),
        )

    car = _expect(obj, "cartan", dict, "", required=False)
    if car is not None:
        extra = sorted(set(car) - {"exactness", "matrix"})
        if extra:
            raise SchemaError(f"cartan.{extra[0]}", "unknown field")
        ex = _expect(car, "exactness", str, "cartan.")
        try:
            exactness = Exactness(ex)
        except ValueError:
            raise SchemaError("cartan.exactness", f"expected 'exact' or 'lower_bound', got {ex!r}") from None
        if "matrix" not in car:
            raise SchemaError("cartan.matrix", "missing field")
        kw["cartan"] = CartanMatrix(_matrix_from_json(car["matrix"], "cartan.matrix"), exactness)
    elif dec is not None:
        kw["cartan"] = CartanMatrix(transpose_multiply(kw["decomposition"].matrix), Exactness.EXACT)

    dims = _expect(obj, "simple_dims", list, "", required=False)
    if dims is not None:
        if not all(type(x) is int for x in dims):
            raise SchemaError("simple_dims", "expected a list of int")
        kw["simple_dims"] = tuple(dims)
    return BlockRecord(**kw)


def load_block_record(data: Union[bytes, str]) -> BlockRecord:
    """Parse and fully validate a block record from JSON text.

    If only a decomposition matrix is given, its exact Cartan matrix D^T D is
    attached.  A file may carry both matrices with ``lower_bound`` exactness,
    meaning D holds only some rows of the full decomposition matrix.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise SchemaError("<root>", f"not UTF-8: {e}") from None
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as e:
        raise SchemaError("<root>", f"invalid JSON: {e}") from None
    return record_from_dict(obj)


def record_to_dict(rec: BlockRecord) -> dict:
    out: dict = {
        "group_id": rec.group_id,
        "prime": rec.prime,
        "block_tag": rec.block_tag,
        "defect": rec.defect,
        "group_p_valuation": rec.group_p_valuation,
        "p_rank": rec.p_rank,
        "wild": rec.wild,
    }
    if rec.decomposition is not None:
        out["decomposition"] = {
            "ordinary_labels": list(rec.decomposition.ordinary_labels),
            "brauer_labels": list(rec.decomposition.brauer_labels),
            "matrix": rec.decomposition.matrix.to_rows(),
        }
    if rec.cartan is not None:
        out["cartan"] = {"exactness": rec.cartan.exactness.value, "matrix": rec.cartan.matrix.to_rows()}
    if rec.simple_dims is not None:
        out["simple_dims"] = list(rec.simple_dims)
    if rec.notes is not None:
        out["notes"] = rec.notes
    if rec.provenance is not None:
        out["provenance"] = rec.provenance
    return out


def dumps_json(obj: Any, level: int = 0) -> str:
    """Indented JSON with lists of scalars kept on one line."""
    pad = "  " * (level + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps_json(v, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * level + "}"
    if isinstance(obj, list):
        if all(not isinstance(x, (dict, list)) for x in obj):
            return json.dumps(obj, ensure_ascii=False)
        items = [pad + dumps_json(x, level + 1) for x in obj]
        return "[\n" + ",\n".join(items) + "\n" + "  " * level + "]"
    return json.dumps(obj, ensure_ascii=False)


def dump_block_record(rec: BlockRecord) -> bytes:
    return (dumps_json(record_to_dict(rec)) + "\n").encode("utf-8")


# --- GAP list display ----------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\[)|(\])|(,)|([+-]?\d+))")


def parse_gap_display(text: Union[str, bytes]) -> IntMatrix:
    """Parse a GAP-printed integer matrix such as ``[ [ 2, 1 ], [ 1, 3 ] ]``."""
    raw = text if isinstance(text, bytes) else text.encode("utf-8")
    s = raw.decode("utf-8")
    # Offsets are reported in bytes; precompute char -> byte offset lazily.
    def boff(i: int) -> int:
        return len(s[:i].encode("utf-8"))

    pos = 0
    n = len(s)

    def next_token():
        nonlocal pos
        m = _TOKEN.match(s, pos)
        if m is None:
            j = pos
            while j < n and s[j].isspace():
                j += 1
            if j >= n:
                return None, j
            raise GapParseError(f"unexpected character {s[j]!r}", boff(j))
        start = m.start(m.lastindex)
        pos = m.end()
        return m.group(m.lastindex), start

    def expect(tok_kind: str):
        tok, at = next_token()
        if tok is None:
            raise GapParseError(f"expected {tok_kind!r}, got end of input", boff(at))
        if tok != tok_kind:
            raise GapParseError(f"expected {tok_kind!r}, got {tok!r}", boff(at))

    def read_int():
        tok, at = next_token()
        if tok is None:
            raise GapParseError("expected integer, got end of input", boff(at))
        if tok in "[],":
            raise GapParseError(f"expected integer, got {tok!r}", boff(at))
        return int(tok)

    rows: list[list[int]] = []
    expect("[")
    while True:
        expect("[")
        row = [read_int()]
        while True:
            tok, at = next_token()
            if tok == ",":
                row.append(read_int())
            elif tok == "]":
                break
            else:
                got = "end of input" if tok is None else repr(tok)
                raise GapParseError(f"expected ',' or ']', got {got}", boff(at))
        rows.append(row)
        tok, at = next_token()
        if tok == ",":
            continue
        if tok == "]":
            break
        got = "end of input" if tok is None else repr(tok)
        raise GapParseError(f"expected ',' or ']', got {got}", boff(at))
    tok, at = next_token()
    if tok is not None:
        raise GapParseError(f"trailing token {tok!r}", boff(at))
    for i, r in enumerate(rows):
        if len(r) != len(rows[0]):
            raise DimensionError(f"ragged row {i + 1}")
    return IntMatrix.from_rows(rows)


def format_gap_display(m: IntMatrix) -> str:
    rows = ["[ " + ", ".join(str(x) for x in m.row(i)) + " ]" for i in range(m.rows)]
    return "[ " + ",\n  ".join(rows) + " ]"


# --- checks --------------------------------------------------------------

@dataclass
class ValidationReport:
    group_id: str
    column_nonzero_counts: Optional[list[int]] = None
    diagonal_lower_bounds: Optional[list[int]] = None
    diagonal_two: list[int] = field(default_factory=list)
    brauer_expected: Optional[int] = None
    brauer_observed: Optional[int] = None
    flags: list[str] = field(default_factory=list)
    skipped: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.flags

    def to_dict(self) -> dict:
        return {
            "group_id": self.group_id,
            "column_nonzero_counts": self.column_nonzero_counts,
            "diagonal_lower_bounds": self.diagonal_lower_bounds,
            "diagonal_two": self.diagonal_two,
            "brauer": {"expected_min_valuation": self.brauer_expected,
                       "observed_min_valuation": self.brauer_observed},
            "flags": self.flags,
            "skipped": self.skipped,
        }


def validate_block(rec: BlockRecord) -> ValidationReport:
    """Collect the numeric evidence used in contradiction arguments.

    Never raises on a loaded record; problems are reported as flags and
    checks lacking input data are listed under ``skipped``.
    """
    rep = ValidationReport(rec.group_id)
    if rec.decomposition is not None:
        d = rec.decomposition.matrix
        counts = [sum(1 for x in d.col(j) if x) for j in range(d.cols)]
        rep.column_nonzero_counts = counts
        rep.diagonal_lower_bounds = list(counts)
    else:
        rep.skipped.append({"check": "column_counts", "reason": "no decomposition matrix"})

    c = rec.cartan
    if c is not None:
        rep.diagonal_two = [i for i, x in enumerate(c.matrix.diagonal()) if x == 2]
        if rep.diagonal_lower_bounds is not None:
            if any(x < lb for x, lb in zip(c.matrix.diagonal(), rep.diagonal_lower_bounds)):
                rep.flags.append("DiagonalBelowColumnCount")
        if not is_symmetric(c.matrix):
            rep.flags.append("Asymmetric")
        if any(x < 0 for x in c.matrix.entries):
            rep.flags.append("NegativeEntry")

    if rec.simple_dims is None:
        rep.skipped.append({"check": "brauer_valuation", "reason": "no simple_dims"})
    elif c is None or c.exactness is not Exactness.EXACT:
        rep.skipped.append({"check": "brauer_valuation", "reason": "cartan data is not exact"})
    else:
        rep.brauer_expected = rec.group_p_valuation - rec.defect
        rep.brauer_observed = min(nu(x, rec.prime) for x in rec.simple_dims)
        if rep.brauer_observed != rep.brauer_expected:
            rep.flags.append("BrauerViolation")
    return rep


@dataclass(frozen=True)
class CliffordCounts:
    m: int
    ell: int
    q: int
    flags: tuple[str, ...] = ()


def clifford_counts(n_B: int, n_b: int, q: int) -> CliffordCounts:
    """Split simple-module counts across a normal subgroup of prime index q.

    Solves n_B = m*q + ell and n_b = m + ell*q exactly.
    """
    if not is_prime(q):
        raise ValueError(f"q must be a prime, got {q}")
    if n_B < 1 or n_b < 1:
        raise ValueError("simple module counts must be >= 1")
    den = q * q - 1
    m_num = q * n_B - n_b
    l_num = q * n_b - n_B
    if m_num % den or l_num % den:
        raise InconsistentCounts(
            f"(n_B={n_B}, n_b={n_b}, q={q}): m = {m_num}/{den}, ell = {l_num}/{den} not both integral")
    m, ell = m_num // den, l_num // den
    if m < 0 or ell < 0:
        raise InconsistentCounts(f"(n_B={n_B}, n_b={n_b}, q={q}): negative solution m={m}, ell={ell}")
    flags = ("m_zero",) if m == 0 else ()
    return CliffordCounts(m, ell, q, flags)


def nonperiodicity_certificate(dim: int, p: int, p_rank: int) -> bool:
    """True when p^(p_rank-1) does not divide dim, so the simple module cannot
    be periodic.  False only means no certificate."""
    if p_rank < 2:
        raise ValueError(f"p_rank must be >= 2, got {p_rank}")
    if dim < 1:
        raise ValueError(f"dim must be positive, got {dim}")
    return nu(dim, p) < p_rank - 1


def load_gap_matrix_file(text: str) -> IntMatrix:
    """Parse a GAP display file, ignoring ``#`` comment lines."""
    body = "\n".join(line for line in text.splitlines() if not line.lstrip().startswith("#"))
    return parse_gap_display(body)
