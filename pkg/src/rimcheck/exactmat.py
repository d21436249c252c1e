"""Dense integer matrices with exact (unbounded) entries.

Decomposition and Cartan matrices in this domain are tiny, so everything is
stored row-major in a tuple of Python ints.
"""

from __future__ import annotations

from typing import Iterable, Sequence


class DimensionError(ValueError):
    pass


class IntMatrix:
    """Immutable rows x cols matrix of Python ints."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable[int]):
        entries = tuple(entries)
        if rows < 0 or cols < 0:
            raise DimensionError(f"negative shape {rows}x{cols}")
        if len(entries) != rows * cols:
            raise DimensionError(
                f"expected {rows * cols} entries for {rows}x{cols}, got {len(entries)}"
            )
        for x in entries:
            # bool is an int subclass; reject it along with floats
            if type(x) is not int:
                raise TypeError(f"matrix entries must be int, got {type(x).__name__}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls(0, 0, ())
        width = len(rows[0])
        for i, r in enumerate(rows):
            if len(r) != width:
                raise DimensionError(f"ragged row {i + 1}")
        return cls(len(rows), width, (x for r in rows for x in r))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, (int(i == j) for i in range(n) for j in range(n)))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"index ({i}, {j}) out of range for {self.rows}x{self.cols}")
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple[int, ...]:
        return self.entries[j::self.cols] if self.cols else ()

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self[i, i] for i in range(min(self.rows, self.cols)))

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         (self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def permuted(self, perm: Sequence[int]) -> "IntMatrix":
        """Return P^T M P for a square M, i.e. new[i][j] = M[perm[i]][perm[j]]."""
        if not self.is_square:
            raise DimensionError("permuted() needs a square matrix")
        if sorted(perm) != list(range(self.rows)):
            raise ValueError(f"not a permutation of range({self.rows}): {perm!r}")
        return IntMatrix(self.rows, self.cols,
                         (self[perm[i], perm[j]] for i in range(self.rows) for j in range(self.cols)))

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        return f"IntMatrix.from_rows({self.to_rows()!r})"


def transpose_multiply(d: IntMatrix) -> IntMatrix:
    """Return D^T D, the Cartan matrix of a decomposition matrix D."""
    if d.rows == 0 or d.cols == 0:
        raise DimensionError(f"transpose_multiply needs a nonempty matrix, got {d.rows}x{d.cols}")
    cols = [d.col(j) for j in range(d.cols)]
    n = d.cols
    out = [0] * (n * n)
    for i in range(n):
        ci = cols[i]
        for j in range(i, n):
            v = sum(a * b for a, b in zip(ci, cols[j]))
            out[i * n + j] = v
            out[j * n + i] = v
    return IntMatrix(n, n, out)


def is_symmetric(m: IntMatrix) -> bool:
    if not m.is_square:
        raise DimensionError(f"is_symmetric needs a square matrix, got {m.rows}x{m.cols}")
    return all(m[i, j] == m[j, i] for i in range(m.rows) for j in range(i + 1, m.cols))
