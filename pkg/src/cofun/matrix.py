"""Immutable exact matrices over a RingSpec.

Entries are plain ints, canonical for the ring.  Empty shapes (0 rows or
0 columns) are first-class: products, stacks and Kronecker products all
accept them, which keeps presentations of zero and free modules uniform.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .ring import RingSpec


class IntMatrix:
    __slots__ = ("ring", "rows", "cols", "entries")

    def __init__(self, ring: RingSpec, rows: int, cols: int,
                 entries: Iterable[Sequence[int]] = ()) -> None:
        if rows < 0 or cols < 0:
            raise ValueError("negative matrix dimension")
        data = [tuple(ring.normalize(x) for x in row) for row in entries]
        if not data:
            data = [tuple([0] * cols) for _ in range(rows)]
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError(
                f"expected {rows}x{cols} entries, got "
                f"{len(data)} rows of lengths {sorted({len(r) for r in data})}")
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", tuple(data))

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    @staticmethod
    def from_rows(ring: RingSpec, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("cannot infer column count from zero rows")
            cols = len(rows[0])
        return IntMatrix(ring, len(rows), cols, rows)

    @staticmethod
    def identity(ring: RingSpec, n: int) -> "IntMatrix":
        return IntMatrix(ring, n, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def zeros(ring: RingSpec, rows: int, cols: int) -> "IntMatrix":
        return IntMatrix(ring, rows, cols)

    def __getitem__(self, key) -> int:
        i, j = key
        return self.entries[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.entries)

    def to_lists(self):
        return [list(r) for r in self.entries]

    def __eq__(self, other) -> bool:
        return (isinstance(other, IntMatrix) and self.ring == other.ring
                and self.rows == other.rows and self.cols == other.cols
                and self.entries == other.entries)

    def __hash__(self) -> int:
        return hash((self.ring, self.rows, self.cols, self.entries))

    def __repr__(self) -> str:
        return f"IntMatrix({self.ring}, {self.rows}x{self.cols}, {list(self.entries)})"

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def add(self, other: "IntMatrix") -> "IntMatrix":
        self._compat(other, same_shape=True)
        return IntMatrix(self.ring, self.rows, self.cols,
                         [[a + b for a, b in zip(r1, r2)]
                          for r1, r2 in zip(self.entries, other.entries)])

    def sub(self, other: "IntMatrix") -> "IntMatrix":
        self._compat(other, same_shape=True)
        return IntMatrix(self.ring, self.rows, self.cols,
                         [[a - b for a, b in zip(r1, r2)]
                          for r1, r2 in zip(self.entries, other.entries)])

    def neg(self) -> "IntMatrix":
        return IntMatrix(self.ring, self.rows, self.cols,
                         [[-a for a in r] for r in self.entries])

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix(self.ring, self.rows, self.cols,
                         [[c * a for a in r] for r in self.entries])

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        self._compat(other)
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        ot = list(zip(*other.entries)) if other.entries else [()] * other.cols
        out = []
        for r in self.entries:
            out.append([sum(a * b for a, b in zip(r, col)) for col in ot])
        if other.cols == 0:
            out = [[] for _ in range(self.rows)]
        return IntMatrix(self.ring, self.rows, other.cols, out)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.ring, self.cols, self.rows,
                         list(zip(*self.entries)) if self.rows and self.cols else [])

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        self._compat(other)
        if self.cols != other.cols:
            raise ValueError("column mismatch in vstack")
        return IntMatrix(self.ring, self.rows + other.rows, self.cols,
                         list(self.entries) + list(other.entries))

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        self._compat(other)
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        return IntMatrix(self.ring, self.rows, self.cols + other.cols,
                         [list(a) + list(b) for a, b in zip(self.entries, other.entries)])

    def kron(self, other: "IntMatrix") -> "IntMatrix":
        """Kronecker product with row-major block layout."""
        self._compat(other)
        out = []
        for i in range(self.rows):
            for k in range(other.rows):
                row = []
                for j in range(self.cols):
                    c = self.entries[i][j]
                    row.extend(c * x for x in other.entries[k])
                out.append(row)
        return IntMatrix(self.ring, self.rows * other.rows, self.cols * other.cols, out)

    def det(self) -> int:
        """Exact determinant (Bareiss on integer lifts, reduced at the end)."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return self.ring.normalize(1)
        a = [list(r) for r in self.entries]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k]:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return self.ring.normalize(0)
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return self.ring.normalize(sign * a[n - 1][n - 1])

    def flatten(self) -> tuple[int, ...]:
        return tuple(x for row in self.entries for x in row)

    @staticmethod
    def from_flat(ring: RingSpec, rows: int, cols: int, flat: Sequence[int]) -> "IntMatrix":
        if len(flat) != rows * cols:
            raise ValueError("flat length does not match shape")
        return IntMatrix(ring, rows, cols,
                         [flat[i * cols:(i + 1) * cols] for i in range(rows)])

    def _compat(self, other: "IntMatrix", same_shape: bool = False) -> None:
        if self.ring != other.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
        if same_shape and (self.rows != other.rows or self.cols != other.cols):
            raise ValueError("shape mismatch")
