"""Dense exact matrices over a RingSpec, with unit-determinant inverses.

Determinants use fraction-free Bareiss elimination over Z and Z/n (lifting
residues to integers and reducing at the end) and exact Gaussian elimination
over Q and Fp.  Zero-dimensional matrices are legal values; det of a 0x0
matrix is 1 by the empty-product convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .rings import NotInvertible, RingError, RingSpec, Scalar, one, zero


@dataclass(frozen=True)
class Matrix:
    ring: RingSpec
    rows: int
    cols: int
    entries: tuple  # tuple of row tuples of Scalar

    @staticmethod
    def build(ring: RingSpec, data: Sequence[Sequence]) -> "Matrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        ents = []
        for row in data:
            if len(row) != cols:
                raise RingError("ragged matrix data")
            ents.append(tuple(Scalar.of(ring, x) for x in row))
        return Matrix(ring, rows, cols, tuple(ents))

    @staticmethod
    def zeros(ring: RingSpec, rows: int, cols: int) -> "Matrix":
        z = zero(ring)
        return Matrix(ring, rows, cols, tuple(tuple(z for _ in range(cols)) for _ in range(rows)))

    @staticmethod
    def identity(ring: RingSpec, n: int) -> "Matrix":
        z, o = zero(ring), one(ring)
        return Matrix(ring, n, n, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))

    @staticmethod
    def from_blocks(ring: RingSpec, blocks: Sequence[Sequence["Matrix | None"]],
                    row_sizes: Sequence[int], col_sizes: Sequence[int]) -> "Matrix":
        """Assemble a matrix from a grid of blocks (None means a zero block)."""
        m = Matrix.zeros(ring, sum(row_sizes), sum(col_sizes)).to_lists()
        r0 = 0
        for bi, rsz in enumerate(row_sizes):
            c0 = 0
            for bj, csz in enumerate(col_sizes):
                blk = blocks[bi][bj]
                if blk is not None:
                    if blk.rows != rsz or blk.cols != csz:
                        raise RingError("block size mismatch")
                    for i in range(rsz):
                        for j in range(csz):
                            m[r0 + i][c0 + j] = blk.entries[i][j]
                c0 += csz
            r0 += rsz
        return Matrix(ring, sum(row_sizes), sum(col_sizes), tuple(tuple(r) for r in m))

    def to_lists(self) -> list:
        return [list(row) for row in self.entries]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def _check(self, other: "Matrix") -> None:
        if self.ring != other.ring:
            raise RingError(f"mixed rings {self.ring} and {other.ring}")

    def __mul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise RingError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        z = zero(self.ring)
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = z
                for k in range(self.cols):
                    a = self.entries[i][k]
                    if a.is_zero:
                        continue
                    acc = acc + a * other.entries[k][j]
                row.append(acc)
            out.append(tuple(row))
        return Matrix(self.ring, self.rows, other.cols, tuple(out))

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise RingError("shape mismatch in addition")
        return Matrix(self.ring, self.rows, self.cols,
                      tuple(tuple(a + b for a, b in zip(r1, r2))
                            for r1, r2 in zip(self.entries, other.entries)))

    def scale(self, s: Scalar) -> "Matrix":
        return Matrix(self.ring, self.rows, self.cols,
                      tuple(tuple(s * a for a in row) for row in self.entries))

    def transpose(self) -> "Matrix":
        return Matrix(self.ring, self.cols, self.rows,
                      tuple(tuple(self.entries[i][j] for i in range(self.rows))
                            for j in range(self.cols)))

    def __str__(self) -> str:
        return "[" + "; ".join(",".join(str(e) for e in row) for row in self.entries) + "]"

    # -- determinant ------------------------------------------------------

    def det(self) -> Scalar:
        """Exact determinant; requires a square matrix."""
        if not self.is_square:
            raise RingError(f"determinant of non-square {self.rows}x{self.cols}")
        n = self.rows
        if n == 0:
            return one(self.ring)
        if self.ring.is_field:
            return self._det_gauss()
        return self._det_bareiss()

    def _det_gauss(self) -> Scalar:
        n = self.rows
        a = self.to_lists()
        sign = 1
        det = one(self.ring)
        for col in range(n):
            piv = None
            for r in range(col, n):
                if not a[r][col].is_zero:
                    piv = r
                    break
            if piv is None:
                return zero(self.ring)
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                sign = -sign
            p = a[col][col]
            det = det * p
            inv = p.inverse()
            for r in range(col + 1, n):
                f = a[r][col] * inv
                if f.is_zero:
                    continue
                for c in range(col, n):
                    a[r][c] = a[r][c] - f * a[col][c]
        if sign < 0:
            det = -det
        return det

    def _int_lift(self) -> list:
        out = []
        for row in self.entries:
            lifted = []
            for e in row:
                v = e.value
                if isinstance(v, Fraction):
                    v = v.numerator  # only hit for Z after canonical check
                lifted.append(int(v))
            out.append(lifted)
        return out

    def _det_bareiss(self) -> Scalar:
        n = self.rows
        a = self._int_lift()
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                piv = None
                for r in range(k + 1, n):
                    if a[r][k] != 0:
                        piv = r
                        break
                if piv is None:
                    return zero(self.ring)
                a[k], a[piv] = a[piv], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return Scalar.of(self.ring, sign * a[n - 1][n - 1])

    # -- inverse ----------------------------------------------------------

    def inverse(self) -> "Matrix":
        """Exact two-sided inverse; the determinant must be a unit."""
        if not self.is_square:
            raise RingError("inverse of non-square matrix")
        d = self.det()
        if not d.is_unit():
            raise NotInvertible(f"determinant {d} is not a unit in {self.ring}")
        n = self.rows
        if n == 0:
            return self
        if self.ring.is_field:
            return self._inverse_gauss_jordan()
        # Z and Z/n: invert the integer lift over Q; denominators divide det,
        # which is a unit mod n (or +-1 over Z), so entries map back exactly.
        lift = Matrix.build(RingSpec("Q"), self._int_lift())
        inv_q = lift._inverse_gauss_jordan()
        out = []
        for row in inv_q.entries:
            new_row = []
            for e in row:
                f: Fraction = e.value
                if self.ring.kind == "Z":
                    if f.denominator != 1:
                        raise NotInvertible("inverse is not integral")
                    new_row.append(Scalar.of(self.ring, f.numerator))
                else:
                    num = Scalar.of(self.ring, f.numerator)
                    den = Scalar.of(self.ring, f.denominator)
                    new_row.append(num * den.inverse())
            out.append(tuple(new_row))
        return Matrix(self.ring, n, n, tuple(out))

    def _inverse_gauss_jordan(self) -> "Matrix":
        n = self.rows
        a = self.to_lists()
        b = Matrix.identity(self.ring, n).to_lists()
        for col in range(n):
            piv = None
            for r in range(col, n):
                if not a[r][col].is_zero and a[r][col].is_unit():
                    piv = r
                    break
            if piv is None:
                raise NotInvertible("no unit pivot found")
            a[col], a[piv] = a[piv], a[col]
            b[col], b[piv] = b[piv], b[col]
            inv = a[col][col].inverse()
            a[col] = [x * inv for x in a[col]]
            b[col] = [x * inv for x in b[col]]
            for r in range(n):
                if r == col or a[r][col].is_zero:
                    continue
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                b[r] = [x - f * y for x, y in zip(b[r], b[col])]
        return Matrix(self.ring, n, n, tuple(tuple(row) for row in b))

    def is_invertible(self) -> bool:
        return self.is_square and self.det().is_unit()


def block_direct_sum(a: Matrix, b: Matrix) -> Matrix:
    """Block-diagonal assembly of two matrices; sizes add."""
    if a.ring != b.ring:
        raise RingError(f"mixed rings {a.ring} and {b.ring}")
    return Matrix.from_blocks(a.ring, [[a, None], [None, b]],
                              [a.rows, b.rows], [a.cols, b.cols])


def direct_sum(matrices: Iterable[Matrix], ring: RingSpec) -> Matrix:
    out = Matrix.zeros(ring, 0, 0)
    for m in matrices:
        out = block_direct_sum(out, m)
    return out


def block_swap(ring: RingSpec, r1: int, r2: int) -> Matrix:
    """The permutation matrix sending R^r1 (+) R^r2 to R^r2 (+) R^r1.

    Applied to a stacked column (x1, x2) it yields (x2, x1).
    """
    i1 = Matrix.identity(ring, r1)
    i2 = Matrix.identity(ring, r2)
    return Matrix.from_blocks(ring, [[None, i2], [i1, None]], [r2, r1], [r1, r2])


def matrix_from_strings(ring: RingSpec, text_rows: Sequence[Sequence[str]]) -> Matrix:
    return Matrix.build(ring, [[Scalar.parse(ring, t) for t in row] for row in text_rows])


def parse_matrix_literal(ring: RingSpec, text: str) -> Matrix:
    """Parse "[a,b;c,d]" style literals (rows by ";", entries by ",")."""
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise RingError(f"bad matrix literal {text!r}")
    body = text[1:-1].strip()
    if not body:
        return Matrix.zeros(ring, 0, 0)
    rows = [r.strip() for r in body.split(";")]
    return matrix_from_strings(ring, [[c for c in row.split(",")] for row in rows])


def matrix_to_json(m: Matrix) -> dict:
    return {"rows": m.rows, "cols": m.cols,
            "entries": [[str(e) for e in row] for row in m.entries]}


def matrix_from_json(ring: RingSpec, obj: dict) -> Matrix:
    rows, cols = obj["rows"], obj["cols"]
    ents = obj["entries"]
    if len(ents) != rows or any(len(r) != cols for r in ents):
        raise RingError("matrix JSON shape mismatch")
    if rows == 0 or cols == 0:
        return Matrix.zeros(ring, rows, cols)
    return matrix_from_strings(ring, ents)
