"""Smith normal form and exact linear solving over Z and Z/n.

The reduction works on integer lifts with extended-gcd 2x2 transforms, which
are unimodular over Z and therefore invertible over every Z/n as well; zero
divisors never need special cases.  Transform matrices are tracked so that
every result ships with a replayable certificate U*A*V == D.
"""

from __future__ import annotations

from .matrix import IntMatrix
from .ring import RingSpec, xgcd


def _pivot_weight(ring: RingSpec, x: int) -> int:
    if ring.modulus is None:
        return abs(x)
    return min(x, ring.modulus - x)


def _clear_coeffs(p: int, q: int) -> tuple[int, int, int, int]:
    """Determinant-one 2x2 transform sending the pair (p, q) to (g, 0).

    When p already divides q a plain shear is used, so the transform never
    writes back into the pivot row or column; that is what makes the
    elimination loops terminate.
    """
    if p and q % p == 0:
        return 1, 0, -(q // p), 1
    g, x, y = xgcd(p, q)
    return x, y, -(q // g), p // g


def smith_normal_form(a: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Diagonalize a with invertible row and column transforms.

    Returns:
        (d, u, v) with u * a * v == d, u and v of unit determinant, and the
        diagonal of d a divisibility chain d1 | d2 | ... in canonical form
        (nonnegative over Z, a divisor of n over Z/n, zeros last).
    """
    ring = a.ring
    m, n = a.rows, a.cols
    mat = [list(r) for r in a.entries]
    u = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    v = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    norm = ring.normalize

    def row_op(t, i, x, y, z, w):
        # rows t, i <- (x*t + y*i, z*t + w*i), mirrored into u
        for dst in (mat, u):
            rt, ri = dst[t], dst[i]
            for j in range(len(rt)):
                rt[j], ri[j] = norm(x * rt[j] + y * ri[j]), norm(z * rt[j] + w * ri[j])

    def col_op(t, j, x, y, z, w):
        for dst in (mat, v):
            for row in dst:
                row[t], row[j] = norm(x * row[t] + y * row[j]), norm(z * row[t] + w * row[j])

    def swap_rows(i, j):
        mat[i], mat[j] = mat[j], mat[i]
        u[i], u[j] = u[j], u[i]
        # keep determinant +1
        for r in (mat, u):
            r[i] = [norm(-x) for x in r[i]]

    def swap_cols(i, j):
        for dst in (mat, v):
            for row in dst:
                row[i], row[j] = row[j], row[i]
        for row in mat:
            row[i] = norm(-row[i])
        for row in v:
            row[i] = norm(-row[i])

    k = min(m, n)
    for t in range(k):
        # choose a nonzero pivot of minimal weight to limit growth
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if mat[i][j]:
                    w = _pivot_weight(ring, mat[i][j])
                    if best is None or w < best[0]:
                        best = (w, i, j)
        if best is None:
            break
        _, bi, bj = best
        if bi != t:
            swap_rows(t, bi)
        if bj != t:
            swap_cols(t, bj)
        while True:
            for i in range(t + 1, m):
                q = mat[i][t]
                if q:
                    row_op(t, i, *_clear_coeffs(mat[t][t], q))
            for j in range(t + 1, n):
                q = mat[t][j]
                if q:
                    col_op(t, j, *_clear_coeffs(mat[t][t], q))
            if all(mat[i][t] == 0 for i in range(t + 1, m)):
                break

    # enforce the divisibility chain
    for i in range(k):
        for j in range(i + 1, k):
            di, dj = mat[i][i], mat[j][j]
            if di == 0 and dj == 0:
                continue
            if ring.divides(di, dj):
                continue
            col_op(i, j, 1, 1, 0, 1)  # column i += column j
            while True:
                q = mat[j][i]
                if q:
                    row_op(i, j, *_clear_coeffs(mat[i][i], q))
                q = mat[i][j]
                if q:
                    col_op(i, j, *_clear_coeffs(mat[i][i], q))
                if mat[j][i] == 0 and mat[i][j] == 0:
                    break

    # canonical representatives on the diagonal, absorbed into u
    for i in range(k):
        d = mat[i][i]
        unit, canon = ring.associate(d)
        if unit != 1:
            for j in range(n):
                mat[i][j] = norm(unit * mat[i][j])
            for j in range(m):
                u[i][j] = norm(unit * u[i][j])
        mat[i][i] = canon

    d = IntMatrix(ring, m, n, mat)
    um = IntMatrix(ring, m, m, u)
    vm = IntMatrix(ring, n, n, v)
    return d, um, vm


def solve_linear(a: IntMatrix, b) -> tuple[tuple[int, ...], IntMatrix] | None:
    """Solve a * x == b for a column vector x.

    Args:
        a: coefficient matrix (m x k).
        b: length-m sequence.

    Returns:
        (x0, kernel) where x0 is one solution and the rows of kernel generate
        {x : a * x == 0}; None when the system has no solution.
    """
    ring = a.ring
    b = [ring.normalize(x) for x in b]
    if len(b) != a.rows:
        raise ValueError("right-hand side length mismatch")
    d, u, v = smith_normal_form(a)
    m, k = a.rows, a.cols
    c = [sum(u.entries[i][j] * b[j] for j in range(m)) for i in range(m)]
    c = [ring.normalize(x) for x in c]
    y = [0] * k
    kern_y: list[list[int]] = []
    for i in range(k):
        di = d.entries[i][i] if i < m else 0
        ci = c[i] if i < m else 0
        if di == 0:
            if i < m and ci != 0:
                return None
            gen = [0] * k
            gen[i] = 1
            kern_y.append(gen)
            continue
        yi = ring.solve_scalar(di, ci)
        if yi is None:
            return None
        y[i] = yi
        ann = ring.annihilator(di)
        if ann:
            gen = [0] * k
            gen[i] = ann
            kern_y.append(gen)
    for i in range(k, m):
        if c[i] != 0:
            return None
    x0 = tuple(ring.normalize(sum(v.entries[i][j] * y[j] for j in range(k)))
               for i in range(k))
    kern_rows = []
    for gen in kern_y:
        kern_rows.append([ring.normalize(sum(v.entries[i][j] * gen[j] for j in range(k)))
                          for i in range(k)])
    kernel = IntMatrix(ring, len(kern_rows), k, kern_rows)
    return x0, kernel


def right_kernel(a: IntMatrix) -> IntMatrix:
    """Rows generate {x : a * x == 0} (x as a column vector)."""
    solved = solve_linear(a, [0] * a.rows)
    assert solved is not None
    return solved[1]


def kernel_basis(a: IntMatrix) -> IntMatrix:
    """Rows generate the left kernel {x : x * a == 0}.

    Over Z the rows are a lattice basis; over Z/n they are a generating set.
    """
    return right_kernel(a.transpose())


def solve_left(a: IntMatrix, b) -> tuple[int, ...] | None:
    """One row vector x with x * a == b, or None."""
    res = solve_linear(a.transpose(), b)
    return None if res is None else res[0]


def invert(a: IntMatrix) -> IntMatrix:
    """Inverse of an invertible square matrix, computed columnwise."""
    if a.rows != a.cols:
        raise ValueError("only square matrices can be inverted")
    cols = []
    for j in range(a.rows):
        e = [1 if i == j else 0 for i in range(a.rows)]
        res = solve_linear(a, e)
        if res is None:
            raise ValueError("matrix is not invertible")
        cols.append(res[0])
    inv = IntMatrix(a.ring, a.rows, a.rows, list(zip(*cols)))
    if not a.mul(inv).sub(IntMatrix.identity(a.ring, a.rows)).is_zero():
        raise ValueError("matrix is not invertible")
    return inv


class MatrixSystem:
    """Simultaneous linear equations in several matrix unknowns.

    Each equation is sum of L @ X @ R terms equal to a constant matrix; the
    system is flattened to one exact solve.  Used for retraction searches,
    projectivity lifts, homotopy tests and similar certificate hunts.
    """

    def __init__(self, ring: RingSpec) -> None:
        self.ring = ring
        self._shapes: dict[str, tuple[int, int]] = {}
        self._order: list[str] = []
        self._equations: list[tuple[list[tuple[str, IntMatrix, IntMatrix]], IntMatrix]] = []

    def unknown(self, name: str, rows: int, cols: int) -> str:
        if name in self._shapes:
            raise ValueError(f"duplicate unknown {name}")
        self._shapes[name] = (rows, cols)
        self._order.append(name)
        return name

    def require(self, terms, rhs: IntMatrix) -> None:
        """Add sum(L @ X @ R for (name, L, R) in terms) == rhs.

        L or R may be None, meaning an identity of the matching size.
        """
        resolved = []
        for name, left, right in terms:
            r, c = self._shapes[name]
            if left is None:
                left = IntMatrix.identity(self.ring, r)
            if right is None:
                right = IntMatrix.identity(self.ring, c)
            if left.cols != r or right.rows != c:
                raise ValueError(f"term shape mismatch for unknown {name}")
            if left.rows != rhs.rows or right.cols != rhs.cols:
                raise ValueError("term does not match equation shape")
            resolved.append((name, left, right))
        self._equations.append((resolved, rhs))

    def solve(self) -> dict[str, IntMatrix] | None:
        ring = self.ring
        offsets: dict[str, int] = {}
        total = 0
        for name in self._order:
            offsets[name] = total
            r, c = self._shapes[name]
            total += r * c
        rows: list[list[int]] = []
        rhs_flat: list[int] = []
        for terms, rhs in self._equations:
            er, ec = rhs.rows, rhs.cols
            blocks: dict[str, IntMatrix] = {}
            for name, left, right in terms:
                coef = left.kron(right.transpose())
                blocks[name] = blocks[name].add(coef) if name in blocks else coef
            for idx in range(er * ec):
                row = [0] * total
                for name, coef in blocks.items():
                    off = offsets[name]
                    for j, val in enumerate(coef.entries[idx]):
                        row[off + j] = ring.normalize(row[off + j] + val)
                rows.append(row)
            rhs_flat.extend(rhs.flatten())
        big = IntMatrix(ring, len(rows), total, rows)
        res = solve_linear(big, rhs_flat)
        if res is None:
            return None
        x0, _ = res
        out = {}
        for name in self._order:
            r, c = self._shapes[name]
            off = offsets[name]
            out[name] = IntMatrix.from_flat(ring, r, c, x0[off:off + r * c])
        return out
