"""Exact linear algebra: diagonalization, solvers, kernels, inverses."""

import random

from cofun.linalg import (MatrixSystem, invert, kernel_basis, smith_normal_form,
                          solve_left, solve_linear)
from cofun.matrix import IntMatrix
from cofun.ring import ZZ, Zmod


def assert_valid_snf(ring, a):
    d, u, v = smith_normal_form(a)
    assert u.mul(a).mul(v).entries == d.entries
    assert ring.is_unit(u.det())
    assert ring.is_unit(v.det())
    k = min(a.rows, a.cols)
    for i in range(a.rows):
        for j in range(a.cols):
            if i != j:
                assert d[i, j] == 0
    diag = [d[i, i] for i in range(k)]
    for i, x in enumerate(diag):
        if x and ring.modulus is None:
            assert x > 0
        if x and ring.modulus is not None:
            assert ring.modulus % x == 0
    for i in range(k - 1):
        if diag[i]:
            assert ring.divides(diag[i], diag[i + 1])
        else:
            assert diag[i + 1] == 0
    return diag


def test_smith_forms_random():
    rng = random.Random(7)
    for trial in range(800):
        n = rng.choice([None, 2, 3, 4, 6, 8, 12])
        ring = ZZ if n is None else Zmod(n)
        r = rng.randint(0, 4)
        c = rng.randint(0, 4)
        lo, hi = (-50, 50) if n is None else (0, n - 1)
        a = IntMatrix(ring, r, c,
                      [[rng.randint(lo, hi) for _ in range(c)] for _ in range(r)])
        assert_valid_snf(ring, a)


def test_smith_form_pinned():
    a = IntMatrix(ZZ, 3, 3, [[2, 4, 4], [-6, 6, 12], [10, 4, 16]])
    diag = assert_valid_snf(ZZ, a)
    assert diag == [2, 2, 156]
    # shear case: leading entry does not divide its neighbor
    b = IntMatrix(ZZ, 2, 2, [[2, 0], [0, 3]])
    assert assert_valid_snf(ZZ, b) == [1, 6]
    assert assert_valid_snf(Zmod(6), IntMatrix(Zmod(6), 1, 1, [[4]])) == [2]


def test_solve_modular_against_enumeration():
    rng = random.Random(71)
    for trial in range(600):
        n = rng.choice([2, 3, 4, 5, 6])
        ring = Zmod(n)
        r = rng.randint(1, 3)
        c = rng.randint(1, 3)
        a = IntMatrix(ring, r, c,
                      [[rng.randint(0, n - 1) for _ in range(c)] for _ in range(r)])
        b = [rng.randint(0, n - 1) for _ in range(r)]
        res = solve_linear(a, b)
        sols = []
        for code in range(n ** c):
            x = [(code // n ** i) % n for i in range(c)]
            if all(sum(a[i, j] * x[j] for j in range(c)) % n == b[i] % n
                   for i in range(r)):
                sols.append(tuple(x))
        if res is None:
            assert not sols
            continue
        x0, kern = res
        assert all(sum(a[i, j] * x0[j] for j in range(c)) % n == b[i] % n
                   for i in range(r))
        # the kernel rows must generate exactly the homogeneous solutions
        gens = [kern.row(i) for i in range(kern.rows)]
        span = {tuple([0] * c)}
        frontier = set(span)
        while frontier:
            nxt = set()
            for s in frontier:
                for g in gens:
                    t = tuple((s[i] + g[i]) % n for i in range(c))
                    if t not in span:
                        span.add(t)
                        nxt.add(t)
            frontier = nxt
        assert span == {tuple((s[i] - x0[i]) % n for i in range(c)) for s in sols}


def test_solve_integer_systems():
    rng = random.Random(72)
    for trial in range(300):
        r = rng.randint(1, 3)
        c = rng.randint(1, 3)
        a = IntMatrix(ZZ, r, c,
                      [[rng.randint(-6, 6) for _ in range(c)] for _ in range(r)])
        xs = [rng.randint(-5, 5) for _ in range(c)]
        b = [sum(a[i, j] * xs[j] for j in range(c)) for i in range(r)]
        res = solve_linear(a, b)
        assert res is not None
        x0, kern = res
        assert all(sum(a[i, j] * x0[j] for j in range(c)) == b[i] for i in range(r))
        for i in range(kern.rows):
            g = kern.row(i)
            assert all(sum(a[i2, j] * g[j] for j in range(c)) == 0 for i2 in range(r))
        diff = [xs[j] - x0[j] for j in range(c)]
        if kern.rows:
            assert solve_linear(kern.transpose(), diff) is not None
        else:
            assert all(x == 0 for x in diff)


def test_kernel_and_left_solve():
    kb = kernel_basis(IntMatrix(Zmod(6), 1, 1, [[2]]))
    assert kb.entries == ((3,),)
    res = solve_linear(IntMatrix(Zmod(4), 1, 1, [[2]]), [2])
    assert res is not None and (2 * res[0][0]) % 4 == 2
    # row-side solve: find y with y*A = b
    a = IntMatrix(ZZ, 2, 2, [[1, 2], [0, 3]])
    y = solve_left(a, [1, 5])
    assert y is not None
    assert [y[0] * 1 + y[1] * 0, y[0] * 2 + y[1] * 3] == [1, 5]


def test_invert_round_trip():
    rng = random.Random(73)
    for trial in range(150):
        n = rng.choice([None, 4, 6])
        ring = ZZ if n is None else Zmod(n)
        size = rng.randint(1, 3)
        while True:
            m = IntMatrix(ring, size, size,
                          [[rng.randint(-4, 4) if n is None else rng.randint(0, n - 1)
                            for _ in range(size)] for _ in range(size)])
            if ring.is_unit(m.det()):
                break
        mi = invert(m)
        assert m.mul(mi).entries == IntMatrix.identity(ring, size).entries
        assert mi.mul(m).entries == IntMatrix.identity(ring, size).entries


def test_matrix_system_two_sided():
    ring = Zmod(6)
    system = MatrixSystem(ring)
    system.unknown("G", 2, 2)
    a = IntMatrix.from_rows(ring, [[1, 2], [0, 1]])
    g_true = IntMatrix.from_rows(ring, [[3, 1], [4, 5]])
    system.require([("G", a, None)], a.mul(g_true))
    c = IntMatrix.from_rows(ring, [[2, 0], [1, 1]])
    system.require([("G", None, c)], g_true.mul(c))
    sol = system.solve()
    assert sol is not None
    assert a.mul(sol["G"]).entries == a.mul(g_true).entries
    assert sol["G"].mul(c).entries == g_true.mul(c).entries


def test_matrix_system_unsolvable():
    ring = Zmod(4)
    system = MatrixSystem(ring)
    system.unknown("X", 1, 1)
    two = IntMatrix.from_rows(ring, [[2]])
    one = IntMatrix.from_rows(ring, [[1]])
    system.require([("X", two, None)], one)
    assert system.solve() is None
