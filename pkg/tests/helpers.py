"""Shared corpus generators for the test suite.

Everything takes an explicit random.Random so each test file owns its seed
and stays reproducible on its own.
"""

from cofun.fpmod import FpModule, FpMorphism, direct_sum, hom_module, morphism_image
from cofun.matrix import IntMatrix
from cofun.mlab import SplitPair, Telescope
from cofun.ring import ZZ


def module_size(mod):
    """Number of elements; only meaningful when every factor is finite."""
    total = 1
    for d in mod.cyclic_factors:
        total *= d if d else mod.ring.modulus
    return total


def rand_mod(rng, ring, maxg=2, maxr=2, span=3):
    g = rng.randint(1, maxg)
    r = rng.randint(0, maxr)
    n = ring.modulus
    lo, hi = (0, n - 1) if n else (-span, span)
    return FpModule(ring, g, [[rng.randint(lo, hi) for _ in range(g)] for _ in range(r)])


def rand_morphism(rng, src, tgt, span=3):
    """Random well-defined morphism, drawn through the hom module."""
    h = hom_module(src, tgt)
    if h.module.ngens == 0:
        return FpMorphism.zero(src, tgt)
    n = src.ring.modulus
    lo, hi = (0, n - 1) if n else (-span, span)
    el = h.module.element([rng.randint(lo, hi) for _ in range(h.module.ngens)])
    return h.decode(el)


def unimodular(rng, ring, g, steps=None):
    """Random product of elementary shears; determinant stays a unit."""
    m = IntMatrix.identity(ring, g)
    if g < 2:
        return m
    for _ in range(steps if steps is not None else 2 * g + 2):
        i = rng.randrange(g)
        j = rng.randrange(g)
        if i == j:
            continue
        rows = [[1 if a == b else 0 for b in range(g)] for a in range(g)]
        rows[i][j] = rng.choice([-2, -1, 1, 2])
        m = m.mul(IntMatrix(ring, g, g, rows))
    return m


def corpus_module(rng):
    """Integer module of rank 0..3 with torsion factors <= 12, presentation scrambled.

    Returns (module, free) where free records whether any torsion was built in;
    that flag is ground truth by construction, independent of the library.
    """
    rank = rng.randint(0, 3)
    torsion = [rng.choice([2, 3, 4, 5, 6, 8, 9, 12])
               for _ in range(rng.randint(0, 3))]
    g = rank + len(torsion)
    if g == 0:
        return FpModule(ZZ, 0, []), True
    rows = []
    for idx, d in enumerate(torsion):
        row = [0] * g
        row[idx] = d
        rows.append(row)
    if rows:
        scrambled = IntMatrix(ZZ, len(rows), g, rows).mul(unimodular(rng, ZZ, g))
        rows = scrambled.to_lists()
        if rng.random() < 0.5:
            rows.append([sum(col) for col in zip(*rows)])
    return FpModule(ZZ, g, rows), not torsion


def rand_chain(rng, ring, stages, maxg=2, maxr=1):
    mods = [rand_mod(rng, ring, maxg=maxg, maxr=maxr) for _ in range(stages)]
    maps = [rand_morphism(rng, mods[i], mods[i + 1]) for i in range(stages - 1)]
    return Telescope(mods, maps)


def twisted_pair(blocks, e_matrix):
    """Split pair for an idempotent endomorphism of a block sum.

    The two halves are the images of e and of its complement, included by
    the idempotent matrices themselves and projected by identity coordinates.
    """
    ds = direct_sum(blocks)
    amb = ds.module
    ring = amb.ring
    e = FpMorphism(amb, amb, e_matrix)
    comp = FpMorphism(amb, amb, IntMatrix.identity(ring, amb.ngens).sub(e.matrix))
    first = morphism_image(e)
    second = morphism_image(comp)
    ident = IntMatrix.identity(ring, amb.ngens)
    return SplitPair(FpMorphism(first.module, amb, e.matrix),
                     FpMorphism(amb, first.module, ident),
                     FpMorphism(second.module, amb, comp.matrix),
                     FpMorphism(amb, second.module, ident))


def rand_split_pair(rng, blocks, span=2, tries=8):
    """Random verified decomposition of the sum of the given blocks.

    Projects onto a random subset of blocks, then twists by a random
    off-corner patch when one is well defined; falls back to the plain
    block projector otherwise.
    """
    ds = direct_sum(blocks)
    amb = ds.module
    ring = amb.ring
    g = amb.ngens
    chosen = [k for k in range(len(blocks)) if rng.random() < 0.5]
    mask = []
    for k, b in enumerate(blocks):
        mask.extend([1 if k in chosen else 0] * b.ngens)
    for attempt in range(tries):
        rows = [[0] * g for _ in range(g)]
        for i in range(g):
            rows[i][i] = mask[i]
        if attempt < tries - 1:
            for i in range(g):
                for j in range(g):
                    if mask[i] and not mask[j] and rng.random() < 0.5:
                        rows[i][j] = rng.randint(-span, span)
        try:
            FpMorphism(amb, amb, rows)
        except ValueError:
            continue
        return twisted_pair(blocks, rows)
    return twisted_pair(blocks, [[1 if i == j else 0 for j in range(g)] for i in range(g)])
