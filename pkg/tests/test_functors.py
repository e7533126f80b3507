"""Functors presented by a map of modules: values, naturality, duality."""

import random

from cofun.fpmod import (FpModule, FpMorphism, cyclic_module, free_module, hom_module,
                         modules_isomorphic, morphism_image, morphism_kernel,
                         tensor_module, tensor_morphisms)
from cofun.functors import (ShortExactSequence, dual_evaluate, dual_presentation,
                            exactness_profile, fg_image_factorization, hom_functor,
                            kernel_factorization, nat_cokernel, nat_kernel,
                            nat_to_tensor, qc_functor, qc_map, sch_envelope,
                            scheme_functor, scheme_map, sml_probe_check, tensor_to_nat)
from cofun.matrix import IntMatrix
from cofun.ring import ZZ, Zmod

from helpers import module_size, rand_mod, rand_morphism


def test_qc_values_are_tensor_products():
    rng = random.Random(13)
    for trial in range(25):
        n = rng.choice([2, 3, 4, 6])
        ring = Zmod(n)
        m, s = rand_mod(rng, ring), rand_mod(rng, ring)
        f = qc_functor(m)
        ev = f.evaluate(s)
        t = tensor_module(m, s)
        assert modules_isomorphic(ev.value, t.module)
        # the grid identification is itself an isomorphism
        rows = []
        for i in range(m.ngens):
            for j in range(s.ngens):
                e = [[0] * s.ngens for _ in range(m.ngens)]
                e[i][j] = 1
                psi = FpMorphism(f.w, s, e, check=False)
                rows.append(ev.class_of(psi).coords)
        ident = FpMorphism(t.module, ev.value,
                           IntMatrix(ring, t.module.ngens, ev.value.ngens, rows))
        assert ident.is_isomorphism()


def test_scheme_values_are_hom_modules():
    rng = random.Random(14)
    for trial in range(15):
        n = rng.choice([2, 4, 6])
        ring = Zmod(n)
        m, s = rand_mod(rng, ring), rand_mod(rng, ring)
        ev = scheme_functor(m).evaluate(s)
        assert module_size(ev.value) == module_size(hom_module(m, s).module)


def test_naturality_squares_commute():
    rng = random.Random(15)
    for trial in range(15):
        n = rng.choice([2, 4])
        ring = Zmod(n)
        m1, m2 = rand_mod(rng, ring), rand_mod(rng, ring)
        s1, s2 = rand_mod(rng, ring), rand_mod(rng, ring)
        fmap = rand_morphism(rng, m1, m2)
        hmap = rand_morphism(rng, s1, s2)
        eta = qc_map(fmap)
        lhs = eta.at(s1).compose(eta.target.map_on(hmap))
        rhs = eta.source.map_on(hmap).compose(eta.at(s2))
        assert lhs.eq(rhs)


def test_induced_maps_match_tensored_maps():
    rng = random.Random(16)
    for trial in range(10):
        n = rng.choice([2, 4, 6])
        ring = Zmod(n)
        m1, m2, s = rand_mod(rng, ring), rand_mod(rng, ring), rand_mod(rng, ring)
        fmap = rand_morphism(rng, m1, m2)
        at = qc_map(fmap).at(s)
        tens = tensor_morphisms(fmap, FpMorphism.identity(s))
        assert module_size(morphism_kernel(at).module) == \
            module_size(morphism_kernel(tens).module)
        assert module_size(morphism_image(at).module) == \
            module_size(morphism_image(tens).module)


def test_transformation_module():
    z2 = cyclic_module(ZZ, 2)
    nat22 = hom_functor(qc_functor(z2), qc_functor(z2))
    assert module_size(nat22.module) == 2
    eta = nat22.decode(nat22.module.gen(0))
    assert nat22.encode(eta) == nat22.module.gen(0)

    natsq = hom_functor(scheme_functor(z2), qc_functor(free_module(ZZ, 1)))
    assert module_size(natsq.module) == 2

    rng = random.Random(17)
    for trial in range(10):
        n = rng.choice([2, 4])
        ring = Zmod(n)
        nats = hom_functor(qc_functor(rand_mod(rng, ring)),
                           qc_functor(rand_mod(rng, ring)))
        for k in range(min(nats.module.ngens, 2)):
            eta = nats.decode(nats.module.gen(k))
            assert nats.encode(eta) == nats.module.gen(k)
            if nats.module.gen(k).is_zero():
                assert eta.is_zero()


def test_tensor_nat_roundtrip():
    rng = random.Random(18)
    for trial in range(25):
        n = rng.choice([2, 4, 6])
        ring = Zmod(n)
        m, mp = rand_mod(rng, ring), rand_mod(rng, ring)
        grid = tensor_module(m, mp)
        t = grid.module.element([rng.randint(0, n - 1) for _ in range(grid.module.ngens)])
        eta = tensor_to_nat(m, mp, t)
        assert nat_to_tensor(eta) == t
        assert eta.is_zero() == t.is_zero()
        nats = hom_functor(scheme_functor(m), qc_functor(mp))
        if nats.module.ngens:
            eta2 = nats.decode(nats.module.element(
                [rng.randint(0, n - 1) for _ in range(nats.module.ngens)]))
            eta3 = tensor_to_nat(m, mp, nat_to_tensor(eta2))
            assert eta3.eq(eta2)


def test_nat_kernel_cokernel_pointwise():
    rng = random.Random(19)
    for trial in range(12):
        n = rng.choice([2, 4, 6])
        ring = Zmod(n)
        m1, m2 = rand_mod(rng, ring), rand_mod(rng, ring)
        eta = qc_map(rand_morphism(rng, m1, m2))
        ker = nat_kernel(eta)
        cok = nat_cokernel(eta)
        for s in [free_module(ring, 1), rand_mod(rng, ring)]:
            at = eta.at(s)
            incl_at = ker.inclusion.at(s)
            proj_at = cok.projection.at(s)
            assert incl_at.is_injective()
            assert proj_at.is_surjective()
            assert incl_at.compose(at).is_zero_map()
            assert at.compose(proj_at).is_zero_map()
            k_at = morphism_kernel(at)
            assert module_size(ker.functor.evaluate(s).value) == module_size(k_at.module)
            assert module_size(morphism_image(incl_at).module) == module_size(k_at.module)
            assert module_size(morphism_kernel(proj_at).module) == \
                module_size(morphism_image(at).module)


def test_kernel_of_doubling():
    zf = free_module(ZZ, 1)
    ker2 = nat_kernel(qc_map(FpMorphism(zf, zf, [[2]])))
    val = ker2.functor.evaluate(cyclic_module(ZZ, 4)).value
    assert modules_isomorphic(val, hom_module(cyclic_module(ZZ, 2),
                                              cyclic_module(ZZ, 4)).module)
    assert sorted(val.cyclic_factors) == [2]


def test_duality_swaps_presentations():
    rng = random.Random(20)
    for trial in range(10):
        n = rng.choice([2, 4, 6])
        ring = Zmod(n)
        m, s = rand_mod(rng, ring), rand_mod(rng, ring)
        dq = dual_evaluate(qc_functor(m), s)
        assert module_size(dq.module) == module_size(hom_module(m, s).module)
        dsch = dual_evaluate(scheme_functor(m), s)
        assert module_size(dsch.module) == module_size(tensor_module(m, s).module)
        dp = dual_presentation(qc_functor(m))
        assert dp.kind == "scheme"
        assert module_size(dp.evaluate(s).value) == module_size(dq.module)
    zf = free_module(ZZ, 1)
    assert dual_presentation(nat_kernel(qc_map(FpMorphism(zf, zf, [[2]]))).functor) is None


def test_image_factorization():
    z = free_module(ZZ, 1)
    m6 = cyclic_module(ZZ, 6)
    t = tensor_module(z, m6).module.element([2])
    fac = fg_image_factorization(tensor_to_nat(z, m6, t))
    assert sorted(fac.submodule.cyclic_factors) == [3]
    assert fac.factor.compose(fac.through).eq(tensor_to_nat(z, m6, t))


def test_kernel_factorization():
    zf = free_module(ZZ, 1)
    eta = tensor_to_nat(zf, zf, tensor_module(zf, zf).module.element([2]))
    m = FpMorphism(zf, cyclic_module(ZZ, 2), [[1]])
    res = kernel_factorization(eta, m)
    assert res.exists
    assert res.restriction.compose(res.factor).eq(eta)

    eta1 = tensor_to_nat(zf, cyclic_module(ZZ, 2),
                         tensor_module(zf, cyclic_module(ZZ, 2)).module.element([1]))
    res = kernel_factorization(eta1, FpMorphism(zf, zf, [[2]]))
    assert not res.exists
    assert res.diagnostic is not None


def test_exactness_profiles():
    zf = free_module(ZZ, 1)
    z2 = cyclic_module(ZZ, 2)
    ses = ShortExactSequence(FpMorphism(zf, zf, [[2]]), FpMorphism(zf, z2, [[1]]))
    prof = exactness_profile(qc_functor(z2), [ses])
    assert prof.right_exact and not prof.left_exact
    prof = exactness_profile(scheme_functor(z2), [ses])
    assert prof.left_exact and not prof.right_exact
    assert exactness_profile(qc_functor(zf), [ses]).exact


def test_envelope_and_probe_check():
    zf = free_module(ZZ, 1)
    z2 = cyclic_module(ZZ, 2)
    assert sch_envelope(qc_functor(z2)).module.is_zero()
    ok, wit = sml_probe_check(qc_functor(z2), [z2])
    assert not ok and wit is not None and not wit.element.is_zero()
    ok, wit = sml_probe_check(qc_functor(zf), [z2, zf])
    assert ok and wit is None
    ok, _ = sml_probe_check(scheme_functor(z2), [z2, cyclic_module(ZZ, 4)])
    assert ok

    f = qc_functor(FpModule(ZZ, 2, [[2, 0]]))
    env = sch_envelope(f)
    s = cyclic_module(ZZ, 4)
    at = env.canonical.at(s)
    evf = f.evaluate(s)
    for k in range(evf.value.ngens):
        el = evf.value.gen(k)
        restricted = env.canonical.u.compose(evf.hom_of(el))
        assert at.apply(el) == env.functor.evaluate(s).class_of(restricted)


def test_scheme_map_reverses_direction():
    z2 = cyclic_module(ZZ, 2)
    m6 = cyclic_module(ZZ, 6)
    eta = scheme_map(FpMorphism(z2, m6, [[3]]))
    assert eta.source.origin == m6 and eta.target.origin == z2
    s = cyclic_module(ZZ, 12)
    at = eta.at(s)
    assert module_size(at.source) == module_size(hom_module(m6, s).module)
    assert module_size(at.target) == module_size(hom_module(z2, s).module)
