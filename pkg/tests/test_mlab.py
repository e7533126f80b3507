"""Verdicts and certificates: every claim ships data that can be re-checked."""

import pytest

from cofun.fpmod import FpModule, FpMorphism, cyclic_module, free_module
from cofun.matrix import IntMatrix
from cofun.mlab import (PreconditionFailure, SplitPair, Telescope, chain_scheme_detection,
                        finite_free_summands, is_trace_module, kaplansky_filtration,
                        locally_projective_verdict, locally_split_retraction,
                        projective_factorization, purity_verdict, split_verdict,
                        strict_ml_verdict, telescope_colim_eval, telescope_split,
                        ttt_cokernel_check)
from cofun.ring import ZZ, Zmod

from helpers import twisted_pair

Z4 = Zmod(4)
Z6 = Zmod(6)
Z12 = Zmod(12)

# each factor must be invertible away from itself for the verdicts to go true
CASES = [
    (free_module(ZZ, 2), True),
    (FpModule(ZZ, 2, [[0, 2]]), False),
    (cyclic_module(ZZ, 6), False),
    (cyclic_module(Z4, 2), False),
    (cyclic_module(Z6, 2), True),
    (cyclic_module(Z12, 4), True),
    (cyclic_module(Z12, 2), False),
    (free_module(Z12, 1), True),
]


@pytest.mark.parametrize("mod,expected", CASES)
def test_trace_verdicts(mod, expected):
    v = is_trace_module(mod)
    assert v.value == expected
    if not expected:
        assert v.witness["kind"] == "trace_gap"


@pytest.mark.parametrize("mod,expected", CASES)
def test_ttt_cokernel_verdicts(mod, expected):
    assert ttt_cokernel_check(mod).value == expected


@pytest.mark.parametrize("mod,expected", CASES)
def test_projective_verdicts(mod, expected):
    v = locally_projective_verdict(mod)
    assert v.value == expected
    assert v.witness["kind"] == ("section" if expected else "no_section")


def test_trace_gap_witness_contents():
    v = is_trace_module(FpModule(ZZ, 2, [[0, 2]]))
    assert v.witness["kind"] == "trace_gap"
    assert v.witness["trace"] == 0


def test_projective_factorization():
    m = cyclic_module(Z6, 2)
    cover = FpMorphism(free_module(Z6, 1), m, [[1]])
    lift = projective_factorization(FpMorphism.identity(m), cover)
    assert lift is not None
    assert lift.compose(cover).eq(FpMorphism.identity(m))

    m4 = cyclic_module(Z4, 2)
    cover4 = FpMorphism(free_module(Z4, 1), m4, [[1]])
    assert projective_factorization(FpMorphism.identity(m4), cover4) is None


def test_split_and_purity_verdicts():
    z = free_module(ZZ, 1)
    double = FpMorphism(z, z, [[2]])
    v = split_verdict(double)
    assert v.value is False and v.witness["kind"] == "no_retraction"
    v = purity_verdict(double)
    assert v.value is False and v.witness["kind"] == "tensor_kernel"
    assert v.witness["factor"] == 2

    incl = FpMorphism(cyclic_module(Z6, 2), free_module(Z6, 1), [[3]])
    v = split_verdict(incl)
    assert v.value is True and v.witness["kind"] == "retraction"


def test_locally_split_retraction():
    z = free_module(ZZ, 1)
    z2 = free_module(ZZ, 2)
    v = locally_split_retraction(FpMorphism(z, z2, [[1, 0]]))
    assert v.value is True and v.witness["kind"] == "relative_retraction"
    r = IntMatrix(ZZ, 2, 1, v.witness["matrix"])
    assert FpMorphism(z, z2, [[1, 0]]).matrix.mul(r).entries == ((1,),)


def test_locally_split_preconditions():
    z = free_module(ZZ, 1)
    with pytest.raises(PreconditionFailure) as info:
        locally_split_retraction(FpMorphism(z, z, [[2]]))
    assert info.value.witness["kind"] == "tensor_kernel"

    mixed = FpModule(ZZ, 2, [[0, 2]])
    with pytest.raises(PreconditionFailure) as info:
        locally_split_retraction(FpMorphism(cyclic_module(ZZ, 2), mixed, [[0, 1]]))
    assert info.value.witness["kind"] == "trace_gap"


def test_finite_free_summands():
    v = finite_free_summands(free_module(ZZ, 2))
    assert v.value is True and v.witness["kind"] == "free_chain"
    assert v.bound == 2 and len(v.witness["stages"]) == 2
    v = finite_free_summands(FpModule(ZZ, 2, [[0, 2]]))
    assert v.value is False and v.witness["kind"] == "missed_generator"
    v = finite_free_summands(free_module(Z4, 1))
    assert v.value is None and v.witness["kind"] == "unsupported_ring"


Z1 = free_module(ZZ, 1)
RATIONAL = Telescope([Z1] * 4, [FpMorphism(Z1, Z1, [[k]]) for k in (2, 3, 4)])


def test_telescope_values_rational_model():
    res = telescope_colim_eval(RATIONAL, cyclic_module(ZZ, 2))
    # inverting 2, 3, 4 kills every 2-torsion value in the limit
    assert res.value.cyclic_factors == (2,)
    assert res.stable_value.is_zero()
    assert res.stabilized and res.bound == 3

    res = telescope_colim_eval(RATIONAL, Z1)
    assert res.value.cyclic_factors == (0,)
    assert res.stable_value.cyclic_factors == (0,)
    assert res.stabilized


def test_telescope_values_constant_and_zero():
    z2 = free_module(ZZ, 2)
    const = Telescope([z2] * 3, [FpMorphism.identity(z2)] * 2)
    res = telescope_colim_eval(const, cyclic_module(ZZ, 6))
    assert sorted(res.value.cyclic_factors) == [6, 6]
    assert sorted(res.stable_value.cyclic_factors) == [6, 6]
    assert res.stabilized

    zero_maps = Telescope([Z1] * 3, [FpMorphism(Z1, Z1, [[0]])] * 2)
    res = telescope_colim_eval(zero_maps, Z1)
    assert res.value.cyclic_factors == (0,)
    assert res.stable_value.is_zero() and res.stabilized


def test_telescope_split():
    v = telescope_split(RATIONAL)
    assert v.value is True and v.witness["kind"] == "telescope_split"
    assert v.bound == 3
    c4 = cyclic_module(Z12, 4)
    torsion = Telescope([c4, c4, c4],
                        [FpMorphism(c4, c4, [[2]]), FpMorphism(c4, c4, [[3]])])
    assert telescope_split(torsion).value is True
    assert telescope_split(RATIONAL, bound=1).value is True


def test_chain_detection_rejects_rational_model():
    v = chain_scheme_detection(RATIONAL)
    assert v.value is False
    assert v.witness["kind"] in ("image_chain_moves", "dual_horizon_moves")
    v = chain_scheme_detection(RATIONAL, probes=[cyclic_module(ZZ, 2)])
    assert v.value is False


def test_chain_detection_accepts_stable_chains():
    z2 = free_module(ZZ, 2)
    const = Telescope([z2] * 3, [FpMorphism.identity(z2)] * 2)
    v = chain_scheme_detection(const)
    assert v.value is True and v.witness["kind"] == "chain_scheme"

    splits = Telescope([Z1, z2, free_module(ZZ, 3)],
                       [FpMorphism(Z1, z2, [[1, 0]]),
                        FpMorphism(z2, free_module(ZZ, 3), [[1, 0, 0], [0, 1, 0]])])
    assert chain_scheme_detection(splits).value is True


def test_chain_detection_separates_torsion_by_ring():
    c2 = cyclic_module(ZZ, 2)
    v = chain_scheme_detection(Telescope([c2] * 2, [FpMorphism.identity(c2)]))
    assert v.value is False and v.witness["kind"] == "comparison_cokernel"

    c2_over_4 = cyclic_module(Z4, 2)
    v = chain_scheme_detection(Telescope([c2_over_4] * 2,
                                         [FpMorphism.identity(c2_over_4)]))
    assert v.value is False and v.witness["kind"] == "comparison_kernel"

    c2_over_6 = cyclic_module(Z6, 2)
    v = chain_scheme_detection(Telescope([c2_over_6] * 2,
                                         [FpMorphism.identity(c2_over_6)]))
    assert v.value is True


def test_filtration_single_twist():
    blocks = [Z1, Z1]
    pair = twisted_pair(blocks, [[1, 1], [0, 0]])
    v = kaplansky_filtration(blocks, pair)
    assert v.value is True and v.witness["kind"] == "filtration"
    assert v.witness["stages"][-1]["blocks"] == [0, 1]


def test_filtration_two_stages():
    blocks = [Z1, Z1, Z1]
    pair = twisted_pair(blocks, [[1, 0, 0], [0, 1, 1], [0, 0, 0]])
    v = kaplansky_filtration(blocks, pair)
    assert v.value is True
    assert [s["blocks"] for s in v.witness["stages"]] == [[0], [0, 1, 2]]


def test_filtration_torsion_blocks():
    blocks = [cyclic_module(Z6, 2), free_module(Z6, 1)]
    pair = twisted_pair(blocks, [[1, 0], [0, 0]])
    assert kaplansky_filtration(blocks, pair).value is True


def test_filtration_rejects_bad_pair():
    blocks = [Z1, Z1]
    pair = twisted_pair(blocks, [[1, 1], [0, 0]])
    bad = SplitPair(pair.into_first, pair.onto_first,
                    pair.into_first, pair.onto_first)
    with pytest.raises(ValueError):
        kaplansky_filtration(blocks, bad)


def test_strict_ml_verdicts():
    v = strict_ml_verdict(free_module(ZZ, 2))
    assert v.value is True and v.witness["kind"] == "embedding"
    v = strict_ml_verdict(FpModule(ZZ, 2, [[0, 2]]))
    assert v.value is False and v.witness["kind"] == "comparison_kernel"
    assert strict_ml_verdict(cyclic_module(Z4, 2)).value is False
    assert strict_ml_verdict(cyclic_module(Z6, 2)).value is True
    assert strict_ml_verdict(cyclic_module(Z12, 4)).value is True
