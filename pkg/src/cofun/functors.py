"""Functors on modules presented by a single map between f.p. modules.

A functor here is the data of one morphism d: W -> V; its value at a module
S is the cokernel of precomposition Hom(V, S) -> Hom(W, S).  Tensoring with a
module and mapping out of a module are the two extreme cases (V free of rank
zero gives Hom(W, -)), and natural transformations between such functors are
homotopy classes of squares over the presenting maps.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fpmod import (FpModule, FpMorphism, KernelData, ModuleElement, _rows_in_span, direct_sum,
                    element_in_submodule, free_module, hom_module, morphism_image,
                    morphism_kernel, submodule_generated, tensor_module, tensor_morphisms,
                    zero_module)
from .linalg import MatrixSystem
from .matrix import IntMatrix


class CoherentFunctor:
    """Functor S |-> coker(Hom(V, S) -> Hom(W, S)) for one map d: W -> V."""

    def __init__(self, d: FpMorphism, kind: str = "general",
                 origin: FpModule | None = None) -> None:
        self.d = d
        self.kind = kind
        self.origin = origin
        self._cache: dict[FpModule, Evaluation] = {}

    @property
    def w(self) -> FpModule:
        return self.d.source

    @property
    def v(self) -> FpModule:
        return self.d.target

    def evaluate(self, probe: FpModule) -> "Evaluation":
        ev = self._cache.get(probe)
        if ev is None:
            ev = Evaluation(self, probe)
            self._cache[probe] = ev
        return ev

    def map_on(self, h: FpMorphism) -> FpMorphism:
        """Value of the functor on a map of probes."""
        ev_s = self.evaluate(h.source)
        ev_t = self.evaluate(h.target)
        rows = []
        for i in range(ev_s.value.ngens):
            psi = ev_s.hom_w.decode(ev_s.hom_w.module.gen(i))
            rows.append(ev_t.class_of(psi.compose(h)).coords)
        mat = IntMatrix(self.d.source.ring, ev_s.value.ngens, ev_t.value.ngens, rows)
        return FpMorphism(ev_s.value, ev_t.value, mat, check=False)

    def __eq__(self, other) -> bool:
        return (isinstance(other, CoherentFunctor)
                and self.d.source == other.d.source
                and self.d.target == other.d.target
                and self.d.matrix.entries == other.d.matrix.entries)

    def __hash__(self) -> int:
        return hash((self.d.source, self.d.target, self.d.matrix.entries))

    def __repr__(self) -> str:
        return f"CoherentFunctor({self.kind}: {self.w.describe()} -> {self.v.describe()})"


def qc_functor(module: FpModule) -> CoherentFunctor:
    """Tensoring with the module, presented by the transposed relations."""
    ring = module.ring
    w = free_module(ring, module.ngens)
    v = free_module(ring, module.relations.rows)
    d = FpMorphism(w, v, module.relations.transpose(), check=False)
    return CoherentFunctor(d, kind="qc", origin=module)


def scheme_functor(module: FpModule) -> CoherentFunctor:
    """Mapping out of the module."""
    d = FpMorphism(module, zero_module(module.ring),
                   IntMatrix.zeros(module.ring, module.ngens, 0), check=False)
    return CoherentFunctor(d, kind="scheme", origin=module)


class Evaluation:
    """Value of a functor at one probe, with hom-level encode and decode."""

    def __init__(self, functor: CoherentFunctor, probe: FpModule) -> None:
        self.functor = functor
        self.probe = probe
        self.hom_w = hom_module(functor.w, probe)
        self.hom_v = hom_module(functor.v, probe)
        rows = []
        for i in range(self.hom_v.module.ngens):
            phi = self.hom_v.decode(self.hom_v.module.gen(i))
            rows.append(self.hom_w.encode(functor.d.compose(phi)).coords)
        pre_mat = IntMatrix(probe.ring, self.hom_v.module.ngens, self.hom_w.module.ngens, rows)
        self.pre = FpMorphism(self.hom_v.module, self.hom_w.module, pre_mat, check=False)
        self.value = FpModule(probe.ring, self.hom_w.module.ngens,
                              pre_mat.vstack(self.hom_w.module.relations))

    def class_of(self, psi: FpMorphism) -> ModuleElement:
        """Class in the value module of a map W -> probe."""
        return self.value.element(self.hom_w.encode(psi).coords)

    def hom_of(self, el: ModuleElement) -> FpMorphism:
        """A representative W -> probe of a value class."""
        if el.module != self.value:
            raise ValueError("element does not live in this value module")
        return self.hom_w.decode(self.hom_w.module.element(el.coords))


class NatTransformation:
    """Natural map between functors, recorded as a square over the maps d.

    The data is u: W_target -> W_source and v: V_target -> V_source with
    (u then d_source) equal to (d_target then v) as morphisms.  Two squares
    give the same transformation when the u parts differ by d_target
    followed by some map into W_source.
    """

    def __init__(self, source: CoherentFunctor, target: CoherentFunctor,
                 u: FpMorphism, v: FpMorphism, check: bool = True) -> None:
        if u.source != target.w or u.target != source.w:
            raise ValueError("u part has the wrong endpoints")
        if v.source != target.v or v.target != source.v:
            raise ValueError("v part has the wrong endpoints")
        self.source = source
        self.target = target
        self.u = u
        self.v = v
        if check and not u.compose(source.d).eq(target.d.compose(v)):
            raise ValueError("square does not commute up to relations")

    @staticmethod
    def identity(f: CoherentFunctor) -> "NatTransformation":
        return NatTransformation(f, f, FpMorphism.identity(f.w), FpMorphism.identity(f.v),
                                 check=False)

    @staticmethod
    def zero(source: CoherentFunctor, target: CoherentFunctor) -> "NatTransformation":
        return NatTransformation(source, target, FpMorphism.zero(target.w, source.w),
                                 FpMorphism.zero(target.v, source.v), check=False)

    def at(self, probe: FpModule) -> FpMorphism:
        """The induced map of values at one probe."""
        ev_s = self.source.evaluate(probe)
        ev_t = self.target.evaluate(probe)
        rows = []
        for i in range(ev_s.value.ngens):
            psi = ev_s.hom_w.decode(ev_s.hom_w.module.gen(i))
            rows.append(ev_t.class_of(self.u.compose(psi)).coords)
        mat = IntMatrix(self.u.source.ring, ev_s.value.ngens, ev_t.value.ngens, rows)
        return FpMorphism(ev_s.value, ev_t.value, mat, check=False)

    def compose(self, then: "NatTransformation") -> "NatTransformation":
        """This transformation followed by `then`."""
        if self.target != then.source:
            raise ValueError("transformations do not compose")
        return NatTransformation(self.source, then.target,
                                 then.u.compose(self.u), then.v.compose(self.v), check=False)

    def add(self, other: "NatTransformation") -> "NatTransformation":
        self._parallel(other)
        return NatTransformation(self.source, self.target,
                                 self.u.add(other.u), self.v.add(other.v), check=False)

    def sub(self, other: "NatTransformation") -> "NatTransformation":
        self._parallel(other)
        return NatTransformation(self.source, self.target,
                                 self.u.sub(other.u), self.v.sub(other.v), check=False)

    def eq(self, other: "NatTransformation") -> bool:
        """Equality as transformations: the u parts are homotopic."""
        self._parallel(other)
        ring = self.u.source.ring
        diff = self.u.matrix.sub(other.u.matrix)
        wf, dg = self.source.w, self.target.d
        sys_ = MatrixSystem(ring)
        sys_.unknown("w", dg.target.ngens, wf.ngens)
        sys_.unknown("A", dg.target.relations.rows, wf.relations.rows)
        sys_.unknown("B", dg.source.ngens, wf.relations.rows)
        sys_.require([("w", dg.target.relations, None), ("A", None, wf.relations.neg())],
                     IntMatrix.zeros(ring, dg.target.relations.rows, wf.ngens))
        sys_.require([("w", dg.matrix, None), ("B", None, wf.relations)], diff)
        return sys_.solve() is not None

    def is_zero(self) -> bool:
        return self.eq(NatTransformation.zero(self.source, self.target))

    def _parallel(self, other: "NatTransformation") -> None:
        if self.source != other.source or self.target != other.target:
            raise ValueError("transformations have different endpoints")


def qc_map(f: FpMorphism) -> NatTransformation:
    """The transformation between tensor functors induced by a module map."""
    src = qc_functor(f.source)
    tgt = qc_functor(f.target)
    witness = _rows_in_span(f.target.relations, f.source.relations.mul(f.matrix))
    if witness is None:
        raise ValueError("map does not respect relations")
    u = FpMorphism(tgt.w, src.w, f.matrix.transpose(), check=False)
    v = FpMorphism(tgt.v, src.v, witness.transpose(), check=False)
    return NatTransformation(src, tgt, u, v, check=False)


def scheme_map(f: FpMorphism) -> NatTransformation:
    """Restriction along a module map, between mapping-out functors."""
    src = scheme_functor(f.target)
    tgt = scheme_functor(f.source)
    v = FpMorphism(tgt.v, src.v, IntMatrix.zeros(f.source.ring, 0, 0), check=False)
    return NatTransformation(src, tgt, f, v, check=False)


# -- natural transformations as a module ---------------------------------------


class HomFunctorData:
    """All transformations source -> target, as the kernel of one value map."""

    def __init__(self, source: CoherentFunctor, target: CoherentFunctor) -> None:
        self.source = source
        self.target = target
        self.ev_w = target.evaluate(source.w)
        self.ev_v = target.evaluate(source.v)
        self.on_d = target.map_on(source.d)
        self.kernel = morphism_kernel(self.on_d)
        self.module = self.kernel.module

    def decode(self, el: ModuleElement) -> NatTransformation:
        rep = self.kernel.inclusion.apply(el)
        u = self.ev_w.hom_of(rep)
        v = self._solve_v(u)
        assert v is not None, "kernel element does not give a commuting square"
        return NatTransformation(self.source, self.target, u, v, check=False)

    def encode(self, eta: NatTransformation) -> ModuleElement:
        if eta.source != self.source or eta.target != self.target:
            raise ValueError("transformation has the wrong endpoints")
        rep = self.ev_w.class_of(eta.u)
        coeff = element_in_submodule(rep, self.kernel.inclusion.matrix)
        if coeff is None:
            raise ValueError("transformation does not lie in the kernel module")
        return self.module.element(coeff)

    def _solve_v(self, u: FpMorphism) -> FpMorphism | None:
        ring = u.source.ring
        dg, df = self.target.d, self.source.d
        vf, vg = df.target, dg.target
        rhs = u.matrix.mul(df.matrix)
        sys_ = MatrixSystem(ring)
        sys_.unknown("v", vg.ngens, vf.ngens)
        sys_.unknown("A", vg.relations.rows, vf.relations.rows)
        sys_.unknown("B", dg.source.ngens, vf.relations.rows)
        sys_.require([("v", vg.relations, None), ("A", None, vf.relations.neg())],
                     IntMatrix.zeros(ring, vg.relations.rows, vf.ngens))
        sys_.require([("v", dg.matrix, None), ("B", None, vf.relations)], rhs)
        sol = sys_.solve()
        if sol is None:
            return None
        return FpMorphism(vg, vf, sol["v"], check=False)


def hom_functor(source: CoherentFunctor, target: CoherentFunctor) -> HomFunctorData:
    return HomFunctorData(source, target)


# -- kernels and cokernels of transformations ----------------------------------


@dataclass
class NatKernelData:
    functor: CoherentFunctor
    inclusion: NatTransformation


@dataclass
class NatCokernelData:
    functor: CoherentFunctor
    projection: NatTransformation


def nat_kernel(eta: NatTransformation) -> NatKernelData:
    """Pointwise kernel of a transformation, again a functor of the same shape."""
    f, g = eta.source, eta.target
    ring = f.w.ring
    # first gluing: q = (W_F + V_G) / (u, -d_G)(W_G)
    sum1 = direct_sum([f.w, g.v])
    glue1 = eta.u.matrix.hstack(g.d.matrix.neg())
    q = FpModule(ring, sum1.module.ngens, glue1.vstack(sum1.module.relations))
    j = FpMorphism(f.w, q, sum1.injections[0].matrix, check=False)
    # second: q' = (q + V_F) / (j, -d_F)(W_F)
    sum2 = direct_sum([q, f.v])
    glue2 = j.matrix.hstack(f.d.matrix.neg())
    q2 = FpModule(ring, sum2.module.ngens, glue2.vstack(sum2.module.relations))
    dk = FpMorphism(q, q2, sum2.injections[0].matrix, check=False)
    kernel = CoherentFunctor(dk)
    incl_u = j
    incl_v = FpMorphism(f.v, q2, sum2.injections[1].matrix, check=False)
    incl = NatTransformation(kernel, f, incl_u, incl_v)
    return NatKernelData(kernel, incl)


def nat_cokernel(eta: NatTransformation) -> NatCokernelData:
    """Pointwise cokernel of a transformation."""
    f, g = eta.source, eta.target
    ring = f.w.ring
    summed = direct_sum([g.v, f.w])
    dc = FpMorphism(g.w, summed.module, g.d.matrix.hstack(eta.u.matrix), check=False)
    coker = CoherentFunctor(dc)
    proj_u = FpMorphism.identity(g.w)
    proj_v = summed.projections[0]
    proj = NatTransformation(g, coker, proj_u, proj_v)
    return NatCokernelData(coker, proj)


# -- duality --------------------------------------------------------------------


def dual_evaluate(functor: CoherentFunctor, probe: FpModule) -> KernelData:
    """Value of the dual functor: kernel of the probe tensored with d."""
    left = probe
    src = tensor_module(left, functor.w)
    tgt = tensor_module(left, functor.v)
    f = tensor_morphisms(FpMorphism.identity(left), functor.d, src, tgt)
    return morphism_kernel(f)


def dual_presentation(functor: CoherentFunctor) -> CoherentFunctor | None:
    """The dual as a functor again, when the input is a tensor or hom type."""
    if functor.kind == "qc" and functor.origin is not None:
        return scheme_functor(functor.origin)
    if functor.kind == "scheme" and functor.origin is not None:
        return qc_functor(functor.origin)
    return None


# -- tensor elements as transformations -----------------------------------------


def tensor_to_nat(left: FpModule, right: FpModule, t: ModuleElement) -> NatTransformation:
    """Transformation Hom(left, -) -> right (x) - encoding a tensor element.

    The element lives on the generator grid of left (x) right; its reshaped
    and transposed coordinate matrix is the u part of the square.
    """
    grid = tensor_module(left, right)
    if t.module != grid.module:
        raise ValueError("element does not live on the expected tensor grid")
    src = scheme_functor(left)
    tgt = qc_functor(right)
    mat = IntMatrix.from_flat(left.ring, left.ngens, right.ngens, t.coords)
    u = FpMorphism(tgt.w, src.w, mat.transpose(), check=False)
    v = FpMorphism(tgt.v, src.v, IntMatrix.zeros(left.ring, tgt.v.ngens, 0), check=False)
    return NatTransformation(src, tgt, u, v, check=False)


def nat_to_tensor(eta: NatTransformation) -> ModuleElement:
    """Inverse of tensor_to_nat on transformations Hom(M, -) -> M' (x) -."""
    if eta.source.kind != "scheme" or eta.target.kind != "qc":
        raise ValueError("expected a transformation from a hom type to a tensor type")
    left = eta.source.origin
    right = eta.target.origin
    grid = tensor_module(left, right)
    return grid.module.element(eta.u.matrix.transpose().flatten())


@dataclass
class ImageFactorization:
    submodule: FpModule
    inclusion: FpMorphism
    factor: NatTransformation
    through: NatTransformation


def fg_image_factorization(eta: NatTransformation) -> ImageFactorization:
    """Factor Hom(M, -) -> M' (x) - through the span of its element's slices."""
    left = eta.source.origin
    right = eta.target.origin
    t = nat_to_tensor(eta)
    mat = IntMatrix.from_flat(left.ring, left.ngens, right.ngens, t.coords)
    slices = [right.element(mat.row(i)) for i in range(left.ngens)]
    nonzero = [(i, el) for i, el in enumerate(slices) if not el.is_zero()]
    sub = submodule_generated(right, [el for _, el in nonzero])
    grid = tensor_module(left, sub.module)
    coords = [0] * (left.ngens * sub.module.ngens)
    for k, (i, _) in enumerate(nonzero):
        coords[i * sub.module.ngens + k] = 1
    t_small = grid.module.element(coords)
    factor = tensor_to_nat(left, sub.module, t_small)
    through = qc_map(sub.inclusion)
    composed = factor.compose(through)
    assert composed.eq(eta), "factorization does not recompose"
    return ImageFactorization(sub.module, sub.inclusion, factor, through)


# -- factoring through kernels ---------------------------------------------------


@dataclass
class KernelFactorization:
    exists: bool
    kernel: FpModule | None = None
    factor: NatTransformation | None = None
    restriction: NatTransformation | None = None
    diagnostic: "ExactnessProfile | None" = None


def kernel_factorization(eta: NatTransformation, m: FpMorphism) -> KernelFactorization:
    """Factor a transformation out of Hom(N, -) through the kernel of m: N -> S.

    Preconditions: eta starts at the hom functor of N and kills the class of m
    at the probe S.  When the square cannot be rewritten through ker(m), the
    result carries an exactness reading of the target as a diagnostic.
    """
    if eta.source.kind != "scheme":
        raise ValueError("expected a transformation out of a hom type")
    n = eta.source.origin
    if m.source != n:
        raise ValueError("map does not start at the hom type's module")
    target = eta.target
    ev = target.evaluate(m.target)
    cls = ev.class_of(eta.u.compose(m))
    if not cls.is_zero():
        raise ValueError("transformation does not kill the given class")
    ker = morphism_kernel(m)
    ring = n.ring
    wf, vf = target.w, target.v
    sys_ = MatrixSystem(ring)
    sys_.unknown("G", wf.ngens, ker.module.ngens)
    sys_.unknown("w", vf.ngens, n.ngens)
    sys_.unknown("A", wf.relations.rows, ker.module.relations.rows)
    sys_.unknown("B", wf.ngens, n.relations.rows)
    sys_.unknown("C", vf.relations.rows, n.relations.rows)
    sys_.require([("G", wf.relations, None), ("A", None, ker.module.relations.neg())],
                 IntMatrix.zeros(ring, wf.relations.rows, ker.module.ngens))
    sys_.require([("w", vf.relations, None), ("C", None, n.relations.neg())],
                 IntMatrix.zeros(ring, vf.relations.rows, n.ngens))
    sys_.require([("G", None, ker.inclusion.matrix), ("w", target.d.matrix, None),
                  ("B", None, n.relations)], eta.u.matrix)
    sol = sys_.solve()
    if sol is None:
        image = morphism_image(m)
        ses = ShortExactSequence(ker.inclusion, image.projection)
        return KernelFactorization(False, ker.module,
                                   diagnostic=exactness_profile(target, [ses]))
    u_factor = FpMorphism(wf, ker.module, sol["G"])
    factor = NatTransformation(scheme_functor(ker.module), target, u_factor,
                               FpMorphism.zero(vf, zero_module(ring)))
    restriction = scheme_map(ker.inclusion)
    return KernelFactorization(True, ker.module, factor, restriction)


# -- exactness bookkeeping --------------------------------------------------------


class ShortExactSequence:
    """A mono followed by an epi with image equal to kernel, checked on creation."""

    def __init__(self, i: FpMorphism, p: FpMorphism) -> None:
        if i.target != p.source:
            raise ValueError("maps do not chain")
        if not i.is_injective():
            raise ValueError("first map is not injective")
        if not p.is_surjective():
            raise ValueError("second map is not surjective")
        if not i.compose(p).is_zero_map():
            raise ValueError("composite is not zero")
        ker = morphism_kernel(p)
        # image of i and kernel of p agree as submodules of the middle term
        for k in range(ker.module.ngens):
            el = ker.inclusion.apply(ker.module.gen(k))
            if element_in_submodule(el, i.matrix) is None:
                raise ValueError("kernel of the surjection leaks past the image")
        self.i = i
        self.p = p

    @property
    def left(self) -> FpModule:
        return self.i.source

    @property
    def middle(self) -> FpModule:
        return self.i.target

    @property
    def right(self) -> FpModule:
        return self.p.target


@dataclass
class SequenceReading:
    mono: bool
    mid: bool
    epi: bool


@dataclass
class ExactnessProfile:
    readings: list[SequenceReading]

    @property
    def left_exact(self) -> bool:
        return all(r.mono and r.mid for r in self.readings)

    @property
    def right_exact(self) -> bool:
        return all(r.epi and r.mid for r in self.readings)

    @property
    def exact(self) -> bool:
        return self.left_exact and self.right_exact


def exactness_profile(functor: CoherentFunctor, sequences) -> ExactnessProfile:
    """How the functor treats each given short exact sequence."""
    readings = []
    for ses in sequences:
        fi = functor.map_on(ses.i)
        fp = functor.map_on(ses.p)
        assert fi.compose(fp).is_zero_map()
        mono = fi.is_injective()
        epi = fp.is_surjective()
        ker = morphism_kernel(fp)
        rows = []
        ok = True
        for g in range(fi.source.ngens):
            el = fi.apply(fi.source.gen(g))
            coeff = element_in_submodule(el, ker.inclusion.matrix)
            if coeff is None:
                ok = False
                break
            rows.append(coeff)
        if not ok:
            mid = False
        else:
            mat = IntMatrix(fi.source.ring, fi.source.ngens, ker.module.ngens, rows)
            through = FpMorphism(fi.source, ker.module, mat, check=False)
            mid = through.is_surjective()
        readings.append(SequenceReading(mono, mid, epi))
    return ExactnessProfile(readings)


# -- scheme envelopes -------------------------------------------------------------


@dataclass
class EnvelopeData:
    module: FpModule
    functor: CoherentFunctor
    canonical: NatTransformation


def sch_envelope(functor: CoherentFunctor) -> EnvelopeData:
    """Best approximation of the functor by a mapping-out functor.

    The kernel of d receives restriction of every value class, and the
    canonical transformation is restriction along that kernel's inclusion.
    """
    ker = morphism_kernel(functor.d)
    env = scheme_functor(ker.module)
    u = ker.inclusion
    v = FpMorphism.zero(env.v, functor.v)
    canonical = NatTransformation(functor, env, u, v)
    return EnvelopeData(ker.module, env, canonical)


@dataclass
class ProbeWitness:
    probe: FpModule
    element: ModuleElement


def sml_probe_check(functor: CoherentFunctor, probes) -> tuple[bool, ProbeWitness | None]:
    """Whether the canonical map to the envelope is injective at each probe."""
    env = sch_envelope(functor)
    for probe in probes:
        at = env.canonical.at(probe)
        ker = morphism_kernel(at)
        if not ker.module.is_zero():
            for k in range(ker.module.ngens):
                el = ker.inclusion.apply(ker.module.gen(k))
                if not el.is_zero():
                    return False, ProbeWitness(probe, el)
    return True, None
