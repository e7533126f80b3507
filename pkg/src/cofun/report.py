"""Turn a parsed manifest into a deterministic report, and replay witnesses.

The JSON form is canonical: keys sorted, no whitespace, one trailing
newline.  Two runs over the same manifest produce identical bytes.

Every witness carries enough data to re-check the claim it certifies.
`replay_witness` rebuilds the stated objects from that data alone and
re-verifies the defining equations; `replay_report` does so for a whole
report and lists any entry that fails.
"""

from __future__ import annotations

import json

from .fpmod import (FpModule, FpMorphism, direct_sum, element_in_submodule, free_module,
                    is_pure_submodule, morphism_cokernel, morphism_image, morphism_kernel,
                    split_retraction, submodule_generated, tensor_module, tensor_morphisms)
from .linalg import MatrixSystem, solve_left
from .manifest import Manifest
from .matrix import IntMatrix
from .mlab import (Telescope, Verdict, chain_scheme_detection, default_probes,
                   finite_free_summands, is_trace_module, locally_projective_verdict,
                   probe_names, purity_verdict, split_verdict, strict_ml_verdict,
                   telescope_colim_eval, telescope_split, ttt_cokernel_check)
from .ring import RingSpec, ZZ, Zmod

SCHEMA = "cofun-report/1"


def ring_from_name(name: str) -> RingSpec:
    if name == "Z":
        return ZZ
    if name.startswith("Z/"):
        return Zmod(int(name[2:]))
    raise ValueError(f"unknown ring {name!r}")


def module_from_data(data: dict) -> FpModule:
    ring = ring_from_name(data["ring"])
    return FpModule(ring, data["gens"], data["relations"])


def morphism_from_data(data: dict, check: bool = True) -> FpMorphism:
    src = module_from_data(data["source"])
    tgt = module_from_data(data["target"])
    return FpMorphism(src, tgt, data["matrix"], check=check)


# -- running ------------------------------------------------------------------


def _module_entry(m: FpModule) -> dict:
    return {"kind": "module", "gens": m.ngens, "relations": m.relations.to_lists(),
            "invariants": m.summand_names()}


def _module_payload(m: FpModule) -> dict:
    return {"ring": str(m.ring), "gens": m.ngens, "relations": m.relations.to_lists()}


def _morphism_payload(f: FpMorphism) -> dict:
    return {"source": _module_payload(f.source), "target": _module_payload(f.target),
            "matrix": f.matrix.to_lists()}


def _presentation_result(kind: str, f: FpMorphism, data) -> dict:
    structure = data.inclusion if kind != "cokernel_presentation" else data.projection
    return {"kind": kind, "map": _morphism_payload(f),
            "module": _module_payload(data.module),
            "structure_map": structure.matrix.to_lists(),
            "invariants": data.module.summand_names()}


def _run_module(name: str, module: FpModule, pred: str, probes) -> Verdict:
    if pred == "trace":
        return is_trace_module(module)
    if pred == "ttt":
        return ttt_cokernel_check(module)
    if pred == "strict_ml":
        return strict_ml_verdict(module, probes)
    if pred == "projective":
        return locally_projective_verdict(module)
    if pred == "free_summands":
        return finite_free_summands(module)
    raise ValueError(f"unknown module predicate {pred!r}")


def _run_morphism(name: str, f: FpMorphism, pred: str) -> Verdict:
    if pred == "split":
        return split_verdict(f)
    if pred == "pure":
        return purity_verdict(f)
    if pred == "kernel":
        data = morphism_kernel(f)
        return Verdict("kernel", None, _presentation_result("kernel_presentation", f, data))
    if pred == "cokernel":
        data = morphism_cokernel(f)
        return Verdict("cokernel", None,
                       _presentation_result("cokernel_presentation", f, data))
    if pred == "image":
        data = morphism_image(f)
        return Verdict("image", None, _presentation_result("image_presentation", f, data))
    raise ValueError(f"unknown morphism predicate {pred!r}")


def _run_telescope(name: str, tele: Telescope, pred: str, bound, probes) -> Verdict:
    if pred == "split":
        return telescope_split(tele, bound)
    if pred == "chain_detection":
        return chain_scheme_detection(tele, probes, bound)
    if pred == "colim":
        if probes is None:
            probes = default_probes(tele.ring, tele.modules)
        per_probe = []
        settled = True
        for probe in probes:
            res = telescope_colim_eval(tele, probe, bound)
            settled = settled and res.stabilized
            per_probe.append({"probe": _module_payload(probe),
                              "value": _module_payload(res.value),
                              "value_invariants": res.value.summand_names(),
                              "stable": _module_payload(res.stable_value),
                              "stable_invariants": res.stable_value.summand_names(),
                              "stabilized": res.stabilized})
        k = tele.clamp(bound)
        witness = {"kind": "telescope_values",
                   "blocks": [_module_payload(m) for m in tele.modules[: k + 1]],
                   "maps": [f.matrix.to_lists() for f in tele.maps[:k]],
                   "per_probe": per_probe}
        return Verdict("colim", settled, witness, bound=k, probes=probe_names(probes))
    raise ValueError(f"unknown telescope predicate {pred!r}")


def run_manifest(manifest: Manifest) -> dict:
    """Execute every analysis and assemble the canonical report dictionary."""
    probe_list = None
    if manifest.probe_names is not None:
        probe_list = [manifest.objects[n][1] for n in manifest.probe_names]
    objects = {}
    module_names = {}
    for name, (kind, obj) in manifest.objects.items():
        if kind == "module":
            objects[name] = _module_entry(obj)
            module_names[id(obj)] = name
    for name, (kind, obj) in manifest.objects.items():
        if kind == "morphism":
            objects[name] = {"kind": "morphism",
                             "source": module_names.get(id(obj.source), "?"),
                             "target": module_names.get(id(obj.target), "?"),
                             "matrix": obj.matrix.to_lists()}
        elif kind == "telescope":
            objects[name] = {"kind": "telescope",
                             "stages": [_module_payload(m) for m in obj.modules],
                             "maps": [f.matrix.to_lists() for f in obj.maps]}
    analyses = []
    for analysis in manifest.analyses:
        kind, obj = manifest.objects[analysis.target]
        for pred in analysis.predicates:
            probes = probe_list
            if kind == "module":
                if pred == "strict_ml" and probes is None:
                    probes = default_probes(obj.ring, [obj])
                verdict = _run_module(analysis.target, obj, pred, probes)
            elif kind == "morphism":
                verdict = _run_morphism(analysis.target, obj, pred)
            else:
                verdict = _run_telescope(analysis.target, obj, pred,
                                         analysis.bound, probes)
            analyses.append({"target": analysis.target, "kind": kind,
                             "predicate": pred, "value": verdict.value,
                             "witness": verdict.witness, "bound": verdict.bound,
                             "probes": verdict.probes or []})
    return {"schema": SCHEMA, "ring": str(manifest.ring), "objects": objects,
            "probes": manifest.probe_names, "analyses": analyses}


def canonical_json(report: dict) -> bytes:
    return (json.dumps(report, sort_keys=True, separators=(",", ":")) + "\n").encode()


def render_text(report: dict) -> str:
    lines = [f"ring {report['ring']}"]
    for entry in report["analyses"]:
        head = f"{entry['predicate']}({entry['target']})"
        if entry["value"] is None and entry["witness"] and \
                entry["witness"]["kind"].endswith("_presentation"):
            desc = " + ".join(entry["witness"]["invariants"]) or "0"
            lines.append(f"{head} -> {desc}")
        elif entry["value"] is None:
            lines.append(f"{head} = undecided")
        else:
            lines.append(f"{head} = {'true' if entry['value'] else 'false'}")
    return "\n".join(lines) + "\n"


# -- replay ---------------------------------------------------------------------


def _replay_retraction(w: dict) -> bool:
    f = morphism_from_data(w["map"])
    r = FpMorphism(f.target, f.source, w["matrix"])
    return f.compose(r).eq(FpMorphism.identity(f.source))


def _replay_relative_retraction(w: dict) -> bool:
    i = morphism_from_data(w["map"])
    j = morphism_from_data(w["test"])
    r = FpMorphism(i.target, i.source, w["matrix"])
    return j.compose(i).compose(r).eq(j)


def _replay_no_retraction(w: dict) -> bool:
    f = morphism_from_data(w["map"])
    if "test" not in w:
        return split_retraction(f) is None
    j = morphism_from_data(w["test"])
    ring = f.source.ring
    sub, amb, test = f.source, f.target, j.source
    sys_ = MatrixSystem(ring)
    sys_.unknown("R", amb.ngens, sub.ngens)
    sys_.unknown("Y", amb.relations.rows, sub.relations.rows)
    sys_.unknown("B", test.ngens, sub.relations.rows)
    sys_.require([("R", amb.relations, None), ("Y", None, sub.relations.neg())],
                 IntMatrix.zeros(ring, amb.relations.rows, sub.ngens))
    sys_.require([("R", j.matrix.mul(f.matrix), None), ("B", None, sub.relations)],
                 j.matrix)
    return sys_.solve() is None


def _replay_section(w: dict) -> bool:
    module = module_from_data(w["module"])
    free = free_module(module.ring, module.ngens)
    cover = FpMorphism(free, module, IntMatrix.identity(module.ring, module.ngens))
    s = FpMorphism(module, free, w["matrix"])
    return s.compose(cover).eq(FpMorphism.identity(module))


def _replay_no_section(w: dict) -> bool:
    module = module_from_data(w["module"])
    return not locally_projective_verdict(module).value


def _replay_trace_gap(w: dict) -> bool:
    from .mlab import _scaled_membership
    module = module_from_data(w["module"])
    el = module.element(w["element"])
    return not el.is_zero() and _scaled_membership(el, w["trace"]) is None


def _replay_trace_memberships(w: dict) -> bool:
    module = module_from_data(w["module"])
    ring = module.ring
    for entry in w["memberships"]:
        lhs = module.element(entry["element"])
        scaled = [ring.normalize(entry["trace"] * c) for c in entry["coeffs"]]
        rel_part = IntMatrix(ring, 1, len(entry["relation_coeffs"]),
                             [entry["relation_coeffs"]]).mul(module.relations) \
            if module.relations.rows else None
        total = list(scaled)
        if rel_part is not None:
            total = [ring.normalize(a + b) for a, b in zip(total, rel_part.row(0))]
        if tuple(ring.normalize(c) for c in lhs.coords) != tuple(total):
            return False
    return True


def _replay_tensor_factorizations(w: dict) -> bool:
    module = module_from_data(w["module"])
    ring = module.ring
    r1 = free_module(ring, 1)
    for entry in w["results"]:
        el = module.element(entry["element"])
        ideal_sub = submodule_generated(r1, [r1.element([entry["trace"]])])
        tens_incl = tensor_morphisms(FpMorphism.identity(module), ideal_sub.inclusion)
        grid = tensor_module(module, r1)
        coeffs = entry["tensor_coeffs"]
        got = IntMatrix(ring, 1, len(coeffs), [coeffs]).mul(tens_incl.matrix)
        diff = [ring.normalize(a - b) for a, b in zip(got.row(0), el.coords)]
        if solve_left(grid.module.relations, diff) is None and any(diff):
            return False
    return True


def _replay_tensor_kernel(w: dict) -> bool:
    f = morphism_from_data(w["map"])
    res = is_pure_submodule(f)
    return (not res.pure) and res.failing_factor == w["factor"]


def _replay_not_injective(w: dict) -> bool:
    f = morphism_from_data(w["map"])
    el = f.source.element(w["element"])
    return not el.is_zero() and f.apply(el).is_zero()


def _replay_missed_generator(w: dict) -> bool:
    module = module_from_data(w["module"])
    verdict = finite_free_summands(module)
    return verdict.value is False


def _replay_free_chain(w: dict) -> bool:
    module = module_from_data(w["module"])
    ring = module.ring
    for stage in w["stages"]:
        b = IntMatrix(ring, stage["rank"], module.ngens, stage["basis"])
        r = IntMatrix(ring, module.ngens, stage["rank"], stage["retraction"])
        if b.mul(r).entries != IntMatrix.identity(ring, stage["rank"]).entries:
            return False
    if not w["stages"]:
        full = IntMatrix(ring, 0, module.ngens, [])
    else:
        last = w["stages"][-1]
        full = IntMatrix(ring, last["rank"], module.ngens, last["basis"])
    for idx in range(module.ngens):
        coords = [1 if i == idx else 0 for i in range(module.ngens)]
        if solve_left(full.vstack(module.relations), coords) is None:
            return False
    return True


def _replay_telescope_split(w: dict) -> bool:
    mods = [module_from_data(d) for d in w["blocks"]]
    ring = mods[0].ring
    total = sum(m.ngens for m in mods)
    shear = IntMatrix(ring, total, total, w["shear"])
    unshear = IntMatrix(ring, total, total, w["unshear"])
    ident = IntMatrix.identity(ring, total)
    return shear.mul(unshear).entries == ident.entries and \
        unshear.mul(shear).entries == ident.entries


def _replay_telescope_values(w: dict) -> bool:
    mods = [module_from_data(d) for d in w["blocks"]]
    maps = [FpMorphism(mods[i], mods[i + 1], w["maps"][i]) for i in range(len(w["maps"]))]
    tele = Telescope(mods, maps)
    for entry in w["per_probe"]:
        probe = module_from_data(entry["probe"])
        res = telescope_colim_eval(tele, probe)
        if res.stabilized != entry["stabilized"]:
            return False
        if res.value.summand_names() != entry["value_invariants"]:
            return False
        if res.stable_value.summand_names() != entry["stable_invariants"]:
            return False
    return True


def _replay_image_chain_moves(w: dict) -> bool:
    ambient = module_from_data(w["ambient"])
    el = ambient.element(w["element"])
    prev = IntMatrix(ambient.ring, len(w["horizon_prev"]), ambient.ngens, w["horizon_prev"])
    last = IntMatrix(ambient.ring, len(w["horizon_last"]), ambient.ngens, w["horizon_last"])
    return element_in_submodule(el, prev) is not None and \
        element_in_submodule(el, last) is None


def _replay_comparison_kernel(w: dict) -> bool:
    source = module_from_data(w["value_module"])
    target = module_from_data(w["target_module"])
    f = FpMorphism(source, target, w["matrix"])
    el = source.element(w["element"])
    return (not el.is_zero()) and f.apply(el).is_zero()


def _replay_comparison_cokernel(w: dict) -> bool:
    target = module_from_data(w["target_module"])
    mat = IntMatrix(target.ring, len(w["matrix"]), target.ngens, w["matrix"]) \
        if w["matrix"] else IntMatrix(target.ring, 0, target.ngens, [])
    coker = FpModule(target.ring, target.ngens, mat.vstack(target.relations))
    return not coker.is_zero()


def _replay_chain_scheme(w: dict) -> bool:
    mods = [module_from_data(d) for d in w["stages"]]
    maps = [FpMorphism(mods[i], mods[i + 1], w["maps"][i]) for i in range(len(w["maps"]))]
    probes = [module_from_data(d) for d in w["probe_modules"]]
    verdict = chain_scheme_detection(Telescope(mods, maps), probes)
    return verdict.value is True


def _replay_filtration(w: dict) -> bool:
    blocks = [module_from_data(d) for d in w["blocks"]]
    prev: set[int] = set()
    for stage in w["stages"]:
        subset = stage["blocks"]
        if not set(prev) <= set(subset):
            return False
        prev = set(subset)
        part = direct_sum([blocks[k] for k in subset])
        sub = part.module
        ef = FpMorphism(sub, sub, stage["first_idempotent"])
        es = FpMorphism(sub, sub, stage["second_idempotent"])
        if not ef.add(es).eq(FpMorphism.identity(sub)):
            return False
        if not ef.compose(ef).eq(ef) or not ef.compose(es).is_zero_map():
            return False
    return prev == set(range(len(blocks)))


def _replay_embedding(w: dict) -> bool:
    module = module_from_data(w["module"])
    cols = len(w["matrix"][0]) if w["matrix"] else 0
    target = free_module(module.ring, cols)
    f = FpMorphism(module, target, w["matrix"])
    return f.is_injective()


def _replay_presentation(w: dict) -> bool:
    f = morphism_from_data(w["map"])
    recompute = {"kernel_presentation": morphism_kernel,
                 "cokernel_presentation": morphism_cokernel,
                 "image_presentation": morphism_image}[w["kind"]]
    data = recompute(f)
    structure = data.inclusion if w["kind"] != "cokernel_presentation" else data.projection
    return data.module.summand_names() == w["invariants"] and \
        _module_payload(data.module) == w["module"] and \
        structure.matrix.to_lists() == w["structure_map"]


_REPLAYERS = {
    "retraction": _replay_retraction,
    "relative_retraction": _replay_relative_retraction,
    "no_retraction": _replay_no_retraction,
    "section": _replay_section,
    "no_section": _replay_no_section,
    "trace_gap": _replay_trace_gap,
    "trace_memberships": _replay_trace_memberships,
    "tensor_factorizations": _replay_tensor_factorizations,
    "tensor_kernel": _replay_tensor_kernel,
    "not_injective": _replay_not_injective,
    "missed_generator": _replay_missed_generator,
    "free_chain": _replay_free_chain,
    "unsupported_ring": lambda w: True,
    "telescope_split": _replay_telescope_split,
    "telescope_values": _replay_telescope_values,
    "image_chain_moves": _replay_image_chain_moves,
    "dual_horizon_moves": _replay_image_chain_moves,
    "comparison_kernel": _replay_comparison_kernel,
    "comparison_cokernel": _replay_comparison_cokernel,
    "chain_scheme": _replay_chain_scheme,
    "filtration": _replay_filtration,
    "embedding": _replay_embedding,
    "kernel_presentation": _replay_presentation,
    "cokernel_presentation": _replay_presentation,
    "image_presentation": _replay_presentation,
}


def replay_witness(witness: dict) -> bool:
    """Re-verify one witness from its own data; unknown kinds fail."""
    replayer = _REPLAYERS.get(witness.get("kind"))
    if replayer is None:
        return False
    try:
        return replayer(witness)
    except (ValueError, KeyError, IndexError, AssertionError):
        return False


def replay_report(report: dict) -> list[dict]:
    """Replay every witness in a report; returns the entries that fail."""
    failures = []
    for entry in report.get("analyses", []):
        witness = entry.get("witness")
        if witness is None:
            continue
        if not replay_witness(witness):
            failures.append(entry)
    return failures
