"""Exact computation with finitely presented modules over Z and Z/n.

Layers: integer matrix normal forms with transform certificates, module
and morphism arithmetic (hom, tensor, duals, kernels, purity, splittings),
functors presented by a single map with natural transformations between
them, verdict-producing predicates with replayable witnesses, and a
manifest-driven command line reporter.
"""

from .fpmod import (FpModule, FpMorphism, ModuleElement, cyclic_module, direct_sum,
                    dual_module, element_in_submodule, element_trace_ideal, free_module,
                    hom_module, is_projective, is_pure_submodule, modules_isomorphic,
                    morphism_cokernel, morphism_image, morphism_kernel, split_retraction,
                    split_section, submodule_generated, tensor_module, tensor_morphisms,
                    zero_module)
from .functors import (CoherentFunctor, NatTransformation, ShortExactSequence, dual_evaluate,
                       dual_presentation, exactness_profile, fg_image_factorization,
                       hom_functor, kernel_factorization, nat_cokernel, nat_kernel,
                       nat_to_tensor, qc_functor, qc_map, scheme_functor, scheme_map,
                       sch_envelope, sml_probe_check, tensor_to_nat)
from .linalg import MatrixSystem, invert, kernel_basis, smith_normal_form, solve_left, solve_linear
from .manifest import ManifestError, ManifestParseError, parse_manifest
from .matrix import IntMatrix
from .mlab import (PreconditionFailure, SplitPair, Telescope, Verdict, chain_scheme_detection,
                   default_probes, finite_free_summands, is_trace_module, kaplansky_filtration,
                   locally_projective_verdict, locally_split_retraction, projective_factorization,
                   purity_verdict, split_verdict, strict_ml_verdict, telescope_colim_eval,
                   telescope_split, ttt_cokernel_check)
from .report import canonical_json, render_text, replay_report, replay_witness, run_manifest
from .ring import RingSpec, ZZ, Zmod

__version__ = "0.1.0"

__all__ = [
    "CoherentFunctor", "FpModule", "FpMorphism", "IntMatrix", "ManifestError",
    "ManifestParseError", "MatrixSystem", "ModuleElement", "NatTransformation",
    "PreconditionFailure", "RingSpec", "ShortExactSequence", "SplitPair", "Telescope",
    "Verdict", "ZZ", "Zmod", "canonical_json", "chain_scheme_detection", "cyclic_module",
    "default_probes", "direct_sum", "dual_evaluate", "dual_module", "dual_presentation",
    "element_in_submodule", "element_trace_ideal", "exactness_profile",
    "fg_image_factorization", "finite_free_summands", "free_module", "hom_functor",
    "hom_module", "invert", "is_projective", "is_pure_submodule", "is_trace_module",
    "kaplansky_filtration", "kernel_basis", "kernel_factorization",
    "locally_projective_verdict", "locally_split_retraction", "modules_isomorphic",
    "morphism_cokernel", "morphism_image", "morphism_kernel", "nat_cokernel", "nat_kernel",
    "nat_to_tensor", "parse_manifest", "projective_factorization", "purity_verdict",
    "qc_functor", "qc_map", "render_text", "replay_report", "replay_witness",
    "run_manifest", "sch_envelope", "scheme_functor", "scheme_map", "smith_normal_form",
    "sml_probe_check", "solve_left", "solve_linear", "split_retraction", "split_section",
    "split_verdict", "strict_ml_verdict", "submodule_generated", "telescope_colim_eval",
    "telescope_split", "tensor_module", "tensor_morphisms", "tensor_to_nat",
    "ttt_cokernel_check", "zero_module"]
