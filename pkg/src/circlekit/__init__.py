"""circlekit: numerics for circle diffeomorphisms, truncated lowest-weight
modules of the circle vector-field algebra, and the U(1)-current Fock space.

Layers (bottom-up): `fields` and `circle` carry the diffeomorphism calculus,
`jets` the finite-order jet calculus at −1, `fourier` the norms and
oscillatory integrals, `virasoro` the truncated modules with energy bounds,
`current` the one-particle/Fock constructions, `solitons` the nonsmooth
elements with their complete invariant r, and `specs`/`cli` the JSON surface.
"""

__version__ = "0.1.0"

from .circle import (CircleMap, ComposedMap, FlowMap, IdentityMap,
                     MobiusElement, MobiusMap, NumericInverseMap,
                     PiecewiseMap, RotationMap, b_n_membership, cayley,
                     cayley_inv, compose, dilation, exp_field, invert, nu_pi,
                     pushforward, psi_t, rotation, schwarzian_theta,
                     schwarzian_z, translation)
from .current import (OneParticleVector, RealLinearOp, TruncatedFock,
                      a_operator, complex_structure, hs_norm_sweep,
                      hs_series_bound, inner_product, second_quantize,
                      seminorm_sq, sweep_verdict, symplectic_form, v_gamma,
                      weyl_matrix)
from .fields import (CayleyProfileField, ConstantField, TrigPolynomial,
                     VectorField, dilate_field, half_cutoffs,
                     translation_family, translation_generator)
from .fourier import (DecayReport, FourierSeries, ds_membership,
                      fourier_coeffs, h_s_norm, lambda_decay_report,
                      lambda_matrix, lambda_mn, norm_3_2, series_to_field)
from .jets import (JetAtMinusOne, JetBumpField, decompose_psone, invert_jets,
                   jet_of_exp)
from .solitons import (NonsmoothDiffeo, SolitonDescriptor, TranslationCover,
                       conjugated_map, dilation_pair, equivalent, is_proper,
                       localized_extension, make_soliton, one_sided_data,
                       psi_like, square_root_soliton, translation_cover)
from .virasoro import (ModuleParams, StressMatrix, VermaLevelSpace, apply_ln,
                       beta_cocycle, commutator_check, gf_cocycle,
                       gram_matrix, qei_bound, qei_check, stress_matrix,
                       transformed_generator, unitarity_classify, vir_cocycle)
