"""Normalized p-parabolic equation toolkit.

Exact operator evaluation on closed-form fields, the explicit barrier
families certifying boundary (ir)regularity, a monotone explicit solver
on arbitrary bounded space-time domains, and a numerical regularity
classifier around the threshold A = 4(p - 1).
"""

__version__ = "0.1.0"

from . import barriers, fields, geometry, operator, regularity, sampling, solver
from .barriers import (ExteriorBallBarrier, IrregularityBarrier, PetrovskiiBarrier,
                       TuskHouseBarrierSpec, estimate_alpha_and_beta,
                       make_exterior_ball_barrier, make_irregularity_barrier,
                       make_petrovskii_barrier, verify_barrier,
                       verify_irregularity_barrier)
from .fields import Field, Jet2, eval_jet, eval_jet_batch
from .geometry import (BoundingBox, Domain, SpacetimePoint, ball_complement, cylinder,
                       cylinder_ball, domain_from_json, domain_to_json, ellipse_chain,
                       generic, membership, parabolic_boundary_sample, parabolic_scale,
                       petrovskii, point, project_to_boundary, scale_domain, tusk,
                       tusk_complement, tusk_house, wedge_cylinder)
from .operator import (CheckReport, OperatorParams, classical_subsolution_check,
                       classical_supersolution_check, envelope_eigenvalue,
                       normalized_inf_laplacian, normalized_p_laplacian)
from .regularity import RegularityReport, classify, fit_holder, petrovskii_sweep
from .solver import (Grid, GridFunction, SolverParams, discrete_comparison, make_grid,
                     solve, step)
