"""Critical disks for curvature energies with elastic boundaries.

Axisymmetric shape equations, shooting for free-boundary disks,
Euler-Lagrange residual evaluation and closed-form critical families.
"""

__version__ = "0.1.0"

from .axisym_solver import (  # noqa: E402
    ShootingResult,
    StopSpec,
    axis_series,
    first_integral_residual,
    helfrich_first_integral,
    integrate_profile,
    ode_rhs,
    shoot_geodesic,
    shoot_nongeodesic,
    sweep_phi0,
)
from .curve_geometry import (  # noqa: E402
    Curve,
    closure_integral,
    frenet_evolve,
    planar_elastica_residual,
    rod_criticality,
    solve_circle_curvature,
)
from .el_residuals import (  # noqa: E402
    BoundaryPoint,
    CriticalityReport,
    boundary_residuals,
    cap_criticality,
    cmc_classify,
    evaluate_criticality,
    flux_value,
    interior_residual,
    rescaling_defect,
)
from .energy_models import (  # noqa: E402
    EnergyParams,
    ExpSquare,
    LogSquare,
    Polynomial,
    PWillmore,
    Quadratic,
    TotalCurvature,
    eval_curve_density,
    eval_density,
    total_energy,
)
from .profile import ProfileState, ProfileTrajectory  # noqa: E402
from .special_solutions import (  # noqa: E402
    WeingartenSpec,
    build_cap,
    p0_minimal_boundary_conditions,
    p1_axisym_conditions,
    weingarten_kn,
    weingarten_profile,
)
from .surface_geometry import (  # noqa: E402
    gauss_bonnet_defect,
    mesh_to_obj,
    parallel_data,
    profile_curvatures,
    profile_to_csv,
    revolve,
    sphere_cap_profile,
)
