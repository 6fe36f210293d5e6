"""Time-dependent Hamilton-Jacobi equations on compact networks.

A numpy library for solving u_t + H_gamma(s, u') = 0 on the arcs of a
network, coupled through continuity and a per-vertex flux limiter, with a
monotone finite-difference arc solver, the slope-cap transform handling the
limiter, a windowed constructive network solver, and a verification suite
that turns the well-posedness theory (comparison, contraction, stability,
finite speed of propagation) into executable checks.
"""

from .arc_solver import (
    ArcField,
    BoundaryMode,
    Grid2D,
    cone_solution,
    constrained,
    free,
    glue_in_time,
    lipschitz_envelope_above,
    lipschitz_envelope_below,
    max_subsolution,
    min_merge,
    propagation_window,
    sup_convolution_t,
    subsolution_residual,
    supersolution_residual,
)
from .hamiltonians import (
    ArcHamiltonian,
    HamiltonianFamily,
    abs_hamiltonian,
    c_gamma,
    evaluate,
    family_from_edges,
    momentum_lipschitz,
    positive_shift,
    quadratic_hamiltonian,
    reverse_hamiltonian,
    sampled_hamiltonian,
    sublevel_width,
    subsolution_level,
    validate_inversion,
)
from .network import (
    Arc,
    FluxLimiter,
    Network,
    Vertex,
    build_network,
    incident_arcs,
    validate_flux_limiter,
)
from .network_solver import (
    NetworkSolution,
    Scenario,
    SolveParams,
    calibrate_epsilon,
    compute_m0,
    contraction_check,
    default_epsilon,
    plan_solve,
    restart_check,
    shift_check,
    solve,
    stability_sweep,
    validate_scenario,
    verify,
    with_resolution,
)
from .semidiscrete import (
    VertexTraceSet,
    discr_compare,
    discr_residual,
    f_gamma,
    f_x,
)
from .slope_cap import Slope, TimeSeries, apply_g, apply_g_bruteforce, contact_set

__version__ = "0.1.0"
