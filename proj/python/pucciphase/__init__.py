"""Phase-plane analysis of radial solutions of Pucci extremal equations.

The heavy lifting lives in the compiled extension ``pucciphase._core``;
this package re-exports its public names.  Typical use:

    import pucciphase as pp

    params = pp.make_params(1.0, 2.0, "plus", N=4)
    print(pp.p_serrin(params), pp.p_pseudo(params), pp.p_sobolev(params))

    cls = pp.classify_p(9.0, params)
    crit = pp.critical_exponent(params, tol=1e-4)

    traj = pp.gamma_orbit(5.0, pp.make_params(1.0, 1.0, "plus", N=3))
    t, X, Z = traj.arrays()
"""

from ._core import (
    CatalogEntry,
    CriticalResult,
    CycleSearchResult,
    DecayConstants,
    Direction,
    EnergyValue,
    Error,
    Event,
    EventKind,
    ExponentSet,
    ExteriorCheck,
    ExteriorVerdict,
    FateKind,
    FlowOptions,
    Operator,
    OrbitFate,
    OriginClass,
    PClass,
    PLabel,
    PeriodicOrbit,
    PhasePoint,
    PoincareReturn,
    PoincareSection,
    PortraitOptions,
    ProblemParams,
    RadialClass,
    RadialSample,
    RadialSolution,
    Region,
    SPClass,
    SPLabel,
    ShootOptions,
    SingularCatalog,
    StationaryPoint,
    TangentDirection,
    Trajectory,
    TrajectorySample,
    Velocity,
    alpha_of,
    classify_p,
    classify_stationary,
    critical_exponent,
    decay_constants,
    detect_fate,
    dulac_line_integral,
    dulac_phi,
    eigenvalues_of,
    energy,
    exponents,
    exterior_nonexistence_check,
    find_periodic_orbit,
    gamma_orbit,
    gamma_seed,
    integrate,
    integrate_with_fate,
    jacobian_at,
    level_h,
    make_params,
    max_relative_residual,
    p_pseudo,
    p_serrin,
    p_sobolev,
    poincare_map,
    reconstruct_u,
    region_name,
    region_of,
    render_portrait,
    shoot_regular,
    singular_catalog,
    stationary_location,
    stationary_points,
    to_phase,
    upsilon_orbit,
    upsilon_seed,
    vector_field,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
