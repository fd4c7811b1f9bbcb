//! Pinned acceptance thresholds.

/// Smallest drift reduction when `h` is halved on the stationary run.
pub const STATIONARY_REFINEMENT_MIN: f64 = 3.0;

/// Largest `|dE1/dt + alpha ||tau||^2|` relative to `alpha ||tau||^2`.
pub const DISSIPATION_RELATIVE_MAX: f64 = 0.05;
/// Energy increase between checkpoints tolerated as roundoff, relative to `E1(0)`.
pub const ENERGY_ROUNDOFF: f64 = 1e-14;
/// The dissipation identity is checked on intervals where the energy drop
/// exceeds this fraction of `E1`; below it the difference quotient is
/// dominated by cancellation.
pub const ENERGY_RESOLUTION: f64 = 1e-10;

/// Final distance to the heat-flow limit, in multiples of the discretization floor.
pub const CONVERGENCE_FLOOR_MULTIPLE: f64 = 10.0;

/// Pairwise tower-limit distance, in multiples of the tail tolerance.
pub const SAME_LIMIT_TAIL_MULTIPLE: f64 = 3.0;

/// Smallest per-slice reduction of the torsion and commutator residuals when `h` is halved.
pub const GAUGE_REFINEMENT_MIN: f64 = 3.0;
/// Largest ratio of `||w||` to its integrator plus consistency budget.
pub const W_BUDGET_FACTOR: f64 = 1.0;
/// Residual change tolerated under a random change of frame.
pub const GAUGE_INVARIANCE_TOL: f64 = 1e-10;

/// Largest `|A_t|` at the end of the tower, in multiples of the tail tolerance.
pub const AT_TAIL_MULTIPLE: f64 = 3.0;
/// Largest ratio of the two-route connection gap to its knob budget.
pub const CONNECTION_BUDGET_FACTOR: f64 = 1.25;

/// Slack on the monotonicity of `max |d_s u|` along a tower.
pub const SUP_VELOCITY_SLACK: f64 = 1e-8;
/// Smallest fitted exponential decay rate of `max |d_s u|`.
pub const DECAY_RATE_MIN: f64 = 0.1;

/// Range of `s` over which smoothing ratios are compared.
pub const RATIO_S_RANGE: (f64, f64) = (0.5, 5.0);
/// Largest relative change of the maximal smoothing ratio under one refinement.
pub const RATIO_CHANGE_MAX: f64 = 0.2;
/// Upper bound asserted for the smoothing ratio itself.
pub const RATIO_CAP: f64 = 10.0;
/// Largest share of the squared-sup integral coming from `[S, 2S]`.
pub const SMOOTHING_TAIL_MAX: f64 = 0.1;
/// Slack on positivity and L1 contraction of the discrete semigroup.
pub const SEMIGROUP_SLACK: f64 = 1e-12;

/// Largest share of each time integral coming from the second half of the run.
pub const TIME_TAIL_MAX: f64 = 0.1;
