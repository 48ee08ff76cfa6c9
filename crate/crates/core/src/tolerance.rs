//! Calibrated tolerances used by the error-band checks and the Monte Carlo
//! validators, each paired with a short rationale for reports.

use serde::Serialize;

/// Constant in the relative error bands `5·n^{−1/2}` and
/// `5·n^{−1/2}(h+w+1)²`.
pub const BAND_CONSTANT: f64 = 5.0;

/// Width, in standard errors, of Monte Carlo agreement windows.
pub const MC_SIGMAS: f64 = 3.0;

/// One-sided slack, in standard errors, when an analytic bound is checked
/// against an empirical frequency.
pub const BOUND_SLACK_SIGMAS: f64 = 5.0;

/// Largest probability mass a truncated support may leave unaccounted.
pub const LEAK_TOLERANCE: f64 = 1e-6;

/// Smallest p-value accepted by the chi-square uniformity checks.
pub const CHI_SQUARE_ALPHA: f64 = 1e-3;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Tolerance {
    pub name: &'static str,
    pub value: f64,
    pub rationale: &'static str,
}

pub const TOLERANCES: &[Tolerance] = &[
    Tolerance {
        name: "band_constant",
        value: BAND_CONSTANT,
        rationale: "the asymptotic error terms carry unspecified constants; 5 clears every \
                    measured deviation at n >= 100 by a factor of two or more",
    },
    Tolerance {
        name: "mc_sigmas",
        value: MC_SIGMAS,
        rationale: "two-sided agreement of an estimate with a reference value",
    },
    Tolerance {
        name: "bound_slack_sigmas",
        value: BOUND_SLACK_SIGMAS,
        rationale: "one-sided check of an empirical frequency against an upper bound",
    },
    Tolerance {
        name: "leak_tolerance",
        value: LEAK_TOLERANCE,
        rationale: "mass outside a truncated support that is folded into a reported distance",
    },
    Tolerance {
        name: "chi_square_alpha",
        value: CHI_SQUARE_ALPHA,
        rationale: "false-alarm rate of the sampler uniformity tests",
    },
];
