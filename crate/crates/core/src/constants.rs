//! Physical constants in natural units (`m = 1`, `ħ = c = 1`, Gaussian units).

/// Fine-structure constant.
pub const ALPHA: f64 = 1.0 / 137.035999;

/// Lepton mass; the unit of energy and inverse length.
pub const LEPTON_MASS: f64 = 1.0;

/// Positron charge, `e = √α`.
pub fn positron_charge() -> f64 {
    ALPHA.sqrt()
}

/// Guard on `k·p` below which a lepton counts as collinear with the laser.
pub const COLLINEAR_EPSILON: f64 = 1e-8;

/// Smallest `|Q⁰|` for which the regularised matrix element is formed.
pub const REGULARIZATION_EPSILON: f64 = 1e-10;
