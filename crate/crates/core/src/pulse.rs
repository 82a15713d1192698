//! Laser pulse shapes, amplitude normalisation and Volkov phases.
//!
//! A pulse is described on its own phase `Φ ∈ [0, 2π]` by the field shape
//! `f′(Φ) = sin²(Φ/2) sin(NΦ + χ)`. The potential shape `f` is the
//! antiderivative with `f(0) = 0`; outside `[0, 2π]` the pulse vanishes.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use crate::constants::{positron_charge, COLLINEAR_EPSILON};
use crate::error::{Error, Result};
use crate::kinematics::PairKinematics;
use crate::quadrature::{gauss_legendre, CompositeRule};

/// Intervals of the cumulative `∫f`, `∫f²` tables.
pub const TABLE_INTERVALS: usize = 8192;
const MAX_SCAN_POINTS: usize = 65536;
const MAX_TOLERANCE: f64 = 1e-10;

/// Gauss–Legendre order of each panel in the amplitude quadrature.
pub const PANEL_ORDER: usize = 16;
/// Panel counts `32·2^k` are cached per pulse, `k < NODE_LEVELS`.
pub(crate) const BASE_PANELS: usize = 32;
pub(crate) const NODE_LEVELS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    /// Field-strength parameter `ξ = e a max|f| / m`.
    pub xi: f64,
    /// Central frequency `ω = N k⁰`.
    pub omega: f64,
    pub n_cycles: u32,
    /// Carrier-envelope phase `χ` in radians.
    pub cep: f64,
    /// Phase shift `δ` of the pulse front.
    pub delta: f64,
}

impl PulseSpec {
    pub fn new(xi: f64, omega: f64, n_cycles: u32, cep: f64) -> Self {
        PulseSpec {
            xi,
            omega,
            n_cycles,
            cep,
            delta: 0.0,
        }
    }

    pub fn with_xi(self, xi: f64) -> Self {
        PulseSpec { xi, ..self }
    }

    pub fn with_cep(self, cep: f64) -> Self {
        PulseSpec { cep, ..self }
    }

    pub fn with_delta(self, delta: f64) -> Self {
        PulseSpec { delta, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.xi >= 0.0) || !self.xi.is_finite() {
            return Err(Error::validation("xi", format!("must be finite and >= 0, got {}", self.xi)));
        }
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(Error::validation("omega", format!("must be finite and > 0, got {}", self.omega)));
        }
        if self.n_cycles < 1 {
            return Err(Error::validation("cycles", "must be at least 1"));
        }
        if !self.cep.is_finite() {
            return Err(Error::validation("cep", "must be finite"));
        }
        if !(self.delta >= 0.0) {
            return Err(Error::validation("delta", format!("must be >= 0, got {}", self.delta)));
        }
        Ok(())
    }

    /// Laser wave-vector frequency `k⁰ = ω/N`.
    pub fn k0(&self) -> f64 {
        self.omega / self.n_cycles as f64
    }

    /// Pulse length `L = 2πN/ω` in units of `λ_e`.
    pub fn length(&self) -> f64 {
        TAU / self.k0()
    }
}

/// `f′(Φ) = sin²(Φ/2) sin(NΦ + χ)`.
pub fn shape_derivative(phi: f64, spec: &PulseSpec) -> f64 {
    let s = (0.5 * phi).sin();
    s * s * (spec.n_cycles as f64 * phi + spec.cep).sin()
}

/// `∫₀^Φ sin(aΦ̃ + χ) dΦ̃`.
fn sine_antiderivative(a: f64, chi: f64, phi: f64) -> f64 {
    if a == 0.0 {
        phi * chi.sin()
    } else {
        (chi.cos() - (a * phi + chi).cos()) / a
    }
}

/// Potential shape `f(Φ) = ∫₀^Φ f′`, in closed form from
/// `sin²(Φ/2) sin(NΦ+χ) = ½ sin(NΦ+χ) - ¼ sin((N+1)Φ+χ) - ¼ sin((N-1)Φ+χ)`.
pub fn shape(phi: f64, spec: &PulseSpec) -> f64 {
    let n = spec.n_cycles as f64;
    let chi = spec.cep;
    0.5 * sine_antiderivative(n, chi, phi)
        - 0.25 * sine_antiderivative(n + 1.0, chi, phi)
        - 0.25 * sine_antiderivative(n - 1.0, chi, phi)
}

/// Shape samples at the amplitude quadrature nodes.
#[derive(Debug, Clone)]
pub struct NodeTable {
    pub phi: Vec<f64>,
    pub weight: Vec<f64>,
    pub f: Vec<f64>,
    pub int_f: Vec<f64>,
    pub int_f2: Vec<f64>,
}

/// A normalised pulse with its derived quantities.
#[derive(Debug)]
pub struct PulseField {
    pub spec: PulseSpec,
    pub k0: f64,
    pub length: f64,
    /// Amplitude parameter `a`.
    pub amplitude: f64,
    /// Product `e·a`, which is what enters every matrix element.
    pub ea: f64,
    pub f_max: f64,
    /// `⟨f⟩ = (1/2π)∫₀^{2π} f`.
    pub mean_f: f64,
    /// `⟨f²⟩ = (1/2π)∫₀^{2π} f²`.
    pub mean_f2: f64,
    /// `∫₀^{2π} |f|`, used in the winding estimate.
    pub abs_integral: f64,
    step: f64,
    int_f: Vec<f64>,
    int_f2: Vec<f64>,
    nodes: [OnceLock<NodeTable>; NODE_LEVELS],
}

impl Clone for PulseField {
    fn clone(&self) -> Self {
        PulseField {
            spec: self.spec,
            k0: self.k0,
            length: self.length,
            amplitude: self.amplitude,
            ea: self.ea,
            f_max: self.f_max,
            mean_f: self.mean_f,
            mean_f2: self.mean_f2,
            abs_integral: self.abs_integral,
            step: self.step,
            int_f: self.int_f.clone(),
            int_f2: self.int_f2.clone(),
            nodes: Default::default(),
        }
    }
}

/// Builds the pulse field: locates `max|f|`, fixes `a` from `ξ` and
/// tabulates the cumulative shape integrals.
pub fn normalize_amplitude(spec: &PulseSpec) -> Result<PulseField> {
    PulseField::new(spec)
}

impl PulseField {
    pub fn new(spec: &PulseSpec) -> Result<Self> {
        spec.validate()?;
        let f_max = locate_shape_max(spec);
        let ea = if spec.xi == 0.0 {
            0.0
        } else if f_max < 1e-14 {
            return Err(Error::DegenerateShape { xi: spec.xi });
        } else {
            spec.xi / f_max
        };

        let step = TAU / TABLE_INTERVALS as f64;
        let (gx, gw) = gauss_legendre(8);
        let mut int_f = Vec::with_capacity(TABLE_INTERVALS + 1);
        let mut int_f2 = Vec::with_capacity(TABLE_INTERVALS + 1);
        let mut abs_integral = 0.0;
        let (mut acc1, mut acc2) = (0.0, 0.0);
        int_f.push(0.0);
        int_f2.push(0.0);
        for i in 0..TABLE_INTERVALS {
            let mid = (i as f64 + 0.5) * step;
            let (mut s1, mut s2, mut sa) = (0.0, 0.0, 0.0);
            for (&x, &w) in gx.iter().zip(&gw) {
                let f = shape(mid + 0.5 * step * x, spec);
                s1 += w * f;
                s2 += w * f * f;
                sa += w * f.abs();
            }
            acc1 += 0.5 * step * s1;
            acc2 += 0.5 * step * s2;
            abs_integral += 0.5 * step * sa;
            int_f.push(acc1);
            int_f2.push(acc2);
        }

        let k0 = spec.k0();
        Ok(PulseField {
            spec: *spec,
            k0,
            length: TAU / k0,
            amplitude: ea / positron_charge(),
            ea,
            f_max,
            mean_f: acc1 / TAU,
            mean_f2: acc2 / TAU,
            abs_integral,
            step,
            int_f,
            int_f2,
            nodes: Default::default(),
        })
    }

    pub fn shape(&self, phi: f64) -> f64 {
        shape(phi, &self.spec)
    }

    /// Vector potential amplitude `a f(φ - δ) X[0,2π](φ - δ)` in the
    /// laboratory phase `φ`.
    pub fn potential(&self, phi: f64) -> f64 {
        let local = phi - self.spec.delta;
        if (0.0..=TAU).contains(&local) {
            self.amplitude * self.shape(local)
        } else {
            0.0
        }
    }

    /// `(∫₀^Φ f, ∫₀^Φ f²)` by cubic Hermite interpolation of the tables.
    pub fn shape_integrals(&self, phi: f64) -> (f64, f64) {
        let phi = phi.clamp(0.0, TAU);
        let x = phi / self.step;
        let i = (x.floor() as usize).min(TABLE_INTERVALS - 1);
        let t = x - i as f64;
        let (a, b) = (i as f64 * self.step, (i + 1) as f64 * self.step);
        let (fa, fb) = (self.shape(a), self.shape(b));
        let h = self.step;
        let hermite = |ya: f64, yb: f64, da: f64, db: f64| {
            let t2 = t * t;
            let t3 = t2 * t;
            (2.0 * t3 - 3.0 * t2 + 1.0) * ya
                + (t3 - 2.0 * t2 + t) * h * da
                + (-2.0 * t3 + 3.0 * t2) * yb
                + (t3 - t2) * h * db
        };
        (
            hermite(self.int_f[i], self.int_f[i + 1], fa, fb),
            hermite(self.int_f2[i], self.int_f2[i + 1], fa * fa, fb * fb),
        )
    }

    /// `H(Φ) = h₁∫₀^Φ f + h₂∫₀^Φ f²`.
    pub fn volkov_phase(&self, phi: f64, coeffs: &VolkovCoefficients) -> f64 {
        let (i1, i2) = self.shape_integrals(phi);
        coeffs.h1 * i1 + coeffs.h2 * i2
    }

    /// `H* = H(2π) = 2π(h₁⟨f⟩ + h₂⟨f²⟩)`.
    pub fn volkov_phase_total(&self, coeffs: &VolkovCoefficients) -> f64 {
        TAU * (coeffs.h1 * self.mean_f + coeffs.h2 * self.mean_f2)
    }

    /// `dH/dΦ = h₁ f(Φ) + h₂ f²(Φ)`.
    pub fn phase_rate(&self, phi: f64, coeffs: &VolkovCoefficients) -> f64 {
        let f = self.shape(phi);
        coeffs.h1 * f + coeffs.h2 * f * f
    }

    /// Node table for a composite rule with `BASE_PANELS·2^level` panels.
    pub fn node_table(&self, level: usize) -> &NodeTable {
        self.nodes[level].get_or_init(|| {
            let rule = CompositeRule::new(0.0, TAU, BASE_PANELS << level, PANEL_ORDER);
            let f: Vec<f64> = rule.nodes.iter().map(|&x| self.shape(x)).collect();
            let (int_f, int_f2) = rule.nodes.iter().map(|&x| self.shape_integrals(x)).unzip();
            NodeTable {
                phi: rule.nodes,
                weight: rule.weights,
                f,
                int_f,
                int_f2,
            }
        })
    }
}

fn locate_shape_max(spec: &PulseSpec) -> f64 {
    let step = TAU / MAX_SCAN_POINTS as f64;
    let (best, _) = (0..=MAX_SCAN_POINTS)
        .map(|i| (i, shape(i as f64 * step, spec).abs()))
        .fold((0, -1.0), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let lo = (best as f64 - 1.0).max(0.0) * step;
    let hi = (best as f64 + 1.0).min(MAX_SCAN_POINTS as f64) * step;
    let at = golden_section_max(|x| shape(x, spec).abs(), lo, hi, MAX_TOLERANCE);
    shape(at, spec).abs().max(shape(best as f64 * step, spec).abs())
}

fn golden_section_max(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while (b - a).abs() > tol {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - ratio * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + ratio * (b - a);
            gd = g(d);
        }
    }
    0.5 * (a + b)
}

/// Coefficients of the Volkov phase accumulated inside one pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolkovCoefficients {
    pub h1: f64,
    pub h2: f64,
}

/// `h₁ = -ea[ε·p₊/(k·p₊) - ε·p₋/(k·p₋)]`, `h₂ = -½e²a²[1/(k·p₊) + 1/(k·p₋)]`,
/// with Minkowski products and a spatial laser polarization `ε̂`.
pub fn volkov_coefficients(
    pair: &PairKinematics,
    field: &PulseField,
    polarization: [f64; 3],
) -> Result<VolkovCoefficients> {
    let kp_pos = field.k0 * pair.positron.p_minus;
    let kp_ele = field.k0 * pair.electron.p_minus;
    for k_dot_p in [kp_pos, kp_ele] {
        if !(k_dot_p >= COLLINEAR_EPSILON) {
            return Err(Error::CollinearSingularity { k_dot_p });
        }
    }
    let eps_dot = |p: [f64; 3]| -(polarization[0] * p[0] + polarization[1] * p[1] + polarization[2] * p[2]);
    let ea = field.ea;
    Ok(VolkovCoefficients {
        h1: -ea * (eps_dot(pair.positron.momentum()) / kp_pos - eps_dot(pair.electron.momentum()) / kp_ele),
        h2: -0.5 * ea * ea * (1.0 / kp_pos + 1.0 / kp_ele),
    })
}

/// `H(Φ)` for the given coefficients.
pub fn volkov_phase(phi: f64, coeffs: &VolkovCoefficients, field: &PulseField) -> f64 {
    field.volkov_phase(phi, coeffs)
}

/// `H* = H(2π)`.
pub fn volkov_phase_total(coeffs: &VolkovCoefficients, field: &PulseField) -> f64 {
    field.volkov_phase_total(coeffs)
}

/// Laser polarization; both pulses share it.
pub const LASER_POLARIZATION: [f64; 3] = [1.0, 0.0, 0.0];
