//! Reduced matrix elements, single-pulse amplitudes `F_j` and the
//! two-pathway interference between them.
//!
//! After the conservation deltas are taken out, the amplitude in a pulse
//! sequence is `F₁ + F₂ e^{-iφ}` with
//!
//! ```text
//! F_j = (1/k⁰) ∫₀^{2π} dΦ C̃_j(Φ) exp(-i Q⁰Φ/k⁰ - i H_j(Φ))
//! C̃_j = C_j - (k⁰/Q⁰) (dH_j/dΦ) C₀
//! φ   = H₁* + Q⁰ (L₁ + D)
//! ```
//!
//! `F_j` does not depend on where the pulse sits, so a pulse's amplitudes
//! can be computed once and reused for every delay and ordering.

use num_complex::Complex64;

use crate::constants::REGULARIZATION_EPSILON;
use crate::error::{Error, Result};
use crate::kinematics::{GammaProbe, PairKinematics};
use crate::pulse::{
    volkov_coefficients, PulseField, VolkovCoefficients, BASE_PANELS, LASER_POLARIZATION, NODE_LEVELS,
    PANEL_ORDER,
};

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Pointwise matrix elements at one pulse phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedElements {
    pub c0: f64,
    pub cj: f64,
    pub ctilde: f64,
}

/// `C₀ = (p₋ - p₊)·ε_γ` as a Minkowski product with a spatial `ε_γ`.
fn c0_element(pair: &PairKinematics, eps_gamma: [f64; 3]) -> f64 {
    let (pp, pm) = (pair.positron.momentum(), pair.electron.momentum());
    -dot3([pm[0] - pp[0], pm[1] - pp[1], pm[2] - pp[2]], eps_gamma)
}

/// `2e a ε_j·ε_γ`, the field coefficient of `C_j` per unit shape.
fn field_element(field: &PulseField, eps_gamma: [f64; 3]) -> f64 {
    -2.0 * field.ea * dot3(LASER_POLARIZATION, eps_gamma)
}

fn check_regularization(q0: f64) -> Result<()> {
    if q0.abs() < REGULARIZATION_EPSILON {
        return Err(Error::RegularizationSingular { q0 });
    }
    Ok(())
}

pub fn reduced_elements(
    phi: f64,
    pair: &PairKinematics,
    field: &PulseField,
    eps_gamma: [f64; 3],
    coeffs: &VolkovCoefficients,
) -> Result<ReducedElements> {
    check_regularization(pair.q0)?;
    let f = field.shape(phi);
    let c0 = c0_element(pair, eps_gamma);
    let cj = field_element(field, eps_gamma) * f;
    let rate = coeffs.h1 * f + coeffs.h2 * f * f;
    Ok(ReducedElements {
        c0,
        cj,
        ctilde: cj - field.k0 / pair.q0 * rate * c0,
    })
}

/// Node-count policy for the fixed-node amplitude quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub min_nodes: usize,
    pub nodes_per_winding: usize,
    pub max_nodes: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            min_nodes: 512,
            nodes_per_winding: 24,
            max_nodes: 1 << 17,
        }
    }
}

impl QuadConfig {
    /// Twice the nodes everywhere; used by convergence checks.
    pub fn doubled(self) -> Self {
        QuadConfig {
            min_nodes: 2 * self.min_nodes,
            nodes_per_winding: 2 * self.nodes_per_winding,
            max_nodes: 2 * self.max_nodes,
        }
    }

    /// Estimated number of phase windings of the integrand over the pulse.
    pub fn windings(field: &PulseField, q0: f64, coeffs: &VolkovCoefficients) -> f64 {
        let tau = std::f64::consts::TAU;
        (q0.abs() / field.k0 * tau + coeffs.h1.abs() * field.abs_integral + coeffs.h2.abs() * field.mean_f2 * tau) / tau
    }

    /// Level of the cached composite rule resolving `windings`.
    pub fn level(&self, windings: f64) -> Result<usize> {
        let required = self.min_nodes.max(self.nodes_per_winding * windings.ceil() as usize);
        let panels = required.div_ceil(PANEL_ORDER);
        let mut level = 0;
        while BASE_PANELS << level < panels {
            level += 1;
        }
        let nodes = (BASE_PANELS << level) * PANEL_ORDER;
        if level >= NODE_LEVELS || nodes > self.max_nodes {
            return Err(Error::QuadratureUnderResolved {
                required,
                available: self.max_nodes,
            });
        }
        Ok(level)
    }
}

/// Quadrature sums `Σ w f e^{-iψ}` and `Σ w (dH/dΦ) e^{-iψ}` with
/// `ψ = Q⁰Φ/k⁰ + H(Φ)`.
fn phase_sums(
    pair: &PairKinematics,
    field: &PulseField,
    coeffs: &VolkovCoefficients,
    quad: &QuadConfig,
) -> Result<(Complex64, Complex64)> {
    let level = quad.level(QuadConfig::windings(field, pair.q0, coeffs))?;
    let table = field.node_table(level);
    let freq = pair.q0 / field.k0;
    let (h1, h2) = (coeffs.h1, coeffs.h2);
    let (mut sf_re, mut sf_im, mut sd_re, mut sd_im) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..table.phi.len() {
        let f = table.f[i];
        let psi = freq * table.phi[i] + h1 * table.int_f[i] + h2 * table.int_f2[i];
        let (s, c) = psi.sin_cos();
        let w = table.weight[i];
        let wf = w * f;
        let wd = w * (h1 * f + h2 * f * f);
        sf_re += wf * c;
        sf_im -= wf * s;
        sd_re += wd * c;
        sd_im -= wd * s;
    }
    Ok((Complex64::new(sf_re, sf_im), Complex64::new(sd_re, sd_im)))
}

fn assemble(
    pair: &PairKinematics,
    field: &PulseField,
    eps_gamma: [f64; 3],
    sums: (Complex64, Complex64),
) -> Complex64 {
    let (sf, sd) = sums;
    let c0 = c0_element(pair, eps_gamma);
    (sf * field_element(field, eps_gamma) - sd * (field.k0 / pair.q0 * c0)) / field.k0
}

/// Single-pulse amplitude `F_j` for one gamma polarization `ε_γ`.
pub fn pulse_amplitude(
    pair: &PairKinematics,
    field: &PulseField,
    eps_gamma: [f64; 3],
    coeffs: &VolkovCoefficients,
    quad: &QuadConfig,
) -> Result<Complex64> {
    check_regularization(pair.q0)?;
    let sums = phase_sums(pair, field, coeffs, quad)?;
    Ok(assemble(pair, field, eps_gamma, sums))
}

/// Amplitudes of one pulse for both gamma polarization modes, sharing one
/// pass over the quadrature nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseAmplitude {
    pub f: [Complex64; 2],
    pub coeffs: VolkovCoefficients,
    /// `H*`, the Volkov phase accumulated across the whole pulse.
    pub h_star: f64,
}

impl PulseAmplitude {
    pub fn zero() -> Self {
        PulseAmplitude {
            f: [Complex64::new(0.0, 0.0); 2],
            coeffs: VolkovCoefficients { h1: 0.0, h2: 0.0 },
            h_star: 0.0,
        }
    }

    pub fn evaluate(pair: &PairKinematics, field: &PulseField, gamma: &GammaProbe, quad: &QuadConfig) -> Result<Self> {
        check_regularization(pair.q0)?;
        let coeffs = volkov_coefficients(pair, field, LASER_POLARIZATION)?;
        let sums = phase_sums(pair, field, &coeffs, quad)?;
        Ok(PulseAmplitude {
            f: [0, 1].map(|mode| assemble(pair, field, gamma.polarization(mode), sums)),
            coeffs,
            h_star: field.volkov_phase_total(&coeffs),
        })
    }

    /// Laser-dressed energy `E_L = -(Q⁰ + k⁰Σ_l h_l⟨f^l⟩)` required from this pulse.
    pub fn dressed_energy(&self, q0: f64, field: &PulseField) -> f64 {
        -(q0 + field.k0 * (self.coeffs.h1 * field.mean_f + self.coeffs.h2 * field.mean_f2))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.f[0].norm_sqr() + self.f[1].norm_sqr()
    }
}

/// `φ = H₁* + Q⁰Δ` with `Δ = L₁ + D`.
pub fn dynamical_phase(h1_star: f64, q0: f64, l1: f64, d: f64) -> f64 {
    h1_star + q0 * (l1 + d)
}

/// The dynamical phase together with its `-φ = E_L L₁ + E₀ D` split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDecomposition {
    pub phi: f64,
    pub e_l: f64,
    pub e0: f64,
}

impl PhaseDecomposition {
    pub fn new(first: &PulseField, coeffs: &VolkovCoefficients, q0: f64, d: f64) -> Self {
        let h_star = first.volkov_phase_total(coeffs);
        let phi = dynamical_phase(h_star, q0, first.length, d);
        let e_l = -(q0 + first.k0 * (coeffs.h1 * first.mean_f + coeffs.h2 * first.mean_f2));
        let split = PhaseDecomposition { phi, e_l, e0: -q0 };
        debug_assert!(
            (split.minus_phi_from_energies(first.length, d) + phi).abs() <= 1e-10 * (1.0 + phi.abs()),
            "dynamical phase forms disagree"
        );
        split
    }

    pub fn minus_phi_from_energies(&self, l1: f64, d: f64) -> f64 {
        self.e_l * l1 + self.e0 * d
    }
}

/// `|F₁ + F₂ e^{-iφ}|²`.
pub fn combined_intensity(f1: Complex64, f2: Complex64, phi: f64) -> f64 {
    (f1 + f2 * Complex64::from_polar(1.0, -phi)).norm_sqr()
}

/// Everything needed for the double-pulse amplitude at one momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeParts {
    pub f1: [Complex64; 2],
    pub f2: [Complex64; 2],
    pub h1_star: f64,
    pub dyn_phase: f64,
    /// Front-to-front separation `Δ = L₁ + D`.
    pub delta: f64,
}

impl AmplitudeParts {
    pub fn evaluate(
        pair: &PairKinematics,
        first: &PulseField,
        second: &PulseField,
        gap: f64,
        gamma: &GammaProbe,
        quad: &QuadConfig,
    ) -> Result<Self> {
        let a1 = PulseAmplitude::evaluate(pair, first, gamma, quad)?;
        let a2 = PulseAmplitude::evaluate(pair, second, gamma, quad)?;
        Ok(Self::from_pulses(&a1, &a2, pair.q0, first.length, gap))
    }

    pub fn from_pulses(first: &PulseAmplitude, second: &PulseAmplitude, q0: f64, l1: f64, gap: f64) -> Self {
        AmplitudeParts {
            f1: first.f,
            f2: second.f,
            h1_star: first.h_star,
            dyn_phase: dynamical_phase(first.h_star, q0, l1, gap),
            delta: l1 + gap,
        }
    }

    /// Single-pulse limit: only the first pathway.
    pub fn single(pulse: &PulseAmplitude, l1: f64) -> Self {
        AmplitudeParts {
            f1: pulse.f,
            f2: [Complex64::new(0.0, 0.0); 2],
            h1_star: pulse.h_star,
            dyn_phase: 0.0,
            delta: l1,
        }
    }

    /// `Σ_λ |F₁ + F₂ e^{-iφ}|²`.
    pub fn intensity(&self) -> f64 {
        (0..2).map(|m| combined_intensity(self.f1[m], self.f2[m], self.dyn_phase)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{solve_partner, LightConeMomentum};
    use crate::pulse::{normalize_amplitude, PulseSpec};
    use std::f64::consts::{PI, TAU};

    fn pair(p: f64, theta: f64, phi: f64) -> PairKinematics {
        let positron = LightConeMomentum::lepton_spherical(p, theta, phi);
        solve_partner(&positron, &GammaProbe::new(1.01)).unwrap()
    }

    fn p1() -> PulseField {
        normalize_amplitude(&PulseSpec::new(0.1, 1.01, 4, 0.0)).unwrap()
    }

    #[test]
    fn c0_vanishes_out_of_plane() {
        let pr = pair(0.5, 0.7, 0.0);
        let field = p1();
        let c = volkov_coefficients(&pr, &field, LASER_POLARIZATION).unwrap();
        let el = reduced_elements(0.3, &pr, &field, [0.0, 1.0, 0.0], &c).unwrap();
        assert_eq!(el.c0, 0.0);
        assert_eq!(el.cj, 0.0);
    }

    #[test]
    fn free_theory_has_no_pulse_contribution() {
        let pr = pair(0.5, 0.7, 0.4);
        let field = normalize_amplitude(&PulseSpec::new(0.0, 1.01, 4, 0.0)).unwrap();
        let c = volkov_coefficients(&pr, &field, LASER_POLARIZATION).unwrap();
        let el = reduced_elements(1.3, &pr, &field, [1.0, 0.0, 0.0], &c).unwrap();
        assert_eq!(el.cj, 0.0);
        assert_eq!(el.ctilde, 0.0);
        let amp = PulseAmplitude::evaluate(&pr, &field, &GammaProbe::new(1.01), &QuadConfig::default()).unwrap();
        assert_eq!(amp.norm_sqr(), 0.0);
    }

    #[test]
    fn regularization_uses_phase_rate() {
        let pr = pair(0.3, 1.9, 0.8);
        let field = p1();
        let c = volkov_coefficients(&pr, &field, LASER_POLARIZATION).unwrap();
        let h = 1e-5;
        let fd = (field.volkov_phase(0.3 + h, &c) - field.volkov_phase(0.3 - h, &c)) / (2.0 * h);
        let el = reduced_elements(0.3, &pr, &field, [1.0, 0.0, 0.0], &c).unwrap();
        let implied_rate = (el.cj - el.ctilde) * pr.q0 / (field.k0 * el.c0);
        assert!((implied_rate - fd).abs() < 1e-6);
    }

    #[test]
    fn singular_regularization_is_flagged() {
        let mut pr = pair(0.3, 1.0, 0.2);
        pr.q0 = 0.0;
        let field = p1();
        let c = VolkovCoefficients { h1: 0.1, h2: -0.1 };
        assert!(matches!(
            reduced_elements(0.3, &pr, &field, [1.0, 0.0, 0.0], &c),
            Err(Error::RegularizationSingular { .. })
        ));
    }

    #[test]
    fn generic_and_paired_amplitudes_agree() {
        let pr = pair(0.35, 1.2, 2.1);
        let field = p1();
        let gamma = GammaProbe::new(1.01);
        let quad = QuadConfig::default();
        let both = PulseAmplitude::evaluate(&pr, &field, &gamma, &quad).unwrap();
        for mode in 0..2 {
            let single = pulse_amplitude(&pr, &field, gamma.polarization(mode), &both.coeffs, &quad).unwrap();
            assert!((single - both.f[mode]).norm() <= 1e-14 * both.f[mode].norm().max(1e-300));
        }
    }

    #[test]
    fn amplitude_is_converged_and_delta_independent() {
        let gamma = GammaProbe::new(1.01);
        let quad = QuadConfig::default();
        for (p, theta, phi) in [(0.14, 0.5, 0.2), (0.34, 1.5, 2.9), (1.2, 1.0, 4.0)] {
            let pr = pair(p, theta, phi);
            let field = p1();
            let a = PulseAmplitude::evaluate(&pr, &field, &gamma, &quad).unwrap();
            let b = PulseAmplitude::evaluate(&pr, &field, &gamma, &quad.doubled()).unwrap();
            assert!((a.norm_sqr().sqrt() - b.norm_sqr().sqrt()).abs() < 1e-6 * b.norm_sqr().sqrt());
            let shifted = normalize_amplitude(&field.spec.with_delta(17.3)).unwrap();
            let c = PulseAmplitude::evaluate(&pr, &shifted, &gamma, &quad).unwrap();
            assert_eq!(a, c);
        }
    }

    #[test]
    fn under_resolved_quadrature_is_flagged() {
        let tight = QuadConfig {
            max_nodes: 512,
            ..QuadConfig::default()
        };
        assert!(tight.level(1.0).is_ok());
        assert!(matches!(tight.level(100.0), Err(Error::QuadratureUnderResolved { .. })));
    }

    #[test]
    fn dynamical_phase_forms() {
        let field = p1();
        let pr = pair(0.2, 1.0, 0.0);
        let c = volkov_coefficients(&pr, &field, LASER_POLARIZATION).unwrap();
        let split = PhaseDecomposition::new(&field, &c, pr.q0, 0.0);
        assert!((split.minus_phi_from_energies(field.length, 0.0) + split.phi).abs() < 1e-10);
        // Linearity in D.
        let shift = TAU / pr.e0;
        let later = dynamical_phase(field.volkov_phase_total(&c), pr.q0, field.length, 1.0 + shift);
        let now = dynamical_phase(field.volkov_phase_total(&c), pr.q0, field.length, 1.0);
        assert!((later - now + TAU).abs() < 1e-12);
    }

    #[test]
    fn combined_intensity_limits() {
        let f = Complex64::new(0.3, -1.2);
        assert_eq!(combined_intensity(f, Complex64::new(0.0, 0.0), 0.7), f.norm_sqr());
        assert!(combined_intensity(f, f, PI) < 1e-28);
        assert!((combined_intensity(f, f, 0.0) - 4.0 * f.norm_sqr()).abs() < 1e-14);
        for phi in [0.1, 1.0, 2.5, 4.0] {
            let two = 2.0 * f.norm_sqr() * (1.0 + f64::cos(phi));
            assert!((combined_intensity(f, f, phi) - two).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_pulses_give_identical_amplitudes() {
        let pr = pair(0.4, 0.9, 1.0);
        let gamma = GammaProbe::new(1.01);
        let (a, b) = (p1(), p1());
        let parts = AmplitudeParts::evaluate(&pr, &a, &b, 0.0, &gamma, &QuadConfig::default()).unwrap();
        assert_eq!(parts.f1, parts.f2);
        assert!(parts.intensity() <= 4.0 * (parts.f1[0].norm_sqr() + parts.f1[1].norm_sqr()) * (1.0 + 1e-12));
        assert_eq!(parts.dyn_phase, parts.h1_star + pr.q0 * parts.delta);
    }
}
