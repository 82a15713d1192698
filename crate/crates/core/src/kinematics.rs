//! Four-momentum bookkeeping in light-cone coordinates.
//!
//! The laser propagates along `+z` with polarization along `+x`; the gamma
//! quantum travels along `-z`. For a four-vector `v` we use
//! `v⁻ = v⁰ - v∥` and `v⁺ = (v⁰ + v∥)/2`, with `v∥ = v_z`, so the laser phase
//! is `φ = k⁰ x⁻` and `k·p = k⁰ p⁻` for any momentum `p`.

use crate::constants::LEPTON_MASS;
use crate::error::{Error, Result};

/// Minkowski product with signature `(+, -, -, -)` of `(t, x, y, z)` vectors.
pub fn minkowski_dot(a: [f64; 4], b: [f64; 4]) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

/// A four-momentum carried in both Cartesian and light-cone form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightConeMomentum {
    pub energy: f64,
    pub p_perp: [f64; 2],
    pub p_par: f64,
    pub p_minus: f64,
    pub p_plus: f64,
}

impl LightConeMomentum {
    pub fn from_cartesian(energy: f64, p_perp: [f64; 2], p_par: f64) -> Self {
        LightConeMomentum {
            energy,
            p_perp,
            p_par,
            p_minus: energy - p_par,
            p_plus: 0.5 * (energy + p_par),
        }
    }

    /// An on-shell particle of the given mass with spatial momentum `p`.
    pub fn on_shell(mass: f64, p: [f64; 3]) -> Self {
        let energy = (mass * mass + p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        Self::from_cartesian(energy, [p[0], p[1]], p[2])
    }

    /// An on-shell lepton with momentum magnitude `p`, polar angle `theta`
    /// measured from the laser axis and azimuth `phi` measured from the
    /// laser polarization.
    pub fn lepton_spherical(p: f64, theta: f64, phi: f64) -> Self {
        let (sin_t, cos_t) = theta.sin_cos();
        let (sin_p, cos_p) = phi.sin_cos();
        Self::on_shell(LEPTON_MASS, [p * sin_t * cos_p, p * sin_t * sin_p, p * cos_t])
    }

    pub fn perp_squared(&self) -> f64 {
        self.p_perp[0] * self.p_perp[0] + self.p_perp[1] * self.p_perp[1]
    }

    pub fn momentum(&self) -> [f64; 3] {
        [self.p_perp[0], self.p_perp[1], self.p_par]
    }

    pub fn magnitude(&self) -> f64 {
        (self.perp_squared() + self.p_par * self.p_par).sqrt()
    }

    pub fn four_vector(&self) -> [f64; 4] {
        [self.energy, self.p_perp[0], self.p_perp[1], self.p_par]
    }

    /// `2 p⁺ p⁻ - |p⊥|² - m²`, zero on the mass shell.
    pub fn mass_shell_residual(&self, mass: f64) -> f64 {
        2.0 * self.p_plus * self.p_minus - self.perp_squared() - mass * mass
    }
}

/// Splits a Cartesian four-momentum into light-cone components.
pub fn lightcone_decompose(energy: f64, p_perp: [f64; 2], p_par: f64) -> LightConeMomentum {
    LightConeMomentum::from_cartesian(energy, p_perp, p_par)
}

/// The high-energy photon, colliding head-on with the laser.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaProbe {
    pub omega: f64,
}

impl GammaProbe {
    pub fn new(omega: f64) -> Self {
        GammaProbe { omega }
    }

    pub fn direction(&self) -> [f64; 3] {
        [0.0, 0.0, -1.0]
    }

    pub fn momentum(&self) -> LightConeMomentum {
        LightConeMomentum::from_cartesian(self.omega, [0.0, 0.0], -self.omega)
    }

    /// `k_γ⁻ = 2 ω_γ` for the head-on geometry.
    pub fn k_minus(&self) -> f64 {
        2.0 * self.omega
    }

    /// Real linear polarization basis; mode 0 is along the laser
    /// polarization, mode 1 perpendicular to it.
    pub fn polarization(&self, mode: usize) -> [f64; 3] {
        match mode {
            0 => [1.0, 0.0, 0.0],
            1 => [0.0, 1.0, 0.0],
            _ => panic!("gamma polarization mode {mode} out of range"),
        }
    }
}

/// A positron/electron pair on the conservation shell `Q⁻ = 0`, `Q⊥ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairKinematics {
    pub positron: LightConeMomentum,
    pub electron: LightConeMomentum,
    /// Energy component of `Q = k_γ - p₊ - p₋`.
    pub q0: f64,
    /// Bare energy the laser has to supply, `E₀ = -Q⁰`.
    pub e0: f64,
}

impl PairKinematics {
    /// Light-cone `Q⁺`, from which `Q⁰ = Q⁺ + Q⁻/2` with `Q⁻ = 0`.
    pub fn q_plus(&self, gamma: &GammaProbe) -> f64 {
        gamma.momentum().p_plus - self.positron.p_plus - self.electron.p_plus
    }
}

/// Resolves the electron momentum from the positron momentum via
/// `Q⁻ = 0`, `Q⊥ = 0` and the electron mass shell.
pub fn solve_partner(positron: &LightConeMomentum, gamma: &GammaProbe) -> Result<PairKinematics> {
    let limit = gamma.k_minus();
    let minus = limit - positron.p_minus;
    if !(minus > 0.0) {
        return Err(Error::PhaseSpaceClosed {
            p_minus: positron.p_minus,
            limit,
        });
    }
    let p_perp = [-positron.p_perp[0], -positron.p_perp[1]];
    let perp2 = p_perp[0] * p_perp[0] + p_perp[1] * p_perp[1];
    let plus = (LEPTON_MASS * LEPTON_MASS + perp2) / (2.0 * minus);
    let electron = LightConeMomentum {
        energy: plus + 0.5 * minus,
        p_perp,
        p_par: plus - 0.5 * minus,
        p_minus: minus,
        p_plus: plus,
    };
    let q0 = gamma.omega - positron.energy - electron.energy;
    Ok(PairKinematics {
        positron: *positron,
        electron,
        q0,
        e0: -q0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decompose_rest_and_photons() {
        let rest = lightcone_decompose(1.0, [0.0, 0.0], 0.0);
        assert_eq!((rest.p_minus, rest.p_plus), (1.0, 0.5));

        let gamma = lightcone_decompose(1.01, [0.0, 0.0], -1.01);
        assert_eq!((gamma.p_minus, gamma.p_plus), (2.02, 0.0));

        let k0 = 0.2525;
        let laser = lightcone_decompose(k0, [0.0, 0.0], k0);
        assert_eq!((laser.p_minus, laser.p_plus), (0.0, k0));
        assert_eq!(laser.energy, k0);
    }

    #[test]
    fn partner_of_positron_at_rest() {
        let gamma = GammaProbe::new(1.01);
        let positron = LightConeMomentum::on_shell(1.0, [0.0; 3]);
        let pair = solve_partner(&positron, &gamma).unwrap();
        let e = pair.electron;
        assert!((e.p_minus - 1.02).abs() < 1e-15);
        assert!((e.p_plus - 0.490196078431).abs() < 1e-9);
        assert!((e.energy - 1.000196078431).abs() < 1e-9);
        assert!((e.p_par + 0.019803921569).abs() < 1e-9);
        assert!((pair.q0 + 0.990196078431).abs() < 1e-9);
        assert!(e.mass_shell_residual(1.0).abs() < 1e-12);
        assert!(pair.e0 > 0.0);
    }

    #[test]
    fn transverse_balance() {
        let gamma = GammaProbe::new(1.01);
        let positron = LightConeMomentum::on_shell(1.0, [0.3, 0.0, 0.0]);
        let pair = solve_partner(&positron, &gamma).unwrap();
        assert_eq!(pair.electron.p_perp, [-0.3, -0.0]);
    }

    #[test]
    fn closed_phase_space_is_flagged() {
        let gamma = GammaProbe::new(1.01);
        // Positron along -z with p⁻ = E + p ≥ 2ω_γ.
        let positron = LightConeMomentum::on_shell(1.0, [0.0, 0.0, -1.5]);
        assert!(matches!(
            solve_partner(&positron, &gamma),
            Err(Error::PhaseSpaceClosed { .. })
        ));
        // Approaching the boundary from inside sends the electron energy up.
        let p_edge = (2.02f64 * 2.02 - 1.0) / (2.0 * 2.02);
        let mut last = 0.0;
        for eps in [1e-2, 1e-4, 1e-6] {
            let positron = LightConeMomentum::on_shell(1.0, [0.0, 0.0, -(p_edge - eps)]);
            let pair = solve_partner(&positron, &gamma).unwrap();
            assert!(pair.electron.energy > last);
            last = pair.electron.energy;
        }
        assert!(last > 1e4);
    }

    #[test]
    fn gamma_polarization_is_transverse() {
        let gamma = GammaProbe::new(1.01);
        let k = gamma.momentum().four_vector();
        for mode in 0..2 {
            let e = gamma.polarization(mode);
            assert_eq!(minkowski_dot(k, [0.0, e[0], e[1], e[2]]), 0.0);
        }
        let (a, b) = (gamma.polarization(0), gamma.polarization(1));
        assert_eq!(a[0] * b[0] + a[1] * b[1] + a[2] * b[2], 0.0);
        assert_eq!(gamma.k_minus(), 2.02);
    }

    proptest! {
        #[test]
        fn partner_is_on_shell(p in 0.0f64..3.0, theta in 0.0f64..std::f64::consts::PI,
                               phi in 0.0f64..std::f64::consts::TAU) {
            let gamma = GammaProbe::new(1.01);
            let positron = LightConeMomentum::lepton_spherical(p, theta, phi);
            prop_assert!((positron.mass_shell_residual(1.0)).abs() < 1e-12 * (1.0 + p * p));
            if let Ok(pair) = solve_partner(&positron, &gamma) {
                let e = pair.electron;
                let scale = 1.0 + e.energy * e.energy;
                prop_assert!(e.mass_shell_residual(1.0).abs() < 1e-12 * scale);
                prop_assert!(e.p_minus > 0.0);
                // Q⁻ = 0, Q⊥ = 0.
                let k = gamma.momentum();
                prop_assert!((k.p_minus - positron.p_minus - e.p_minus).abs() < 1e-12);
                prop_assert_eq!(positron.p_perp[0] + e.p_perp[0], 0.0);
                prop_assert_eq!(positron.p_perp[1] + e.p_perp[1], 0.0);
                // Q⁰ from energies equals the light-cone reconstruction.
                prop_assert!((pair.q0 - pair.q_plus(&gamma)).abs() < 1e-12 * scale);
            }
        }

        #[test]
        fn laser_dot_reduces_to_light_cone(p in 0.0f64..3.0, theta in 0.0f64..3.14,
                                           phi in 0.0f64..6.28, k0 in 0.01f64..2.0) {
            let mom = LightConeMomentum::lepton_spherical(p, theta, phi);
            let k = [k0, 0.0, 0.0, k0];
            let full = minkowski_dot(k, mom.four_vector());
            prop_assert!((full - k0 * mom.p_minus).abs() < 1e-12 * (1.0 + k0 * mom.energy));
        }
    }
}
