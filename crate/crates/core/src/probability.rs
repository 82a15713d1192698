//! Momentum grids, differential probabilities, energy spectra and totals.
//!
//! The positron momentum is integrated in spherical coordinates with the
//! polar axis along the laser. For every radial node the polar range is cut
//! at the phase-space boundary `p₊⁻ < k_γ⁻`, so every grid node is
//! kinematically open. The azimuthal rule is a uniform midpoint rule whose
//! nodes come in mirror pairs `φ ↔ -φ`; since the probability is even under
//! reflection across the polarization plane only one node of each pair is
//! evaluated.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::amplitude::{AmplitudeParts, PulseAmplitude, QuadConfig};
use crate::config::fingerprint;
use crate::constants::positron_charge;
use crate::error::{Error, Result};
use crate::extrema::{find_extrema, global_maximum, Extremum};
use crate::kinematics::{solve_partner, GammaProbe, LightConeMomentum, PairKinematics};
use crate::pulse::{PulseField, PulseSpec};
use crate::quadrature::gauss_legendre_on;
use crate::sweep::{DoublePulseConfig, InterferenceCache};

/// Node counts and extent of the positron momentum grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub radial: usize,
    pub polar: usize,
    pub azimuthal: usize,
    pub p_max: f64,
}

impl GridSpec {
    pub const DEFAULT_RADIAL: usize = 200;
    pub const DEFAULT_POLAR: usize = 96;
    pub const DEFAULT_AZIMUTHAL: usize = 32;

    /// Default grid for pulses up to the given field strength.
    pub fn for_max_xi(max_xi: f64) -> Self {
        GridSpec {
            radial: Self::DEFAULT_RADIAL,
            polar: Self::DEFAULT_POLAR,
            azimuthal: Self::DEFAULT_AZIMUTHAL,
            p_max: if max_xi <= 0.2 { 2.5 } else { 4.0 },
        }
    }

    /// Multiplies all node counts; the azimuthal count stays even.
    pub fn scaled(self, factor: f64) -> Self {
        let scale = |n: usize| ((n as f64 * factor).round() as usize).max(2);
        GridSpec {
            radial: scale(self.radial),
            polar: scale(self.polar),
            azimuthal: (scale(self.azimuthal) / 2 * 2).max(2),
            p_max: self.p_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let min = |name: &str, n: usize, default: usize| {
            if n < default / 2 {
                Err(Error::validation(
                    format!("grid.{name}"),
                    format!("{n} nodes is below the minimum of {}", default / 2),
                ))
            } else {
                Ok(())
            }
        };
        min("radial", self.radial, Self::DEFAULT_RADIAL)?;
        min("polar", self.polar, Self::DEFAULT_POLAR)?;
        min("azimuthal", self.azimuthal, Self::DEFAULT_AZIMUTHAL)?;
        if self.azimuthal % 2 != 0 {
            return Err(Error::validation("grid.azimuthal", "must be even"));
        }
        if !(self.p_max > 0.0) {
            return Err(Error::validation("grid.p_max", "must be > 0"));
        }
        Ok(())
    }
}

/// One positron momentum node together with its resolved pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridNode {
    pub radial_index: usize,
    pub p: f64,
    pub theta: f64,
    pub phi_az: f64,
    /// Quadrature weight of the `dp dΩ` measure (mirror node included).
    pub measure: f64,
    /// `d³P/(dp dΩ)` per unit `Σ_λ|F₁ + F₂e^{-iφ}|²`.
    pub density_factor: f64,
    pub pair: PairKinematics,
}

impl GridNode {
    /// Weight converting `Σ_λ|…|²` at this node into probability.
    pub fn weight(&self) -> f64 {
        self.measure * self.density_factor
    }
}

/// Product grid over the open positron phase space.
#[derive(Debug, Clone)]
pub struct MomentumGrid {
    pub spec: GridSpec,
    pub gamma: GammaProbe,
    /// Radial nodes and their weights.
    pub radial: Vec<(f64, f64)>,
    pub nodes: Vec<GridNode>,
}

/// `d³P/(dp dΩ) / Σ_λ|…|² = e²/(16π²ω_γ) · p²/(E₊ (k_γ⁻ - p₊⁻))`.
pub fn density_factor(pair: &PairKinematics, gamma: &GammaProbe) -> f64 {
    let e2 = positron_charge().powi(2);
    let p = &pair.positron;
    let p2 = p.perp_squared() + p.p_par * p.p_par;
    e2 / (16.0 * PI * PI * gamma.omega) * p2 / (p.energy * (gamma.k_minus() - p.p_minus))
}

/// Largest polar angle with `p⁻ = E - p cos θ < k_γ⁻`, if any.
fn polar_limit(p: f64, gamma: &GammaProbe) -> Option<f64> {
    let energy = (1.0 + p * p).sqrt();
    let c_min = (energy - gamma.k_minus()) / p;
    if c_min >= 1.0 {
        None
    } else if c_min <= -1.0 {
        Some(PI)
    } else {
        Some(c_min.acos())
    }
}

impl MomentumGrid {
    pub fn new(spec: GridSpec, gamma: GammaProbe) -> Result<Self> {
        spec.validate()?;
        let radial = gauss_legendre_on(spec.radial, 0.0, spec.p_max);
        let dphi = TAU / spec.azimuthal as f64;
        let half = spec.azimuthal / 2;
        let mut nodes = Vec::with_capacity(spec.radial * spec.polar * half);
        for (radial_index, &(p, wp)) in radial.iter().enumerate() {
            let Some(theta_max) = polar_limit(p, &gamma) else {
                continue;
            };
            for (theta, wt) in gauss_legendre_on(spec.polar, 0.0, theta_max) {
                for k in 0..half {
                    let phi_az = (k as f64 + 0.5) * dphi;
                    let positron = LightConeMomentum::lepton_spherical(p, theta, phi_az);
                    let pair = match solve_partner(&positron, &gamma) {
                        Ok(pair) => pair,
                        Err(Error::PhaseSpaceClosed { .. }) => continue,
                        Err(e) => return Err(e),
                    };
                    nodes.push(GridNode {
                        radial_index,
                        p,
                        theta,
                        phi_az,
                        measure: wp * wt * theta.sin() * 2.0 * dphi,
                        density_factor: density_factor(&pair, &gamma),
                        pair,
                    });
                }
            }
        }
        Ok(MomentumGrid {
            spec,
            gamma,
            radial,
            nodes,
        })
    }

    pub fn p_values(&self) -> Vec<f64> {
        self.radial.iter().map(|&(p, _)| p).collect()
    }

    /// `Σ measure·p²`, the grid's estimate of the open phase-space volume.
    pub fn volume(&self) -> f64 {
        self.nodes.iter().map(|n| n.measure * n.p * n.p).sum()
    }

    /// Smallest gap between neighbouring radial nodes around `p`.
    pub fn radial_spacing_near(&self, p: f64) -> f64 {
        let i = self
            .radial
            .iter()
            .position(|&(x, _)| x >= p)
            .unwrap_or(self.radial.len() - 1)
            .max(1);
        self.radial[i].0 - self.radial[i - 1].0
    }

    /// Deterministic ordered sum of `values[n]·weight_n / w_p` per radial node.
    pub(crate) fn radial_density(&self, values: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.radial.len()];
        for (node, v) in self.nodes.iter().zip(values) {
            out[node.radial_index] += node.weight() * v;
        }
        for (o, &(_, wp)) in out.iter_mut().zip(&self.radial) {
            *o /= wp;
        }
        out
    }
}

/// `d³P/(dp₊ d²Ω)` for given amplitudes; the single-pulse limit has `F₂ = 0`.
pub fn differential_probability(parts: &AmplitudeParts, pair: &PairKinematics, gamma: &GammaProbe) -> f64 {
    density_factor(pair, gamma) * parts.intensity()
}

/// Amplitudes of one pulse at every grid node.
#[derive(Debug)]
pub struct PulseTable {
    pub field: PulseField,
    pub amplitudes: Vec<PulseAmplitude>,
    /// Nodes excluded because the amplitude could not be formed there
    /// (collinear leptons, unresolvable oscillation); they carry zero weight.
    pub dropped: usize,
}

impl PulseTable {
    pub fn build(spec: &PulseSpec, grid: &MomentumGrid, quad: &QuadConfig) -> Result<Self> {
        let field = PulseField::new(spec)?;
        let results: Vec<Option<PulseAmplitude>> = grid
            .nodes
            .par_iter()
            .map(|node| PulseAmplitude::evaluate(&node.pair, &field, &grid.gamma, quad).ok())
            .collect();
        let dropped = results.iter().filter(|r| r.is_none()).count();
        let amplitudes = results.into_iter().map(|r| r.unwrap_or_else(PulseAmplitude::zero)).collect();
        Ok(PulseTable {
            field,
            amplitudes,
            dropped,
        })
    }

    pub fn total(&self, grid: &MomentumGrid) -> f64 {
        grid.nodes
            .iter()
            .zip(&self.amplitudes)
            .map(|(n, a)| n.weight() * a.norm_sqr())
            .sum()
    }

    pub fn spectrum(&self, grid: &MomentumGrid) -> Vec<f64> {
        let values: Vec<f64> = self.amplitudes.iter().map(|a| a.norm_sqr()).collect();
        grid.radial_density(&values)
    }
}

/// Energy spectrum `dP/dp₊` on the radial nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub p_values: Vec<f64>,
    pub dp_dp: Vec<f64>,
    pub fingerprint: String,
}

impl SpectrumTable {
    pub fn peak(&self) -> Extremum {
        global_maximum(&self.p_values, &self.dp_dp)
    }

    pub fn extrema(&self) -> Vec<Extremum> {
        find_extrema(&self.p_values, &self.dp_dp)
    }

    /// Linear interpolation between radial nodes.
    pub fn at(&self, p: f64) -> f64 {
        let x = &self.p_values;
        match x.iter().position(|&v| v >= p) {
            None => *self.dp_dp.last().unwrap(),
            Some(0) => self.dp_dp[0] * p / x[0],
            Some(i) => {
                let t = (p - x[i - 1]) / (x[i] - x[i - 1]);
                self.dp_dp[i - 1] * (1.0 - t) + self.dp_dp[i] * t
            }
        }
    }
}

/// What is being shot at by the gamma quantum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseSequence {
    Single(PulseSpec),
    Double(DoublePulseConfig),
}

impl PulseSequence {
    pub fn max_xi(&self) -> f64 {
        match self {
            PulseSequence::Single(p) => p.xi,
            PulseSequence::Double(c) => c.first.xi.max(c.second.xi),
        }
    }

    fn gamma(&self) -> Option<GammaProbe> {
        match self {
            PulseSequence::Single(_) => None,
            PulseSequence::Double(c) => Some(c.gamma),
        }
    }
}

type PulseKey = (u64, u64, u32, u64);

fn pulse_key(spec: &PulseSpec) -> PulseKey {
    (spec.xi.to_bits(), spec.omega.to_bits(), spec.n_cycles, spec.cep.to_bits())
}

/// A momentum grid plus a cache of per-pulse amplitude tables.
///
/// Amplitudes of a pulse do not depend on its position in the sequence, so
/// every configuration built from the same pulses shares one table.
#[derive(Debug)]
pub struct Simulator {
    pub grid: MomentumGrid,
    pub quad: QuadConfig,
    tables: Mutex<HashMap<PulseKey, Arc<PulseTable>>>,
}

impl Simulator {
    pub fn new(grid: GridSpec, gamma: GammaProbe, quad: QuadConfig) -> Result<Self> {
        Ok(Simulator {
            grid: MomentumGrid::new(grid, gamma)?,
            quad,
            tables: Mutex::new(HashMap::new()),
        })
    }

    pub fn gamma(&self) -> &GammaProbe {
        &self.grid.gamma
    }

    pub fn pulse(&self, spec: &PulseSpec) -> Result<Arc<PulseTable>> {
        let key = pulse_key(spec);
        if let Some(t) = self.tables.lock().unwrap().get(&key) {
            return Ok(Arc::clone(t));
        }
        let table = Arc::new(PulseTable::build(spec, &self.grid, &self.quad)?);
        self.tables.lock().unwrap().insert(key, Arc::clone(&table));
        Ok(table)
    }

    pub fn interference(&self, config: &DoublePulseConfig) -> Result<InterferenceCache> {
        self.check_gamma(&config.gamma)?;
        let first = self.pulse(&config.first)?;
        let second = self.pulse(&config.second)?;
        Ok(InterferenceCache::build(&self.grid, &first, &second))
    }

    fn check_gamma(&self, gamma: &GammaProbe) -> Result<()> {
        if gamma != self.gamma() {
            return Err(Error::validation(
                "gamma.omega",
                format!("configuration uses {} but the grid was built for {}", gamma.omega, self.gamma().omega),
            ));
        }
        Ok(())
    }

    fn fingerprint(&self, seq: &PulseSequence) -> String {
        fingerprint(&format!("{seq:?}|{:?}|{:?}|{:?}", self.grid.spec, self.grid.gamma, self.quad))
    }

    pub fn spectrum(&self, seq: &PulseSequence) -> Result<SpectrumTable> {
        let dp_dp = match seq {
            PulseSequence::Single(spec) => self.pulse(spec)?.spectrum(&self.grid),
            PulseSequence::Double(config) => self.interference(config)?.spectrum(&self.grid, config.gap),
        };
        Ok(SpectrumTable {
            p_values: self.grid.p_values(),
            dp_dp,
            fingerprint: self.fingerprint(seq),
        })
    }

    pub fn total(&self, seq: &PulseSequence) -> Result<f64> {
        match seq {
            PulseSequence::Single(spec) => Ok(self.pulse(spec)?.total(&self.grid)),
            PulseSequence::Double(config) => Ok(self.interference(config)?.total(config.gap)),
        }
    }

    /// Same grid with the given spec, sharing nothing with `self`.
    pub fn with_grid(&self, grid: GridSpec) -> Result<Simulator> {
        Simulator::new(grid, *self.gamma(), self.quad)
    }

    /// Recomputes the spectrum with twice the angular nodes and fails if any
    /// extremum moves by more than the local radial node spacing.
    pub fn verify_spectrum(&self, seq: &PulseSequence) -> Result<SpectrumTable> {
        let coarse = self.spectrum(seq)?;
        let spec = self.grid.spec;
        let fine_grid = GridSpec {
            polar: 2 * spec.polar,
            azimuthal: 2 * spec.azimuthal,
            ..spec
        };
        let fine = self.with_grid(fine_grid)?.spectrum(seq)?;
        let (a, b) = (coarse.extrema(), fine.extrema());
        let peaks = |ex: &[Extremum]| ex.iter().map(|e| e.x).collect::<Vec<_>>();
        let (pa, pb) = (peaks(&a), peaks(&b));
        if pa.len() != pb.len() {
            return Err(Error::GridUnconverged(format!(
                "spectrum has {} extrema on the base grid but {} with doubled angular nodes",
                pa.len(),
                pb.len()
            )));
        }
        for (x, y) in pa.iter().zip(&pb) {
            let tol = self.grid.radial_spacing_near(*x);
            if (x - y).abs() > tol {
                return Err(Error::GridUnconverged(format!(
                    "spectral extremum moved from p = {x:.4} to {y:.4} (spacing {tol:.4})"
                )));
            }
        }
        Ok(coarse)
    }

    /// Recomputes the total on a grid with all node counts doubled and fails
    /// if it moves by more than `tolerance` (relative).
    pub fn verify_total(&self, seq: &PulseSequence, tolerance: f64) -> Result<f64> {
        let coarse = self.total(seq)?;
        let fine = self.with_grid(self.grid.spec.scaled(2.0))?.total(seq)?;
        let rel = (coarse - fine).abs() / fine.abs().max(f64::MIN_POSITIVE);
        if fine != 0.0 && rel > tolerance {
            return Err(Error::GridUnconverged(format!(
                "total probability changed by {:.3}% when doubling the grid",
                100.0 * rel
            )));
        }
        Ok(coarse)
    }
}

/// `dP/dp₊` for a single pulse or a pulse pair.
pub fn energy_spectrum(seq: &PulseSequence, sim: &Simulator) -> Result<SpectrumTable> {
    if let Some(g) = seq.gamma() {
        sim.check_gamma(&g)?;
    }
    sim.spectrum(seq)
}

/// Total pair-creation probability.
pub fn total_probability(seq: &PulseSequence, sim: &Simulator) -> Result<f64> {
    if let Some(g) = seq.gamma() {
        sim.check_gamma(&g)?;
    }
    sim.total(seq)
}
