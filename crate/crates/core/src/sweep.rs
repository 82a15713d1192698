//! Delay sweeps, pulse-order exchange and the order sum rule.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::amplitude::{dynamical_phase, AmplitudeParts};
use crate::config::fingerprint;
use crate::error::{Error, Result};
use crate::extrema::{find_extrema, global_maximum, global_minimum, Extremum};
use crate::kinematics::GammaProbe;
use crate::probability::{MomentumGrid, PulseTable, Simulator};
use crate::pulse::PulseSpec;

/// Two strictly separated pulses: the first starts at `x⁻ = 0`, the second
/// a gap `D` after the first one ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublePulseConfig {
    pub first: PulseSpec,
    pub second: PulseSpec,
    pub gap: f64,
    pub gamma: GammaProbe,
}

impl DoublePulseConfig {
    pub fn new(first: PulseSpec, second: PulseSpec, gap: f64, gamma: GammaProbe) -> Self {
        let first = first.with_delta(0.0);
        let delta = second.k0() * (first.length() + gap);
        DoublePulseConfig {
            first,
            second: second.with_delta(delta),
            gap,
            gamma,
        }
    }

    pub fn with_gap(&self, gap: f64) -> Self {
        Self::new(self.first, self.second, gap, self.gamma)
    }

    /// Front-to-front separation `Δ = δ₂/k₂⁰ = L₁ + D`.
    pub fn separation(&self) -> f64 {
        self.first.length() + self.gap
    }

    /// Both pulses carry the same parameters (positions aside).
    pub fn is_identical(&self) -> bool {
        self.first.with_delta(0.0) == self.second.with_delta(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        self.first.validate()?;
        self.second.validate()?;
        if !(self.gap >= 0.0) {
            return Err(Error::validation("delay", format!("gap must be >= 0, got {}", self.gap)));
        }
        Ok(())
    }
}

/// Swaps the pulse order, keeping the gap.
pub fn exchange_order(config: &DoublePulseConfig) -> DoublePulseConfig {
    DoublePulseConfig::new(config.second, config.first, config.gap, config.gamma)
}

/// Per-node quantities from which any delay is evaluated cheaply:
/// `P(D) = Σ_n [A_n + 2 Re(B_n e^{-iφ_n(D)})]` with
/// `A_n = w_n Σ_λ(|F₁|² + |F₂|²)`, `B_n = w_n Σ_λ F₁* F₂`.
#[derive(Debug, Clone)]
pub struct InterferenceCache {
    pub first: Arc<PulseTable>,
    pub second: Arc<PulseTable>,
    pub l1: f64,
    pub p_first: f64,
    pub p_second: f64,
    weight: Vec<f64>,
    direct: Vec<f64>,
    cross: Vec<Complex64>,
    h1_star: Vec<f64>,
    q0: Vec<f64>,
}

impl InterferenceCache {
    pub fn build(grid: &MomentumGrid, first: &Arc<PulseTable>, second: &Arc<PulseTable>) -> Self {
        let n = grid.nodes.len();
        let mut cache = InterferenceCache {
            first: Arc::clone(first),
            second: Arc::clone(second),
            l1: first.field.length,
            p_first: first.total(grid),
            p_second: second.total(grid),
            weight: Vec::with_capacity(n),
            direct: Vec::with_capacity(n),
            cross: Vec::with_capacity(n),
            h1_star: Vec::with_capacity(n),
            q0: Vec::with_capacity(n),
        };
        for (i, node) in grid.nodes.iter().enumerate() {
            let (a, b) = (&first.amplitudes[i], &second.amplitudes[i]);
            let w = node.weight();
            let cross: Complex64 = (0..2).map(|m| a.f[m].conj() * b.f[m]).sum();
            cache.weight.push(w);
            cache.direct.push(w * (a.norm_sqr() + b.norm_sqr()));
            cache.cross.push(cross * w);
            cache.h1_star.push(a.h_star);
            cache.q0.push(node.pair.q0);
        }
        cache
    }

    pub fn len(&self) -> usize {
        self.weight.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weight.is_empty()
    }

    /// Approximate memory held by the per-node arrays, in bytes.
    pub fn memory_bytes(&self) -> usize {
        self.len() * (4 * std::mem::size_of::<f64>() + std::mem::size_of::<Complex64>())
    }

    pub fn phase(&self, node: usize, gap: f64) -> f64 {
        dynamical_phase(self.h1_star[node], self.q0[node], self.l1, gap)
    }

    /// Total double-pulse probability from the cached node sums.
    pub fn total(&self, gap: f64) -> f64 {
        let mut sum = 0.0;
        for n in 0..self.len() {
            let (s, c) = self.phase(n, gap).sin_cos();
            let b = self.cross[n];
            sum += self.direct[n] + 2.0 * (b.re * c + b.im * s);
        }
        sum
    }

    /// Same total, recombining the amplitudes node by node.
    pub fn total_uncached(&self, gap: f64) -> f64 {
        (0..self.len()).map(|n| self.weight[n] * self.parts(n, gap).intensity()).sum()
    }

    pub fn parts(&self, node: usize, gap: f64) -> AmplitudeParts {
        AmplitudeParts::from_pulses(
            &self.first.amplitudes[node],
            &self.second.amplitudes[node],
            self.q0[node],
            self.l1,
            gap,
        )
    }

    /// `d³P/(dp dΩ)` at one grid node.
    pub fn differential(&self, grid: &MomentumGrid, node: usize, gap: f64) -> f64 {
        grid.nodes[node].density_factor * self.parts(node, gap).intensity()
    }

    pub fn spectrum(&self, grid: &MomentumGrid, gap: f64) -> Vec<f64> {
        let values: Vec<f64> = (0..self.len()).map(|n| self.parts(n, gap).intensity()).collect();
        grid.radial_density(&values)
    }

    pub fn ratio(&self, gap: f64, mode: RatioMode) -> f64 {
        ratio_of(self.total(gap), self.p_first, self.p_second, mode)
    }
}

fn ratio_of(p_double: f64, p_first: f64, p_second: f64, mode: RatioMode) -> f64 {
    match mode {
        RatioMode::Identical => p_double / (2.0 * p_first),
        RatioMode::Distinct | RatioMode::Model => p_double / (p_first + p_second),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioMode {
    /// `R = P_double / 2P_single`.
    Identical,
    /// `R = P_AB / (P_A + P_B)`.
    Distinct,
    /// Closed-form model curve; no probabilities attached.
    Model,
}

/// `R(D)` together with the probabilities it was formed from.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioCurve {
    pub d_values: Vec<f64>,
    pub ratio: Vec<f64>,
    /// Empty for model curves.
    pub p_double: Vec<f64>,
    pub p_first: f64,
    pub p_second: f64,
    pub mode: RatioMode,
    pub fingerprint: String,
}

impl RatioCurve {
    pub fn extrema(&self) -> Vec<Extremum> {
        find_extrema(&self.d_values, &self.ratio)
    }

    pub fn maximum(&self) -> Extremum {
        global_maximum(&self.d_values, &self.ratio)
    }

    pub fn minimum(&self) -> Extremum {
        global_minimum(&self.d_values, &self.ratio)
    }

    /// Linear interpolation in `D`.
    pub fn at(&self, d: f64) -> f64 {
        let x = &self.d_values;
        let i = x.iter().position(|&v| v >= d).unwrap_or(x.len() - 1).max(1);
        let t = (d - x[i - 1]) / (x[i] - x[i - 1]);
        self.ratio[i - 1] * (1.0 - t) + self.ratio[i] * t
    }

    /// Largest `|R - 1|` over `D ∈ [lo, hi]`.
    pub fn amplitude_in(&self, lo: f64, hi: f64) -> f64 {
        self.d_values
            .iter()
            .zip(&self.ratio)
            .filter(|(&d, _)| d >= lo && d <= hi)
            .map(|(_, r)| (r - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Mean distance between consecutive maxima (or minima), the
    /// oscillation period of the curve.
    pub fn period(&self) -> Option<f64> {
        let ex = self.extrema();
        let mut gaps = Vec::new();
        for w in ex.windows(3) {
            if w[0].kind == w[2].kind {
                gaps.push(w[2].x - w[0].x);
            }
        }
        if gaps.is_empty() {
            None
        } else {
            Some(gaps.iter().sum::<f64>() / gaps.len() as f64)
        }
    }
}

fn check_delays(d_list: &[f64]) -> Result<()> {
    if d_list.is_empty() {
        return Err(Error::validation("delay", "no delay values"));
    }
    if let Some(d) = d_list.iter().find(|&&d| !(d >= 0.0)) {
        return Err(Error::validation("delay", format!("gap must be >= 0, got {d}")));
    }
    Ok(())
}

impl InterferenceCache {
    pub fn sweep(&self, d_list: &[f64], mode: RatioMode, fingerprint: String) -> RatioCurve {
        let p_double: Vec<f64> = d_list.par_iter().map(|&d| self.total(d)).collect();
        RatioCurve {
            d_values: d_list.to_vec(),
            ratio: p_double.iter().map(|&p| ratio_of(p, self.p_first, self.p_second, mode)).collect(),
            p_double,
            p_first: self.p_first,
            p_second: self.p_second,
            mode,
            fingerprint,
        }
    }
}

/// `R(D)` over the given gaps, reusing one amplitude pass for all of them.
pub fn sweep_delay(config: &DoublePulseConfig, d_list: &[f64], sim: &Simulator) -> Result<RatioCurve> {
    config.validate()?;
    check_delays(d_list)?;
    let cache = sim.interference(config)?;
    let mode = if config.is_identical() {
        RatioMode::Identical
    } else {
        RatioMode::Distinct
    };
    let print = fingerprint(&format!(
        "sweep|{:?}|{:?}|{:?}|{d_list:?}",
        config.with_gap(0.0),
        sim.grid.spec,
        sim.quad
    ));
    Ok(cache.sweep(d_list, mode, print))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderSumCheck {
    pub p_ab: f64,
    pub p_ba: f64,
    pub p_a: f64,
    pub p_b: f64,
    /// `|½(P_AB + P_BA) - (P_A + P_B)| / (P_A + P_B)`.
    pub residual: f64,
}

/// Compares both pulse orders at one gap with the sum of single pulses.
pub fn order_sum_check(config: &DoublePulseConfig, gap: f64, sim: &Simulator) -> Result<OrderSumCheck> {
    let ab = config.with_gap(gap);
    ab.validate()?;
    let forward = sim.interference(&ab)?;
    let backward = sim.interference(&exchange_order(&ab))?;
    let (p_ab, p_ba) = (forward.total(gap), backward.total(gap));
    let (p_a, p_b) = (forward.p_first, forward.p_second);
    let sum = p_a + p_b;
    let residual = if sum == 0.0 {
        0.0
    } else {
        (0.5 * (p_ab + p_ba) - sum).abs() / sum
    };
    Ok(OrderSumCheck {
        p_ab,
        p_ba,
        p_a,
        p_b,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitude::QuadConfig;
    use crate::probability::GridSpec;
    use std::f64::consts::PI;

    fn grid() -> GridSpec {
        GridSpec {
            radial: 100,
            polar: 48,
            azimuthal: 16,
            p_max: 2.5,
        }
    }

    fn pulse_a() -> PulseSpec {
        PulseSpec::new(0.1, 1.01, 4, 0.0)
    }

    fn pulse_b() -> PulseSpec {
        PulseSpec::new(0.2, 0.808, 3, PI / 2.0)
    }

    #[test]
    fn second_pulse_is_strictly_separated() {
        let c = DoublePulseConfig::new(pulse_a(), pulse_b(), 1.5, GammaProbe::new(1.01));
        assert_eq!(c.first.delta, 0.0);
        assert!((c.second.delta / c.second.k0() - (pulse_a().length() + 1.5)).abs() < 1e-12);
        assert!((c.separation() - (pulse_a().length() + 1.5)).abs() < 1e-15);
    }

    #[test]
    fn exchange_is_an_involution() {
        let c = DoublePulseConfig::new(pulse_a(), pulse_b(), 0.75, GammaProbe::new(1.01));
        let swapped = exchange_order(&c);
        assert_eq!(swapped.first.with_delta(0.0), pulse_b());
        assert!((swapped.second.delta / swapped.second.k0() - (pulse_b().length() + 0.75)).abs() < 1e-12);
        assert_eq!(exchange_order(&swapped), c);
    }

    #[test]
    fn cached_sweep_matches_recombination() {
        let sim = Simulator::new(grid(), GammaProbe::new(1.01), QuadConfig::default()).unwrap();
        let config = DoublePulseConfig::new(pulse_a(), pulse_b(), 0.0, GammaProbe::new(1.01));
        let cache = sim.interference(&config).unwrap();
        for d in [0.0, 0.75, 3.3, 12.0] {
            let (fast, slow) = (cache.total(d), cache.total_uncached(d));
            assert!((fast - slow).abs() <= 1e-12 * slow, "D = {d}: {fast} vs {slow}");
        }
    }

    #[test]
    fn identical_mode_residual_equals_ratio_offset() {
        let sim = Simulator::new(grid(), GammaProbe::new(1.01), QuadConfig::default()).unwrap();
        let config = DoublePulseConfig::new(pulse_a(), pulse_a(), 0.0, GammaProbe::new(1.01));
        let curve = sweep_delay(&config, &[1.4], &sim).unwrap();
        assert_eq!(curve.mode, RatioMode::Identical);
        let check = order_sum_check(&config, 1.4, &sim).unwrap();
        assert!((check.residual - (curve.ratio[0] - 1.0).abs()).abs() < 1e-12);
        assert!(curve.ratio[0] > 0.0 && curve.ratio[0] <= 2.0);
    }

    #[test]
    fn zero_fields_have_zero_residual() {
        let sim = Simulator::new(grid(), GammaProbe::new(1.01), QuadConfig::default()).unwrap();
        let off = pulse_a().with_xi(0.0);
        let config = DoublePulseConfig::new(off, pulse_b().with_xi(0.0), 0.0, GammaProbe::new(1.01));
        let check = order_sum_check(&config, 2.0, &sim).unwrap();
        assert_eq!((check.p_ab, check.p_ba, check.residual), (0.0, 0.0, 0.0));
    }

    #[test]
    fn invalid_delays_are_rejected() {
        let sim = Simulator::new(grid(), GammaProbe::new(1.01), QuadConfig::default()).unwrap();
        let config = DoublePulseConfig::new(pulse_a(), pulse_a(), 0.0, GammaProbe::new(1.01));
        assert!(sweep_delay(&config, &[], &sim).is_err());
        assert!(sweep_delay(&config, &[1.0, -0.5], &sim).is_err());
    }

    #[test]
    fn ratio_curve_helpers() {
        let d: Vec<f64> = (0..151).map(|i| 0.1 * i as f64).collect();
        let curve = RatioCurve {
            ratio: d.iter().map(|x| 1.0 + 0.1 * (x * 1.1f64).cos() * (-0.05 * x).exp()).collect(),
            d_values: d,
            p_double: vec![],
            p_first: 1.0,
            p_second: 1.0,
            mode: RatioMode::Model,
            fingerprint: String::new(),
        };
        let period = curve.period().unwrap();
        assert!((period - 2.0 * PI / 1.1).abs() < 0.05);
        assert!((curve.at(0.05) - 0.5 * (curve.ratio[0] + curve.ratio[1])).abs() < 1e-15);
        assert!(curve.amplitude_in(0.0, 1.0) > curve.amplitude_in(10.0, 15.0));
    }
}
