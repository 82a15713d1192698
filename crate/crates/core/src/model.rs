//! Laser-dressed energy statistics and the Gaussian interference model
//! `R(D) ≈ 1 + exp(-(ΔE_L (L+D)/2)²) cos(⟨E_L⟩(L+D))`.
//!
//! `⟨E_L⟩` and `ΔE_L` can be taken either as the moments of `ρ(E_L)` or
//! from a Gaussian fitted to its histogram. The two differ when `ρ(E_L)` is
//! skewed; for `L + D` much larger than `1/ΔE_L` the cosine average is set
//! by the peak of the distribution, which the fit tracks and the mean does
//! not.

use crate::config::fingerprint;
use crate::error::{Error, Result};
use crate::probability::{MomentumGrid, PulseTable};
use crate::sweep::{RatioCurve, RatioMode};

pub const HISTOGRAM_BINS: usize = 200;

/// Nodes lighter than this fraction of the heaviest node do not widen the
/// histogram range (they still enter the moments).
const HISTOGRAM_SUPPORT_CUTOFF: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DressedEnergyStats {
    /// `ρ`-weighted mean of `E_L`.
    pub mean_el: f64,
    /// `ρ`-weighted standard deviation of `E_L`.
    pub width_el: f64,
    /// Total single-pulse probability the moments were weighted with.
    pub total: f64,
    /// `(bin centre, probability in bin)`.
    pub histogram: Vec<(f64, f64)>,
    pub bin_width: f64,
    /// Gaussian fitted to the histogram, if the fit converged.
    pub fit: Option<GaussianFit>,
}

/// `peak · exp(-(E - center)²/(2 sigma²))` in probability per unit `E_L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFit {
    pub center: f64,
    pub sigma: f64,
    pub peak: f64,
}

impl GaussianFit {
    pub fn eval(&self, e: f64) -> f64 {
        self.peak * (-((e - self.center) / self.sigma).powi(2) / 2.0).exp()
    }
}

/// Which estimate of `(⟨E_L⟩, ΔE_L)` feeds the ratio model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnergyEstimate {
    /// `ρ`-weighted mean and standard deviation.
    #[default]
    Moments,
    /// Centre and width of the Gaussian fitted to `ρ(E_L)`.
    GaussianFit,
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut x = [0.0; 3];
    for (k, xk) in x.iter_mut().enumerate() {
        let mut m = a;
        for r in 0..3 {
            m[r][k] = b[r];
        }
        *xk = det(m) / d;
    }
    Some(x)
}

/// Least-squares Gaussian through `(x, y)` samples. Starts from a
/// log-parabola through the points above half maximum, then runs damped
/// Gauss-Newton on all points.
pub fn fit_gaussian(points: &[(f64, f64)]) -> Option<GaussianFit> {
    let y_max = points.iter().map(|p| p.1).fold(0.0, f64::max);
    if !(y_max > 0.0) {
        return None;
    }
    let top: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.1 >= 0.5 * y_max).collect();
    let x_ref = top.iter().map(|p| p.0 * p.1).sum::<f64>() / top.iter().map(|p| p.1).sum::<f64>();
    let mut start = None;
    if top.len() >= 3 {
        // ln y = c0 + c1 u + c2 u², u = x - x_ref, weighted by y².
        let mut ata = [[0.0; 3]; 3];
        let mut atb = [0.0; 3];
        for &(x, y) in &top {
            let u = x - x_ref;
            let row = [1.0, u, u * u];
            let w = y * y;
            for r in 0..3 {
                for c in 0..3 {
                    ata[r][c] += w * row[r] * row[c];
                }
                atb[r] += w * row[r] * y.ln();
            }
        }
        if let Some([c0, c1, c2]) = solve3(ata, atb) {
            if c2 < 0.0 {
                let sigma = (-0.5 / c2).sqrt();
                let center = x_ref - c1 / (2.0 * c2);
                start = Some(GaussianFit {
                    center,
                    sigma,
                    peak: (c0 - c1 * c1 / (4.0 * c2)).exp(),
                });
            }
        }
    }
    let mut fit = start?;
    let sse = |g: &GaussianFit| points.iter().map(|&(x, y)| (y - g.eval(x)).powi(2)).sum::<f64>();
    let mut err = sse(&fit);
    for _ in 0..100 {
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for &(x, y) in points {
            let u = (x - fit.center) / fit.sigma;
            let g = (-u * u / 2.0).exp();
            let model = fit.peak * g;
            let jac = [g, model * u / fit.sigma, model * u * u / fit.sigma];
            for r in 0..3 {
                for c in 0..3 {
                    jtj[r][c] += jac[r] * jac[c];
                }
                jtr[r] += jac[r] * (y - model);
            }
        }
        let Some(step) = solve3(jtj, jtr) else { break };
        let mut scale = 1.0;
        let mut improved = false;
        while scale > 1e-6 {
            let trial = GaussianFit {
                peak: fit.peak + scale * step[0],
                center: fit.center + scale * step[1],
                sigma: (fit.sigma + scale * step[2]).abs(),
            };
            let e = sse(&trial);
            if e <= err {
                let converged = err - e <= 1e-14 * err;
                fit = trial;
                err = e;
                improved = !converged;
                break;
            }
            scale *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (fit.sigma > 0.0 && fit.center.is_finite()).then_some(fit)
}

impl DressedEnergyStats {
    /// Moments and histogram of `(E_L, weight)` samples.
    pub fn from_samples(samples: &[(f64, f64)]) -> Result<Self> {
        let total: f64 = samples.iter().map(|s| s.1).sum();
        if !(total > 0.0) {
            return Err(Error::validation("pulse", "single-pulse probability vanishes; E_L statistics undefined"));
        }
        let mean = samples.iter().map(|(e, w)| e * w).sum::<f64>() / total;
        let var = samples.iter().map(|(e, w)| w * (e - mean).powi(2)).sum::<f64>() / total;

        let w_max = samples.iter().map(|s| s.1).fold(0.0, f64::max);
        let support = samples.iter().filter(|s| s.1 >= HISTOGRAM_SUPPORT_CUTOFF * w_max);
        let (lo, hi) = support.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (e, _)| (lo.min(*e), hi.max(*e)));
        let (histogram, bin_width) = if hi > lo {
            let width = (hi - lo) / HISTOGRAM_BINS as f64;
            let mut mass = vec![0.0; HISTOGRAM_BINS];
            for &(e, w) in samples {
                if e < lo || e > hi {
                    continue;
                }
                let i = (((e - lo) / width) as usize).min(HISTOGRAM_BINS - 1);
                mass[i] += w;
            }
            let bins = mass
                .into_iter()
                .enumerate()
                .map(|(i, m)| (lo + (i as f64 + 0.5) * width, m))
                .collect();
            (bins, width)
        } else {
            (vec![(lo, total)], 0.0)
        };
        let fit = if bin_width > 0.0 {
            let density: Vec<(f64, f64)> = histogram.iter().map(|&(e, m)| (e, m / bin_width)).collect();
            fit_gaussian(&density)
        } else {
            None
        };
        Ok(DressedEnergyStats {
            mean_el: mean,
            width_el: var.max(0.0).sqrt(),
            total,
            histogram,
            bin_width,
            fit,
        })
    }

    /// `(⟨E_L⟩, ΔE_L)` under the chosen estimate. A failed fit falls back to
    /// the moments.
    pub fn parameters(&self, estimate: EnergyEstimate) -> (f64, f64) {
        match (estimate, self.fit) {
            (EnergyEstimate::GaussianFit, Some(fit)) => (fit.center, fit.sigma),
            _ => (self.mean_el, self.width_el),
        }
    }

    /// Mean and width recomputed from the binned distribution.
    pub fn histogram_moments(&self) -> (f64, f64) {
        let total: f64 = self.histogram.iter().map(|b| b.1).sum();
        let mean = self.histogram.iter().map(|(e, m)| e * m).sum::<f64>() / total;
        let var = self.histogram.iter().map(|(e, m)| m * (e - mean).powi(2)).sum::<f64>() / total;
        (mean, var.sqrt())
    }
}

/// `E_L` statistics of a single pulse, weighted with its probability density.
pub fn dressed_energy_stats(table: &PulseTable, grid: &MomentumGrid) -> Result<DressedEnergyStats> {
    let samples: Vec<(f64, f64)> = grid
        .nodes
        .iter()
        .zip(&table.amplitudes)
        .map(|(node, amp)| (amp.dressed_energy(node.pair.q0, &table.field), node.weight() * amp.norm_sqr()))
        .collect();
    DressedEnergyStats::from_samples(&samples)
}

/// Closed-form ratio curve of the Gaussian model.
pub fn gaussian_ratio_model(
    stats: &DressedEnergyStats,
    estimate: EnergyEstimate,
    length: f64,
    d_list: &[f64],
) -> Result<RatioCurve> {
    if !(length > 0.0) {
        return Err(Error::validation("length", format!("pulse length must be > 0, got {length}")));
    }
    let (mean, width) = stats.parameters(estimate);
    let ratio = d_list
        .iter()
        .map(|&d| {
            let s = length + d;
            1.0 + (-(width * s / 2.0).powi(2)).exp() * (mean * s).cos()
        })
        .collect();
    Ok(RatioCurve {
        d_values: d_list.to_vec(),
        ratio,
        p_double: Vec::new(),
        p_first: stats.total,
        p_second: stats.total,
        mode: RatioMode::Model,
        fingerprint: fingerprint(&format!(
            "model|{mean:e}|{width:e}|{length:e}|{d_list:?}"
        )),
    })
}

/// The model's envelope `exp(-(ΔE_L (L+D)/2)²)`.
pub fn model_envelope(stats: &DressedEnergyStats, estimate: EnergyEstimate, length: f64, d: f64) -> f64 {
    let width = stats.parameters(estimate).1;
    (-(width * (length + d) / 2.0).powi(2)).exp()
}
