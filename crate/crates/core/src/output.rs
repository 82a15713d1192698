//! CSV emission. Numbers are written with nine significant digits and each
//! file starts with a `#` line naming the producing configuration, so equal
//! inputs give byte-identical files.

use std::fmt::Write as _;

use crate::model::DressedEnergyStats;
use crate::probability::SpectrumTable;
use crate::sweep::{OrderSumCheck, RatioCurve};

pub fn format_number(x: f64) -> String {
    format!("{x:.8e}")
}

fn header(kind: &str, fingerprint: &str) -> String {
    format!("# bwdelay {kind} fingerprint={fingerprint}\n")
}

fn row(out: &mut String, values: &[f64]) {
    let cells: Vec<String> = values.iter().map(|v| format_number(*v)).collect();
    let _ = writeln!(out, "{}", cells.join(","));
}

/// Columns `D_lambda_e,ratio,P_double,P_first_single,P_second_single`.
pub fn ratio_csv(curve: &RatioCurve, fingerprint: &str) -> String {
    let mut out = header("ratio", fingerprint);
    out.push_str("D_lambda_e,ratio,P_double,P_first_single,P_second_single\n");
    for (i, (&d, &r)) in curve.d_values.iter().zip(&curve.ratio).enumerate() {
        let p = curve.p_double.get(i).copied().unwrap_or(f64::NAN);
        row(&mut out, &[d, r, p, curve.p_first, curve.p_second]);
    }
    out
}

/// One column of `dP/dp` per spectrum, all on the first spectrum's `p` nodes.
pub fn spectrum_csv(columns: &[(String, &SpectrumTable)], fingerprint: &str) -> String {
    let mut out = header("spectrum", fingerprint);
    let mut names = vec!["p_over_m".to_string()];
    names.extend(columns.iter().map(|(n, _)| n.clone()));
    let _ = writeln!(out, "{}", names.join(","));
    let Some((_, base)) = columns.first() else {
        return out;
    };
    for (i, &p) in base.p_values.iter().enumerate() {
        let mut values = vec![p];
        values.extend(columns.iter().map(|(_, s)| s.dp_dp[i]));
        row(&mut out, &values);
    }
    out
}

/// Summary moments followed by the `E_L` histogram.
pub fn model_stats_csv(stats: &DressedEnergyStats, fingerprint: &str) -> String {
    let mut out = header("model", fingerprint);
    let _ = writeln!(out, "# mean_E_L={}", format_number(stats.mean_el));
    let _ = writeln!(out, "# width_E_L={}", format_number(stats.width_el));
    let _ = writeln!(out, "# total={}", format_number(stats.total));
    out.push_str("E_L,probability\n");
    for &(e, m) in &stats.histogram {
        row(&mut out, &[e, m]);
    }
    out
}

/// Columns `D_lambda_e,P_ab,P_ba,P_a,P_b,residual`.
pub fn exchange_csv(rows: &[(f64, OrderSumCheck)], fingerprint: &str) -> String {
    let mut out = header("exchange", fingerprint);
    out.push_str("D_lambda_e,P_ab,P_ba,P_a,P_b,residual\n");
    for (d, c) in rows {
        row(&mut out, &[*d, c.p_ab, c.p_ba, c.p_a, c.p_b, c.residual]);
    }
    out
}

/// Single-value summary, e.g. a total probability.
pub fn scalar_csv(kind: &str, names: &[&str], values: &[f64], fingerprint: &str) -> String {
    let mut out = header(kind, fingerprint);
    let _ = writeln!(out, "{}", names.join(","));
    row(&mut out, values);
    out
}
