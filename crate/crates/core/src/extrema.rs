//! Local extrema of sampled curves with parabolic refinement.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Maximum,
    Minimum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub kind: ExtremumKind,
    pub x: f64,
    pub value: f64,
}

/// Vertex of the parabola through three points with distinct abscissae.
pub fn parabolic_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let (a, b) = (x[1] - x[0], x[1] - x[2]);
    let (fa, fb) = (y[1] - y[2], y[1] - y[0]);
    let den = a * fa - b * fb;
    if den == 0.0 {
        return (x[1], y[1]);
    }
    let xv = x[1] - 0.5 * (a * a * fa - b * b * fb) / den;
    let xv = xv.clamp(x[0].min(x[2]), x[0].max(x[2]));
    // Lagrange form evaluated at the vertex.
    let l0 = (xv - x[1]) * (xv - x[2]) / ((x[0] - x[1]) * (x[0] - x[2]));
    let l1 = (xv - x[0]) * (xv - x[2]) / ((x[1] - x[0]) * (x[1] - x[2]));
    let l2 = (xv - x[0]) * (xv - x[1]) / ((x[2] - x[0]) * (x[2] - x[1]));
    (xv, l0 * y[0] + l1 * y[1] + l2 * y[2])
}

/// Interior local extrema of `y(x)`, `x` strictly increasing.
pub fn find_extrema(x: &[f64], y: &[f64]) -> Vec<Extremum> {
    assert_eq!(x.len(), y.len());
    let mut out = Vec::new();
    for i in 1..x.len().saturating_sub(1) {
        let kind = if y[i] > y[i - 1] && y[i] >= y[i + 1] {
            ExtremumKind::Maximum
        } else if y[i] < y[i - 1] && y[i] <= y[i + 1] {
            ExtremumKind::Minimum
        } else {
            continue;
        };
        let (xv, value) = parabolic_vertex([x[i - 1], x[i], x[i + 1]], [y[i - 1], y[i], y[i + 1]]);
        out.push(Extremum { kind, x: xv, value });
    }
    out
}

/// Global maximum with parabolic refinement.
pub fn global_maximum(x: &[f64], y: &[f64]) -> Extremum {
    refine_global(x, y, ExtremumKind::Maximum)
}

/// Global minimum with parabolic refinement.
pub fn global_minimum(x: &[f64], y: &[f64]) -> Extremum {
    refine_global(x, y, ExtremumKind::Minimum)
}

fn refine_global(x: &[f64], y: &[f64], kind: ExtremumKind) -> Extremum {
    assert!(!x.is_empty() && x.len() == y.len());
    let better = |a: f64, b: f64| match kind {
        ExtremumKind::Maximum => a > b,
        ExtremumKind::Minimum => a < b,
    };
    let mut best = 0;
    for i in 1..y.len() {
        if better(y[i], y[best]) {
            best = i;
        }
    }
    if best == 0 || best + 1 == x.len() {
        return Extremum { kind, x: x[best], value: y[best] };
    }
    let (xv, value) = parabolic_vertex([x[best - 1], x[best], x[best + 1]], [y[best - 1], y[best], y[best + 1]]);
    Extremum { kind, x: xv, value }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_of_exact_parabola() {
        let g = |x: f64| 3.0 - 2.0 * (x - 0.37).powi(2);
        let xs = [0.1, 0.3, 0.65];
        let (xv, yv) = parabolic_vertex(xs, xs.map(g));
        assert!((xv - 0.37).abs() < 1e-12 && (yv - 3.0).abs() < 1e-12);
    }

    #[test]
    fn extrema_of_sampled_cosine() {
        let x: Vec<f64> = (0..200).map(|i| 0.1 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|x| x.cos()).collect();
        let ex = find_extrema(&x, &y);
        assert_eq!(ex.len(), 6);
        assert_eq!(ex[0].kind, ExtremumKind::Minimum);
        assert!((ex[0].x - std::f64::consts::PI).abs() < 1e-3);
        let m = global_minimum(&x, &y);
        assert!((m.value + 1.0).abs() < 1e-4);
    }
}
