//! Reference four-point rainflow count, written from the method's definition
//! rather than the library's stack formulation.

/// Points where the direction of travel changes, plus both ends.
fn reversals(series: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = Vec::new();
    for &x in series {
        if v.last() != Some(&x) {
            v.push(x);
        }
    }
    if v.len() < 3 {
        return v;
    }
    let mut out = vec![v[0]];
    for i in 1..v.len() - 1 {
        if (v[i] - v[i - 1]).signum() != (v[i + 1] - v[i]).signum() {
            out.push(v[i]);
        }
    }
    out.push(v[v.len() - 1]);
    out
}

/// `(range, weight)` pairs: 1.0 for full cycles, 0.5 for the residue.
pub fn cycles(series: &[f64]) -> Vec<(f64, f64)> {
    let mut pts = reversals(series);
    let mut out = Vec::new();
    let mut i = 0;
    while i + 3 < pts.len() {
        let outer_a = (pts[i + 1] - pts[i]).abs();
        let inner = (pts[i + 2] - pts[i + 1]).abs();
        let outer_b = (pts[i + 3] - pts[i + 2]).abs();
        if inner <= outer_a && inner <= outer_b {
            out.push((inner, 1.0));
            pts.drain(i + 1..i + 3);
            // the merged segment may now close a cycle further back
            i = i.saturating_sub(2);
        } else {
            i += 1;
        }
    }
    for w in pts.windows(2) {
        out.push(((w[1] - w[0]).abs(), 0.5));
    }
    out
}

/// Counts per level `k / n_bins`; a cycle goes to the lowest level at or
/// above its range. Ranges of 1e-9 or less are ignored.
pub fn binned(series: &[f64], n_bins: usize) -> Vec<f64> {
    let mut counts = vec![0.0; n_bins];
    for (range, weight) in cycles(series) {
        if range <= 1e-9 {
            continue;
        }
        let k = (1..=n_bins)
            .find(|&k| range <= (k as f64 + 1e-9) / n_bins as f64)
            .unwrap_or(n_bins);
        counts[k - 1] += weight;
    }
    counts
}
