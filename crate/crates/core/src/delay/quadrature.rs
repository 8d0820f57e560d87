/// Running composite-trapezoid integral over uniform nodes: `out[0] = 0`,
/// `out[k] = out[k−1] + h·(v[k−1] + v[k])/2`, summed left to right.
pub fn cumulative_trapezoid(values: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    if values.is_empty() {
        return out;
    }
    let mut acc = 0.0;
    out.push(acc);
    for w in values.windows(2) {
        acc += h * (w[0] + w[1]) / 2.0;
        out.push(acc);
    }
    out
}
