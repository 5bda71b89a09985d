//! Weighted pool-adjacent-violators.

/// Weighted least-squares fit of a nonincreasing sequence to `y`.
pub fn pav_nonincreasing(y: &[f64], w: &[f64]) -> Vec<f64> {
    debug_assert_eq!(y.len(), w.len());
    // blocks of (weighted sum, total weight, length)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(y.len());
    for (&yi, &wi) in y.iter().zip(w) {
        let mut cur = (yi * wi, wi, 1usize);
        while let Some(&(s, ww, len)) = blocks.last() {
            if s / ww < cur.0 / cur.1 {
                blocks.pop();
                cur = (cur.0 + s, cur.1 + ww, cur.2 + len);
            } else {
                break;
            }
        }
        blocks.push(cur);
    }
    let mut out = Vec::with_capacity(y.len());
    for (s, ww, len) in blocks {
        out.extend(std::iter::repeat_n(s / ww, len));
    }
    out
}
