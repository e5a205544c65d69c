//! Recognition of small rationals for exact output.

/// `p/q` (or `p` when `q = 1`) if `x` is within `1e-12` relative of a
/// fraction with denominator at most `max_den`.
pub fn to_rational_string(x: f64, max_den: u64) -> Option<String> {
    let (p, q) = best_rational(x, max_den)?;
    Some(if q == 1 { p.to_string() } else { format!("{p}/{q}") })
}

/// Continued-fraction convergents of `x`, stopping at the first that
/// matches to relative accuracy `1e-12`.
pub fn best_rational(x: f64, max_den: u64) -> Option<(i64, u64)> {
    if !x.is_finite() || x.abs() > 1e12 {
        return None;
    }
    let tol = 1e-12 * x.abs().max(1e-300);
    if x == 0.0 {
        return Some((0, 1));
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > max_den as i128 {
            return None;
        }
        if ((h2 as f64) / (k2 as f64) - x).abs() <= tol {
            return Some((h2 as i64, k2 as u64));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}
