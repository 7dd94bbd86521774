//! Lag polynomials in sparse `(lag, coefficient)` form.

/// Margin by which every root must clear the unit circle.
pub const ROOT_TOLERANCE: f64 = 1e-6;

/// Expands `(1 ± Σ a_i B^i)(1 ± Σ A_j B^{j·m})` and returns the non-constant
/// terms. `sign` is `-1.0` for autoregressive and `+1.0` for moving-average
/// polynomials; the returned coefficients keep that sign convention, i.e.
/// the product is `1 + sign · Σ c_k B^k`.
pub fn seasonal_product(regular: &[f64], seasonal: &[f64], m: usize, sign: f64) -> Vec<(usize, f64)> {
    let mut dense = vec![0.0; regular.len() + seasonal.len() * m + 1];
    let mut left = vec![0.0; regular.len() + 1];
    left[0] = 1.0;
    for (i, a) in regular.iter().enumerate() {
        left[i + 1] = sign * a;
    }
    let mut right = vec![(0usize, 1.0)];
    for (j, a) in seasonal.iter().enumerate() {
        right.push(((j + 1) * m, sign * a));
    }
    for (i, l) in left.iter().enumerate() {
        for &(k, r) in &right {
            dense[i + k] += l * r;
        }
    }
    dense
        .into_iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| *c != 0.0)
        .map(|(k, c)| (k, sign * c))
        .collect()
}

/// True when `1 - Σ c_i z^i` has every root strictly outside the unit circle
/// (by [`ROOT_TOLERANCE`]).
///
/// Uses the Levinson step-down recursion: the polynomial is stable exactly
/// when every reflection coefficient has modulus below one.
pub fn is_stable(coefficients: &[f64]) -> bool {
    let mut a: Vec<f64> = coefficients.to_vec();
    while a.last() == Some(&0.0) {
        a.pop();
    }
    if a.iter().any(|c| !c.is_finite()) {
        return false;
    }
    while let Some(&k) = a.last() {
        if k.abs() >= 1.0 - ROOT_TOLERANCE {
            return false;
        }
        let order = a.len();
        let denom = 1.0 - k * k;
        let prev: Vec<f64> = (0..order - 1)
            .map(|j| (a[j] + k * a[order - 2 - j]) / denom)
            .collect();
        a = prev;
    }
    true
}

/// Invertibility of `1 + Σ θ_i z^i`.
pub fn is_invertible(coefficients: &[f64]) -> bool {
    let negated: Vec<f64> = coefficients.iter().map(|c| -c).collect();
    is_stable(&negated)
}
