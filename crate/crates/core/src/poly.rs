//! Dense power-basis polynomial arithmetic on coefficient slices
//! (ascending order, `c[0] + c[1] x + ...`).

pub fn eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

pub fn mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, &pi) in p.iter().enumerate() {
        for (j, &qj) in q.iter().enumerate() {
            out[i + j] += pi * qj;
        }
    }
    out
}

/// `p(x)^k` by repeated multiplication; `p^0 = 1`.
pub fn pow(p: &[f64], k: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for _ in 0..k {
        out = mul(&out, p);
    }
    out
}

/// Coefficients of `x -> p(scale * x + shift)`.
pub fn compose_affine(p: &[f64], scale: f64, shift: f64) -> Vec<f64> {
    let lin = [shift, scale];
    let mut out = vec![0.0; p.len().max(1)];
    let mut power = vec![1.0];
    for &pk in p {
        for (o, &v) in out.iter_mut().zip(&power) {
            *o += pk * v;
        }
        power = mul(&power, &lin);
    }
    out
}

pub fn add_scaled(acc: &mut Vec<f64>, p: &[f64], factor: f64) {
    if acc.len() < p.len() {
        acc.resize(p.len(), 0.0);
    }
    for (a, &v) in acc.iter_mut().zip(p) {
        *a += factor * v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_and_compose() {
        // (1 + x)^3
        assert_eq!(pow(&[1.0, 1.0], 3), vec![1.0, 3.0, 3.0, 1.0]);
        // p(x) = x^2 at 2x - 1 -> 4x^2 - 4x + 1
        assert_eq!(compose_affine(&[0.0, 0.0, 1.0], 2.0, -1.0), vec![1.0, -4.0, 4.0]);
        assert_eq!(eval(&[1.0, -4.0, 4.0], 0.5), 0.0);
    }
}
