//! Small dense matrix helpers (row-major, `n <= MAX_DIM`).

use crate::scalar::Scalar;

fn mat_mul<T: Scalar>(a: &[T], b: &[T], n: usize) -> Vec<T> {
    let mut c = vec![T::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == T::zero() {
                continue;
            }
            for j in 0..n {
                c[i * n + j] = c[i * n + j] + aik * b[k * n + j];
            }
        }
    }
    c
}

/// `exp(a)` by scaling and squaring with a truncated Taylor series.
pub fn expm<T: Scalar>(a: &[T], n: usize) -> Vec<T> {
    assert_eq!(a.len(), n * n);
    let norm = (0..n)
        .map(|i| (0..n).map(|j| a[i * n + j].abs()).fold(T::zero(), |s, v| s + v))
        .fold(T::zero(), T::max);
    let mut squarings = 0u32;
    let mut scale = T::one();
    while norm * scale > T::lit(0.5) {
        scale = scale * T::lit(0.5);
        squarings += 1;
    }
    let scaled: Vec<T> = a.iter().map(|&v| v * scale).collect();
    let mut result = vec![T::zero(); n * n];
    let mut term = vec![T::zero(); n * n];
    for i in 0..n {
        result[i * n + i] = T::one();
        term[i * n + i] = T::one();
    }
    for k in 1..=18 {
        term = mat_mul(&term, &scaled, n);
        let inv = T::one() / T::from_usize(k).unwrap();
        for v in term.iter_mut() {
            *v = *v * inv;
        }
        for (r, t) in result.iter_mut().zip(&term) {
            *r = *r + *t;
        }
    }
    for _ in 0..squarings {
        result = mat_mul(&result, &result, n);
    }
    result
}

/// `a * v`.
pub fn mat_vec<T: Scalar>(a: &[T], v: &[T], out: &mut [T]) {
    let n = v.len();
    for i in 0..n {
        out[i] = (0..n).fold(T::zero(), |s, j| s + a[i * n + j] * v[j]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_zero_is_identity() {
        assert_eq!(expm(&[0.0f64; 4], 2), vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn exp_of_nilpotent_and_diagonal() {
        let e = expm(&[0.0f64, 3.0, 0.0, 0.0], 2);
        assert!((e[1] - 3.0).abs() < 1e-13 && (e[0] - 1.0).abs() < 1e-13 && e[2].abs() < 1e-13);
        let d = expm(&[2.0f64, 0.0, 0.0, -7.0], 2);
        assert!((d[0] - 2.0f64.exp()).abs() < 1e-12);
        assert!((d[3] - (-7.0f64).exp()).abs() < 1e-12);
    }
}
