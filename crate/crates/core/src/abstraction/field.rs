use crate::scalar::Scalar;

use super::{AbstractionError, MAX_DIM};

/// Right-hand side `f(x, u)` of an ODE `x' = f(x, u)`.
pub trait VectorField<T: Scalar>: Sync {
    fn dim(&self) -> usize;
    fn input_dim(&self) -> usize;

    /// Writes `f(x, u)` into `dx`.
    fn eval(&self, x: &[T], u: &[T], dx: &mut [T]);

    /// Row-major `dim x dim` growth bound for input `u`: off-diagonal entries
    /// bound `|df_i/dx_j|` and diagonal entries bound `df_i/dx_i` from above
    /// over the operating range. With `reverse` the bound is for `-f`.
    fn growth_bound(&self, u: &[T], reverse: bool) -> Vec<T>;
}

impl<T: Scalar, F: VectorField<T> + ?Sized> VectorField<T> for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn input_dim(&self) -> usize {
        (**self).input_dim()
    }
    fn eval(&self, x: &[T], u: &[T], dx: &mut [T]) {
        (**self).eval(x, u, dx)
    }
    fn growth_bound(&self, u: &[T], reverse: bool) -> Vec<T> {
        (**self).growth_bound(u, reverse)
    }
}

/// Linear field `x' = A x + B u` with row-major `A` (`n x n`) and `B`
/// (`n x k`).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearField<T> {
    pub n: usize,
    pub k: usize,
    pub a: Vec<T>,
    pub b: Vec<T>,
    /// Growth matrix used instead of the one derived from `A`.
    pub growth: Option<Vec<T>>,
}

impl<T: Scalar> LinearField<T> {
    pub fn new(n: usize, k: usize, a: Vec<T>, b: Vec<T>) -> Result<Self, AbstractionError> {
        if n == 0 || n > MAX_DIM {
            return Err(AbstractionError::InvalidConfig(format!("state dimension {n} not in 1..={MAX_DIM}")));
        }
        if a.len() != n * n || b.len() != n * k {
            return Err(AbstractionError::InvalidConfig(format!(
                "A needs {} and B needs {} entries, got {} and {}",
                n * n,
                n * k,
                a.len(),
                b.len()
            )));
        }
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(AbstractionError::NonFinite);
        }
        Ok(Self { n, k, a, b, growth: None })
    }

    pub fn with_growth(mut self, growth: Vec<T>) -> Result<Self, AbstractionError> {
        if growth.len() != self.n * self.n {
            return Err(AbstractionError::InvalidConfig(format!(
                "growth matrix needs {} entries, got {}",
                self.n * self.n,
                growth.len()
            )));
        }
        self.growth = Some(growth);
        Ok(self)
    }
}

impl<T: Scalar> VectorField<T> for LinearField<T> {
    fn dim(&self) -> usize {
        self.n
    }

    fn input_dim(&self) -> usize {
        self.k
    }

    fn eval(&self, x: &[T], u: &[T], dx: &mut [T]) {
        for i in 0..self.n {
            let mut s = T::zero();
            for j in 0..self.n {
                s = s + self.a[i * self.n + j] * x[j];
            }
            for j in 0..self.k {
                s = s + self.b[i * self.k + j] * u[j];
            }
            dx[i] = s;
        }
    }

    fn growth_bound(&self, _u: &[T], reverse: bool) -> Vec<T> {
        let n = self.n;
        let base = self.growth.as_ref().unwrap_or(&self.a);
        (0..n * n)
            .map(|k| {
                let v = base[k];
                if k / n != k % n {
                    v.abs()
                } else if reverse {
                    -v
                } else {
                    v
                }
            })
            .collect()
    }
}

/// Sampled system of a vector field: one transition is the flow over `tau`
/// under a constant input, computed by classical RK4.
#[derive(Debug, Clone)]
pub struct SampledSystem<T, F> {
    pub field: F,
    pub tau: T,
    pub substeps: usize,
}

pub const DEFAULT_SUBSTEPS: usize = 5;

impl<T: Scalar, F: VectorField<T>> SampledSystem<T, F> {
    pub fn new(field: F, tau: T, substeps: usize) -> Result<Self, AbstractionError> {
        if !(tau > T::zero()) || !tau.is_finite() {
            return Err(AbstractionError::InvalidConfig(format!("sampling period must be positive, got {tau}")));
        }
        if substeps == 0 {
            return Err(AbstractionError::InvalidConfig("substeps must be at least 1".into()));
        }
        let n = field.dim();
        if n == 0 || n > MAX_DIM {
            return Err(AbstractionError::InvalidConfig(format!("state dimension {n} not in 1..={MAX_DIM}")));
        }
        Ok(Self { field, tau, substeps })
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    /// `phi(tau, x, u)`, or the flow of `-f` when `reverse` is set.
    pub fn integrate(&self, x: &[T], u: &[T], reverse: bool) -> Result<Vec<T>, AbstractionError> {
        let mut out = [T::zero(); MAX_DIM];
        self.integrate_into(x, u, reverse, &mut out)?;
        Ok(out[..self.dim()].to_vec())
    }

    pub(crate) fn integrate_into(
        &self,
        x: &[T],
        u: &[T],
        reverse: bool,
        out: &mut [T; MAX_DIM],
    ) -> Result<(), AbstractionError> {
        let n = self.dim();
        assert_eq!(x.len(), n, "state has wrong dimension");
        if x.iter().any(|v| !v.is_finite()) {
            return Err(AbstractionError::NonFinite);
        }
        let h = self.tau / T::from_usize(self.substeps).unwrap();
        let h = if reverse { -h } else { h };
        let half = T::lit(0.5);
        let sixth = T::lit(1.0 / 6.0);
        let two = T::lit(2.0);
        let mut y = [T::zero(); MAX_DIM];
        y[..n].copy_from_slice(x);
        let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
            ([T::zero(); MAX_DIM], [T::zero(); MAX_DIM], [T::zero(); MAX_DIM], [T::zero(); MAX_DIM], [T::zero(); MAX_DIM]);
        for _ in 0..self.substeps {
            self.field.eval(&y[..n], u, &mut k1[..n]);
            for i in 0..n {
                tmp[i] = y[i] + half * h * k1[i];
            }
            self.field.eval(&tmp[..n], u, &mut k2[..n]);
            for i in 0..n {
                tmp[i] = y[i] + half * h * k2[i];
            }
            self.field.eval(&tmp[..n], u, &mut k3[..n]);
            for i in 0..n {
                tmp[i] = y[i] + h * k3[i];
            }
            self.field.eval(&tmp[..n], u, &mut k4[..n]);
            for i in 0..n {
                y[i] = y[i] + h * sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
            }
        }
        if y[..n].iter().any(|v| !v.is_finite()) {
            return Err(AbstractionError::NonFinite);
        }
        out[..n].copy_from_slice(&y[..n]);
        Ok(())
    }
}
