use crate::scalar::Scalar;

use super::field::{SampledSystem, VectorField};
use super::grid::GridCover;
use super::linalg::{expm, mat_vec};
use super::{AbstractionError, InputGrid, MAX_DIM};

/// Growth-bound enclosure radii per input, for cells of one grid.
///
/// The forward image of a cell with center `c` is enclosed by the box
/// `phi(tau, c, u) +- exp(L_u tau) eta/2`. The same construction with the
/// bound of `-f` encloses the time-reversed image.
#[derive(Debug, Clone)]
pub struct EnclosureModel<T> {
    forward: Vec<[T; MAX_DIM]>,
    reverse: Vec<[T; MAX_DIM]>,
    /// Radius around `phi(-tau, c_x, u)` holding the center of every cell
    /// whose forward box meets cell `x`.
    pred: Vec<[T; MAX_DIM]>,
}

fn propagated<T: Scalar>(l: &[T], tau: T, r: &[T], n: usize) -> Result<[T; MAX_DIM], AbstractionError> {
    if l.len() != n * n {
        return Err(AbstractionError::InvalidConfig(format!("growth bound has {} entries, expected {}", l.len(), n * n)));
    }
    if l.iter().any(|v| !v.is_finite()) {
        return Err(AbstractionError::InvalidConfig("growth bound has non-finite entries".into()));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && l[i * n + j] < T::zero() {
                return Err(AbstractionError::InvalidConfig("growth bound has negative off-diagonal entries".into()));
            }
        }
    }
    let scaled: Vec<T> = l.iter().map(|&v| v * tau).collect();
    let e = expm(&scaled, n);
    let mut out = [T::zero(); MAX_DIM];
    mat_vec(&e, r, &mut out[..n]);
    Ok(out)
}

impl<T: Scalar> EnclosureModel<T> {
    pub fn new<F: VectorField<T>>(
        sys: &SampledSystem<T, F>,
        cover: &GridCover<T>,
        inputs: &InputGrid<T>,
    ) -> Result<Self, AbstractionError> {
        let n = sys.dim();
        if cover.dim() != n {
            return Err(AbstractionError::InvalidConfig(format!("grid dimension {} vs field dimension {n}", cover.dim())));
        }
        let half: Vec<T> = cover.eta().iter().map(|&e| e * T::lit(0.5)).collect();
        let mut forward = Vec::with_capacity(inputs.len());
        let mut reverse = Vec::with_capacity(inputs.len());
        let mut pred = Vec::with_capacity(inputs.len());
        for u in inputs.iter() {
            let lf = sys.field.growth_bound(u, false);
            let lr = sys.field.growth_bound(u, true);
            let f = propagated(&lf, sys.tau, &half, n)?;
            let r = propagated(&lr, sys.tau, &half, n)?;
            let sum: Vec<T> = (0..n).map(|d| half[d] + f[d]).collect();
            let mut p = propagated(&lr, sys.tau, &sum, n)?;
            for d in 0..n {
                // Slack for the reverse integrator not inverting the forward
                // one exactly.
                p[d] = p[d] * T::lit(1.0 + 1e-6) + cover.eta()[d] * T::lit(1e-3);
            }
            forward.push(f);
            reverse.push(r);
            pred.push(p);
        }
        Ok(Self { forward, reverse, pred })
    }

    pub fn radius(&self, u: usize, reverse: bool) -> &[T; MAX_DIM] {
        if reverse {
            &self.reverse[u]
        } else {
            &self.forward[u]
        }
    }

    pub fn pred_radius(&self, u: usize) -> &[T; MAX_DIM] {
        &self.pred[u]
    }
}
