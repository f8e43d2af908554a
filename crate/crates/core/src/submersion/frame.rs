use crate::chart::LocalGeometry;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};

/// Relative singular-value cut-off for the Jacobian rank.
const RANK_TOL: f64 = 1e-10;

/// Vertical/horizontal splitting and dilation at one point.
#[derive(Debug, Clone)]
pub struct FramePoint {
    pub point: Vec<f64>,
    pub image: Vec<f64>,
    /// g-orthonormal basis of `ker ϑ_*`.
    pub vertical_basis: Vec<Vector>,
    /// g-orthonormal basis of the g-orthogonal complement.
    pub horizontal_basis: Vec<Vector>,
    pub sigma2: f64,
    pub horizontal: Matrix,
    pub vertical: Matrix,
    /// `max |g₂(ϑ_*X_l, ϑ_*X_m) − σ²δ_lm| / σ²` over the horizontal basis.
    pub conformality_residual: f64,
}

impl FramePoint {
    /// Vertical basis followed by the horizontal basis.
    pub fn combined_basis(&self) -> Vec<Vector> {
        self.vertical_basis
            .iter()
            .chain(self.horizontal_basis.iter())
            .cloned()
            .collect()
    }
}

pub(super) fn rank(jac: &Matrix) -> usize {
    let sv = jac.clone().singular_values();
    let top = sv.iter().cloned().fold(0.0_f64, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > RANK_TOL * top).count()
}

/// Euclidean kernel basis of `jac`, built by projecting coordinate vectors
/// in index order off the row space.
fn kernel(jac: &Matrix) -> Vec<Vector> {
    let d1 = jac.ncols();
    let rows: Vec<Vector> = (0..jac.nrows()).map(|a| jac.row(a).transpose()).collect();
    let mut basis = linalg::gram_schmidt(&Matrix::identity(d1, d1), &rows, 1e-12);
    let start = basis.len();
    for i in 0..d1 {
        if basis.len() == d1 {
            break;
        }
        let mut w = linalg::unit(d1, i);
        for q in &basis {
            w -= q * q.dot(&w);
        }
        let n = w.norm();
        if n > 1e-8 {
            basis.push(w / n);
        }
    }
    basis.split_off(start)
}

#[allow(clippy::too_many_arguments)]
pub(super) fn build(
    p: &[f64],
    image: &[f64],
    local: &LocalGeometry,
    jac: &Matrix,
    horizontal: &Matrix,
    vertical: &Matrix,
    g2: &Matrix,
    sigma2: f64,
) -> Result<FramePoint> {
    let g = local.g();
    let d2 = jac.nrows();
    let d1 = jac.ncols();
    let vertical_basis = linalg::gram_schmidt(g, &kernel(jac), 1e-12);
    let columns: Vec<Vector> = (0..d2).map(|a| &local.inverse * jac.row(a).transpose()).collect();
    let horizontal_basis = linalg::gram_schmidt(g, &columns, 1e-12);
    if vertical_basis.len() != d1 - d2 || horizontal_basis.len() != d2 {
        return Err(Error::CriticalPoint {
            point: p.to_vec(),
            rank: horizontal_basis.len(),
            required: d2,
        });
    }
    let mut residual: f64 = 0.0;
    let pushed: Vec<Vector> = horizontal_basis.iter().map(|x| jac * x).collect();
    for (l, a) in pushed.iter().enumerate() {
        for (m, b) in pushed.iter().enumerate() {
            let target = if l == m { sigma2 } else { 0.0 };
            residual = residual.max((linalg::inner(g2, a, b) - target).abs());
        }
    }
    Ok(FramePoint {
        point: p.to_vec(),
        image: image.to_vec(),
        vertical_basis,
        horizontal_basis,
        sigma2,
        horizontal: horizontal.clone(),
        vertical: vertical.clone(),
        conformality_residual: residual / sigma2.abs().max(f64::MIN_POSITIVE),
    })
}
