//! Small dense tensors and metric-aware linear algebra.

use nalgebra::{DMatrix, DVector};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Dense rank-3 array `t[a][b][c]`, all indices of length `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.n + b) * self.n + c]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        self.data[(a * self.n + b) * self.n + c] = v;
    }

    /// Contraction `sum_{b,c} t[.][b][c] x^b y^c`.
    pub fn apply(&self, x: &Vector, y: &Vector) -> Vector {
        let n = self.n;
        Vector::from_fn(n, |a, _| {
            let mut s = 0.0;
            for b in 0..n {
                for c in 0..n {
                    s += self.get(a, b, c) * x[b] * y[c];
                }
            }
            s
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub(crate) fn raw(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn from_raw(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n * n);
        Self { n, data }
    }
}

/// Dense rank-4 array `t[a][b][c][d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[((a * self.n + b) * self.n + c) * self.n + d]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, d: usize, v: f64) {
        self.data[((a * self.n + b) * self.n + c) * self.n + d] = v;
    }
}

#[inline]
pub fn inner(g: &Matrix, x: &Vector, y: &Vector) -> f64 {
    (x.transpose() * g * y)[(0, 0)]
}

#[inline]
pub fn norm(g: &Matrix, x: &Vector) -> f64 {
    inner(g, x, x).max(0.0).sqrt()
}

/// Bilinear form `b(x, y) = x^T b y`.
#[inline]
pub fn form(b: &Matrix, x: &Vector, y: &Vector) -> f64 {
    inner(b, x, y)
}

/// `g`-orthonormalizes `vectors` in order (modified Gram-Schmidt), dropping
/// any vector whose remaining norm falls below `tol` times its original norm.
pub fn gram_schmidt(g: &Matrix, vectors: &[Vector], tol: f64) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::new();
    for v in vectors {
        let original = norm(g, v);
        if original == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for e in &out {
                let c = inner(g, e, &w);
                w -= e * c;
            }
        }
        let nw = norm(g, &w);
        if nw > tol * original {
            out.push(w / nw);
        }
    }
    out
}

/// A `g`-orthonormal basis obtained from the coordinate basis.
pub fn orthonormal_frame(g: &Matrix) -> Vec<Vector> {
    let n = g.nrows();
    let basis: Vec<Vector> = (0..n).map(|i| unit(n, i)).collect();
    gram_schmidt(g, &basis, 1e-12)
}

pub fn unit(n: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(n);
    v[i] = 1.0;
    v
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Entries `b(e_i, e_j)` of a bilinear form in the frame `frame`.
pub fn in_frame(b: &Matrix, frame: &[Vector]) -> Matrix {
    let k = frame.len();
    Matrix::from_fn(k, k, |i, j| form(b, &frame[i], &frame[j]))
}
