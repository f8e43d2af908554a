use std::fmt;

/// Second-order jet of a scalar field: value, gradient and Hessian at a point.
///
/// The Hessian is kept as a packed upper triangle, so it is symmetric by
/// construction.
#[derive(Clone, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub gradient: Vec<f64>,
    hess: Vec<f64>,
}

#[inline]
fn packed(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * (2 * n - i + 1) / 2 + (j - i)
}

impl Jet2 {
    pub fn constant(value: f64, n: usize) -> Self {
        Self {
            value,
            gradient: vec![0.0; n],
            hess: vec![0.0; n * (n + 1) / 2],
        }
    }

    /// Jet of the coordinate function `x_index` evaluated at `value`.
    pub fn variable(value: f64, index: usize, n: usize) -> Self {
        let mut jet = Self::constant(value, n);
        jet.gradient[index] = 1.0;
        jet
    }

    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn hessian(&self, i: usize, j: usize) -> f64 {
        self.hess[packed(self.dim(), i, j)]
    }

    pub fn hessian_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.hessian(i, j)).collect()).collect()
    }

    fn zip(&self, other: &Self, value: f64, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            value,
            gradient: self
                .gradient
                .iter()
                .zip(&other.gradient)
                .map(|(a, b)| f(*a, *b))
                .collect(),
            hess: self.hess.iter().zip(&other.hess).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, self.value + other.value, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, self.value - other.value, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        Self {
            value: -self.value,
            gradient: self.gradient.iter().map(|g| -g).collect(),
            hess: self.hess.iter().map(|h| -h).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.dim();
        let (u, v) = (self.value, other.value);
        let gradient = (0..n).map(|i| self.gradient[i] * v + u * other.gradient[i]).collect();
        let mut hess = vec![0.0; self.hess.len()];
        for i in 0..n {
            for j in i..n {
                let k = packed(n, i, j);
                hess[k] = self.hess[k] * v
                    + u * other.hess[k]
                    + self.gradient[i] * other.gradient[j]
                    + self.gradient[j] * other.gradient[i];
            }
        }
        Self {
            value: u * v,
            gradient,
            hess,
        }
    }

    /// Reciprocal; caller guarantees a nonzero value.
    pub fn recip(&self) -> Self {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.recip())
    }

    /// Applies a scalar function `phi` given `phi(u)`, `phi'(u)`, `phi''(u)`
    /// at the current value `u`.
    pub fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let n = self.dim();
        let gradient = self.gradient.iter().map(|g| f1 * g).collect();
        let mut hess = vec![0.0; self.hess.len()];
        for i in 0..n {
            for j in i..n {
                let k = packed(n, i, j);
                hess[k] = f1 * self.hess[k] + f2 * self.gradient[i] * self.gradient[j];
            }
        }
        Self {
            value: f0,
            gradient,
            hess,
        }
    }
}

impl fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet2")
            .field("value", &self.value)
            .field("gradient", &self.gradient)
            .field("hessian", &self.hessian_matrix())
            .finish()
    }
}
