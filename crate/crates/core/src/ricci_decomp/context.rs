use crate::error::Result;
use crate::linalg::{Matrix, Tensor3, Vector};
use crate::numdiff;
use crate::submersion::{Submersion, SubmersionPoint};

/// Pointwise submersion data plus the first covariant derivatives needed by
/// the Ricci decomposition. Derivatives of projector-built quantities are
/// central differences (Richardson-extrapolated) with Christoffel
/// corrections.
#[derive(Debug, Clone)]
pub struct DecompContext {
    pub at: SubmersionPoint,
    pub t: Tensor3,
    pub s: Tensor3,
    /// `nabla_t[a].get(k, i, j) = (∇_a T)^k_ij`
    pub nabla_t: Vec<Tensor3>,
    pub nabla_s: Vec<Tensor3>,
    /// Fiber mean curvature `H` and `(∇_a H)^k` at `(k, a)`.
    pub mean_curvature: Vector,
    pub nabla_mean_curvature: Matrix,
    /// Horizontal mean curvature `H′` and its covariant derivative.
    pub hprime: Vector,
    pub nabla_hprime: Matrix,
    /// Coordinate differential of `1/σ²`.
    pub d_inv_sigma2: Vector,
    /// `grad(1/σ²)`.
    pub grad_inv_sigma2: Vector,
    /// `g(∇_{∂_i} grad(1/σ²), ∂_j)`, as differentiated (not symmetrized).
    pub hess_inv_sigma2: Matrix,
    /// `∇(P_H grad(1/σ²))` at `(k, a)`.
    pub nabla_horizontal_grad: Matrix,
    /// `∂_a` of the orthonormal horizontal frame fields: `[l][(k, a)]`.
    d_horizontal_frame: Vec<Matrix>,
}

struct Layout {
    n: usize,
    d2: usize,
}

impl Layout {
    fn t(&self) -> usize {
        0
    }
    fn s(&self) -> usize {
        self.n.pow(3)
    }
    fn h(&self) -> usize {
        2 * self.n.pow(3)
    }
    fn hprime(&self) -> usize {
        self.h() + self.n
    }
    fn dinv(&self) -> usize {
        self.hprime() + self.n
    }
    fn hgrad(&self) -> usize {
        self.dinv() + self.n
    }
    fn frame(&self) -> usize {
        self.hgrad() + self.n
    }
    fn len(&self) -> usize {
        self.frame() + self.d2 * self.n
    }
}

fn bundle(at: &SubmersionPoint) -> Vec<f64> {
    let s2 = at.sigma2();
    let dinv = -&at.d_sigma2 / (s2 * s2);
    let hgrad = at.horizontal() * at.grad_inv_sigma2();
    let mut out = Vec::new();
    out.extend_from_slice(at.t_tensor().raw());
    out.extend_from_slice(at.s_tensor().raw());
    out.extend(at.mean_curvature().iter());
    out.extend(at.horizontal_mean_curvature().iter());
    out.extend(dinv.iter());
    out.extend(hgrad.iter());
    for x in &at.frame.horizontal_basis {
        out.extend(x.iter());
    }
    out
}

impl DecompContext {
    pub fn new(sub: &Submersion, p: &[f64]) -> Result<Self> {
        let at = sub.at(p)?;
        let n = at.dim();
        let lay = Layout {
            n,
            d2: at.frame.horizontal_basis.len(),
        };
        let here = bundle(&at);
        let f = |q: &[f64]| -> Result<Vec<f64>> { Ok(bundle(&sub.at(q)?)) };
        let d = numdiff::jacobian(&f, p, numdiff::REL_STEP)?;
        debug_assert_eq!(here.len(), lay.len());
        let gamma = &at.local.gamma;

        let tensor = |off: usize| Tensor3::from_raw(n, here[off..off + n * n * n].to_vec());
        let t = tensor(lay.t());
        let s = tensor(lay.s());
        let nabla_tensor = |off: usize, base: &Tensor3| -> Vec<Tensor3> {
            (0..n)
                .map(|a| {
                    let mut out = Tensor3::from_raw(n, d[a][off..off + n * n * n].to_vec());
                    for k in 0..n {
                        for i in 0..n {
                            for j in 0..n {
                                let mut v = out.get(k, i, j);
                                for m in 0..n {
                                    v += gamma.get(k, a, m) * base.get(m, i, j)
                                        - gamma.get(m, a, i) * base.get(k, m, j)
                                        - gamma.get(m, a, j) * base.get(k, i, m);
                                }
                                out.set(k, i, j, v);
                            }
                        }
                    }
                    out
                })
                .collect()
        };
        let nabla_t = nabla_tensor(lay.t(), &t);
        let nabla_s = nabla_tensor(lay.s(), &s);

        let vector = |off: usize| Vector::from_row_slice(&here[off..off + n]);
        let nabla_vector = |off: usize| -> Matrix {
            let z = vector(off);
            Matrix::from_fn(n, n, |k, a| {
                d[a][off + k] + (0..n).map(|m| gamma.get(k, a, m) * z[m]).sum::<f64>()
            })
        };
        let d_inv_sigma2 = vector(lay.dinv());
        let grad_inv_sigma2 = &at.local.inverse * &d_inv_sigma2;
        // g(∇_i grad f, ∂_j) = ∂_i∂_j f − Γ^k_ij ∂_k f
        let hess_inv_sigma2 = Matrix::from_fn(n, n, |i, j| {
            d[i][lay.dinv() + j] - (0..n).map(|k| gamma.get(k, i, j) * d_inv_sigma2[k]).sum::<f64>()
        });
        let d_horizontal_frame = (0..lay.d2)
            .map(|l| {
                let off = lay.frame() + l * n;
                Matrix::from_fn(n, n, |k, a| d[a][off + k])
            })
            .collect();
        Ok(Self {
            mean_curvature: vector(lay.h()),
            nabla_mean_curvature: nabla_vector(lay.h()),
            hprime: vector(lay.hprime()),
            nabla_hprime: nabla_vector(lay.hprime()),
            nabla_horizontal_grad: nabla_vector(lay.hgrad()),
            d_inv_sigma2,
            grad_inv_sigma2,
            hess_inv_sigma2,
            d_horizontal_frame,
            t,
            s,
            nabla_t,
            nabla_s,
            at,
        })
    }

    pub fn dim(&self) -> usize {
        self.at.dim()
    }

    pub fn inner(&self, x: &Vector, y: &Vector) -> f64 {
        self.at.inner(x, y)
    }

    pub fn vertical_basis(&self) -> &[Vector] {
        &self.at.frame.vertical_basis
    }

    pub fn horizontal_basis(&self) -> &[Vector] {
        &self.at.frame.horizontal_basis
    }

    /// `(∇_E T)_F G`.
    pub fn nabla_t(&self, e: &Vector, f: &Vector, g: &Vector) -> Vector {
        contract(&self.nabla_t, e, f, g)
    }

    /// `(∇_E S)_F G`.
    pub fn nabla_s(&self, e: &Vector, f: &Vector, g: &Vector) -> Vector {
        contract(&self.nabla_s, e, f, g)
    }

    pub fn t(&self, e: &Vector, f: &Vector) -> Vector {
        self.t.apply(e, f)
    }

    pub fn s(&self, e: &Vector, f: &Vector) -> Vector {
        self.s.apply(e, f)
    }

    /// `Hess(1/σ²)(X, Y)`, symmetrized.
    pub fn hess_inv_sigma2(&self, x: &Vector, y: &Vector) -> f64 {
        let h = &self.hess_inv_sigma2;
        0.5 * ((x.transpose() * h * y)[(0, 0)] + (y.transpose() * h * x)[(0, 0)])
    }

    /// `div(S_{X_a} X_b)` for the orthonormal horizontal frame fields.
    pub fn div_s_frame(&self, a: usize, b: usize) -> f64 {
        let n = self.dim();
        let xa = &self.at.frame.horizontal_basis[a];
        let xb = &self.at.frame.horizontal_basis[b];
        let z = self.s(xa, xb);
        let da = &self.d_horizontal_frame[a];
        let db = &self.d_horizontal_frame[b];
        let mut div = 0.0;
        for m in 0..n {
            let e = crate::linalg::unit(n, m);
            // ∂_m Z = (∂_m S)(Xa, Xb) + S(∂_m Xa, Xb) + S(Xa, ∂_m Xb), with
            // ∂_m S recovered from ∇S by removing the Christoffel terms.
            let ds = self.partial_s(m);
            let dz = ds.apply(xa, xb) + self.s(&da.column(m).into_owned(), xb) + self.s(xa, &db.column(m).into_owned());
            let cov = dz + self.at.local.gamma.apply(&e, &z);
            div += cov[m];
        }
        div
    }

    fn partial_s(&self, a: usize) -> Tensor3 {
        let n = self.dim();
        let gamma = &self.at.local.gamma;
        let mut out = self.nabla_s[a].clone();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = out.get(k, i, j);
                    for m in 0..n {
                        v -= gamma.get(k, a, m) * self.s.get(m, i, j)
                            - gamma.get(m, a, i) * self.s.get(k, m, j)
                            - gamma.get(m, a, j) * self.s.get(k, i, m);
                    }
                    out.set(k, i, j, v);
                }
            }
        }
        out
    }

    /// `div H′`.
    pub fn div_hprime(&self) -> f64 {
        self.nabla_hprime.trace()
    }
}

fn contract(nabla: &[Tensor3], e: &Vector, f: &Vector, g: &Vector) -> Vector {
    let n = e.len();
    let mut out = Vector::zeros(n);
    for (a, t) in nabla.iter().enumerate() {
        if e[a] != 0.0 {
            out += t.apply(f, g) * e[a];
        }
    }
    out
}
