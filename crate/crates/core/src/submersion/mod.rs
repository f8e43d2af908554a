//! Submersion algebra: pushforward, vertical/horizontal splitting, dilation,
//! O'Neill tensors, mean curvatures, second fundamental form, tension field.
//!
//! The horizontal projector is built from the map Jacobian `J` and the
//! total metric `g` as `P_H = g⁻¹Jᵀ (J g⁻¹ Jᵀ)⁻¹ J`, which is smooth in the
//! point and differentiated analytically from the metric and map jets. The
//! O'Neill tensors are evaluated on projected constant-coefficient fields;
//! being tensors, their values do not depend on that extension.

mod frame;
mod scenario;

use crate::chart::{self, LocalGeometry, MetricField};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::linalg::{self, Matrix, Tensor3, Vector};

pub use frame::FramePoint;
pub use scenario::{References, Rejected, RicciClaim, SamplingSpec, SubmersionScenario, Tolerances};

/// Total metric, base metric and the map between their charts.
#[derive(Debug, Clone)]
pub struct Submersion {
    total: MetricField,
    base: MetricField,
    map: Vec<Expr>,
}

impl Submersion {
    pub fn new(total: MetricField, base: MetricField, map: Vec<Expr>) -> Result<Self> {
        let (d1, d2) = (total.dim(), base.dim());
        if d2 >= d1 {
            return Err(Error::Input(format!(
                "base dimension {d2} must be below total dimension {d1}"
            )));
        }
        if map.len() != d2 {
            return Err(Error::Dimension {
                expected: d2,
                got: map.len(),
            });
        }
        if map.iter().any(|m| m.coords() != total.chart().coords()) {
            return Err(Error::Input("map components must be over the total coordinates".into()));
        }
        Ok(Self { total, base, map })
    }

    pub fn total(&self) -> &MetricField {
        &self.total
    }

    pub fn base(&self) -> &MetricField {
        &self.base
    }

    pub fn map(&self) -> &[Expr] {
        &self.map
    }

    /// `(d₁, d₂)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.total.dim(), self.base.dim())
    }

    pub fn fiber_dim(&self) -> usize {
        self.total.dim() - self.base.dim()
    }

    pub fn image(&self, p: &[f64]) -> Result<Vec<f64>> {
        Ok(self.map.iter().map(|m| m.eval(p)).collect::<Result<Vec<_>, _>>()?)
    }

    pub fn jacobian(&self, p: &[f64]) -> Result<Matrix> {
        let (d1, d2) = self.dims();
        let jets = self.map.iter().map(|m| m.eval_jet2(p)).collect::<Result<Vec<_>, _>>()?;
        Ok(Matrix::from_fn(d2, d1, |a, i| jets[a].gradient[i]))
    }

    /// `ϑ_* v`, in base coordinates at `ϑ(p)`.
    pub fn pushforward(&self, p: &[f64], v: &Vector) -> Result<Vector> {
        Ok(self.jacobian(p)? * v)
    }

    /// Vertical/horizontal splitting and dilation at `p`.
    pub fn frame_point(&self, p: &[f64]) -> Result<FramePoint> {
        Ok(self.at(p)?.frame)
    }

    /// Full pointwise data: frame, projector derivatives, dilation gradient,
    /// total and base connections.
    pub fn at(&self, p: &[f64]) -> Result<SubmersionPoint> {
        let (d1, d2) = self.dims();
        let local = self.total.local(p)?;
        let jets = self.map.iter().map(|m| m.eval_jet2(p)).collect::<Result<Vec<_>, _>>()?;
        let image: Vec<f64> = jets.iter().map(|j| j.value).collect();
        let jac = Matrix::from_fn(d2, d1, |a, i| jets[a].gradient[i]);
        // d_jac[i][(a, k)] = ∂_i ∂_k ϑ^a
        let d_jac: Vec<Matrix> = (0..d1)
            .map(|i| Matrix::from_fn(d2, d1, |a, k| jets[a].hessian(i, k)))
            .collect();

        let rank = frame::rank(&jac);
        if rank < d2 {
            return Err(Error::CriticalPoint {
                point: p.to_vec(),
                rank,
                required: d2,
            });
        }

        let ginv = &local.inverse;
        let m = &jac * ginv * jac.transpose();
        let minv = m.clone().try_inverse().ok_or_else(|| Error::CriticalPoint {
            point: p.to_vec(),
            rank: d2 - 1,
            required: d2,
        })?;
        let horizontal = ginv * jac.transpose() * &minv * &jac;
        let vertical = Matrix::identity(d1, d1) - &horizontal;

        let mut d_horizontal = Vec::with_capacity(d1);
        let mut d_m = Vec::with_capacity(d1);
        for i in 0..d1 {
            let dginv = local.inverse_derivative(i);
            let dj = &d_jac[i];
            let dm = dj * ginv * jac.transpose() + &jac * &dginv * jac.transpose() + &jac * ginv * dj.transpose();
            let dminv = -(&minv * &dm * &minv);
            let dh = &dginv * jac.transpose() * &minv * &jac
                + ginv * dj.transpose() * &minv * &jac
                + ginv * jac.transpose() * &dminv * &jac
                + ginv * jac.transpose() * &minv * dj;
            d_horizontal.push(dh);
            d_m.push(dm);
        }

        let base_local = self.base.local(&image)?;
        let g2 = base_local.g().clone();
        let sigma2 = (&g2 * &m).trace() / d2 as f64;
        let d_sigma2 = Vector::from_fn(d1, |i, _| {
            let mut dg2 = Matrix::zeros(d2, d2);
            for a in 0..d2 {
                dg2 += &base_local.jet.dg[a] * jac[(a, i)];
            }
            ((dg2 * &m) + &g2 * &d_m[i]).trace() / d2 as f64
        });

        let frame = frame::build(p, &image, &local, &jac, &horizontal, &vertical, &g2, sigma2)?;

        Ok(SubmersionPoint {
            frame,
            local,
            base_local,
            jacobian: jac,
            d_jacobian: d_jac,
            d_horizontal,
            d_sigma2,
        })
    }

    /// Whether the field `x` is horizontal and ϑ-related to a base field
    /// near `p`: its pushforward is compared at fiber-shifted points.
    /// Returns the largest deviation found.
    pub fn projectability_defect(&self, x: &dyn crate::chart::TangentField, p: &[f64]) -> Result<f64> {
        let here = self.at(p)?;
        let xv = x.value(p)?;
        let scale = linalg::norm(here.g(), &xv).max(1e-300);
        let mut worst = linalg::norm(here.g(), &(&here.frame.vertical * &xv)) / scale;
        let reference = &here.jacobian * &xv;
        let ref_scale = reference.norm().max(1e-300);
        let target = here.frame.image.clone();
        let mut count = 0;
        'outer: for t in [0.05, -0.05, 0.1, -0.1, 0.2] {
            for u in &here.frame.vertical_basis {
                if count == 10 {
                    break 'outer;
                }
                let mut q: Vec<f64> = p.iter().zip(u.iter()).map(|(a, b)| a + t * b).collect();
                for _ in 0..8 {
                    let img = Vector::from_vec(self.image(&q)?);
                    let resid = img - Vector::from_row_slice(&target);
                    if resid.norm() < 1e-14 {
                        break;
                    }
                    let j = self.jacobian(&q)?;
                    let jjt = (&j * j.transpose()).try_inverse().ok_or_else(|| Error::CriticalPoint {
                        point: q.clone(),
                        rank: 0,
                        required: self.base.dim(),
                    })?;
                    let step = j.transpose() * jjt * resid;
                    for (qi, s) in q.iter_mut().zip(step.iter()) {
                        *qi -= s;
                    }
                }
                let there = match self.at(&q) {
                    Ok(there) => there,
                    Err(e) if e.is_pointwise() => continue,
                    Err(e) => return Err(e),
                };
                let xq = x.value(&q)?;
                let pushed = &there.jacobian * &xq;
                worst = worst.max((pushed - &reference).norm() / ref_scale);
                let sq = linalg::norm(there.g(), &xq).max(1e-300);
                worst = worst.max(linalg::norm(there.g(), &(&there.frame.vertical * &xq)) / sq);
                count += 1;
            }
        }
        Ok(worst)
    }
}

/// Pointwise submersion data with analytic first derivatives of the
/// projectors and of the square dilation.
#[derive(Debug, Clone)]
pub struct SubmersionPoint {
    pub frame: FramePoint,
    pub local: LocalGeometry,
    pub base_local: LocalGeometry,
    pub jacobian: Matrix,
    /// `d_jacobian[i][(a, k)] = ∂_i ∂_k ϑ^a`
    pub d_jacobian: Vec<Matrix>,
    /// `d_horizontal[i] = ∂_i P_H`
    pub d_horizontal: Vec<Matrix>,
    /// `∂_i σ²`
    pub d_sigma2: Vector,
}

impl SubmersionPoint {
    pub fn dim(&self) -> usize {
        self.local.dim()
    }

    pub fn g(&self) -> &Matrix {
        self.local.g()
    }

    pub fn sigma2(&self) -> f64 {
        self.frame.sigma2
    }

    pub fn point(&self) -> &[f64] {
        &self.frame.point
    }

    pub fn horizontal(&self) -> &Matrix {
        &self.frame.horizontal
    }

    pub fn vertical(&self) -> &Matrix {
        &self.frame.vertical
    }

    pub fn inner(&self, x: &Vector, y: &Vector) -> f64 {
        linalg::inner(self.g(), x, y)
    }

    pub fn norm(&self, x: &Vector) -> f64 {
        linalg::norm(self.g(), x)
    }

    /// `Σ_m a^m ∂_m P_H`
    fn d_horizontal_along(&self, a: &Vector) -> Matrix {
        let n = self.dim();
        let mut k = Matrix::zeros(n, n);
        for m in 0..n {
            if a[m] != 0.0 {
                k += &self.d_horizontal[m] * a[m];
            }
        }
        k
    }

    /// `(Γ_a)^k_j = Γ^k_{mj} a^m`
    fn gamma_along(&self, a: &Vector) -> Matrix {
        let n = self.dim();
        Matrix::from_fn(n, n, |k, j| (0..n).map(|m| self.local.gamma.get(k, m, j) * a[m]).sum())
    }

    /// Linear map `F ↦ P_H ∇_a(P_V F) + P_V ∇_a(P_H F)` for constant `F`.
    fn oneill_operator(&self, a: &Vector) -> Matrix {
        let k = self.d_horizontal_along(a);
        let ga = self.gamma_along(a);
        let (h, v) = (self.horizontal(), self.vertical());
        h * (-&k + &ga * v) + v * (&k + &ga * h)
    }

    /// `t.get(k, i, j)` = `k`-component of `T_{∂_i} ∂_j`.
    pub fn t_tensor(&self) -> Tensor3 {
        self.tensor_with(self.vertical())
    }

    /// `s.get(k, i, j)` = `k`-component of `S_{∂_i} ∂_j`.
    pub fn s_tensor(&self) -> Tensor3 {
        self.tensor_with(self.horizontal())
    }

    fn tensor_with(&self, proj: &Matrix) -> Tensor3 {
        let n = self.dim();
        let mut t = Tensor3::zeros(n);
        for i in 0..n {
            let a = proj.column(i).into_owned();
            let op = self.oneill_operator(&a);
            for k in 0..n {
                for j in 0..n {
                    t.set(k, i, j, op[(k, j)]);
                }
            }
        }
        t
    }

    /// `T_E F = P_H ∇_{νE} νF + ν ∇_{νE} P_H F`.
    pub fn oneill_t(&self, e: &Vector, f: &Vector) -> Vector {
        self.oneill_operator(&(self.vertical() * e)) * f
    }

    /// `S_E F = P_H ∇_{P_H E} νF + ν ∇_{P_H E} P_H F`.
    pub fn oneill_s(&self, e: &Vector, f: &Vector) -> Vector {
        self.oneill_operator(&(self.horizontal() * e)) * f
    }

    /// Fiber mean curvature `(1/(d₁-d₂)) Σ_k T_{U_k} U_k`.
    pub fn mean_curvature(&self) -> Vector {
        let basis = &self.frame.vertical_basis;
        let mut h = Vector::zeros(self.dim());
        for u in basis {
            h += self.oneill_t(u, u);
        }
        h / basis.len() as f64
    }

    /// `max_{i,j} ‖T_{U_i} U_j − g(U_i,U_j) H‖`.
    pub fn umbilic_residual(&self) -> f64 {
        let h = self.mean_curvature();
        let basis = &self.frame.vertical_basis;
        let mut worst: f64 = 0.0;
        for (i, ui) in basis.iter().enumerate() {
            for (j, uj) in basis.iter().enumerate() {
                let mut r = self.oneill_t(ui, uj);
                if i == j {
                    r -= &h;
                }
                worst = worst.max(self.norm(&r));
            }
        }
        worst
    }

    /// Mean curvature of the horizontal distribution,
    /// `(1/d₂) Σ_l ν ∇_{X_l} X_l`.
    pub fn horizontal_mean_curvature(&self) -> Vector {
        let basis = &self.frame.horizontal_basis;
        let mut h = Vector::zeros(self.dim());
        for x in basis {
            h += self.oneill_s(x, x);
        }
        h / basis.len() as f64
    }

    /// `grad(1/σ²) = −σ⁻⁴ grad σ²`.
    pub fn grad_inv_sigma2(&self) -> Vector {
        let s2 = self.sigma2();
        -(&self.local.inverse * &self.d_sigma2) / (s2 * s2)
    }

    /// `−(σ²/2) ν grad(1/σ²)`: the trace of the horizontal-pair formula for
    /// `S`, which the horizontal mean curvature must match when the
    /// horizontal distribution is integrable.
    pub fn horizontal_mean_curvature_predicted(&self) -> Vector {
        -(self.vertical() * self.grad_inv_sigma2()) * (0.5 * self.sigma2())
    }

    /// `ν[X, Y]` for the projected constant extensions of horizontal
    /// vectors `x`, `y` (tensorial on horizontal pairs). Uses only coordinate
    /// derivatives of the projector, no connection.
    pub fn vertical_bracket(&self, x: &Vector, y: &Vector) -> Vector {
        let hx = self.horizontal() * x;
        let hy = self.horizontal() * y;
        let b = self.d_horizontal_along(&hx) * y - self.d_horizontal_along(&hy) * x;
        self.vertical() * b
    }

    /// Right-hand side of the horizontal-pair formula
    /// `S_X Y = ½{ν[X,Y] − σ² g(X,Y) ν grad(1/σ²)}`.
    pub fn s_horizontal_predicted(&self, x: &Vector, y: &Vector) -> Vector {
        let hx = self.horizontal() * x;
        let hy = self.horizontal() * y;
        let nu_grad = self.vertical() * self.grad_inv_sigma2();
        (self.vertical_bracket(x, y) - nu_grad * (self.sigma2() * self.inner(&hx, &hy))) * 0.5
    }

    /// Largest horizontal bracket `‖ν[X_l, X_m]‖` over the orthonormal
    /// horizontal basis: zero iff the horizontal distribution is integrable
    /// at this point.
    pub fn integrability_defect(&self) -> f64 {
        let b = &self.frame.horizontal_basis;
        let mut worst: f64 = 0.0;
        for (i, x) in b.iter().enumerate() {
            for y in &b[i + 1..] {
                worst = worst.max(self.norm(&self.vertical_bracket(x, y)));
            }
        }
        worst
    }

    /// Intrinsic Ricci tensor of the fiber on the vertical basis, from the
    /// Gauss equation with `T` as the fiber second fundamental form:
    /// `Ric^ν(Y,Z) = Σ_a [g(R(U_a,Y)Z,U_a) + g(T_Y Z, T_{U_a}U_a) − g(T_{U_a}Z, T_Y U_a)]`.
    pub fn fiber_ricci(&self) -> Matrix {
        let r = self.local.riemann();
        let g = self.g();
        let b = &self.frame.vertical_basis;
        let tt: Vec<Vec<Vector>> = b
            .iter()
            .map(|x| b.iter().map(|y| self.oneill_t(x, y)).collect())
            .collect();
        let k = b.len();
        let mut out = Matrix::zeros(k, k);
        for y in 0..k {
            for z in y..k {
                let mut v = 0.0;
                for a in 0..k {
                    v += chart::curvature_form(&r, g, &b[a], &b[y], &b[z], &b[a]) + self.inner(&tt[y][z], &tt[a][a])
                        - self.inner(&tt[a][z], &tt[y][a]);
                }
                out[(y, z)] = v;
                out[(z, y)] = v;
            }
        }
        out
    }

    /// Ricci tensor of the total metric on the combined basis
    /// `(U_1.., X_1..)`.
    pub fn ricci_in_frame(&self) -> Matrix {
        let ric = self.local.ricci();
        let frame = self.frame.combined_basis();
        linalg::in_frame(&ric, &frame)
    }

    /// Base Ricci tensor at `ϑ(p)` on `(ϑ_*X, ϑ_*Y)`.
    pub fn base_ricci(&self, x: &Vector, y: &Vector) -> f64 {
        let ric = self.base_local.ricci();
        linalg::form(&ric, &(&self.jacobian * x), &(&self.jacobian * y))
    }

    /// Second fundamental form of the map, `(∇ϑ_*)(X, Y)`, in base
    /// coordinates:
    /// `X^i Y^j (∂_i∂_j ϑ^a − Γ^k_ij ∂_k ϑ^a + Γ̃^a_bc ∂_i ϑ^b ∂_j ϑ^c)`.
    pub fn second_fundamental_form(&self, x: &Vector, y: &Vector) -> Vector {
        let d2 = self.jacobian.nrows();
        let n = self.dim();
        let gamma = &self.local.gamma;
        let jx = &self.jacobian * x;
        let jy = &self.jacobian * y;
        let nabla_xy = gamma.apply(x, y);
        let base_term = self.base_local.gamma.apply(&jx, &jy);
        Vector::from_fn(d2, |a, _| {
            let mut v = 0.0;
            for i in 0..n {
                for j in 0..n {
                    v += x[i] * y[j] * self.d_jacobian[i][(a, j)];
                }
            }
            v - (self.jacobian.row(a) * &nabla_xy)[(0, 0)] + base_term[a]
        })
    }

    /// Conformal-submersion expression of the second fundamental form on
    /// horizontal vectors:
    /// `−(σ²/2){−g(X,Y) ϑ_* grad_H(1/σ²) + X(1/σ²) ϑ_*Y + Y(1/σ²) ϑ_*X}`.
    pub fn second_fundamental_form_conformal(&self, x: &Vector, y: &Vector) -> Vector {
        let gi = self.grad_inv_sigma2();
        let dinv = -&self.d_sigma2 / (self.sigma2() * self.sigma2());
        let jx = &self.jacobian * x;
        let jy = &self.jacobian * y;
        let jgrad_h = &self.jacobian * (self.horizontal() * &gi);
        (jgrad_h * (-self.inner(x, y)) + jy * dinv.dot(x) + jx * dinv.dot(y)) * (-0.5 * self.sigma2())
    }

    /// Tension field from the Clairaut/conformal formula
    /// `τ = (d₁−d₂) ϑ_*(∇β) + (d₂−2)(σ²/2) ϑ_*(grad_H 1/σ²)`.
    pub fn tension_field(&self, grad_beta: &Vector) -> Vector {
        let d2 = self.jacobian.nrows();
        let d1 = self.dim();
        let gi = self.horizontal() * self.grad_inv_sigma2();
        &self.jacobian * grad_beta * (d1 - d2) as f64 + &self.jacobian * gi * ((d2 as f64 - 2.0) * 0.5 * self.sigma2())
    }

    /// Tension field as the metric trace of the second fundamental form.
    pub fn tension_field_trace(&self) -> Vector {
        let d2 = self.jacobian.nrows();
        let mut tau = Vector::zeros(d2);
        for e in self
            .frame
            .vertical_basis
            .iter()
            .chain(self.frame.horizontal_basis.iter())
        {
            tau += self.second_fundamental_form(e, e);
        }
        tau
    }
}

#[cfg(test)]
mod tests;
