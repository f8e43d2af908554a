//! Intrinsic Riemannian geometry of a single charted manifold.
//!
//! Curvature convention: `R(X,Y)Z = ∇_X ∇_Y Z - ∇_Y ∇_X Z - ∇_[X,Y] Z`,
//! stored as `R^l_{ijk}` = `l`-component of `R(∂_j, ∂_k) ∂_i`, with
//! `Ric_ij = R^k_{ikj}`. Under this convention the unit sphere has
//! `Ric = +g` and scalar curvature `+2`.

mod field;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::linalg::{self, Matrix, Tensor3, Tensor4, Vector};

pub use field::{BracketField, ConstantField, FieldJet, GradientField, TangentField, VectorField};

#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    NonZero(Expr),
    Positive(Expr),
}

impl Constraint {
    fn holds(&self, p: &[f64]) -> Result<bool> {
        Ok(match self {
            Constraint::NonZero(e) => e.eval(p)? != 0.0,
            Constraint::Positive(e) => e.eval(p)? > 0.0,
        })
    }

    fn describe(&self) -> String {
        match self {
            Constraint::NonZero(e) => format!("{e} != 0"),
            Constraint::Positive(e) => format!("{e} > 0"),
        }
    }
}

/// Named coordinates with optional open domain constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    name: String,
    coords: Vec<String>,
    domain: Vec<Constraint>,
}

impl Chart {
    pub fn new(name: impl Into<String>, coords: &[&str]) -> Result<Self> {
        Self::from_names(name, coords.iter().map(|c| c.to_string()).collect())
    }

    pub fn from_names(name: impl Into<String>, coords: Vec<String>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Input("chart needs at least one coordinate".into()));
        }
        for (i, c) in coords.iter().enumerate() {
            if coords[..i].contains(c) {
                return Err(Error::Input(format!("duplicate coordinate `{c}`")));
            }
        }
        Ok(Self {
            name: name.into(),
            coords,
            domain: Vec::new(),
        })
    }

    pub fn with_constraint(mut self, c: Constraint) -> Self {
        self.domain.push(c);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.domain
    }

    pub fn parse_expr(&self, text: &str, constants: &BTreeMap<String, f64>) -> Result<Expr> {
        Ok(expr::parse(text, &self.coords, constants)?)
    }

    pub fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: p.len(),
            });
        }
        for c in &self.domain {
            if !c.holds(p)? {
                return Err(Error::OutsideDomain {
                    point: p.to_vec(),
                    constraint: c.describe(),
                });
            }
        }
        Ok(())
    }
}

/// Metric components and their first and second coordinate derivatives.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub g: Matrix,
    /// `dg[k] = ∂_k g`
    pub dg: Vec<Matrix>,
    /// `d2g[k * n + l] = ∂_k ∂_l g`
    pub d2g: Vec<Matrix>,
}

impl MetricJet {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn second(&self, k: usize, l: usize) -> &Matrix {
        &self.d2g[k * self.dim() + l]
    }

    /// Jet of the metric induced on the coordinate slice spanned by `idx`
    /// (other coordinates held fixed).
    pub fn restrict(&self, idx: &[usize]) -> MetricJet {
        let m = idx.len();
        let pick = |a: &Matrix| Matrix::from_fn(m, m, |i, j| a[(idx[i], idx[j])]);
        let mut d2g = Vec::with_capacity(m * m);
        for &k in idx {
            for &l in idx {
                d2g.push(pick(self.second(k, l)));
            }
        }
        MetricJet {
            g: pick(&self.g),
            dg: idx.iter().map(|&k| pick(&self.dg[k])).collect(),
            d2g,
        }
    }
}

/// Metric, inverse and `sqrt(det g)` at a point.
#[derive(Debug, Clone)]
pub struct MetricAt {
    pub g: Matrix,
    pub inverse: Matrix,
    pub sqrt_det: f64,
}

/// Everything the connection and curvature need at one point.
#[derive(Debug, Clone)]
pub struct LocalGeometry {
    pub jet: MetricJet,
    pub inverse: Matrix,
    pub sqrt_det: f64,
    /// `gamma.get(k, i, j) = Γ^k_ij`
    pub gamma: Tensor3,
}

impl LocalGeometry {
    pub fn from_jet(jet: MetricJet, point: &[f64]) -> Result<Self> {
        let n = jet.dim();
        let chol = jet
            .g
            .clone()
            .cholesky()
            .ok_or_else(|| Error::NotPositiveDefinite { point: point.to_vec() })?;
        let sqrt_det = chol.l().diagonal().product();
        let inverse = chol.inverse();
        let mut gamma = Tensor3::zeros(n);
        for i in 0..n {
            for j in i..n {
                let lowered = Vector::from_fn(n, |l, _| {
                    0.5 * (jet.dg[i][(j, l)] + jet.dg[j][(i, l)] - jet.dg[l][(i, j)])
                });
                let raised = &inverse * lowered;
                for k in 0..n {
                    gamma.set(k, i, j, raised[k]);
                    gamma.set(k, j, i, raised[k]);
                }
            }
        }
        Ok(Self {
            jet,
            inverse,
            sqrt_det,
            gamma,
        })
    }

    pub fn dim(&self) -> usize {
        self.jet.dim()
    }

    pub fn g(&self) -> &Matrix {
        &self.jet.g
    }

    /// `∂_k g^{-1}`
    pub fn inverse_derivative(&self, k: usize) -> Matrix {
        -(&self.inverse * &self.jet.dg[k] * &self.inverse)
    }

    /// `dgamma.get(m, k, i, j) = ∂_m Γ^k_ij`, from second metric derivatives.
    pub fn gamma_derivative(&self) -> Tensor4 {
        let n = self.dim();
        let jet = &self.jet;
        let mut out = Tensor4::zeros(n);
        for m in 0..n {
            let dinv = self.inverse_derivative(m);
            for i in 0..n {
                for j in i..n {
                    let lowered = Vector::from_fn(n, |l, _| {
                        0.5 * (jet.dg[i][(j, l)] + jet.dg[j][(i, l)] - jet.dg[l][(i, j)])
                    });
                    let dlowered = Vector::from_fn(n, |l, _| {
                        0.5 * (jet.second(m, i)[(j, l)] + jet.second(m, j)[(i, l)] - jet.second(m, l)[(i, j)])
                    });
                    let d = &dinv * lowered + &self.inverse * dlowered;
                    for k in 0..n {
                        out.set(m, k, i, j, d[k]);
                        out.set(m, k, j, i, d[k]);
                    }
                }
            }
        }
        out
    }

    /// `riemann.get(l, i, j, k) = R^l_{ijk}`.
    pub fn riemann(&self) -> Tensor4 {
        let n = self.dim();
        let dg = self.gamma_derivative();
        let g = &self.gamma;
        let mut r = Tensor4::zeros(n);
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in (j + 1)..n {
                        let mut v = dg.get(j, l, k, i) - dg.get(k, l, j, i);
                        for m in 0..n {
                            v += g.get(l, j, m) * g.get(m, k, i) - g.get(l, k, m) * g.get(m, j, i);
                        }
                        r.set(l, i, j, k, v);
                        r.set(l, i, k, j, -v);
                    }
                }
            }
        }
        r
    }

    pub fn ricci(&self) -> Matrix {
        ricci_from_riemann(&self.riemann())
    }

    pub fn scalar_curvature(&self) -> f64 {
        trace_with(&self.inverse, &self.ricci())
    }

    /// `(∇_v Y)` given the value and Jacobian of `Y`.
    pub fn covariant(&self, v: &Vector, y: &FieldJet) -> Vector {
        &y.jacobian * v + self.gamma.apply(v, &y.value)
    }

    /// `∂_i log sqrt(det g) = ½ tr(g^{-1} ∂_i g)`.
    pub fn log_volume_gradient(&self) -> Vector {
        let n = self.dim();
        Vector::from_fn(n, |i, _| 0.5 * trace_with(&self.inverse, &self.jet.dg[i]))
    }
}

pub fn ricci_from_riemann(r: &Tensor4) -> Matrix {
    let n = r.dim();
    Matrix::from_fn(n, n, |i, j| (0..n).map(|k| r.get(k, i, k, j)).sum())
}

/// `g(R(x, y) z, w)`.
pub fn curvature_form(r: &Tensor4, g: &Matrix, x: &Vector, y: &Vector, z: &Vector, w: &Vector) -> f64 {
    let n = r.dim();
    let gw = g * w;
    let mut v = 0.0;
    for l in 0..n {
        for i in 0..n {
            if z[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if x[j] == 0.0 {
                    continue;
                }
                for k in 0..n {
                    v += gw[l] * r.get(l, i, j, k) * z[i] * x[j] * y[k];
                }
            }
        }
    }
    v
}

/// `tr(a b) = a^{ij} b_ij` for symmetric `a`.
pub fn trace_with(a: &Matrix, b: &Matrix) -> f64 {
    a.component_mul(&b.transpose()).sum()
}

/// A chart together with metric components `g_ij` as expressions.
#[derive(Debug, Clone)]
pub struct MetricField {
    chart: Chart,
    entries: Vec<Vec<Expr>>,
}

impl MetricField {
    pub fn new(chart: Chart, rows: Vec<Vec<Expr>>) -> Result<Self> {
        let n = chart.dim();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Input(format!(
                "metric of chart `{}` must be {n}x{n}",
                chart.name()
            )));
        }
        if rows.iter().flatten().any(|e| e.coords() != chart.coords()) {
            return Err(Error::Input("metric entries must be over the chart coordinates".into()));
        }
        Ok(Self { chart, entries: rows })
    }

    /// Builds a symmetric metric from its upper triangle, row-major
    /// (`g11, g12, ..., g1n, g22, ...`).
    pub fn from_upper(chart: Chart, upper: Vec<Expr>) -> Result<Self> {
        let n = chart.dim();
        if upper.len() != n * (n + 1) / 2 {
            return Err(Error::Input(format!(
                "upper triangle of a {n}x{n} metric has {} entries, got {}",
                n * (n + 1) / 2,
                upper.len()
            )));
        }
        let mut rows = vec![Vec::with_capacity(n); n];
        let mut it = upper.into_iter();
        let mut tri = vec![vec![None; n]; n];
        for i in 0..n {
            for j in i..n {
                tri[i][j] = it.next();
            }
        }
        for i in 0..n {
            for j in 0..n {
                let (a, b) = if i <= j { (i, j) } else { (j, i) };
                rows[i].push(tri[a][b].clone().unwrap());
            }
        }
        Self::new(chart, rows)
    }

    /// Parses a full matrix of component strings.
    pub fn parse(chart: Chart, rows: &[&[&str]], constants: &BTreeMap<String, f64>) -> Result<Self> {
        let exprs = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| chart.parse_expr(s, constants))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(chart, exprs)
    }

    /// Parses a diagonal metric.
    pub fn diagonal(chart: Chart, diag: &[&str], constants: &BTreeMap<String, f64>) -> Result<Self> {
        let n = chart.dim();
        if diag.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: diag.len(),
            });
        }
        let zero = Expr::constant(0.0, chart.coords());
        let mut rows = vec![vec![zero; n]; n];
        for (i, d) in diag.iter().enumerate() {
            rows[i][i] = chart.parse_expr(d, constants)?;
        }
        Self::new(chart, rows)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Expr {
        &self.entries[i][j]
    }

    pub fn check_field(&self, x: &VectorField) -> Result<()> {
        if x.coords() != self.chart.coords() {
            return Err(Error::ChartMismatch {
                expected: self.chart.name().to_string(),
                got: format!("{:?}", x.coords()),
            });
        }
        Ok(())
    }

    fn check_dim(&self, x: &dyn TangentField) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        Ok(())
    }

    /// Metric values only.
    pub fn values(&self, p: &[f64]) -> Result<Matrix> {
        self.chart.check_point(p)?;
        let n = self.dim();
        let mut g = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.entries[i][j].eval(p)?;
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        self.check_lower(p, &g, |e| e.eval(p))?;
        Ok(g)
    }

    fn check_lower(&self, p: &[f64], g: &Matrix, eval: impl Fn(&Expr) -> Result<f64, expr::ExprError>) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..i {
                if self.entries[i][j] != self.entries[j][i] {
                    let v = eval(&self.entries[i][j])?;
                    let scale = 1.0 + g[(j, i)].abs();
                    if (v - g[(j, i)]).abs() > 1e-12 * scale {
                        return Err(Error::AsymmetricMetric {
                            i: j,
                            j: i,
                            point: p.to_vec(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn jet(&self, p: &[f64]) -> Result<MetricJet> {
        self.chart.check_point(p)?;
        let n = self.dim();
        let mut g = Matrix::zeros(n, n);
        let mut dg = vec![Matrix::zeros(n, n); n];
        let mut d2g = vec![Matrix::zeros(n, n); n * n];
        for i in 0..n {
            for j in i..n {
                let jet = self.entries[i][j].eval_jet2(p)?;
                g[(i, j)] = jet.value;
                g[(j, i)] = jet.value;
                for k in 0..n {
                    dg[k][(i, j)] = jet.gradient[k];
                    dg[k][(j, i)] = jet.gradient[k];
                    for l in 0..n {
                        let h = jet.hessian(k, l);
                        d2g[k * n + l][(i, j)] = h;
                        d2g[k * n + l][(j, i)] = h;
                    }
                }
            }
        }
        self.check_lower(p, &g, |e| e.eval(p))?;
        Ok(MetricJet { g, dg, d2g })
    }

    pub fn local(&self, p: &[f64]) -> Result<LocalGeometry> {
        LocalGeometry::from_jet(self.jet(p)?, p)
    }

    pub fn metric_at(&self, p: &[f64]) -> Result<MetricAt> {
        let g = self.values(p)?;
        let chol = g
            .clone()
            .cholesky()
            .ok_or_else(|| Error::NotPositiveDefinite { point: p.to_vec() })?;
        Ok(MetricAt {
            sqrt_det: chol.l().diagonal().product(),
            inverse: chol.inverse(),
            g,
        })
    }

    pub fn christoffel(&self, p: &[f64]) -> Result<Tensor3> {
        Ok(self.local(p)?.gamma)
    }

    /// `∇_X Y` at `p`.
    pub fn covariant_derivative(&self, x: &dyn TangentField, y: &dyn TangentField, p: &[f64]) -> Result<Vector> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        let local = self.local(p)?;
        Ok(local.covariant(&x.value(p)?, &y.field_jet(p)?))
    }

    pub fn riemann(&self, p: &[f64]) -> Result<Tensor4> {
        Ok(self.local(p)?.riemann())
    }

    pub fn ricci(&self, p: &[f64]) -> Result<Matrix> {
        Ok(self.local(p)?.ricci())
    }

    pub fn scalar_curvature(&self, p: &[f64]) -> Result<f64> {
        Ok(self.local(p)?.scalar_curvature())
    }

    pub fn gradient(&self, f: &Expr, p: &[f64]) -> Result<Vector> {
        let ginv = self.metric_at(p)?.inverse;
        let df = Vector::from_vec(f.eval_jet2(p)?.gradient);
        Ok(ginv * df)
    }

    pub fn gradient_field<'a>(&'a self, f: &'a Expr) -> GradientField<'a> {
        GradientField { metric: self, f }
    }

    /// Coordinate form `(1/√g) ∂_i(√g X^i)`.
    pub fn divergence(&self, x: &dyn TangentField, p: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let local = self.local(p)?;
        let xj = x.field_jet(p)?;
        Ok(xj.jacobian.trace() + local.log_volume_gradient().dot(&xj.value))
    }

    /// Frame form `Σ_k g(∇_{e_k} X, e_k)` over a `g`-orthonormal frame.
    pub fn divergence_frame(&self, x: &dyn TangentField, p: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let local = self.local(p)?;
        let xj = x.field_jet(p)?;
        let frame = linalg::orthonormal_frame(local.g());
        Ok(frame
            .iter()
            .map(|e| linalg::inner(local.g(), &local.covariant(e, &xj), e))
            .sum())
    }

    /// `Hess f(∂_i, ∂_j) = ∂_i ∂_j f - Γ^k_ij ∂_k f`.
    pub fn hessian_form(&self, f: &Expr, p: &[f64]) -> Result<Matrix> {
        let local = self.local(p)?;
        hessian_from_local(&local, f, p)
    }

    /// `g(∇_{∂_i} grad f, ∂_j)`, through the gradient field. Not symmetric by
    /// construction; its symmetry is a check.
    pub fn hessian_form_covariant(&self, f: &Expr, p: &[f64]) -> Result<Matrix> {
        let n = self.dim();
        let local = self.local(p)?;
        let grad = self.gradient_field(f).field_jet(p)?;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            let d = local.covariant(&linalg::unit(n, i), &grad);
            let lowered = local.g() * d;
            for j in 0..n {
                out[(i, j)] = lowered[j];
            }
        }
        Ok(out)
    }

    pub fn laplacian(&self, f: &Expr, p: &[f64]) -> Result<f64> {
        let local = self.local(p)?;
        Ok(trace_with(&local.inverse, &hessian_from_local(&local, f, p)?))
    }

    /// `(L_ξ g)_ij = ξ^k ∂_k g_ij + g_kj ∂_i ξ^k + g_ik ∂_j ξ^k`.
    pub fn lie_derivative_metric(&self, xi: &dyn TangentField, p: &[f64]) -> Result<Matrix> {
        self.check_dim(xi)?;
        let jet = self.jet(p)?;
        let xj = xi.field_jet(p)?;
        Ok(lie_from_jets(&jet, &xj))
    }

    /// `g(∇_i ξ, ∂_j) + g(∇_j ξ, ∂_i)`.
    pub fn lie_derivative_covariant(&self, xi: &dyn TangentField, p: &[f64]) -> Result<Matrix> {
        self.check_dim(xi)?;
        let n = self.dim();
        let local = self.local(p)?;
        let xj = xi.field_jet(p)?;
        let mut nabla = Matrix::zeros(n, n);
        for i in 0..n {
            let lowered = local.g() * local.covariant(&linalg::unit(n, i), &xj);
            for j in 0..n {
                nabla[(i, j)] = lowered[j];
            }
        }
        Ok(&nabla + nabla.transpose())
    }

    pub fn bracket(&self, x: &VectorField, y: &VectorField) -> Result<BracketField> {
        self.check_field(x)?;
        self.check_field(y)?;
        Ok(BracketField {
            x: x.clone(),
            y: y.clone(),
        })
    }
}

pub(crate) fn hessian_from_local(local: &LocalGeometry, f: &Expr, p: &[f64]) -> Result<Matrix> {
    let n = local.dim();
    let fj = f.eval_jet2(p)?;
    Ok(Matrix::from_fn(n, n, |i, j| {
        let mut h = fj.hessian(i, j);
        for k in 0..n {
            h -= local.gamma.get(k, i, j) * fj.gradient[k];
        }
        h
    }))
}

pub(crate) fn lie_from_jets(jet: &MetricJet, xi: &FieldJet) -> Matrix {
    let n = jet.dim();
    Matrix::from_fn(n, n, |i, j| {
        let mut v = 0.0;
        for k in 0..n {
            v += xi.value[k] * jet.dg[k][(i, j)]
                + jet.g[(k, j)] * xi.jacobian[(k, i)]
                + jet.g[(i, k)] * xi.jacobian[(k, j)];
        }
        v
    })
}
