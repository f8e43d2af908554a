use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::{self, Expr, Jet2};
use crate::linalg::{Matrix, Vector};

use super::MetricField;

/// Value and coordinate Jacobian of a vector field at a point.
/// `jacobian[(k, i)]` is `d_i X^k`.
#[derive(Debug, Clone)]
pub struct FieldJet {
    pub value: Vector,
    pub jacobian: Matrix,
}

/// Anything that can report its value and first derivatives at a point.
pub trait TangentField {
    fn dim(&self) -> usize;
    fn field_jet(&self, p: &[f64]) -> Result<FieldJet>;

    fn value(&self, p: &[f64]) -> Result<Vector> {
        Ok(self.field_jet(p)?.value)
    }
}

/// A vector field given by coordinate-basis component expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    coords: Vec<String>,
    components: Vec<Expr>,
}

impl VectorField {
    pub fn new(coords: &[String], components: Vec<Expr>) -> Result<Self> {
        if components.len() != coords.len() {
            return Err(Error::Dimension {
                expected: coords.len(),
                got: components.len(),
            });
        }
        if let Some(c) = components.iter().find(|c| c.coords() != coords) {
            return Err(Error::Input(format!(
                "component `{c}` is not over coordinates {coords:?}"
            )));
        }
        Ok(Self {
            coords: coords.to_vec(),
            components,
        })
    }

    pub fn parse(coords: &[String], components: &[&str], constants: &BTreeMap<String, f64>) -> Result<Self> {
        let exprs = components
            .iter()
            .map(|c| expr::parse(c, coords, constants))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(coords, exprs)
    }

    pub fn zero(coords: &[String]) -> Self {
        Self {
            coords: coords.to_vec(),
            components: (0..coords.len()).map(|_| Expr::constant(0.0, coords)).collect(),
        }
    }

    /// The coordinate field `d/d coords[i]`.
    pub fn coordinate(coords: &[String], i: usize) -> Self {
        Self {
            coords: coords.to_vec(),
            components: (0..coords.len())
                .map(|k| Expr::constant(if k == i { 1.0 } else { 0.0 }, coords))
                .collect(),
        }
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn jets(&self, p: &[f64]) -> Result<Vec<Jet2>> {
        Ok(self
            .components
            .iter()
            .map(|c| c.eval_jet2(p))
            .collect::<Result<Vec<_>, _>>()?)
    }
}

impl TangentField for VectorField {
    fn dim(&self) -> usize {
        self.coords.len()
    }

    fn field_jet(&self, p: &[f64]) -> Result<FieldJet> {
        let n = self.dim();
        let jets = self.jets(p)?;
        Ok(FieldJet {
            value: Vector::from_fn(n, |k, _| jets[k].value),
            jacobian: Matrix::from_fn(n, n, |k, i| jets[k].gradient[i]),
        })
    }

    fn value(&self, p: &[f64]) -> Result<Vector> {
        let vals = self
            .components
            .iter()
            .map(|c| c.eval(p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Vector::from_vec(vals))
    }
}

/// A field with constant coordinate components.
#[derive(Debug, Clone)]
pub struct ConstantField(pub Vector);

impl TangentField for ConstantField {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn field_jet(&self, _p: &[f64]) -> Result<FieldJet> {
        let n = self.0.len();
        Ok(FieldJet {
            value: self.0.clone(),
            jacobian: Matrix::zeros(n, n),
        })
    }
}

/// `grad f` with respect to a metric, differentiated analytically.
pub struct GradientField<'a> {
    pub metric: &'a MetricField,
    pub f: &'a Expr,
}

impl TangentField for GradientField<'_> {
    fn dim(&self) -> usize {
        self.metric.dim()
    }

    fn field_jet(&self, p: &[f64]) -> Result<FieldJet> {
        let n = self.dim();
        let local = self.metric.local(p)?;
        let fj = self.f.eval_jet2(p)?;
        let df = Vector::from_vec(fj.gradient.clone());
        let ginv = &local.inverse;
        let value = ginv * &df;
        let mut jacobian = Matrix::zeros(n, n);
        for i in 0..n {
            let dginv = local.inverse_derivative(i);
            let d2f = Vector::from_fn(n, |l, _| fj.hessian(i, l));
            let col = dginv * &df + ginv * d2f;
            jacobian.set_column(i, &col);
        }
        Ok(FieldJet { value, jacobian })
    }
}

/// Lie bracket `[X, Y]` of two expression fields, evaluable with first
/// derivatives (from the second-order jets of the components).
#[derive(Debug, Clone)]
pub struct BracketField {
    pub x: VectorField,
    pub y: VectorField,
}

impl TangentField for BracketField {
    fn dim(&self) -> usize {
        self.x.dim()
    }

    fn field_jet(&self, p: &[f64]) -> Result<FieldJet> {
        let n = self.dim();
        let xj = self.x.jets(p)?;
        let yj = self.y.jets(p)?;
        let value = Vector::from_fn(n, |k, _| {
            (0..n)
                .map(|i| xj[i].value * yj[k].gradient[i] - yj[i].value * xj[k].gradient[i])
                .sum()
        });
        let jacobian = Matrix::from_fn(n, n, |k, j| {
            (0..n)
                .map(|i| {
                    xj[i].gradient[j] * yj[k].gradient[i] + xj[i].value * yj[k].hessian(i, j)
                        - yj[i].gradient[j] * xj[k].gradient[i]
                        - yj[i].value * xj[k].hessian(i, j)
                })
                .sum()
        });
        Ok(FieldJet { value, jacobian })
    }
}
