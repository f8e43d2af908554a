//! Clairaut property: pointwise certificate and the geodesic invariant
//! `(r∘ζ) sin ω`.
//!
//! `ω` is the angle between the velocity and the horizontal space, so
//! `sin ω = ‖ν ζ̇‖ / ‖ζ̇‖`.

use crate::chart::MetricField;
use crate::error::{Error, Result};
use crate::linalg::{self, Vector};
use crate::report::{CheckRecord, CheckReport};
use crate::submersion::{SubmersionPoint, SubmersionScenario};

pub const ANCHOR_HORIZONTAL: &str = "∇β is horizontal";
pub const ANCHOR_UMBILIC: &str = "T_{U_{1}}U_{2}=-g_{M_{1}}(U_{1},U_{2})\\nabla \\beta";
pub const ANCHOR_FIBER_SIGMA: &str = "σ is constant along the fibers";
pub const ANCHOR_CONFORMAL: &str = "g_{M_{2}}(ϑ_{∗}X_{1},ϑ_{∗}X_{2})=σ^{2}(p_{1})g_{M_{1}}(X_{1},X_{2})";
pub const ANCHOR_INVARIANT: &str = "the function (r∘ζ)sin ω(s) is constant along ζ";

/// The three Clairaut residuals at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClairautResiduals {
    /// `‖ν∇β‖`
    pub horizontality: f64,
    /// `max_{i,j} ‖T_{U_i}U_j + g(U_i,U_j)∇β‖`
    pub umbilicity: f64,
    /// `max_k |U_k(σ²)|`
    pub fiber_dilation: f64,
}

pub fn clairaut_residuals(scn: &SubmersionScenario, at: &SubmersionPoint) -> Result<ClairautResiduals> {
    let beta = scn.beta()?;
    let grad = scn.submersion.total().gradient(beta, at.point())?;
    let horizontality = at.norm(&(at.vertical() * &grad));
    let basis = &at.frame.vertical_basis;
    let mut umbilicity: f64 = 0.0;
    for (i, ui) in basis.iter().enumerate() {
        for (j, uj) in basis.iter().enumerate() {
            let mut r = at.oneill_t(ui, uj);
            if i == j {
                r += &grad;
            }
            umbilicity = umbilicity.max(at.norm(&r));
        }
    }
    let fiber_dilation = basis.iter().map(|u| at.d_sigma2.dot(u).abs()).fold(0.0, f64::max);
    Ok(ClairautResiduals {
        horizontality,
        umbilicity,
        fiber_dilation,
    })
}

/// Pointwise Clairaut certificate over `samples`. PASS iff all three
/// conditions (and horizontal conformality) hold within the analytic
/// tolerance at every sample.
pub fn clairaut_certificate(scn: &SubmersionScenario, samples: &[SubmersionPoint]) -> Result<CheckReport> {
    scn.beta()?;
    let tol = scn.tolerances.analytic;
    let mut a = Vec::with_capacity(samples.len());
    let mut b = Vec::with_capacity(samples.len());
    let mut c = Vec::with_capacity(samples.len());
    let mut conf = Vec::with_capacity(samples.len());
    for at in samples {
        let r = clairaut_residuals(scn, at)?;
        a.push(r.horizontality);
        b.push(r.umbilicity);
        c.push(r.fiber_dilation);
        conf.push(at.frame.conformality_residual);
    }
    let mut report = CheckReport::default();
    report.push(CheckRecord::new("conformality", ANCHOR_CONFORMAL, tol, conf));
    report.push(CheckRecord::new(
        "clairaut.horizontal_gradient",
        ANCHOR_HORIZONTAL,
        tol,
        a,
    ));
    report.push(CheckRecord::new("clairaut.umbilical_fibers", ANCHOR_UMBILIC, tol, b));
    report.push(CheckRecord::new(
        "clairaut.fiber_constant_dilation",
        ANCHOR_FIBER_SIGMA,
        tol,
        c,
    ));
    Ok(report)
}

/// Position and velocity at arc parameter `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSample {
    pub s: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub speed: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<GeodesicSample>,
    /// Set when the curve left the chart domain before the requested length.
    pub truncated: Option<String>,
}

impl Trajectory {
    pub fn speed_drift(&self) -> f64 {
        let (lo, hi) = self
            .samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                (lo.min(s.speed), hi.max(s.speed))
            });
        hi - lo
    }

    pub fn end(&self) -> &GeodesicSample {
        self.samples.last().expect("trajectory has its initial sample")
    }
}

fn acceleration(m: &MetricField, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let gamma = m.christoffel(x)?;
    let v = Vector::from_row_slice(v);
    Ok(gamma.apply(&v, &v).iter().map(|a| -a).collect())
}

fn speed(m: &MetricField, x: &[f64], v: &[f64]) -> Result<f64> {
    let g = m.values(x)?;
    Ok(linalg::norm(&g, &Vector::from_row_slice(v)))
}

fn axpy(x: &[f64], h: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + h * b).collect()
}

/// Classical RK4 on `ẍ^k + Γ^k_ij ẋ^i ẋ^j = 0` over `[0, length]` with a
/// fixed step (the last step is shortened to land on `length`).
pub fn geodesic_integrate(m: &MetricField, p0: &[f64], v0: &[f64], length: f64, step: f64) -> Result<Trajectory> {
    let n = m.dim();
    if p0.len() != n || v0.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: if p0.len() != n { p0.len() } else { v0.len() },
        });
    }
    if !(step > 0.0) || !(length >= 0.0) || !step.is_finite() || !length.is_finite() {
        return Err(Error::Input(format!(
            "need step > 0 and length >= 0, got {step} and {length}"
        )));
    }
    if v0.iter().all(|c| *c == 0.0) {
        return Err(Error::Input("initial velocity must be nonzero".into()));
    }
    m.chart().check_point(p0)?;
    let mut samples = vec![GeodesicSample {
        s: 0.0,
        x: p0.to_vec(),
        v: v0.to_vec(),
        speed: speed(m, p0, v0)?,
    }];
    let steps = ((length / step) - 1e-9).ceil().max(0.0) as usize;
    let mut truncated = None;
    let (mut x, mut v) = (p0.to_vec(), v0.to_vec());
    for k in 0..steps {
        let s0 = k as f64 * step;
        let h = step.min(length - s0);
        let stage = || -> Result<(Vec<f64>, Vec<f64>)> {
            let k1x = v.clone();
            let k1v = acceleration(m, &x, &v)?;
            let x2 = axpy(&x, 0.5 * h, &k1x);
            let v2 = axpy(&v, 0.5 * h, &k1v);
            m.chart().check_point(&x2)?;
            let k2v = acceleration(m, &x2, &v2)?;
            let x3 = axpy(&x, 0.5 * h, &v2);
            let v3 = axpy(&v, 0.5 * h, &k2v);
            m.chart().check_point(&x3)?;
            let k3v = acceleration(m, &x3, &v3)?;
            let x4 = axpy(&x, h, &v3);
            let v4 = axpy(&v, h, &k3v);
            m.chart().check_point(&x4)?;
            let k4v = acceleration(m, &x4, &v4)?;
            let nx = (0..n)
                .map(|i| x[i] + h / 6.0 * (k1x[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]))
                .collect::<Vec<_>>();
            let nv = (0..n)
                .map(|i| v[i] + h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]))
                .collect::<Vec<_>>();
            m.chart().check_point(&nx)?;
            Ok((nx, nv))
        };
        match stage().and_then(|(nx, nv)| Ok((speed(m, &nx, &nv)?, nx, nv))) {
            Ok((sp, nx, nv)) => {
                x = nx;
                v = nv;
                samples.push(GeodesicSample {
                    s: s0 + h,
                    x: x.clone(),
                    v: v.clone(),
                    speed: sp,
                });
            }
            Err(e) if e.is_pointwise() => {
                truncated = Some(format!("stopped at s = {s0}: {e}"));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Trajectory { samples, truncated })
}

/// A geodesic sample with its Clairaut data.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GeodesicState {
    pub s: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub speed: f64,
    /// Angle between the velocity and the horizontal space, in `[0, π/2]`.
    pub omega: f64,
    pub clairaut_value: f64,
}

/// Clairaut value series and its drift check (`max − min ≤ tol·(1+|mean|)`).
pub fn clairaut_monitor(
    scn: &SubmersionScenario,
    trajectory: &Trajectory,
) -> Result<(Vec<GeodesicState>, CheckRecord)> {
    let mut states = Vec::with_capacity(trajectory.samples.len());
    for s in &trajectory.samples {
        let frame = scn.submersion.frame_point(&s.x)?;
        let g = scn.submersion.total().values(&s.x)?;
        let v = Vector::from_row_slice(&s.v);
        let sin = (linalg::norm(&g, &(&frame.vertical * &v)) / linalg::norm(&g, &v)).clamp(0.0, 1.0);
        states.push(GeodesicState {
            s: s.s,
            x: s.x.clone(),
            v: s.v.clone(),
            speed: s.speed,
            omega: sin.asin(),
            clairaut_value: scn.radius(&s.x)? * sin,
        });
    }
    let values: Vec<f64> = states.iter().map(|s| s.clairaut_value).collect();
    let drift = drift(&values);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let tol = scn.tolerances.drift * (1.0 + mean.abs());
    let mut rec = CheckRecord::new("clairaut.geodesic_invariant", ANCHOR_INVARIANT, tol, vec![drift]);
    if let Some(t) = &trajectory.truncated {
        rec = rec.with_note(format!("trajectory truncated: {t}"));
    }
    Ok((states, rec))
}

/// `max − min` of a series.
pub fn drift(values: &[f64]) -> f64 {
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(*v), hi.max(*v))
    });
    hi - lo
}
