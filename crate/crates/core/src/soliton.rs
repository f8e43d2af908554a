//! Ricci-soliton residuals and the related Einstein, conformal-field,
//! gradient-soliton and scalar-curvature checks.
//!
//! Matrix residuals are measured as the largest entry in a g-orthonormal
//! frame, so they are independent of the coordinate scaling.

use serde::Serialize;

use crate::chart::{GradientField, MetricField, TangentField};
use crate::error::Result;
use crate::expr::Expr;
use crate::linalg::{self, Matrix, Vector};
use crate::report::{CheckRecord, CheckReport};
use crate::submersion::{SubmersionPoint, SubmersionScenario};

pub const ANCHOR_SOLITON: &str = "\\frac{1}{2}(L_{ξ}g_{M_{1}})+Ric+μ g_{M_{1}}=0";
pub const ANCHOR_SOLITON_BLOCK: &str = "½(L_{ξ}g_{M_{1}})(U_{1},U_{2})+Ric(U_{1},U_{2})+μ g_{M_{1}}(U_{1},U_{2})=0";
pub const ANCHOR_EINSTEIN: &str = "Ricci solitons are a generalization of an Einstein metric";
pub const ANCHOR_CONFORMAL: &str = "L_{ξ}g_{M_{1}}=2β g_{M_{1}}";
pub const ANCHOR_KILLING: &str = "W is a killing vector field";
pub const ANCHOR_GRADIENT: &str = "Hessβ (X_{1},X_{2})+Ric(X_{1},X_{2})+μ g_{M_{1}}(X_{1},X_{2})=0";
pub const ANCHOR_SCALAR_SPLIT: &str = "s=s^{v}+\\frac{1}{σ^{2}}s^{M_{2}}";
pub const ANCHOR_SCALAR_CONSTANT: &str = "M₁ has constant scalar curvature by −μ d_{1}";
pub const ANCHOR_POISSON: &str = "Δβ =div(∇β)=−s−μ d_{1}";
pub const ANCHOR_TRACE: &str = "div ξ+s+μ d_{1}=0";
pub const ANCHOR_MU_FORMULA: &str =
    "μ =−e^{2u_{1}}−\\frac{e^{u_{1}}(λ_{1}λ_{5}λ_{7}…)}{λ_{1}λ_{4}+λ_{2}λ_{5}+λ_{3}λ_{6}}";

/// `|μ| ≤ STEADY_TOL` counts as steady.
pub const STEADY_TOL: f64 = 1e-9;
/// Relative spread above which a fitted μ is non-constant.
pub const CONSTANCY_TOL: f64 = 1e-6;
/// Killing verdict threshold on `‖L_ξ g‖`.
pub const KILLING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Shrinking,
    Steady,
    Expanding,
    NonConstant,
}

pub fn classify(mu: f64) -> Classification {
    if mu.abs() <= STEADY_TOL {
        Classification::Steady
    } else if mu < 0.0 {
        Classification::Shrinking
    } else {
        Classification::Expanding
    }
}

/// Whether a series is constant up to `CONSTANCY_TOL·(1+|mean|)`.
pub fn is_constant(values: &[f64]) -> bool {
    if values.is_empty() {
        return true;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    crate::clairaut::drift(values) <= CONSTANCY_TOL * (1.0 + mean.abs())
}

/// Largest entry of a symmetric form in a g-orthonormal frame.
pub fn frame_sup(g: &Matrix, form: &Matrix) -> f64 {
    linalg::max_abs(&linalg::in_frame(form, &linalg::orthonormal_frame(g)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockResiduals {
    pub vertical: f64,
    pub mixed: f64,
    pub horizontal: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolitonVerdict {
    pub residual_max: f64,
    pub residuals: Vec<f64>,
    pub mu_used: f64,
    pub mu_fit: Vec<f64>,
    pub classification: Classification,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<BlockResiduals>,
}

/// `½L_ξg + Ric + μg` in coordinates at `p`.
pub fn soliton_matrix(m: &MetricField, xi: &dyn TangentField, mu: f64, p: &[f64]) -> Result<Matrix> {
    let local = m.local(p)?;
    let lie = m.lie_derivative_metric(xi, p)?;
    Ok(lie * 0.5 + local.ricci() + local.g() * mu)
}

fn mu_at(m: &MetricField, xi: &dyn TangentField, p: &[f64]) -> Result<(f64, Matrix, Matrix)> {
    let local = m.local(p)?;
    let lie = m.lie_derivative_metric(xi, p)?;
    let partial = &lie * 0.5 + local.ricci();
    let mu = -crate::chart::trace_with(&local.inverse, &partial) / m.dim() as f64;
    Ok((mu, partial, local.g().clone()))
}

fn verdict(residuals: Vec<f64>, mu: f64, mu_fit: Vec<f64>, blocks: Option<BlockResiduals>) -> SolitonVerdict {
    let residual_max = residuals.iter().fold(0.0_f64, |a, b| a.max(*b));
    let classification = if is_constant(&mu_fit) {
        classify(mu)
    } else {
        Classification::NonConstant
    };
    SolitonVerdict {
        residual_max,
        residuals,
        mu_used: mu,
        mu_fit,
        classification,
        blocks,
    }
}

pub fn soliton_residual(
    m: &MetricField,
    xi: &dyn TangentField,
    mu: f64,
    points: &[Vec<f64>],
) -> Result<SolitonVerdict> {
    let mut residuals = Vec::with_capacity(points.len());
    let mut fit = Vec::with_capacity(points.len());
    for p in points {
        let (mu_p, partial, g) = mu_at(m, xi, p)?;
        residuals.push(frame_sup(&g, &(partial + &g * mu)));
        fit.push(mu_p);
    }
    Ok(verdict(residuals, mu, fit, None))
}

/// Soliton residual contracted on the submersion's vertical/horizontal
/// bases, with per-block maxima.
pub fn soliton_residual_blocks(
    scn: &SubmersionScenario,
    xi: &dyn TangentField,
    mu: f64,
    samples: &[SubmersionPoint],
) -> Result<SolitonVerdict> {
    let m = scn.submersion.total();
    let mut residuals = Vec::with_capacity(samples.len());
    let mut fit = Vec::with_capacity(samples.len());
    let mut blocks = BlockResiduals {
        vertical: 0.0,
        mixed: 0.0,
        horizontal: 0.0,
    };
    for at in samples {
        let (mu_p, partial, g) = mu_at(m, xi, at.point())?;
        let full = partial + &g * mu;
        let basis = at.frame.combined_basis();
        let nv = at.frame.vertical_basis.len();
        let inf = linalg::in_frame(&full, &basis);
        let mut worst: f64 = 0.0;
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                let v = inf[(i, j)].abs();
                worst = worst.max(v);
                let slot = match (i < nv, j < nv) {
                    (true, true) => &mut blocks.vertical,
                    (false, false) => &mut blocks.horizontal,
                    _ => &mut blocks.mixed,
                };
                *slot = slot.max(v);
            }
        }
        residuals.push(worst);
        fit.push(mu_p);
    }
    Ok(verdict(residuals, mu, fit, Some(blocks)))
}

#[derive(Debug, Clone, Serialize)]
pub struct MuFit {
    pub values: Vec<f64>,
    pub mean: f64,
    pub constant: bool,
    pub classification: Classification,
}

/// Pointwise least-squares `μ(p) = −tr_g(½L_ξg + Ric)/d`.
pub fn fit_mu(m: &MetricField, xi: &dyn TangentField, points: &[Vec<f64>]) -> Result<MuFit> {
    let values = points
        .iter()
        .map(|p| mu_at(m, xi, p).map(|r| r.0))
        .collect::<Result<Vec<_>>>()?;
    let mean = if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    };
    let constant = is_constant(&values);
    Ok(MuFit {
        classification: if constant {
            classify(mean)
        } else {
            Classification::NonConstant
        },
        values,
        mean,
        constant,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EinsteinFit {
    pub lambda: Vec<f64>,
    pub residuals: Vec<f64>,
    pub einstein: bool,
}

/// `λ(p) = s/d` and `‖Ric − λg‖`; Einstein iff every residual is within
/// `tol` and λ is constant.
pub fn einstein_residual(m: &MetricField, points: &[Vec<f64>], tol: f64) -> Result<EinsteinFit> {
    let mut lambda = Vec::with_capacity(points.len());
    let mut residuals = Vec::with_capacity(points.len());
    for p in points {
        let local = m.local(p)?;
        let ric = local.ricci();
        let l = crate::chart::trace_with(&local.inverse, &ric) / m.dim() as f64;
        residuals.push(frame_sup(local.g(), &(ric - local.g() * l)));
        lambda.push(l);
    }
    let einstein = !points.is_empty() && residuals.iter().all(|r| *r <= tol) && is_constant(&lambda);
    Ok(EinsteinFit {
        lambda,
        residuals,
        einstein,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConformalFit {
    pub beta1: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// `β₁` and `‖L_ξg|_W − 2β₁ g|_W‖` on the span of the orthonormal `basis`.
pub fn conformal_on(lie: &Matrix, basis: &[Vector]) -> (f64, f64) {
    let b = linalg::in_frame(lie, basis);
    let k = basis.len();
    let beta1 = b.trace() / (2.0 * k as f64);
    let resid = b - Matrix::identity(k, k) * (2.0 * beta1);
    (beta1, linalg::max_abs(&resid))
}

/// `β₁(p) = tr(g⁻¹L_ξg)/(2d)` and `‖L_ξg − 2β₁g‖`.
pub fn conformal_field_check(m: &MetricField, xi: &dyn TangentField, points: &[Vec<f64>]) -> Result<ConformalFit> {
    let mut beta1 = Vec::with_capacity(points.len());
    let mut residuals = Vec::with_capacity(points.len());
    for p in points {
        let g = m.values(p)?;
        let lie = m.lie_derivative_metric(xi, p)?;
        let (b, r) = conformal_on(&lie, &linalg::orthonormal_frame(&g));
        beta1.push(b);
        residuals.push(r);
    }
    Ok(ConformalFit { beta1, residuals })
}

/// PASS iff `‖L_ξg‖ ≤ 1e-9` at every point.
pub fn killing_check(m: &MetricField, xi: &dyn TangentField, points: &[Vec<f64>]) -> Result<CheckRecord> {
    let residuals = points
        .iter()
        .map(|p| Ok(frame_sup(&m.values(p)?, &m.lie_derivative_metric(xi, p)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckRecord::new(
        "soliton.killing",
        ANCHOR_KILLING,
        KILLING_TOL,
        residuals,
    ))
}

/// `‖Hess β + Ric + μg‖` at each point.
pub fn gradient_soliton_residual(m: &MetricField, beta: &Expr, mu: f64, points: &[Vec<f64>]) -> Result<Vec<f64>> {
    points
        .iter()
        .map(|p| {
            let local = m.local(p)?;
            let hess = m.hessian_form(beta, p)?;
            Ok(frame_sup(local.g(), &(hess + local.ricci() + local.g() * mu)))
        })
        .collect()
}

/// Same residual through `ξ = ∇β` and the Lie derivative.
pub fn gradient_soliton_residual_lie(m: &MetricField, beta: &Expr, mu: f64, points: &[Vec<f64>]) -> Result<Vec<f64>> {
    let xi = GradientField { metric: m, f: beta };
    Ok(soliton_residual(m, &xi, mu, points)?.residuals)
}

/// `max ‖ξ − ∇β‖` over the samples; infinite without `ξ` or `β`.
fn potential_gap(scn: &SubmersionScenario, samples: &[SubmersionPoint]) -> Result<f64> {
    let (Some(xi), Some(beta)) = (&scn.xi, &scn.beta) else {
        return Ok(f64::INFINITY);
    };
    let m = scn.submersion.total();
    let mut gap: f64 = 0.0;
    for at in samples {
        let d = xi.value(at.point())? - m.gradient(beta, at.point())?;
        gap = gap.max(at.norm(&d));
    }
    Ok(gap)
}

/// Scalar-curvature pieces at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarSplit {
    pub total: f64,
    pub fiber: f64,
    pub base: f64,
    pub sigma2: f64,
    /// `max ‖T_{U_i}U_j‖`: fibers totally geodesic when 0.
    pub fiber_geodesic_defect: f64,
    /// `max ‖S_{X_i}X_j‖`: horizontal distribution totally geodesic when 0.
    pub horizontal_geodesic_defect: f64,
    /// `‖grad σ²‖`: homothetic when 0.
    pub homothety_defect: f64,
}

pub fn scalar_split(at: &SubmersionPoint) -> ScalarSplit {
    let fiber = at.fiber_ricci().trace();
    let base = at.base_local.scalar_curvature();
    let v = &at.frame.vertical_basis;
    let h = &at.frame.horizontal_basis;
    let mut tdef: f64 = 0.0;
    for a in v {
        for b in v {
            tdef = tdef.max(at.norm(&at.oneill_t(a, b)));
        }
    }
    let mut sdef: f64 = 0.0;
    for a in h {
        for b in h {
            sdef = sdef.max(at.norm(&at.oneill_s(a, b)));
        }
    }
    let grad = &at.local.inverse * &at.d_sigma2;
    ScalarSplit {
        total: at.local.scalar_curvature(),
        fiber,
        base,
        sigma2: at.sigma2(),
        fiber_geodesic_defect: tdef,
        horizontal_geodesic_defect: sdef,
        homothety_defect: at.norm(&grad),
    }
}

/// Scalar-curvature identities: the split `s = s^v + σ⁻²s^{M₂}` (gated by
/// its totally-geodesic preconditions), `s + μd₁` and `Δβ + s + μd₁`.
pub fn scalar_identity_check(scn: &SubmersionScenario, samples: &[SubmersionPoint]) -> Result<CheckReport> {
    let tol = scn.tolerances.analytic;
    let m = scn.submersion.total();
    let d1 = m.dim() as f64;
    let mut report = CheckReport::default();
    let splits: Vec<ScalarSplit> = samples.iter().map(scalar_split).collect();
    let split: Vec<f64> = splits.iter().map(|s| s.total - s.fiber - s.base / s.sigma2).collect();
    let pre = [
        (
            "fibers totally geodesic",
            splits.iter().map(|s| s.fiber_geodesic_defect).fold(0.0, f64::max),
        ),
        (
            "horizontal distribution totally geodesic",
            splits.iter().map(|s| s.horizontal_geodesic_defect).fold(0.0, f64::max),
        ),
        (
            "homothetic",
            splits.iter().map(|s| s.homothety_defect).fold(0.0, f64::max),
        ),
    ];
    let mut rec = CheckRecord::new("scalar.split", ANCHOR_SCALAR_SPLIT, tol, split);
    let failing: Vec<String> = pre
        .iter()
        .filter(|(_, d)| !(*d <= tol))
        .map(|(n, d)| format!("precondition `{n}` fails (defect {d:.3e})"))
        .collect();
    if !failing.is_empty() {
        rec = rec.report_only();
        for f in failing {
            rec = rec.with_note(f);
        }
    }
    report.push(rec);
    if let Some(mu) = scn.mu {
        let r: Vec<f64> = splits.iter().map(|s| s.total + mu * d1).collect();
        report.push(
            CheckRecord::new("scalar.constant", ANCHOR_SCALAR_CONSTANT, tol, r)
                .report_only()
                .with_note("the trace of the soliton equation gives s + μd₁ = −div ξ; see soliton.trace"),
        );
        if let Some(xi) = &scn.xi {
            let r = samples
                .iter()
                .zip(&splits)
                .map(|(at, s)| Ok(m.divergence(xi, at.point())? + s.total + mu * d1))
                .collect::<Result<Vec<_>>>()?;
            report.push(CheckRecord::new("soliton.trace", ANCHOR_TRACE, tol, r));
        }
        if let Some(beta) = &scn.beta {
            let r = samples
                .iter()
                .zip(&splits)
                .map(|(at, s)| Ok(m.laplacian(beta, at.point())? + s.total + mu * d1))
                .collect::<Result<Vec<_>>>()?;
            let mut rec = CheckRecord::new("scalar.poisson", ANCHOR_POISSON, tol, r);
            let gap = potential_gap(scn, samples)?;
            if !(gap <= tol) {
                rec = rec.report_only().with_note(format!(
                    "ξ is not ∇β (max gap {gap:.3e}); the Poisson equation is not implied"
                ));
            }
            report.push(rec);
        }
    }
    report.detail("scalar_split", serde_json::to_value(&splits).expect("serializable"));
    Ok(report)
}

/// Every soliton-side check the scenario supports. The soliton equation is a
/// gate only when the scenario fixes `μ`; otherwise it is evaluated at the
/// fitted mean and reported.
pub fn soliton_report(scn: &SubmersionScenario, samples: &[SubmersionPoint]) -> Result<CheckReport> {
    let m = scn.submersion.total();
    let tol = scn.tolerances.analytic;
    let points: Vec<Vec<f64>> = samples.iter().map(|a| a.point().to_vec()).collect();
    let mut report = CheckReport::default();
    if let Some(xi) = &scn.xi {
        let fit = fit_mu(m, xi, &points)?;
        let mu = scn.mu.unwrap_or(fit.mean);
        let v = soliton_residual_blocks(scn, xi, mu, samples)?;
        let mut rec = CheckRecord::new("soliton.residual", ANCHOR_SOLITON, tol, v.residuals.clone());
        if scn.mu.is_none() {
            rec = rec
                .report_only()
                .with_note(format!("no μ supplied; evaluated at the fitted mean {mu:.6e}"));
        }
        if !fit.constant {
            rec = rec.with_note("fitted μ is not constant over the samples");
        }
        report.push(rec);
        report.detail("soliton", serde_json::to_value(&v).expect("serializable"));
        report.detail("mu_fit", serde_json::to_value(&fit).expect("serializable"));
        let conf = conformal_field_check(m, xi, &points)?;
        report.push(
            CheckRecord::new("soliton.conformal_field", ANCHOR_CONFORMAL, tol, conf.residuals.clone()).report_only(),
        );
        report.detail("conformal_field", serde_json::to_value(&conf).expect("serializable"));
        report.push(killing_check(m, xi, &points)?.report_only());
    }
    let e = einstein_residual(m, &points, tol)?;
    report.push(CheckRecord::new("soliton.einstein", ANCHOR_EINSTEIN, tol, e.residuals.clone()).report_only());
    report.detail("einstein", serde_json::to_value(&e).expect("serializable"));
    if let (Some(beta), Some(mu)) = (&scn.beta, scn.mu) {
        let hess = gradient_soliton_residual(m, beta, mu, &points)?;
        let lie = gradient_soliton_residual_lie(m, beta, mu, &points)?;
        let agree: Vec<f64> = hess.iter().zip(&lie).map(|(a, b)| a - b).collect();
        report.push(CheckRecord::new("soliton.gradient", ANCHOR_GRADIENT, tol, hess).report_only());
        report.push(CheckRecord::new(
            "soliton.gradient_paths_agree",
            ANCHOR_GRADIENT,
            tol,
            agree,
        ));
    }
    report.merge(scalar_identity_check(scn, samples)?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::VectorField;
    use crate::models;

    fn pts(v: &[[f64; 2]]) -> Vec<Vec<f64>> {
        v.iter().map(|p| p.to_vec()).collect()
    }

    #[test]
    fn sphere_is_a_shrinking_soliton() {
        let m = models::unit_sphere();
        let zero = VectorField::zero(m.chart().coords());
        let p = pts(&[[0.4, 0.1], [1.2, -2.0], [2.5, 3.0]]);
        let v = soliton_residual(&m, &zero, -1.0, &p).unwrap();
        assert!(v.residual_max < 1e-12);
        assert_eq!(v.classification, Classification::Shrinking);
        let fit = fit_mu(&m, &zero, &p).unwrap();
        assert!(fit.values.iter().all(|mu| (mu + 1.0).abs() < 1e-12));
        let e = einstein_residual(&m, &p, 1e-8).unwrap();
        assert!(e.einstein);
        assert!(e.lambda.iter().all(|l| (l - 1.0).abs() < 1e-12));
    }

    #[test]
    fn euclidean_solitons() {
        let m = models::euclidean(2);
        let c = m.chart().coords().to_vec();
        let p = pts(&[[0.4, 0.1], [-1.0, 2.0]]);
        let zero = VectorField::zero(&c);
        let fit = fit_mu(&m, &zero, &p).unwrap();
        assert_eq!(fit.classification, Classification::Steady);
        let dil = VectorField::parse(&c, &["x", "y"], &Default::default()).unwrap();
        assert!(soliton_residual(&m, &dil, -1.0, &p).unwrap().residual_max < 1e-14);
        let conf = conformal_field_check(&m, &dil, &p).unwrap();
        assert!(conf.beta1.iter().all(|b| (b - 1.0).abs() < 1e-14));
        assert!(!killing_check(&m, &dil, &p).unwrap().passed());
        let rot = VectorField::parse(&c, &["-y", "x"], &Default::default()).unwrap();
        assert!(killing_check(&m, &rot, &p).unwrap().passed());
        let conf = conformal_field_check(&m, &rot, &p).unwrap();
        assert!(conf.beta1.iter().all(|b| b.abs() < 1e-14));
        assert!(conf.residuals.iter().all(|r| *r < 1e-14));
    }

    #[test]
    fn gradient_paths() {
        let m = models::euclidean(2);
        let c = m.chart().coords().to_vec();
        let beta = crate::expr::parse("(x^2 + y^2)/2", &c, &Default::default()).unwrap();
        let p = pts(&[[0.4, 0.1], [-1.0, 2.0]]);
        assert!(gradient_soliton_residual(&m, &beta, -1.0, &p)
            .unwrap()
            .iter()
            .all(|r| *r < 1e-14));
        assert!(gradient_soliton_residual_lie(&m, &beta, -1.0, &p)
            .unwrap()
            .iter()
            .all(|r| *r < 1e-14));
    }

    #[test]
    fn sphere_rotation_is_killing() {
        let m = models::unit_sphere();
        let phi = VectorField::coordinate(m.chart().coords(), 1);
        assert!(killing_check(&m, &phi, &pts(&[[0.4, 0.1], [2.0, 1.0]]))
            .unwrap()
            .passed());
    }

    #[test]
    fn classification_rules() {
        assert_eq!(classify(-0.5), Classification::Shrinking);
        assert_eq!(classify(1e-10), Classification::Steady);
        assert_eq!(classify(0.1), Classification::Expanding);
        assert!(is_constant(&[1.0, 1.0 + 1e-7]));
        assert!(!is_constant(&[1.0, 1.1]));
    }
}
