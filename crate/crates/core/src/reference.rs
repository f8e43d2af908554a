//! Comparison of computed quantities with published claims. Every record
//! here is REPORT-ONLY.

use crate::chart::TangentField;
use crate::error::Result;
use crate::report::{CheckRecord, CheckReport};
use crate::soliton;
use crate::submersion::{SubmersionPoint, SubmersionScenario};

/// Claimed values against the intrinsic Ricci tensor, the fitted soliton
/// constant and the computed dilation.
pub fn reference_report(scn: &SubmersionScenario, samples: &[SubmersionPoint]) -> Result<CheckReport> {
    let refs = &scn.references;
    let tol = scn.tolerances.finite_difference;
    let m = scn.submersion.total();
    let mut report = CheckReport::default();
    for claim in &refs.ricci {
        let f = scn.frame(&claim.first).expect("validated frame name");
        let g = scn.frame(&claim.second).expect("validated frame name");
        let mut direct = Vec::with_capacity(samples.len());
        let mut flipped = Vec::with_capacity(samples.len());
        for at in samples {
            let p = at.point();
            let (x, y) = (f.value(p)?, g.value(p)?);
            let ric = crate::linalg::form(&at.local.ricci(), &x, &y);
            let claimed = claim.value.eval(p)?;
            direct.push(claimed - ric);
            flipped.push(claimed + ric);
        }
        let worst_flipped = flipped.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let name = format!("reference.ricci({},{})", claim.first, claim.second);
        report.push(
            CheckRecord::new(
                name,
                format!("Ric({},{})={}", claim.first, claim.second, claim.value),
                tol,
                direct,
            )
            .report_only()
            .with_note(format!(
                "opposite curvature sign convention: max delta {worst_flipped:.6e}"
            )),
        );
    }
    if let (Some(mu), Some(xi)) = (&refs.mu, &scn.xi) {
        let points: Vec<Vec<f64>> = samples.iter().map(|a| a.point().to_vec()).collect();
        let fit = soliton::fit_mu(m, xi, &points)?;
        let mut deltas = Vec::with_capacity(points.len());
        for (p, v) in points.iter().zip(&fit.values) {
            deltas.push(mu.eval(p)? - v);
        }
        let mut rec = CheckRecord::new("reference.mu", soliton::ANCHOR_MU_FORMULA, tol, deltas).report_only();
        if !fit.constant {
            rec = rec.with_note("least-squares μ varies over the samples: no constant solves the soliton equation");
        }
        report.push(rec);
    }
    for (label, claim) in &refs.sigma2 {
        let mut deltas = Vec::with_capacity(samples.len());
        for at in samples {
            deltas.push((claim.eval(at.point())? - at.sigma2()) / at.sigma2());
        }
        report.push(
            CheckRecord::new(
                format!("reference.sigma2[{label}]"),
                format!("σ² = {claim}"),
                tol,
                deltas,
            )
            .report_only()
            .with_note("relative difference from the computed σ²"),
        );
    }
    Ok(report)
}
