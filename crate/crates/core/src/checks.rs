//! Sweeps behind the `check-conformal`, `christoffel` and `oneill`
//! commands.

use serde::Serialize;

use crate::error::Result;
use crate::linalg::{self, Vector};
use crate::report::{CheckRecord, CheckReport};
use crate::submersion::{SubmersionPoint, SubmersionScenario};

pub const ANCHOR_T_SKEW: &str = "g_{M_{1}}(T_{E}F,G)=-g_{M_{1}}(F,T_{E}G)";
pub const ANCHOR_S_SKEW: &str = "g_{M_{1}}(S_{E}F,G)=-g_{M_{1}}(F,S_{E}G)";
pub const ANCHOR_T_SYMMETRIC: &str = "T_{U}W=T_{W}U";
pub const ANCHOR_S_BRACKET: &str = "S_{X}Y-S_{Y}X=ν[X,Y]";
pub const ANCHOR_HORIZONTAL_PAIR: &str = "S_{X}Y=\\frac{1}{2}\\{ν[X,Y]-σ^{2}g_{M_{1}}(X,Y)∇_{ν}\\frac{1}{σ^{2}}\\}";
pub const ANCHOR_HPRIME: &str = "H^{\\prime}=-\\frac{σ^{2}}{2}∇_{ν}\\frac{1}{σ^{2}}";
pub const ANCHOR_TORSION_FREE: &str = "Γ_{ij}^{k}=Γ_{ji}^{k}";

fn vec_of(v: &Vector) -> Vec<f64> {
    v.iter().copied().collect()
}

/// Residuals of the algebraic identities of `T` and `S` at one point, over
/// the combined orthonormal basis.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TensorIdentityResiduals {
    pub t_skew: f64,
    pub s_skew: f64,
    pub t_symmetric: f64,
    pub s_bracket: f64,
    pub horizontal_pair: f64,
    pub horizontal_mean_curvature: f64,
}

pub fn tensor_identities(at: &SubmersionPoint) -> TensorIdentityResiduals {
    let basis = at.frame.combined_basis();
    let (mut t_skew, mut s_skew): (f64, f64) = (0.0, 0.0);
    for e in &basis {
        for f in &basis {
            let (tf, sf) = (at.oneill_t(e, f), at.oneill_s(e, f));
            for g in &basis {
                let (tg, sg) = (at.oneill_t(e, g), at.oneill_s(e, g));
                t_skew = t_skew.max((at.inner(&tf, g) + at.inner(f, &tg)).abs());
                s_skew = s_skew.max((at.inner(&sf, g) + at.inner(f, &sg)).abs());
            }
        }
    }
    let mut t_symmetric: f64 = 0.0;
    for u in &at.frame.vertical_basis {
        for w in &at.frame.vertical_basis {
            t_symmetric = t_symmetric.max(at.norm(&(at.oneill_t(u, w) - at.oneill_t(w, u))));
        }
    }
    let (mut s_bracket, mut horizontal_pair): (f64, f64) = (0.0, 0.0);
    for x in &at.frame.horizontal_basis {
        for y in &at.frame.horizontal_basis {
            let sxy = at.oneill_s(x, y);
            let d = &sxy - at.oneill_s(y, x) - at.vertical_bracket(x, y);
            s_bracket = s_bracket.max(at.norm(&d));
            horizontal_pair = horizontal_pair.max(at.norm(&(sxy - at.s_horizontal_predicted(x, y))));
        }
    }
    let hm = at.horizontal_mean_curvature() - at.horizontal_mean_curvature_predicted();
    TensorIdentityResiduals {
        t_skew,
        s_skew,
        t_symmetric,
        s_bracket,
        horizontal_pair,
        horizontal_mean_curvature: at.norm(&hm),
    }
}

#[derive(Debug, Clone, Serialize)]
struct FrameRow {
    point: Vec<f64>,
    image: Vec<f64>,
    sigma2: f64,
    vertical_basis: Vec<Vec<f64>>,
    horizontal_basis: Vec<Vec<f64>>,
}

/// Horizontal conformality at every sample, with the frames and dilation.
pub fn conformal_report(scn: &SubmersionScenario, samples: &[SubmersionPoint]) -> CheckReport {
    let mut report = CheckReport::default();
    let residuals = samples.iter().map(|a| a.frame.conformality_residual).collect();
    report.push(CheckRecord::new(
        "conformality",
        crate::clairaut::ANCHOR_CONFORMAL,
        scn.tolerances.analytic,
        residuals,
    ));
    let rows: Vec<FrameRow> = samples
        .iter()
        .map(|a| FrameRow {
            point: a.frame.point.clone(),
            image: a.frame.image.clone(),
            sigma2: a.frame.sigma2,
            vertical_basis: a.frame.vertical_basis.iter().map(vec_of).collect(),
            horizontal_basis: a.frame.horizontal_basis.iter().map(vec_of).collect(),
        })
        .collect();
    report.detail("frames", serde_json::to_value(rows).expect("serializable"));
    report
}

#[derive(Debug, Clone, Serialize)]
pub struct ChristoffelEntry {
    /// 1-based `(k, i, j)` of `Γ^k_ij`.
    pub index: [usize; 3],
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CovariantEntry {
    pub along: String,
    pub field: String,
    pub value: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChristoffelTable {
    pub point: Vec<f64>,
    pub symbols: Vec<ChristoffelEntry>,
    /// `∇_F G` for every ordered pair of named frames.
    pub covariant: Vec<CovariantEntry>,
}

pub fn christoffel_table(scn: &SubmersionScenario, p: &[f64]) -> Result<ChristoffelTable> {
    let m = scn.submersion.total();
    m.chart().check_point(p)?;
    let gamma = m.christoffel(p)?;
    let n = m.dim();
    let mut symbols = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                symbols.push(ChristoffelEntry {
                    index: [k + 1, i + 1, j + 1],
                    value: gamma.get(k, i, j),
                });
            }
        }
    }
    let mut covariant = Vec::new();
    for (fname, f) in &scn.frames {
        for (gname, g) in &scn.frames {
            covariant.push(CovariantEntry {
                along: fname.clone(),
                field: gname.clone(),
                value: vec_of(&m.covariant_derivative(f, g, p)?),
            });
        }
    }
    Ok(ChristoffelTable {
        point: p.to_vec(),
        symbols,
        covariant,
    })
}

/// Christoffel table at `p` plus the torsion-free symmetry check.
pub fn christoffel_report(scn: &SubmersionScenario, p: &[f64]) -> Result<CheckReport> {
    let table = christoffel_table(scn, p)?;
    let gamma = scn.submersion.total().christoffel(p)?;
    let n = gamma.dim();
    let mut asym = Vec::new();
    for k in 0..n {
        for i in 0..n {
            for j in i + 1..n {
                asym.push(gamma.get(k, i, j) - gamma.get(k, j, i));
            }
        }
    }
    if asym.is_empty() {
        asym.push(0.0);
    }
    let mut report = CheckReport::default();
    report.push(CheckRecord::new(
        "christoffel.symmetry",
        ANCHOR_TORSION_FREE,
        scn.tolerances.analytic,
        asym,
    ));
    report.detail("christoffel", serde_json::to_value(table).expect("serializable"));
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
struct OneillRow {
    point: Vec<f64>,
    sigma2: f64,
    mean_curvature: Vec<f64>,
    horizontal_mean_curvature: Vec<f64>,
    umbilic_residual: f64,
    integrability_defect: f64,
    /// `T_{U_i}U_j` on the vertical basis, row-major.
    t_vertical: Vec<Vec<f64>>,
    /// `S_{X_i}X_j` on the horizontal basis, row-major.
    s_horizontal: Vec<Vec<f64>>,
}

/// Identities of `T`, `S`, `H` and `H′` over the samples, with the tensors on
/// the orthonormal bases.
pub fn oneill_report(scn: &SubmersionScenario, samples: &[SubmersionPoint]) -> CheckReport {
    let tol = scn.tolerances.analytic;
    let ids: Vec<TensorIdentityResiduals> = samples.iter().map(tensor_identities).collect();
    let col = |f: fn(&TensorIdentityResiduals) -> f64| ids.iter().map(f).collect::<Vec<_>>();
    let mut report = CheckReport::default();
    report.push(CheckRecord::new("oneill.t_skew", ANCHOR_T_SKEW, tol, col(|r| r.t_skew)));
    report.push(CheckRecord::new("oneill.s_skew", ANCHOR_S_SKEW, tol, col(|r| r.s_skew)));
    report.push(CheckRecord::new(
        "oneill.t_symmetric",
        ANCHOR_T_SYMMETRIC,
        tol,
        col(|r| r.t_symmetric),
    ));
    report.push(CheckRecord::new(
        "oneill.s_bracket",
        ANCHOR_S_BRACKET,
        tol,
        col(|r| r.s_bracket),
    ));
    report.push(CheckRecord::new(
        "oneill.horizontal_pair",
        ANCHOR_HORIZONTAL_PAIR,
        tol,
        col(|r| r.horizontal_pair),
    ));
    report.push(CheckRecord::new(
        "oneill.horizontal_mean_curvature",
        ANCHOR_HPRIME,
        tol,
        col(|r| r.horizontal_mean_curvature),
    ));
    let rows: Vec<OneillRow> = samples
        .iter()
        .map(|a| {
            let v = &a.frame.vertical_basis;
            let h = &a.frame.horizontal_basis;
            OneillRow {
                point: a.point().to_vec(),
                sigma2: a.sigma2(),
                mean_curvature: vec_of(&a.mean_curvature()),
                horizontal_mean_curvature: vec_of(&a.horizontal_mean_curvature()),
                umbilic_residual: a.umbilic_residual(),
                integrability_defect: a.integrability_defect(),
                t_vertical: v
                    .iter()
                    .flat_map(|x| v.iter().map(|y| vec_of(&a.oneill_t(x, y))))
                    .collect(),
                s_horizontal: h
                    .iter()
                    .flat_map(|x| h.iter().map(|y| vec_of(&a.oneill_s(x, y))))
                    .collect(),
            }
        })
        .collect();
    report.detail("oneill", serde_json::to_value(rows).expect("serializable"));
    report
}

/// Symmetry defect of `g(∇_{∂_i} grad β, ∂_j)` at `p`, computed through the
/// gradient field rather than the symmetric coordinate formula.
pub fn hessian_asymmetry(scn: &SubmersionScenario, p: &[f64]) -> Result<f64> {
    let h = scn.submersion.total().hessian_form_covariant(scn.beta()?, p)?;
    Ok(linalg::max_abs(&(&h - h.transpose())))
}
