//! JSON scenario files: schema, validation with field-path diagnostics, and
//! conversion to a [`SubmersionScenario`].
//!
//! Metric matrices are given either as the upper triangle (row `i` holds
//! entries `i..n`) or as a full square matrix whose mirrored entries are
//! textually identical.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chart::{Chart, Constraint, MetricField, VectorField};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::report::sha256_hex;
use crate::submersion::{References, RicciClaim, SamplingSpec, Submersion, SubmersionScenario, Tolerances};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, f64>,
    pub total: MetricSection,
    pub base: MetricSection,
    pub map: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub frames: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clairaut: Option<ClairautSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub soliton: Option<SolitonSection>,
    pub sampling: SamplingSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<TolerancesSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSection {
    pub coords: Vec<String>,
    pub metric: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub domain: Vec<DomainConstraint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainConstraint {
    Positive(String),
    Nonzero(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClairautSection {
    pub beta: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonSection {
    pub xi: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSection {
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    pub count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analytic: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finite_difference: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSection {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ricci: Vec<RicciEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<String>,
    /// Label → claimed `σ²`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sigma2: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RicciEntry {
    pub frames: [String; 2],
    pub value: String,
}

fn at(path: &str, e: impl std::fmt::Display) -> Error {
    Error::Input(format!("{path}: {e}"))
}

impl ScenarioFile {
    /// Parses JSON text. Syntax errors carry line and column; schema errors
    /// carry the offending field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        let file: ScenarioFile = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." {
                Error::Input(format!("scenario: {inner}"))
            } else {
                Error::Input(format!("scenario field `{path}`: {inner}"))
            }
        })?;
        de.end().map_err(|e| Error::Input(format!("scenario: {e}")))?;
        Ok(file)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Compact serialization with sorted maps and fixed field order.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("scenario serializes")
    }

    /// SHA-256 of [`Self::canonical_json`].
    pub fn hash(&self) -> String {
        sha256_hex(self.canonical_json().as_bytes())
    }

    fn chart(&self, name: &str, sec: &MetricSection, path: &str) -> Result<Chart> {
        let mut chart = Chart::from_names(name, sec.coords.clone()).map_err(|e| at(&format!("{path}.coords"), e))?;
        for (i, c) in sec.domain.iter().enumerate() {
            let p = format!("{path}.domain[{i}]");
            chart = match c {
                DomainConstraint::Positive(t) => {
                    let e = chart.parse_expr(t, &self.constants).map_err(|e| at(&p, e))?;
                    chart.with_constraint(Constraint::Positive(e))
                }
                DomainConstraint::Nonzero(t) => {
                    let e = chart.parse_expr(t, &self.constants).map_err(|e| at(&p, e))?;
                    chart.with_constraint(Constraint::NonZero(e))
                }
            };
        }
        Ok(chart)
    }

    fn metric(&self, name: &str, sec: &MetricSection, path: &str) -> Result<MetricField> {
        let chart = self.chart(name, sec, path)?;
        let n = chart.dim();
        let rows = &sec.metric;
        let mp = format!("{path}.metric");
        if rows.len() != n {
            return Err(at(&mp, format!("expected {n} rows, got {}", rows.len())));
        }
        let upper = rows.iter().enumerate().all(|(i, r)| r.len() == n - i);
        let square = rows.iter().all(|r| r.len() == n);
        let text = |i: usize, j: usize| -> &str {
            if upper && !square {
                let (a, b) = if i <= j { (i, j) } else { (j, i) };
                &rows[a][b - a]
            } else {
                &rows[i][j]
            }
        };
        if !upper && !square {
            return Err(at(&mp, "rows must form an upper triangle or a square matrix"));
        }
        if square && !upper {
            for i in 0..n {
                for j in i + 1..n {
                    let strip = |s: &str| s.split_whitespace().collect::<String>();
                    if strip(&rows[i][j]) != strip(&rows[j][i]) {
                        return Err(at(
                            &format!("{mp}[{j}][{i}]"),
                            format!("differs from its mirror `{}`", rows[i][j]),
                        ));
                    }
                }
            }
        }
        let mut out = vec![Vec::with_capacity(n); n];
        for (i, row) in out.iter_mut().enumerate() {
            for j in 0..n {
                let (a, b) = if upper && !square && i > j {
                    (j, i - j)
                } else if upper && !square {
                    (i, j - i)
                } else {
                    (i, j)
                };
                let e = chart
                    .parse_expr(text(i, j), &self.constants)
                    .map_err(|e| at(&format!("{mp}[{a}][{b}]"), e))?;
                row.push(e);
            }
        }
        MetricField::new(chart, out).map_err(|e| at(&mp, e))
    }

    fn scalar(&self, total: &MetricField, text: &str, path: &str) -> Result<Expr> {
        total.chart().parse_expr(text, &self.constants).map_err(|e| at(path, e))
    }

    fn field(&self, total: &MetricField, comps: &[String], path: &str) -> Result<VectorField> {
        if comps.len() != total.dim() {
            return Err(at(
                path,
                format!("expected {} components, got {}", total.dim(), comps.len()),
            ));
        }
        let refs: Vec<&str> = comps.iter().map(String::as_str).collect();
        VectorField::parse(total.chart().coords(), &refs, &self.constants).map_err(|e| at(path, e))
    }

    /// Validates every expression against its chart and builds the scenario.
    pub fn build(&self) -> Result<SubmersionScenario> {
        let total = self.metric("total", &self.total, "total")?;
        let base = self.metric("base", &self.base, "base")?;
        if self.map.len() != base.dim() {
            return Err(at(
                "map",
                format!("expected {} components, got {}", base.dim(), self.map.len()),
            ));
        }
        let map = self
            .map
            .iter()
            .enumerate()
            .map(|(i, t)| self.scalar(&total, t, &format!("map[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let bounds: Vec<(f64, f64)> = self.sampling.bounds.iter().map(|b| (b[0], b[1])).collect();
        if bounds.len() != total.dim() {
            return Err(at(
                "sampling.box",
                format!("expected {} intervals, got {}", total.dim(), bounds.len()),
            ));
        }
        let sampling =
            SamplingSpec::new(bounds, self.sampling.count, self.sampling.seed).map_err(|e| at("sampling", e))?;
        let mut frames = Vec::new();
        for (name, comps) in &self.frames {
            frames.push((name.clone(), self.field(&total, comps, &format!("frames.{name}"))?));
        }
        let beta = match &self.clairaut {
            Some(c) => Some((
                self.scalar(&total, &c.beta, "clairaut.beta")?,
                c.r.as_ref().map(|r| self.scalar(&total, r, "clairaut.r")).transpose()?,
            )),
            None => None,
        };
        let xi = match &self.soliton {
            Some(s) => Some((self.field(&total, &s.xi, "soliton.xi")?, s.mu)),
            None => None,
        };
        let mut references = References::default();
        if let Some(r) = &self.reference {
            for (i, c) in r.ricci.iter().enumerate() {
                let p = format!("reference.ricci[{i}]");
                for f in &c.frames {
                    if !self.frames.contains_key(f) {
                        return Err(at(&format!("{p}.frames"), format!("unknown frame `{f}`")));
                    }
                }
                references.ricci.push(RicciClaim {
                    first: c.frames[0].clone(),
                    second: c.frames[1].clone(),
                    value: self.scalar(&total, &c.value, &format!("{p}.value"))?,
                });
            }
            references.mu =
                r.mu.as_ref()
                    .map(|m| self.scalar(&total, m, "reference.mu"))
                    .transpose()?;
            for (label, t) in &r.sigma2 {
                let e = self.scalar(&total, t, &format!("reference.sigma2.{label}"))?;
                references.sigma2.push((label.clone(), e));
            }
        }

        let sub = Submersion::new(total, base, map).map_err(|e| at("map", e))?;
        let mut scn = SubmersionScenario::new(self.name.clone(), sub, sampling)?;
        for (name, f) in frames {
            scn = scn.with_frame(name, f)?;
        }
        if let Some((b, r)) = beta {
            scn = scn.with_beta(b)?;
            if let Some(r) = r {
                scn = scn.with_radius(r)?;
            }
        }
        if let Some((xi, mu)) = xi {
            scn = scn.with_xi(xi)?;
            if let Some(mu) = mu {
                scn = scn.with_mu(mu);
            }
        }
        let mut tol = Tolerances::default();
        if let Some(t) = &self.tolerances {
            for (v, slot, key) in [
                (t.analytic, &mut tol.analytic, "analytic"),
                (t.finite_difference, &mut tol.finite_difference, "finite_difference"),
                (t.drift, &mut tol.drift, "drift"),
            ] {
                if let Some(v) = v {
                    if !(v > 0.0 && v.is_finite()) {
                        return Err(at(&format!("tolerances.{key}"), "must be positive and finite"));
                    }
                    *slot = v;
                }
            }
        }
        scn.with_tolerances(tol).with_references(references)
    }
}

/// Scenario files shipped with the crate, by name.
pub const BUNDLED: [(&str, &str); 7] = [
    ("golden", include_str!("../scenarios/golden.json")),
    ("perturbed", include_str!("../scenarios/perturbed.json")),
    (
        "perturbed_fiber_coordinate",
        include_str!("../scenarios/perturbed_fiber_coordinate.json"),
    ),
    ("flat", include_str!("../scenarios/flat.json")),
    ("flat_product", include_str!("../scenarios/flat_product.json")),
    ("sphere_product", include_str!("../scenarios/sphere_product.json")),
    (
        "twisted_heisenberg",
        include_str!("../scenarios/twisted_heisenberg.json"),
    ),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_bundled_scenarios_build() {
        for (name, text) in BUNDLED {
            let f = ScenarioFile::from_json(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            f.build().unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(f.name, name);
        }
    }

    #[test]
    fn hash_ignores_formatting() {
        let a = bundled("flat").unwrap();
        let b = serde_json::to_string_pretty(&serde_json::from_str::<serde_json::Value>(a).unwrap()).unwrap();
        let b = b.replace('\n', "\n   ");
        assert_eq!(
            ScenarioFile::from_json(a).unwrap().hash(),
            ScenarioFile::from_json(&b).unwrap().hash()
        );
    }

    fn flat_with(edit: impl FnOnce(&mut serde_json::Value)) -> Result<SubmersionScenario> {
        let mut v: serde_json::Value = serde_json::from_str(bundled("flat").unwrap()).unwrap();
        edit(&mut v);
        ScenarioFile::from_json(&v.to_string())?.build()
    }

    #[test]
    fn diagnostics_name_the_field() {
        let err = |r: Result<SubmersionScenario>| r.unwrap_err().to_string();
        let e = err(flat_with(|v| {
            v["sampling"]
                .as_object_mut()
                .unwrap()
                .remove("seed")
                .map(|_| ())
                .unwrap()
        }));
        assert!(e.contains("sampling") && e.contains("seed"), "{e}");
        let e = err(flat_with(|v| v["total"]["metric"][0][1] = "1 +".into()));
        assert!(e.contains("total.metric[0][1]"), "{e}");
        let e = err(flat_with(|v| v["map"][0] = "w".into()));
        assert!(e.contains("map[0]"), "{e}");
        let e = err(flat_with(|v| v["sampling"]["count"] = 0.into()));
        assert!(e.contains("sampling"), "{e}");
        let e = err(flat_with(|v| v["constants"] = serde_json::json!({"x": 1.0})));
        assert!(e.contains("shadows"), "{e}");
        let e = err(flat_with(|v| v["bogus"] = 1.into()));
        assert!(e.contains("bogus"), "{e}");
        assert!(ScenarioFile::from_json("{\n  \"name\": ")
            .unwrap_err()
            .to_string()
            .contains("line 2"));
    }

    #[test]
    fn square_metrics_must_mirror() {
        let ok = flat_with(|v| v["total"]["metric"] = serde_json::json!([["1", "0"], ["0", "1"]]));
        assert!(ok.is_ok());
        let e = flat_with(|v| v["total"]["metric"] = serde_json::json!([["1", "0"], ["x", "1"]])).unwrap_err();
        assert!(e.to_string().contains("total.metric[1][0]"), "{e}");
    }
}
