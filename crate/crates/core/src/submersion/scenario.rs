use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::VectorField;
use crate::error::{Error, Result};
use crate::expr::Expr;

use super::{Submersion, SubmersionPoint};

/// Axis-aligned sample box, point count and RNG seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingSpec {
    pub bounds: Vec<(f64, f64)>,
    pub count: usize,
    pub seed: u64,
}

impl SamplingSpec {
    pub fn new(bounds: Vec<(f64, f64)>, count: usize, seed: u64) -> Result<Self> {
        if count == 0 {
            return Err(Error::Input("sampling count must be at least 1".into()));
        }
        if let Some((lo, hi)) = bounds
            .iter()
            .find(|(lo, hi)| !(lo <= hi) || !lo.is_finite() || !hi.is_finite())
        {
            return Err(Error::Input(format!("invalid sampling interval [{lo}, {hi}]")));
        }
        Ok(Self { bounds, count, seed })
    }

    /// Uniform draws from the box, reproducible from the seed.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.count)
            .map(|_| {
                self.bounds
                    .iter()
                    .map(|&(lo, hi)| if lo == hi { lo } else { rng.random_range(lo..hi) })
                    .collect()
            })
            .collect()
    }
}

/// Check tolerances by evaluation path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Checks built from exact jets.
    pub analytic: f64,
    /// Checks involving a finite-difference layer.
    pub finite_difference: f64,
    /// Relative drift of the Clairaut value along a geodesic.
    pub drift: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            analytic: 1e-8,
            finite_difference: 1e-5,
            drift: 1e-6,
        }
    }
}

/// A sample point that was skipped, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct Rejected {
    pub point: Vec<f64>,
    pub reason: String,
}

/// A claimed value of `Ric(F, G)` for two named frames.
#[derive(Debug, Clone)]
pub struct RicciClaim {
    pub first: String,
    pub second: String,
    pub value: Expr,
}

/// Published values to compare against; never gates by default.
#[derive(Debug, Clone, Default)]
pub struct References {
    pub ricci: Vec<RicciClaim>,
    /// Claimed soliton constant, possibly point-dependent.
    pub mu: Option<Expr>,
    /// Labelled claims for `σ²`.
    pub sigma2: Vec<(String, Expr)>,
}

/// Everything a verification run needs: the submersion and the candidate
/// Clairaut and soliton data.
#[derive(Debug, Clone)]
pub struct SubmersionScenario {
    pub name: String,
    pub submersion: Submersion,
    /// Named frames on the total chart, in declaration order.
    pub frames: Vec<(String, VectorField)>,
    pub beta: Option<Expr>,
    pub r: Option<Expr>,
    pub xi: Option<VectorField>,
    pub mu: Option<f64>,
    pub sampling: SamplingSpec,
    pub tolerances: Tolerances,
    pub references: References,
}

impl SubmersionScenario {
    pub fn new(name: impl Into<String>, submersion: Submersion, sampling: SamplingSpec) -> Result<Self> {
        if sampling.bounds.len() != submersion.total().dim() {
            return Err(Error::Dimension {
                expected: submersion.total().dim(),
                got: sampling.bounds.len(),
            });
        }
        Ok(Self {
            name: name.into(),
            submersion,
            frames: Vec::new(),
            beta: None,
            r: None,
            xi: None,
            mu: None,
            sampling,
            tolerances: Tolerances::default(),
            references: References::default(),
        })
    }

    pub fn with_frame(mut self, name: impl Into<String>, field: VectorField) -> Result<Self> {
        self.submersion.total().check_field(&field)?;
        self.frames.push((name.into(), field));
        Ok(self)
    }

    pub fn with_beta(mut self, beta: Expr) -> Result<Self> {
        self.check_scalar(&beta)?;
        self.beta = Some(beta);
        Ok(self)
    }

    pub fn with_radius(mut self, r: Expr) -> Result<Self> {
        self.check_scalar(&r)?;
        self.r = Some(r);
        Ok(self)
    }

    pub fn with_xi(mut self, xi: VectorField) -> Result<Self> {
        self.submersion.total().check_field(&xi)?;
        self.xi = Some(xi);
        Ok(self)
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = Some(mu);
        self
    }

    pub fn with_references(mut self, r: References) -> Result<Self> {
        for name in r.ricci.iter().flat_map(|c| [&c.first, &c.second]) {
            if self.frame(name).is_none() {
                return Err(Error::Input(format!("reference names unknown frame `{name}`")));
            }
        }
        for e in r
            .ricci
            .iter()
            .map(|c| &c.value)
            .chain(r.mu.iter())
            .chain(r.sigma2.iter().map(|s| &s.1))
        {
            self.check_scalar(e)?;
        }
        self.references = r;
        Ok(self)
    }

    pub fn with_tolerances(mut self, t: Tolerances) -> Self {
        self.tolerances = t;
        self
    }

    fn check_scalar(&self, e: &Expr) -> Result<()> {
        if e.coords() != self.submersion.total().chart().coords() {
            return Err(Error::Input(format!("`{e}` is not over the total coordinates")));
        }
        Ok(())
    }

    pub fn frame(&self, name: &str) -> Option<&VectorField> {
        self.frames.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn beta(&self) -> Result<&Expr> {
        self.beta.as_ref().ok_or(Error::Missing("clairaut.beta"))
    }

    /// Clairaut radius at `p`: the declared `r`, else `exp(β)`.
    pub fn radius(&self, p: &[f64]) -> Result<f64> {
        match (&self.r, &self.beta) {
            (Some(r), _) => Ok(r.eval(p)?),
            (None, Some(b)) => Ok(b.eval(p)?.exp()),
            (None, None) => Err(Error::Missing("clairaut.beta")),
        }
    }

    /// Regular sample points with their pointwise data, plus the rejected
    /// ones. Non-pointwise errors abort.
    pub fn samples(&self) -> Result<(Vec<SubmersionPoint>, Vec<Rejected>)> {
        let mut ok = Vec::new();
        let mut rejected = Vec::new();
        for p in self.sampling.points() {
            match self.submersion.at(&p) {
                Ok(at) => ok.push(at),
                Err(e) if e.is_pointwise() => rejected.push(Rejected {
                    point: p,
                    reason: e.to_string(),
                }),
                Err(e) => return Err(e),
            }
        }
        Ok((ok, rejected))
    }
}
