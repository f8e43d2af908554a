//! Reference metrics used by tests, benchmarks and the bundled scenarios.

use std::collections::BTreeMap;

use crate::chart::{Chart, Constraint, MetricField};
use crate::error::Result;
use crate::expr::Expr;
use crate::submersion::Submersion;

fn no_constants() -> BTreeMap<String, f64> {
    BTreeMap::new()
}

/// Flat metric on `R^n` with coordinates `x1..xn` (`x, y` when `n == 2`).
pub fn euclidean(n: usize) -> MetricField {
    let names: Vec<String> = if n == 2 {
        vec!["x".into(), "y".into()]
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    };
    let chart = Chart::from_names("euclidean", names).expect("valid chart");
    let ones = vec!["1"; n];
    MetricField::diagonal(chart, &ones, &no_constants()).expect("valid metric")
}

/// Unit round sphere `dθ² + sin²θ dφ²` on `0 < θ < π`.
pub fn unit_sphere() -> MetricField {
    let chart = Chart::new("sphere", &["theta", "phi"]).expect("valid chart");
    let c = no_constants();
    let sin = chart.parse_expr("sin(theta)", &c).expect("valid expr");
    let chart = chart.with_constraint(Constraint::Positive(sin));
    MetricField::diagonal(chart, &["1", "sin(theta)^2"], &c).expect("valid metric")
}

/// Upper half-plane `(dx² + dy²)/y²`.
pub fn hyperbolic_plane() -> MetricField {
    let chart = Chart::new("hyperbolic", &["x", "y"]).expect("valid chart");
    let c = no_constants();
    let y = chart.parse_expr("y", &c).expect("valid expr");
    let chart = chart.with_constraint(Constraint::Positive(y));
    MetricField::diagonal(chart, &["1/y^2", "1/y^2"], &c).expect("valid metric")
}

/// `e^{-2u1}(du1² + du2² + du3²)` on `u1 != 0`.
pub fn conformal_example() -> MetricField {
    let chart = Chart::new("M1", &["u1", "u2", "u3"]).expect("valid chart");
    let c = no_constants();
    let u1 = chart.parse_expr("u1", &c).expect("valid expr");
    let chart = chart.with_constraint(Constraint::NonZero(u1));
    let d = "exp(-2*u1)";
    MetricField::diagonal(chart, &[d, d, d], &c).expect("valid metric")
}

/// Builds a diagonal metric from component strings on freshly named
/// coordinates; convenience for tests.
pub fn diagonal(name: &str, coords: &[&str], diag: &[&str]) -> Result<MetricField> {
    MetricField::diagonal(Chart::new(name, coords)?, diag, &no_constants())
}

/// `e^{2v1}(dv1² + dv2²)`.
pub fn conformal_example_base() -> MetricField {
    let chart = Chart::new("M2", &["v1", "v2"]).expect("valid chart");
    let d = "exp(2*v1)";
    MetricField::diagonal(chart, &[d, d], &no_constants()).expect("valid metric")
}

/// Projection `(u1, u2, u3) ↦ (u1, u2)` from [`conformal_example`] to
/// [`conformal_example_base`]: a Clairaut conformal submersion with
/// `σ² = e^{4u1}` and `β = −u1`.
pub fn conformal_example_submersion() -> Submersion {
    let total = conformal_example();
    let coords = total.chart().coords().to_vec();
    let map = vec![Expr::coordinate(0, &coords), Expr::coordinate(1, &coords)];
    Submersion::new(total, conformal_example_base(), map).expect("valid submersion")
}

/// `e^{2f}(dx² + dy² + θ²)` with `θ = dz − (x dy − y dx)/2` and
/// `f = 0.2x + 0.3z`, projected to `(x, y)` with the flat base: horizontally
/// conformal, fiber-dependent dilation, non-integrable horizontal
/// distribution.
pub fn twisted_heisenberg_submersion() -> Submersion {
    let chart = Chart::new("heisenberg", &["x", "y", "z"]).expect("valid chart");
    let c = no_constants();
    let e = "exp(0.4*x + 0.6*z)";
    let rows: [[String; 3]; 3] = [
        [
            format!("{e}*(1 + y^2/4)"),
            format!("{e}*(-x*y/4)"),
            format!("{e}*(y/2)"),
        ],
        [
            format!("{e}*(-x*y/4)"),
            format!("{e}*(1 + x^2/4)"),
            format!("{e}*(-x/2)"),
        ],
        [format!("{e}*(y/2)"), format!("{e}*(-x/2)"), e.to_string()],
    ];
    let refs: Vec<Vec<&str>> = rows.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
    let slices: Vec<&[&str]> = refs.iter().map(Vec::as_slice).collect();
    let total = MetricField::parse(chart, &slices, &c).expect("valid metric");
    let coords = total.chart().coords().to_vec();
    let map = vec![Expr::coordinate(0, &coords), Expr::coordinate(1, &coords)];
    Submersion::new(total, euclidean(2), map).expect("valid submersion")
}

fn projection(total: MetricField, base: MetricField) -> Submersion {
    let coords = total.chart().coords().to_vec();
    let map = (0..base.dim()).map(|i| Expr::coordinate(i, &coords)).collect();
    Submersion::new(total, base, map).expect("valid submersion")
}

/// `(x1, x2, x3) ↦ (x, y)` between flat spaces.
pub fn euclidean_product_submersion() -> Submersion {
    projection(euclidean(3), euclidean(2))
}

/// `S²(1) × S²(1) → S²(1)`, projecting onto the first factor.
pub fn sphere_product_submersion() -> Submersion {
    let c = no_constants();
    let chart = Chart::new("sphere2", &["t1", "p1", "t2", "p2"]).expect("valid chart");
    let s1 = chart.parse_expr("sin(t1)", &c).expect("valid expr");
    let s2 = chart.parse_expr("sin(t2)", &c).expect("valid expr");
    let chart = chart
        .with_constraint(Constraint::Positive(s1))
        .with_constraint(Constraint::Positive(s2));
    let total = MetricField::diagonal(chart, &["1", "sin(t1)^2", "1", "sin(t2)^2"], &c).expect("valid metric");
    projection(total, unit_sphere())
}

/// `dx² + dy² + e^{2f(x)} dz²` projected to `(x, y)`; the fibers are
/// umbilical with mean curvature `−∇f`.
pub fn warped_product_submersion(f: &str) -> Submersion {
    let diag = ["1".to_string(), "1".to_string(), format!("exp(2*({f}))")];
    let refs: Vec<&str> = diag.iter().map(String::as_str).collect();
    let total = diagonal("warped", &["x", "y", "z"], &refs).expect("valid metric");
    projection(total, euclidean(2))
}

/// `e^{2φ(u3)}(du1² + du2²) + du3²` projected to `(u1, u2)` with the flat
/// base: `σ² = e^{−2φ}` varies along the fibers.
pub fn fiber_dilation_submersion(phi: &str) -> Submersion {
    let e = format!("exp(2*({phi}))");
    let total = diagonal("fiberdil", &["u1", "u2", "u3"], &[&e, &e, "1"]).expect("valid metric");
    projection(total, euclidean(2))
}
