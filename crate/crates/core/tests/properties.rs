mod common;

use std::collections::BTreeMap;

use clairaut_core::chart::VectorField;
use clairaut_core::linalg::{self, Matrix};
use clairaut_core::{expr, models, soliton, MetricField};
use proptest::prelude::*;

fn coords(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn diag_metric(a: f64, b: f64, c: f64) -> MetricField {
    models::diagonal(
        "m",
        &["x", "y", "z"],
        &[
            &format!("exp({a}*y)"),
            &format!("1 + {b}*x^2"),
            &format!("exp({c}*x + 0.2*y)"),
        ],
    )
    .unwrap()
}

fn beta_text(k: [f64; 4]) -> String {
    format!("{}*x*y + {}*sin(z) + {}*y^2 + {}*x*z", k[0], k[1], k[2], k[3])
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn frame_point_splits_orthonormally(p in prop::collection::vec(0.1..1.0f64, 3), sign in prop::bool::ANY) {
        let mut p = p;
        if sign { p[0] = -p[0]; }
        for sub in [models::conformal_example_submersion(), models::twisted_heisenberg_submersion()] {
            let f = sub.frame_point(&p).unwrap();
            let g = sub.total().values(&p).unwrap();
            let basis = f.combined_basis();
            prop_assert_eq!(basis.len(), 3);
            for (i, a) in basis.iter().enumerate() {
                for (j, b) in basis.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((linalg::inner(&g, a, b) - want).abs() < 1e-10);
                }
            }
            let id = Matrix::identity(3, 3);
            prop_assert!(linalg::max_abs(&(&f.horizontal + &f.vertical - id)) < 1e-10);
            let jac = sub.jacobian(&p).unwrap();
            for v in &f.vertical_basis {
                prop_assert!((&jac * v).norm() < 1e-10);
            }
            prop_assert!(f.conformality_residual < 1e-10);
        }
    }

    #[test]
    fn hessian_is_symmetric(k in prop::array::uniform4(-2.0..2.0f64), a in -1.0..1.0f64, p in point()) {
        let m = diag_metric(a, 0.5, -0.3);
        let beta = expr::parse(&beta_text(k), &coords(&["x", "y", "z"]), &BTreeMap::new()).unwrap();
        let h = m.hessian_form_covariant(&beta, &p).unwrap();
        prop_assert!(linalg::max_abs(&(&h - h.transpose())) < 1e-8);
        prop_assert!(linalg::max_abs(&(h - m.hessian_form(&beta, &p).unwrap())) < 1e-8);
    }

    #[test]
    fn gradient_soliton_paths_agree(
        k in prop::array::uniform4(-2.0..2.0f64),
        (a, b, c) in (-1.0..1.0f64, 0.0..1.0f64, -1.0..1.0f64),
        mu in -2.0..2.0f64,
        p in point(),
    ) {
        let m = diag_metric(a, b, c);
        let beta = expr::parse(&beta_text(k), &coords(&["x", "y", "z"]), &BTreeMap::new()).unwrap();
        let pts = vec![p];
        let hess = soliton::gradient_soliton_residual(&m, &beta, mu, &pts).unwrap();
        let lie = soliton::gradient_soliton_residual_lie(&m, &beta, mu, &pts).unwrap();
        prop_assert!((hess[0] - lie[0]).abs() < 1e-8, "{} vs {}", hess[0], lie[0]);
    }

    #[test]
    fn linear_fields_on_flat_space(a in prop::array::uniform9(-1.0..1.0f64), p in point()) {
        // ξ = A x: L_ξ g = A + Aᵀ.
        let m = models::euclidean(3);
        let names = coords(&["x1", "x2", "x3"]);
        let comps: Vec<String> = (0..3)
            .map(|i| format!("{}*x1 + {}*x2 + {}*x3", a[3 * i], a[3 * i + 1], a[3 * i + 2]))
            .collect();
        let refs: Vec<&str> = comps.iter().map(String::as_str).collect();
        let xi = VectorField::parse(&names, &refs, &BTreeMap::new()).unwrap();
        let am = Matrix::from_fn(3, 3, |i, j| a[3 * i + j]);
        let sym = &am + am.transpose();
        let pts = vec![p];
        let conf = soliton::conformal_field_check(&m, &xi, &pts).unwrap();
        let trace = sym.trace() / 6.0;
        prop_assert!((conf.beta1[0] - trace).abs() < 1e-12);
        let off = linalg::max_abs(&(&sym - Matrix::identity(3, 3) * (2.0 * trace)));
        prop_assert!((conf.residuals[0] - off).abs() < 1e-12);
        let killing = soliton::killing_check(&m, &xi, &pts).unwrap();
        prop_assert!((killing.max_residual - linalg::max_abs(&sym)).abs() < 1e-12);
        // Killing exactly when conformal with zero factor.
        prop_assert_eq!(killing.max_residual < 1e-9, conf.residuals[0] < 1e-9 && trace.abs() < 1e-9);
    }

    #[test]
    fn einstein_factor_is_scalar_over_dimension(a in -1.0..1.0f64, b in 0.0..1.0f64, p in point()) {
        let m = diag_metric(a, b, 0.4);
        let fit = soliton::einstein_residual(&m, std::slice::from_ref(&p), 1e-8).unwrap();
        let s = m.scalar_curvature(&p).unwrap();
        prop_assert!((fit.lambda[0] - s / 3.0).abs() < 1e-12 * (1.0 + s.abs()));
    }

    #[test]
    fn mu_fit_is_exact_on_scaled_spheres(r in 0.3..3.0f64, theta in 0.2..2.9f64, phi in -3.0..3.0f64) {
        let m = models::diagonal("sphere", &["t", "f"], &[&format!("{}", r * r), &format!("{}*sin(t)^2", r * r)]).unwrap();
        let xi = VectorField::zero(&coords(&["t", "f"]));
        let fit = soliton::fit_mu(&m, &xi, &[vec![theta, phi]]).unwrap();
        prop_assert!((fit.values[0] + 1.0 / (r * r)).abs() < 1e-10);
    }

    #[test]
    fn mu_fit_is_exact_on_flat_dilations(c in -3.0..3.0f64, p in point()) {
        let names = coords(&["x1", "x2", "x3"]);
        let comps = [format!("{c}*x1"), format!("{c}*x2"), format!("{c}*x3")];
        let refs: Vec<&str> = comps.iter().map(String::as_str).collect();
        let xi = VectorField::parse(&names, &refs, &BTreeMap::new()).unwrap();
        let m = models::euclidean(3);
        let fit = soliton::fit_mu(&m, &xi, std::slice::from_ref(&p)).unwrap();
        prop_assert!((fit.values[0] + c).abs() < 1e-12);
        let v = soliton::soliton_residual(&m, &xi, -c, &[p]).unwrap();
        prop_assert!(v.residual_max < 1e-12);
    }
}
