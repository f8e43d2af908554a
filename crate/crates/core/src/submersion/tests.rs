use super::*;
use crate::linalg::unit;
use crate::models;
use crate::numdiff;

fn close(a: &Vector, b: &Vector, tol: f64) -> bool {
    (a - b).amax() <= tol * (1.0 + b.amax())
}

fn vec3(a: f64, b: f64, c: f64) -> Vector {
    Vector::from_vec(vec![a, b, c])
}

#[test]
fn example_dilation_and_frames() {
    let sub = models::conformal_example_submersion();
    for u1 in [1.0f64, -0.7, 0.3] {
        let p = [u1, 0.4, -1.1];
        let f = sub.frame_point(&p).unwrap();
        assert!((f.sigma2 - (4.0 * u1).exp()).abs() < 1e-12 * (4.0 * u1).exp());
        assert!(f.conformality_residual < 1e-13);
        assert_eq!(f.vertical_basis.len(), 1);
        assert!(close(&f.vertical_basis[0], &vec3(0.0, 0.0, u1.exp()), 1e-14));
        assert!(close(&f.horizontal_basis[0], &vec3(u1.exp(), 0.0, 0.0), 1e-14));
        assert!(close(&f.horizontal_basis[1], &vec3(0.0, u1.exp(), 0.0), 1e-14));
    }
}

#[test]
fn example_oneill_tensors() {
    let sub = models::conformal_example_submersion();
    let p = [1.0, 0.2, 0.5];
    let at = sub.at(&p).unwrap();
    let e2 = 2.0f64.exp();
    let v = vec3(0.0, 0.0, 1.0f64.exp());
    assert!(close(&at.oneill_t(&v, &v), &vec3(e2, 0.0, 0.0), 1e-12));
    assert!(close(&at.mean_curvature(), &vec3(e2, 0.0, 0.0), 1e-12));
    assert!(at.umbilic_residual() < 1e-12);
    let s = at.s_tensor();
    assert!(s.max_abs_diff(&Tensor3::zeros(3)) < 1e-12);
    assert!(at.integrability_defect() < 1e-12);
    assert!(at.horizontal_mean_curvature().amax() < 1e-12);
}

#[test]
fn example_tension_field() {
    let sub = models::conformal_example_submersion();
    let p = [0.8, -0.3, 2.0];
    let at = sub.at(&p).unwrap();
    let grad_beta = vec3(-(1.6f64).exp(), 0.0, 0.0);
    let expected = Vector::from_vec(vec![-(1.6f64).exp(), 0.0]);
    assert!(close(&at.tension_field(&grad_beta), &expected, 1e-12));
    assert!(close(&at.tension_field_trace(), &expected, 1e-12));
}

#[test]
fn critical_points_are_rejected() {
    let total = models::euclidean(2);
    let coords = total.chart().coords().to_vec();
    let map = vec![crate::expr::parse("x^2 + y^2", &coords, &Default::default()).unwrap()];
    let sub = Submersion::new(total, models::diagonal("line", &["t"], &["1"]).unwrap(), map).unwrap();
    match sub.frame_point(&[0.0, 0.0]) {
        Err(Error::CriticalPoint { rank, required, .. }) => {
            assert_eq!(rank, 0);
            assert_eq!(required, 1);
        }
        other => panic!("expected critical point, got {other:?}"),
    }
    assert!(sub.frame_point(&[0.3, 0.1]).is_ok());
}

#[test]
fn dimension_checks() {
    let total = models::euclidean(2);
    let coords = total.chart().coords().to_vec();
    let map = vec![Expr::coordinate(0, &coords), Expr::coordinate(1, &coords)];
    assert!(Submersion::new(total.clone(), models::euclidean(2), map).is_err());
    let map = vec![Expr::coordinate(0, &coords)];
    assert!(Submersion::new(total, models::euclidean(2), map).is_err());
}

fn sample_vectors(n: usize) -> Vec<Vector> {
    (0..n)
        .map(|i| unit(n, i))
        .chain([Vector::from_fn(n, |k, _| 0.3 + 0.17 * k as f64 - 0.05 * (k * k) as f64)])
        .collect()
}

fn check_tensor_identities(at: &SubmersionPoint) {
    let n = at.dim();
    let vs = sample_vectors(n);
    for e in &vs {
        for f in &vs {
            for h in &vs {
                let t1 = at.inner(&at.oneill_t(e, f), h);
                let t2 = at.inner(&at.oneill_t(e, h), f);
                assert!((t1 + t2).abs() < 1e-10, "T skew {t1} {t2}");
                let s1 = at.inner(&at.oneill_s(e, f), h);
                let s2 = at.inner(&at.oneill_s(e, h), f);
                assert!((s1 + s2).abs() < 1e-10, "S skew {s1} {s2}");
            }
            let (u, w) = (at.vertical() * e, at.vertical() * f);
            assert!(close(&at.oneill_t(&u, &w), &at.oneill_t(&w, &u), 1e-10));
            // T and S reverse the splitting.
            let tu = at.oneill_t(&u, &w);
            assert!((at.vertical() * &tu).amax() < 1e-10);
        }
    }
}

#[test]
fn tensor_identities_on_non_integrable_case() {
    let sub = models::twisted_heisenberg_submersion();
    for p in [[0.3, -0.4, 0.2], [-1.0, 0.5, 1.5]] {
        let at = sub.at(&p).unwrap();
        assert!(at.frame.conformality_residual < 1e-13);
        let f: f64 = 0.2 * p[0] + 0.3 * p[2];
        assert!((at.sigma2() - (-2.0 * f).exp()).abs() < 1e-12);
        assert!(at.integrability_defect() > 1e-2);
        check_tensor_identities(&at);
    }
}

#[test]
fn horizontal_pair_formula() {
    let sub = models::twisted_heisenberg_submersion();
    let at = sub.at(&[0.4, 0.1, -0.6]).unwrap();
    let vs = sample_vectors(3);
    for x in &vs {
        for y in &vs {
            let (hx, hy) = (at.horizontal() * x, at.horizontal() * y);
            let lhs = at.oneill_s(&hx, &hy);
            let rhs = at.s_horizontal_predicted(&hx, &hy);
            assert!(close(&lhs, &rhs, 1e-10), "{lhs} vs {rhs}");
        }
    }
    assert!(close(
        &at.horizontal_mean_curvature(),
        &at.horizontal_mean_curvature_predicted(),
        1e-10
    ));
    assert!(at.horizontal_mean_curvature().amax() > 1e-3);
}

#[test]
fn second_fundamental_form_matches_conformal_expression() {
    for sub in [
        models::twisted_heisenberg_submersion(),
        models::conformal_example_submersion(),
    ] {
        let at = sub.at(&[0.4, 0.1, -0.6]).unwrap();
        let b = at.frame.horizontal_basis.clone();
        for x in &b {
            for y in &b {
                let lhs = at.second_fundamental_form(x, y);
                let rhs = at.second_fundamental_form_conformal(x, y);
                assert!(close(&lhs, &rhs, 1e-10), "{lhs} vs {rhs}");
            }
        }
    }
}

/// Frame fields differentiated numerically recover the tensor split:
/// `∇_U W = T_U W + ν∇_U W`, `H∇_X U = S_X U`, `ν∇_X Y = S_X Y`.
#[test]
fn decomposition_reassembles_from_frame_fields() {
    for sub in [
        models::twisted_heisenberg_submersion(),
        models::conformal_example_submersion(),
    ] {
        let p = [0.5, -0.2, 0.7];
        let at = sub.at(&p).unwrap();
        let n = at.dim();
        let frame_of = |q: &[f64]| -> Result<Vec<f64>> {
            let f = sub.frame_point(q)?;
            Ok(f.vertical_basis
                .iter()
                .chain(f.horizontal_basis.iter())
                .flat_map(|v| v.iter().cloned().collect::<Vec<_>>())
                .collect())
        };
        let d = numdiff::jacobian(&frame_of, &p, numdiff::REL_STEP).unwrap();
        let fields: Vec<Vector> = at
            .frame
            .vertical_basis
            .iter()
            .chain(at.frame.horizontal_basis.iter())
            .cloned()
            .collect();
        let nv = at.frame.vertical_basis.len();
        let nabla = |a: usize, b: usize| -> Vector {
            let mut out = at.local.gamma.apply(&fields[a], &fields[b]);
            for m in 0..n {
                for k in 0..n {
                    out[k] += fields[a][m] * d[m][b * n + k];
                }
            }
            out
        };
        for a in 0..n {
            for b in 0..n {
                let cov = nabla(a, b);
                let (ea, eb) = (&fields[a], &fields[b]);
                let expected = if a < nv {
                    at.oneill_t(ea, eb)
                } else {
                    at.oneill_s(ea, eb)
                };
                // Both tensors keep the part of ∇ complementary to the second slot.
                let part = if b < nv {
                    at.horizontal() * &cov
                } else {
                    at.vertical() * &cov
                };
                assert!(close(&part, &expected, 1e-8), "({a},{b}): {part} vs {expected}");
            }
        }
    }
}

#[test]
fn projectable_fields() {
    let sub = models::conformal_example_submersion();
    let coords = sub.total().chart().coords().to_vec();
    let c = Default::default();
    let basic = crate::VectorField::parse(&coords, &["exp(u1)", "0", "0"], &c).unwrap();
    assert!(sub.projectability_defect(&basic, &[1.0, 0.0, 0.0]).unwrap() < 1e-12);
    let bent = crate::VectorField::parse(&coords, &["exp(u1)*(1 + u3^2)", "0", "0"], &c).unwrap();
    assert!(sub.projectability_defect(&bent, &[1.0, 0.0, 0.3]).unwrap() > 1e-3);
    let tilted = crate::VectorField::parse(&coords, &["exp(u1)", "0", "0.1"], &c).unwrap();
    assert!(sub.projectability_defect(&tilted, &[1.0, 0.0, 0.0]).unwrap() > 1e-3);
}
