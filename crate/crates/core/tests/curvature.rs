mod common;

use clairaut_core::models;
use clairaut_core::MetricField;
use common::oracle;

fn compare(m: &MetricField, points: &[Vec<f64>], tol: f64) {
    for p in points {
        let gamma = m.christoffel(p).unwrap();
        let og = oracle::christoffel(m, p);
        let n = m.dim();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    assert!((gamma.get(k, i, j) - og[k][i][j]).abs() < 1e-7, "Γ^{k}_{i}{j} at {p:?}");
                }
            }
        }
        let ric = m.ricci(p).unwrap();
        let oric = oracle::ricci(m, p);
        for i in 0..n {
            for j in 0..n {
                assert!(
                    (ric[(i, j)] - oric[i][j]).abs() < tol,
                    "Ric_{i}{j} at {p:?}: {} vs {}",
                    ric[(i, j)],
                    oric[i][j]
                );
            }
        }
        assert!((m.scalar_curvature(p).unwrap() - oracle::scalar(m, p)).abs() < tol);
    }
}

#[test]
fn euclidean_matches_oracle() {
    compare(
        &models::euclidean(3),
        &[vec![0.1, -0.4, 2.0], vec![1.0, 1.0, 1.0]],
        1e-4,
    );
}

#[test]
fn sphere_matches_oracle() {
    compare(&models::unit_sphere(), &[vec![0.7, 0.2], vec![2.1, -1.0]], 1e-4);
}

#[test]
fn hyperbolic_matches_oracle() {
    compare(&models::hyperbolic_plane(), &[vec![0.3, 0.8], vec![-1.0, 2.5]], 1e-4);
}

#[test]
fn conformal_example_matches_oracle() {
    compare(
        &models::conformal_example(),
        &[vec![0.4, 0.1, -0.3], vec![-0.6, 0.9, 0.2]],
        1e-4,
    );
}

#[test]
fn non_diagonal_metric_matches_oracle() {
    let m = models::twisted_heisenberg_submersion();
    compare(m.total(), &[vec![0.2, -0.5, 0.3], vec![-0.7, 0.4, 1.1]], 1e-4);
}

#[test]
fn sphere_and_hyperbolic_closed_forms() {
    let s = models::unit_sphere();
    for p in [[0.5, 0.0], [1.3, 2.0], [2.9, -1.0]] {
        let (ric, g) = (s.ricci(&p).unwrap(), s.values(&p).unwrap());
        assert!(clairaut_core::linalg::max_abs(&(ric - g)) < 1e-12);
        assert!((s.scalar_curvature(&p).unwrap() - 2.0).abs() < 1e-12);
    }
    let h = models::hyperbolic_plane();
    for p in [[0.0, 0.5], [3.0, 2.0]] {
        let (ric, g) = (h.ricci(&p).unwrap(), h.values(&p).unwrap());
        assert!(clairaut_core::linalg::max_abs(&(ric + g)) < 1e-12);
    }
}
