//! Curvature from metric values alone: Christoffel symbols by central
//! differences of `g`, Riemann by central differences of those.

use clairaut_core::MetricField;

pub const H_METRIC: f64 = 1e-5;
pub const H_CHRISTOFFEL: f64 = 1e-4;

fn metric(m: &MetricField, p: &[f64]) -> Vec<Vec<f64>> {
    let g = m.values(p).expect("point in domain");
    (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| g[(i, j)]).collect())
        .collect()
}

fn invert(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs())).unwrap();
        m.swap(c, piv);
        let d = m[c][c];
        for v in m[c].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                for k in 0..2 * n {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

fn shifted(p: &[f64], i: usize, h: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[i] += h;
    q
}

/// `gamma[k][i][j] = Γ^k_ij`.
pub fn christoffel(m: &MetricField, p: &[f64]) -> Vec<Vec<Vec<f64>>> {
    let n = m.dim();
    let g = metric(m, p);
    let ginv = invert(&g);
    let dg: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|a| {
            let (gp, gm) = (
                metric(m, &shifted(p, a, H_METRIC)),
                metric(m, &shifted(p, a, -H_METRIC)),
            );
            (0..n)
                .map(|i| (0..n).map(|j| (gp[i][j] - gm[i][j]) / (2.0 * H_METRIC)).collect())
                .collect()
        })
        .collect();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            0.5 * (0..n)
                                .map(|l| ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]))
                                .sum::<f64>()
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// `Ric_ij = R^k_ikj` with `R^l_ijk` the `l`-component of `R(∂_j, ∂_k)∂_i`.
pub fn ricci(m: &MetricField, p: &[f64]) -> Vec<Vec<f64>> {
    let n = m.dim();
    let gamma = christoffel(m, p);
    let dgamma: Vec<_> = (0..n)
        .map(|a| {
            let (gp, gm) = (
                christoffel(m, &shifted(p, a, H_CHRISTOFFEL)),
                christoffel(m, &shifted(p, a, -H_CHRISTOFFEL)),
            );
            (0..n)
                .map(|k| {
                    (0..n)
                        .map(|i| {
                            (0..n)
                                .map(|j| (gp[k][i][j] - gm[k][i][j]) / (2.0 * H_CHRISTOFFEL))
                                .collect::<Vec<_>>()
                        })
                        .collect::<Vec<_>>()
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let riemann = |l: usize, i: usize, j: usize, k: usize| -> f64 {
        let mut r = dgamma[j][l][k][i] - dgamma[k][l][j][i];
        for s in 0..n {
            r += gamma[l][j][s] * gamma[s][k][i] - gamma[l][k][s] * gamma[s][j][i];
        }
        r
    };
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| riemann(k, i, k, j)).sum()).collect())
        .collect()
}

pub fn scalar(m: &MetricField, p: &[f64]) -> f64 {
    let ginv = invert(&metric(m, p));
    let ric = ricci(m, p);
    let n = m.dim();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| ginv[i][j] * ric[i][j])
        .sum()
}
