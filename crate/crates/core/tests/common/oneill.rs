//! O'Neill tensors from covariant derivatives of projected fields, with the
//! derivatives of the extensions taken by central differences.

use clairaut_core::linalg::{Matrix, Vector};
use clairaut_core::{SubmersionPoint, SubmersionScenario};

const H: f64 = 1e-5;

#[derive(Clone, Copy)]
enum Part {
    Vertical,
    Horizontal,
}

fn projector(scn: &SubmersionScenario, q: &[f64], part: Part) -> Matrix {
    let f = scn.submersion.frame_point(q).expect("point in domain");
    match part {
        Part::Vertical => f.vertical,
        Part::Horizontal => f.horizontal,
    }
}

/// `∇_a B` at `p` for the extension `B(q) = P(q) b`.
fn nabla(scn: &SubmersionScenario, p: &[f64], a: &Vector, b: &Vector, part: Part) -> Vector {
    let n = p.len();
    let mut out = scn.submersion.total().christoffel(p).unwrap().apply(a, b);
    for j in 0..n {
        let (mut qp, mut qm) = (p.to_vec(), p.to_vec());
        qp[j] += H;
        qm[j] -= H;
        let d = (projector(scn, &qp, part) * b - projector(scn, &qm, part) * b) / (2.0 * H);
        out += d * a[j];
    }
    out
}

/// Largest of `|H∇_U W − T_U W|`, `|ν∇_U X − T_U X|`, `|H∇_X U − S_X U|`
/// and `|ν∇_X Y − S_X Y|` over the orthonormal bases at `at`.
pub fn reassembly_residual(scn: &SubmersionScenario, at: &SubmersionPoint) -> f64 {
    let p = at.point();
    let (hor, ver) = (at.horizontal(), at.vertical());
    let vb = &at.frame.vertical_basis;
    let hb = &at.frame.horizontal_basis;
    let mut worst: f64 = 0.0;
    let mut see = |lhs: Vector, rhs: Vector| worst = worst.max(at.norm(&(lhs - rhs)));
    for u in vb {
        for w in vb {
            see(hor * nabla(scn, p, u, w, Part::Vertical), at.oneill_t(u, w));
        }
        for x in hb {
            see(ver * nabla(scn, p, u, x, Part::Horizontal), at.oneill_t(u, x));
            see(hor * nabla(scn, p, x, u, Part::Vertical), at.oneill_s(x, u));
        }
    }
    for x in hb {
        for y in hb {
            see(ver * nabla(scn, p, x, y, Part::Horizontal), at.oneill_s(x, y));
        }
    }
    worst
}
