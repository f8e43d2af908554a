//! Central differences for quantities that are only available pointwise
//! (projector-built tensors, orthonormal frame fields, dilation Hessians).

/// Default relative step.
pub const REL_STEP: f64 = 1e-5;

pub fn step_for(x: f64, rel: f64) -> f64 {
    rel * (1.0 + x.abs())
}

/// Derivative of a vector-valued `f` along coordinate `axis` at `p`:
/// central differences at `h` and `h/2`, Richardson-extrapolated once.
pub fn partial<E>(f: &dyn Fn(&[f64]) -> Result<Vec<f64>, E>, p: &[f64], axis: usize, rel: f64) -> Result<Vec<f64>, E> {
    let h = step_for(p[axis], rel);
    let central = |h: f64| -> Result<Vec<f64>, E> {
        let mut plus = p.to_vec();
        let mut minus = p.to_vec();
        plus[axis] += h;
        minus[axis] -= h;
        let fp = f(&plus)?;
        let fm = f(&minus)?;
        Ok(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect())
    };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok(fine.iter().zip(&coarse).map(|(f, c)| (4.0 * f - c) / 3.0).collect())
}

/// All coordinate partials: `out[axis][component]`.
pub fn jacobian<E>(f: &dyn Fn(&[f64]) -> Result<Vec<f64>, E>, p: &[f64], rel: f64) -> Result<Vec<Vec<f64>>, E> {
    (0..p.len()).map(|a| partial(f, p, a, rel)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_on_smooth_function() {
        let f = |x: &[f64]| -> Result<Vec<f64>, ()> { Ok(vec![x[0].sin() * x[1], x[1].exp()]) };
        let d = jacobian(&f, &[0.4, 1.3], REL_STEP).unwrap();
        assert!((d[0][0] - 0.4f64.cos() * 1.3).abs() < 1e-10);
        assert!((d[1][0] - 0.4f64.sin()).abs() < 1e-10);
        assert!((d[1][1] - 1.3f64.exp()).abs() < 1e-9);
        assert!(d[0][1].abs() < 1e-12);
    }
}
