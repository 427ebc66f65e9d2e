use super::OrthoError;

/// `T_k(x) = cos(k arccos x)` via the three-term recurrence.
pub fn chebyshev_eval(k: usize, x: f64) -> Result<f64, OrthoError> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(OrthoError::OutOfDomain(x));
    }
    let (mut prev, mut cur) = (1.0, x);
    if k == 0 {
        return Ok(prev);
    }
    for _ in 1..k {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn low_degrees() {
        assert_eq!(chebyshev_eval(0, 0.3).unwrap(), 1.0);
        let x = 0.41;
        assert!((chebyshev_eval(2, x).unwrap() - (2.0 * x * x - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn trigonometric_identity() {
        let v = chebyshev_eval(5, (PI / 7.0).cos()).unwrap();
        assert!((v - (5.0 * PI / 7.0).cos()).abs() < 1e-12);
        for i in 0..40 {
            let phi = i as f64 * 0.077;
            for k in 0..12 {
                assert!((chebyshev_eval(k, phi.cos()).unwrap() - (k as f64 * phi).cos()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_outside_interval() {
        assert_eq!(chebyshev_eval(3, 1.5), Err(OrthoError::OutOfDomain(1.5)));
    }
}
