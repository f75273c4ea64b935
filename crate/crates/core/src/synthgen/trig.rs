//! Platform-independent sine/cosine for small angles.
//!
//! Scene geometry must be reproducible bit-for-bit across hosts, and
//! libm trig is not. For |angle| <= 45 degrees a fixed-length Taylor
//! expansion evaluates in pure IEEE arithmetic with error far below one
//! ulp of the true value.

/// (sin, cos) of an angle given in degrees, |deg| <= 45.
pub fn det_sin_cos(deg: f64) -> (f64, f64) {
    debug_assert!(deg.abs() <= 45.0 + 1e-9);
    let x = deg * std::f64::consts::PI / 180.0;
    let x2 = x * x;
    // Horner form, terms through x^17 / x^16
    let sin = x * (1.0
        - x2 / 6.0
            * (1.0
                - x2 / 20.0
                    * (1.0
                        - x2 / 42.0
                            * (1.0
                                - x2 / 72.0
                                    * (1.0
                                        - x2 / 110.0
                                            * (1.0
                                                - x2 / 156.0
                                                    * (1.0 - x2 / 210.0 * (1.0 - x2 / 272.0))))))));
    let cos = 1.0
        - x2 / 2.0
            * (1.0
                - x2 / 12.0
                    * (1.0
                        - x2 / 30.0
                            * (1.0
                                - x2 / 56.0
                                    * (1.0
                                        - x2 / 90.0
                                            * (1.0
                                                - x2 / 132.0
                                                    * (1.0 - x2 / 182.0 * (1.0 - x2 / 240.0)))))));
    (sin, cos)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_libm_within_ulps() {
        for i in -450..=450 {
            let deg = i as f64 / 10.0;
            let (s, c) = det_sin_cos(deg);
            let rad = deg.to_radians();
            assert!((s - rad.sin()).abs() < 1e-14, "sin {deg}");
            assert!((c - rad.cos()).abs() < 1e-14, "cos {deg}");
        }
    }

    #[test]
    fn exact_at_zero() {
        assert_eq!(det_sin_cos(0.0), (0.0, 1.0));
    }
}
