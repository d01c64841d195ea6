//! Savitzky-Golay convolution weights and filtering of 3-vector series.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SavGolSpec {
    /// Odd number of samples in the fitting window.
    pub window: usize,
    pub poly_order: usize,
    pub derivative_order: usize,
}

impl Default for SavGolSpec {
    fn default() -> Self {
        Self {
            window: 9,
            poly_order: 3,
            derivative_order: 2,
        }
    }
}

impl SavGolSpec {
    pub fn new(window: usize, poly_order: usize, derivative_order: usize) -> Result<Self> {
        let spec = Self {
            window,
            poly_order,
            derivative_order,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidSavGol(msg));
        if self.window < 3 || self.window.is_multiple_of(2) {
            return fail(format!("window must be odd and >= 3, got {}", self.window));
        }
        if self.poly_order < 2 {
            return fail(format!("poly_order must be >= 2, got {}", self.poly_order));
        }
        if self.poly_order >= self.window {
            return fail(format!(
                "poly_order {} must be below the window {}",
                self.poly_order, self.window
            ));
        }
        if self.derivative_order > 2 || self.derivative_order > self.poly_order {
            return fail(format!(
                "derivative_order {} must be in 0..=2 and <= poly_order",
                self.derivative_order
            ));
        }
        Ok(())
    }

    pub fn half_width(&self) -> usize {
        self.window / 2
    }

    /// `derivative_order! / step^derivative_order`, the factor that turns the
    /// raw weighted sum into a derivative in physical units.
    pub fn derivative_scale(&self, step: f64) -> f64 {
        let factorial: f64 = (1..=self.derivative_order).map(|k| k as f64).product();
        factorial / step.powi(self.derivative_order as i32)
    }
}

/// Weights `w` such that `sum_j w[j] * x[center + j - half]` is the
/// `derivative_order`-th coefficient of the local least-squares polynomial
/// in the sample index. Multiply by [`SavGolSpec::derivative_scale`] for the
/// physical derivative.
pub fn savgol_coefficients(spec: &SavGolSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let half = spec.half_width() as f64;
    let cols = spec.poly_order + 1;

    // Abscissae scaled to [-1, 1] keep the normal matrix well conditioned.
    let design = DMatrix::from_fn(spec.window, cols, |row, col| {
        ((row as f64 - half) / half).powi(col as i32)
    });
    let normal = design.transpose() * &design;
    let chol = normal.cholesky().ok_or_else(|| {
        Error::InvalidSavGol("normal equations are not positive definite".into())
    })?;

    let mut unit = DVector::zeros(cols);
    unit[spec.derivative_order] = 1.0;
    let row = design * chol.solve(&unit);
    let rescale = half.powi(spec.derivative_order as i32);
    Ok(row.iter().map(|w| w / rescale).collect())
}

/// Filters each component of `series` and returns the values at the frames
/// where the whole window fits, i.e. frames `half .. len - half`.
pub fn smooth_differentiate(series: &[Vec3], dt: f64, spec: &SavGolSpec) -> Result<Vec<Vec3>> {
    let weights = savgol_coefficients(spec)?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::param("dt", "must be positive"));
    }
    if series.len() < spec.window {
        return Err(Error::SeriesTooShort {
            len: series.len(),
            window: spec.window,
        });
    }
    let scale = spec.derivative_scale(dt);
    Ok(series
        .windows(spec.window)
        .map(|win| {
            win.iter()
                .zip(&weights)
                .fold(Vec3::zeros(), |acc, (x, w)| acc + x * *w)
                * scale
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(SavGolSpec::new(4, 2, 0).is_err());
        assert!(SavGolSpec::new(1, 2, 0).is_err());
        assert!(SavGolSpec::new(5, 5, 0).is_err());
        assert!(SavGolSpec::new(5, 1, 0).is_err());
        assert!(SavGolSpec::new(5, 2, 3).is_err());
        assert!(SavGolSpec::new(3, 2, 2).is_ok());
        assert!(SavGolSpec::default().validate().is_ok());
    }

    #[test]
    fn smoothing_weights_window5_order2() {
        let w = savgol_coefficients(&SavGolSpec::new(5, 2, 0).unwrap()).unwrap();
        let want = [-3.0, 12.0, 17.0, 12.0, -3.0].map(|x| x / 35.0);
        for (a, b) in w.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{w:?}");
        }
    }

    #[test]
    fn smoothing_weights_sum_to_one() {
        for window in (3..=31).step_by(2) {
            for order in 2..window.min(7) {
                let w = savgol_coefficients(&SavGolSpec::new(window, order, 0).unwrap()).unwrap();
                assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12, "{window}/{order}");
            }
        }
    }

    #[test]
    fn first_derivative_weights_are_antisymmetric() {
        let w = savgol_coefficients(&SavGolSpec::new(5, 2, 1).unwrap()).unwrap();
        assert!(w[2].abs() < 1e-15);
        for k in 0..2 {
            assert!((w[k] + w[4 - k]).abs() < 1e-15);
        }
        // classic -2,-1,0,1,2 over 10
        assert!((w[4] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn constant_has_zero_acceleration() {
        let series = vec![Vec3::new(1.0, -2.0, 3.0); 20];
        let out = smooth_differentiate(&series, 0.01, &SavGolSpec::default()).unwrap();
        assert_eq!(out.len(), 12);
        for a in out {
            assert!(a.norm() < 1e-9);
        }
    }

    #[test]
    fn quadratic_second_derivative() {
        let dt = 0.01;
        let series: Vec<Vec3> = (0..40)
            .map(|k| {
                let t = k as f64 * dt;
                Vec3::new(t * t, 0.0, 0.0)
            })
            .collect();
        let out = smooth_differentiate(&series, dt, &SavGolSpec::new(5, 2, 2).unwrap()).unwrap();
        for a in out {
            assert!((a.x - 2.0).abs() < 1e-9, "{}", a.x);
        }
    }

    #[test]
    fn sine_second_derivative() {
        use std::f64::consts::TAU;
        let dt = 0.01;
        let series: Vec<Vec3> = (0..100)
            .map(|k| Vec3::new(0.0, (TAU * k as f64 * dt).sin(), 0.0))
            .collect();
        let spec = SavGolSpec::new(9, 3, 2).unwrap();
        let out = smooth_differentiate(&series, dt, &spec).unwrap();
        for (i, a) in out.iter().enumerate() {
            let t = (i + spec.half_width()) as f64 * dt;
            let want = -TAU * TAU * (TAU * t).sin();
            if want.abs() > 1.0 {
                assert!(((a.y - want) / want).abs() < 0.02, "t={t}: {} vs {want}", a.y);
            }
        }
    }

    #[test]
    fn short_series_rejected() {
        let series = vec![Vec3::zeros(); 8];
        assert!(matches!(
            smooth_differentiate(&series, 0.01, &SavGolSpec::default()),
            Err(Error::SeriesTooShort { len: 8, window: 9 })
        ));
    }
}
