//! K-antenna uniform linear array: steering vectors, null-steering LCMV
//! precoding, and gain evaluation.
//!
//! Element spacing is half a wavelength. The phase-sign convention is fixed
//! project-wide: element m of the steering vector is exp(-j*pi*m*sin(theta)).
//! Weights are normalized to unit L2 norm so total radiated power is
//! independent of the nulling configuration; the peak achievable gain is K.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Constraint matrices with a singular-value spread beyond this are treated
/// as infeasible nulling configurations.
pub const CONDITION_LIMIT: f64 = 1e8;

/// Linear gain at a requested null angle must not exceed this.
pub const NULL_DEPTH_LIMIT: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ArrayError {
    #[error("need at least one antenna")]
    NoAntennas,
    #[error("{nulls} nulls requested but only {k} antennas ({} degrees of freedom)", k - 1)]
    TooManyNulls { nulls: usize, k: usize },
    #[error("constraint matrix is ill-conditioned (condition number {0:.3e})")]
    IllConditioned(f64),
    #[error("requested null at {angle} rad could not be driven below {limit:e} (got {gain:e})")]
    NullNotAchieved { angle: f64, gain: f64, limit: f64 },
}

/// Precoding vector for one (served angle, null set) configuration.
#[derive(Debug, Clone)]
pub struct BeamWeights {
    pub w: DVector<Complex64>,
    pub served_theta: f64,
    pub null_thetas: Vec<f64>,
    pub k: usize,
}

/// ULA steering vector, element m = exp(-j*pi*m*sin(theta)).
pub fn steering_vector(k: usize, theta: f64) -> DVector<Complex64> {
    let s = theta.sin();
    DVector::from_iterator(
        k,
        (0..k).map(|m| Complex64::from_polar(1.0, -std::f64::consts::PI * m as f64 * s)),
    )
}

/// Null-steering beamformer: minimum-norm w with w^H a(served) = 1 and
/// w^H a(null) = 0 for every null angle, then rescaled to unit norm.
///
/// With an identity covariance the LCMV solution reduces to
/// w = C (C^H C)^-1 f with f = e1; we solve it through a QR factorization
/// of the constraint matrix C to keep the conditioning of C rather than
/// of C^H C.
pub fn lcmv_weights(
    k: usize,
    served_theta: f64,
    null_thetas: &[f64],
) -> Result<BeamWeights, ArrayError> {
    if k < 1 {
        return Err(ArrayError::NoAntennas);
    }
    if null_thetas.len() > k - 1 {
        return Err(ArrayError::TooManyNulls {
            nulls: null_thetas.len(),
            k,
        });
    }

    let m = 1 + null_thetas.len();
    let mut c = DMatrix::<Complex64>::zeros(k, m);
    c.set_column(0, &steering_vector(k, served_theta));
    for (j, &theta) in null_thetas.iter().enumerate() {
        c.set_column(j + 1, &steering_vector(k, theta));
    }

    let svd = c.clone().svd(false, false);
    let sigma_max = svd.singular_values.max();
    let sigma_min = svd.singular_values.min();
    let cond = if sigma_min > 0.0 {
        sigma_max / sigma_min
    } else {
        f64::INFINITY
    };
    if cond > CONDITION_LIMIT {
        return Err(ArrayError::IllConditioned(cond));
    }

    // Minimum-norm solution of C^H w = e1: with C = QR (thin),
    // w = Q (R^H)^-1 e1.
    let qr = c.qr();
    let q = qr.q();
    let r = qr.r();
    let mut f = DVector::<Complex64>::zeros(m);
    f[0] = Complex64::new(1.0, 0.0);
    let z = r
        .adjoint()
        .solve_lower_triangular(&f)
        .ok_or(ArrayError::IllConditioned(cond))?;
    let mut w = q * z;

    let norm = w.norm();
    if !(norm > 0.0) {
        return Err(ArrayError::IllConditioned(cond));
    }
    w /= Complex64::new(norm, 0.0);

    let weights = BeamWeights {
        w,
        served_theta,
        null_thetas: null_thetas.to_vec(),
        k,
    };
    for &theta in null_thetas {
        let gain = array_gain(&weights, theta);
        if gain > NULL_DEPTH_LIMIT {
            return Err(ArrayError::NullNotAchieved {
                angle: theta,
                gain,
                limit: NULL_DEPTH_LIMIT,
            });
        }
    }
    Ok(weights)
}

/// Beam gain Phi(theta) = |w^H a(theta)|^2, in [0, K] for unit-norm w.
pub fn array_gain(weights: &BeamWeights, theta: f64) -> f64 {
    let a = steering_vector(weights.k, theta);
    weights.w.dotc(&a).norm_sqr()
}
