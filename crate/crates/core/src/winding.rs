//! Winding number of a Lagrangian loop through its squared determinant.
//!
//! Splitting a frame Q into its top and bottom n x n blocks X and Y, the
//! complex matrix W = X + iY is unitary precisely because the frame is
//! orthonormal and isotropic. Changing the frame by a real orthogonal gauge
//! G multiplies det(W) by det(G) = +-1, so det(W)^2 depends only on the
//! subspace. Around a loop, the accumulated phase of det^2 is an integer
//! multiple of 2 pi — the winding number — and it is computed here from
//! sample-to-sample phase increments, each required to stay under pi/2 so
//! the lift is unambiguous.
//!
//! This number is computed from raw frames with no charts, partitions, or
//! spectral flow involved, which makes it an independent cross-check for
//! the partitioned index: on any loop the two must agree up to the fixed
//! overall sign, winding = -index relative to `span{e_{n+1}, e_2, .., e_n}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::maslov::LagrangianPath;

/// Largest admissible phase increment of det^2 between samples.
const MAX_PHASE_STEP: f64 = std::f64::consts::FRAC_PI_2;

/// Winding number of `det((X + iY)(t))^2` around a loop.
pub fn det_squared_winding(path: &LagrangianPath) -> Result<i64> {
    if !path.is_loop()? {
        return Err(Error::NotALoop);
    }
    let dets: Vec<Complex64> = path
        .frames()
        .iter()
        .map(|f| {
            let d = f.complex_unitary().determinant();
            d * d
        })
        .collect();
    let mut accumulated = 0.0_f64;
    for (k, pair) in dets.windows(2).enumerate() {
        // arg of the ratio, safe since |det| = 1.
        let step = (pair[1] * pair[0].conj()).arg();
        if step.abs() >= MAX_PHASE_STEP {
            return Err(Error::PhaseStepTooLarge {
                interval: k,
                step: step.abs(),
            });
        }
        accumulated += step;
    }
    let turns = accumulated / std::f64::consts::TAU;
    let winding = turns.round();
    if (turns - winding).abs() > 0.25 {
        return Err(Error::NotALoop);
    }
    Ok(winding as i64)
}
