//! Cold and warm start shifts at a prescribed gap to a reference bound.
//!
//! A coldstart scales the uniform shift `c * lambda_max(Q)` with `c >= 1.05`
//! until its bound sits 85-95% above the reference (or keeps `c = 1.05` when
//! that is already further away). A warmstart perturbs a known good shift
//! coordinate-wise by `w * rho_i`, with `rho_i` drawn on the order of
//! magnitude of `u_i`, and searches `w` so the gap lands in 7-8%.

use std::ops::RangeInclusive;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bnb::relative_gap;
use crate::error::{Error, Result};
use crate::lmi::LmiSystem;
use crate::model::QcrShift;

pub const COLD_GAP: RangeInclusive<f64> = 85.0..=95.0;
pub const WARM_GAP: RangeInclusive<f64> = 7.0..=8.0;
const MIN_SCALE: f64 = 1.05;
const SEARCH_STEPS: usize = 200;

/// Gap in percent of the bound at shift `u` over `reference`.
pub fn start_gap(sys: &LmiSystem, u: &DVector<f64>, reference: f64) -> Result<f64> {
    Ok(relative_gap(sys.boundary_height(u)? + sys.problem().offset(), reference))
}

/// `u = c * lambda_max * 1` with `c` chosen by bisection so the gap lies in `gap`.
pub fn scaled_coldstart(
    sys: &LmiSystem,
    lambda_max: f64,
    reference: f64,
    gap: RangeInclusive<f64>,
) -> Result<QcrShift> {
    if !(lambda_max > 0.0) {
        return Err(Error::InvalidInput("scaled coldstart needs lambda_max(Q) > 0".into()));
    }
    let n = sys.n();
    let at = |c: f64| DVector::from_element(n, c * lambda_max);
    let gap_at = |c: f64| start_gap(sys, &at(c), reference);

    if gap_at(MIN_SCALE)? >= *gap.start() {
        return Ok(QcrShift::new(at(MIN_SCALE)));
    }
    let (mut lo, mut hi) = (MIN_SCALE, 2.0 * MIN_SCALE);
    while gap_at(hi)? < *gap.start() {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NumericFailure("coldstart gap unreachable".into()));
        }
    }
    search(lo, hi, &gap, gap_at).map(|c| QcrShift::new(at(c)))
}

/// `u_i = u*_i + w * rho_i` with `w` chosen by bisection so the gap lies in `gap`.
///
/// `rho_i` is uniform on `[10^(Y-1), 10^Y]` where `Y` is the decimal order of
/// magnitude of `u*_i` (0 for zero entries); all perturbations are positive,
/// so `diag(u) - Q` stays positive definite.
pub fn perturbed_warmstart(
    sys: &LmiSystem,
    u_star: &DVector<f64>,
    reference: f64,
    gap: RangeInclusive<f64>,
    seed: u64,
) -> Result<QcrShift> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = u_star.map(|v| {
        let y = if v == 0.0 { 0.0 } else { v.abs().log10().floor() };
        rng.random_range(10f64.powf(y - 1.0)..=10f64.powf(y))
    });
    let at = |w: f64| u_star + w * &rho;
    // an optimal shift usually sits on the PSD boundary, where the height
    // cannot be factored; such points are closer than any target gap
    let gap_at = |w: f64| match start_gap(sys, &at(w), reference) {
        Err(Error::InfeasibleShift) => Ok(f64::NEG_INFINITY),
        other => other,
    };

    let g0 = gap_at(0.0)?;
    if g0 > *gap.end() {
        return Err(Error::InvalidInput(format!("unperturbed shift already has gap {g0:.3}%")));
    }
    if g0 >= *gap.start() {
        return Ok(QcrShift::new(at(0.0)));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while gap_at(hi)? < *gap.start() {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NumericFailure("warmstart gap unreachable".into()));
        }
    }
    search(lo, hi, &gap, gap_at).map(|w| QcrShift::new(at(w)))
}

/// Bisection for a parameter whose gap lands in `target`, assuming the gap is
/// below the target at `lo` and at or above its start at `hi`.
fn search(
    mut lo: f64,
    mut hi: f64,
    target: &RangeInclusive<f64>,
    gap_at: impl Fn(f64) -> Result<f64>,
) -> Result<f64> {
    if target.contains(&gap_at(hi)?) {
        return Ok(hi);
    }
    for _ in 0..SEARCH_STEPS {
        let mid = 0.5 * (lo + hi);
        let g = gap_at(mid)?;
        if target.contains(&g) {
            return Ok(mid);
        }
        if g < *target.start() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NumericFailure("gap search did not land in the target range".into()))
}
