//! Exhaustive maximization by Gray-code enumeration.

use crate::error::{Error, Result};
use crate::model::{Assignment, QuboProblem};

/// Largest `n` accepted by [`brute_force`].
pub const MAX_BRUTE_N: usize = 30;

/// Exact maximum over all `2^n` assignments.
///
/// Walks the assignments in Gray-code order, updating the objective in `O(n)`
/// per flip; the winner's value is recomputed from scratch at the end. Ties
/// keep the first maximizer in that order.
pub fn brute_force(p: &QuboProblem) -> Result<(f64, Assignment)> {
    let n = p.n();
    if n > MAX_BRUTE_N {
        return Err(Error::InvalidInput(format!("brute force limited to n <= {MAX_BRUTE_N}, got {n}")));
    }
    let q = p.q();
    let c = p.c();
    let mut x = vec![0u8; n];
    // h[j] = sum_k Q[j][k] x_k
    let mut h = vec![0.0; n];
    let mut value = p.offset();
    let mut best_value = value;
    let mut best_code = 0u64;

    for step in 1u64..(1u64 << n) {
        let i = step.trailing_zeros() as usize;
        let col = q.column(i);
        if x[i] == 0 {
            value += c[i] + q[(i, i)] + 2.0 * h[i];
            x[i] = 1;
            for (hj, qj) in h.iter_mut().zip(col.iter()) {
                *hj += qj;
            }
        } else {
            value -= c[i] + 2.0 * h[i] - q[(i, i)];
            x[i] = 0;
            for (hj, qj) in h.iter_mut().zip(col.iter()) {
                *hj -= qj;
            }
        }
        if value > best_value {
            best_value = value;
            best_code = step ^ (step >> 1);
        }
    }

    let bits: Vec<u8> = (0..n).map(|i| ((best_code >> i) & 1) as u8).collect();
    let exact = p.value_of_bits(&bits);
    Ok((exact, Assignment::new(bits)?))
}
