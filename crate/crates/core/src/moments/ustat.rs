//! Generic unbiased estimator of a product central moment
//! `E[prod_m (X_{v_m} - E X_{v_m})]`, built from power sums.
//!
//! The central moment expands into products of raw moments; each product is
//! estimated without bias by a U-statistic over distinct sample indices, and
//! the sum over distinct indices is rewritten in power sums by Moebius
//! inversion on the set-partition lattice. The result coincides with the
//! h-statistic of the same moment and serves as an independent route to the
//! transcribed closed forms.

use super::sums::PowerSumSet;
use crate::error::{require_samples, Error, Result};

/// Unbiased estimate of the central product moment over `slots`, where each
/// entry names a variable of `ps` (0-based). Up to four slots are supported.
pub fn central_product<P: PowerSumSet>(ps: &P, slots: &[usize]) -> Result<f64> {
    let k = slots.len();
    if k > 4 {
        return Err(Error::domain("at most four slots are supported"));
    }
    if let Some(&v) = slots.iter().find(|&&v| v >= P::DIM) {
        return Err(Error::DimensionMismatch { expected: P::DIM, got: v + 1 });
    }
    if k == 0 {
        return Ok(1.0);
    }
    if k == 1 {
        return Ok(0.0);
    }
    require_samples("central product moment", ps.count(), k)?;
    let n = ps.count() as f64;
    let mut total = 0.0;
    for mask in 0u32..(1 << k) {
        let size = mask.count_ones() as usize;
        let mut blocks: Vec<[u8; 4]> = Vec::with_capacity(k);
        if size > 0 {
            let mut e = [0u8; 4];
            for (m, &v) in slots.iter().enumerate() {
                if mask & (1 << m) != 0 {
                    e[v] += 1;
                }
            }
            blocks.push(e);
        }
        for (m, &v) in slots.iter().enumerate() {
            if mask & (1 << m) == 0 {
                let mut e = [0u8; 4];
                e[v] = 1;
                blocks.push(e);
            }
        }
        let sign = if (k - size).is_multiple_of(2) { 1.0 } else { -1.0 };
        total += sign * raw_product_estimate(ps, &blocks, n)?;
    }
    Ok(total)
}

/// Unbiased estimate of `prod_b E[X^{e_b}]` from distinct-index sums.
fn raw_product_estimate<P: PowerSumSet>(ps: &P, blocks: &[[u8; 4]], n: f64) -> Result<f64> {
    let r = blocks.len();
    let mut falling = 1.0;
    for i in 0..r {
        falling *= n - i as f64;
    }
    let mut sum = 0.0;
    let mut failure = None;
    for_each_partition(r, &mut |labels, groups| {
        let mut term = 1.0;
        for g in 0..groups {
            let mut e = [0u8; 4];
            let mut size = 0usize;
            for (b, &lab) in labels.iter().enumerate() {
                if lab == g {
                    size += 1;
                    for v in 0..4 {
                        e[v] += blocks[b][v];
                    }
                }
            }
            let mobius = if size % 2 == 1 { 1.0 } else { -1.0 } * factorial(size - 1);
            match ps.sum_of(e) {
                Some(s) => term *= mobius * s,
                None => {
                    failure = Some(e);
                    return;
                }
            }
        }
        sum += term;
    });
    if let Some(e) = failure {
        return Err(Error::domain(format!("power sum {e:?} is not held by this accumulator")));
    }
    Ok(sum / falling)
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|i| i as f64).product()
}

/// Visits every set partition of `0..r` as a restricted growth string.
fn for_each_partition(r: usize, f: &mut dyn FnMut(&[usize], usize)) {
    fn rec(labels: &mut Vec<usize>, r: usize, groups: usize, f: &mut dyn FnMut(&[usize], usize)) {
        if labels.len() == r {
            f(labels, groups);
            return;
        }
        for g in 0..=groups {
            labels.push(g);
            rec(labels, r, groups.max(g + 1), f);
            labels.pop();
        }
    }
    let mut labels = Vec::with_capacity(r);
    rec(&mut labels, r, 0, f);
}
