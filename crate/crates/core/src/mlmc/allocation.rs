use crate::error::{require_same_len, Error, Result};

/// Minimum sample count on any level; the level-difference statistics are
/// only defined for more than three samples.
pub const MIN_SAMPLES: usize = 4;

/// Ceiling that ignores a relative excess of a few ulps, so exact quotients
/// such as `84.582 / 1e-3` are not pushed up by representation error.
fn ceil_count(x: f64) -> usize {
    let c = x.ceil();
    if c - x > 0.0 && (c - 1.0 - x).abs() <= 4.0 * f64::EPSILON * x.abs() {
        (c - 1.0) as usize
    } else {
        c as usize
    }
}

/// Per-level sample counts minimizing cost subject to the sampling error
/// budget, evaluated entrywise over the half-vectorization and maximized.
///
/// `v[l][e]` is the per-sample variance constant of entry `e` on level `l`
/// and `c[l]` the cost of one sample. Negative estimates are clamped to 0.
pub fn allocate_samples(eps2_half: f64, v: &[Vec<f64>], c: &[f64]) -> Result<Vec<usize>> {
    if !(eps2_half > 0.0 && eps2_half.is_finite()) {
        return Err(Error::domain(format!("eps2_half must be positive, got {eps2_half}")));
    }
    require_same_len(v.len(), c.len())?;
    if let Some(&bad) = c.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::domain(format!("costs must be positive, got {bad}")));
    }
    let entries = v.first().map_or(0, |r| r.len());
    for row in v {
        require_same_len(entries, row.len())?;
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("variance constants"));
        }
    }
    let mut n = vec![MIN_SAMPLES; v.len()];
    for e in 0..entries {
        let tau: f64 = v
            .iter()
            .zip(c)
            .map(|(row, &cl)| (row[e].max(0.0) * cl).sqrt())
            .sum::<f64>()
            / eps2_half;
        for (l, (row, &cl)) in v.iter().zip(c).enumerate() {
            let want = ceil_count(tau * (row[e].max(0.0) / cl).sqrt());
            n[l] = n[l].max(want);
        }
    }
    Ok(n)
}

/// Single-level sample count `max(ceil(max V / eps2_half), 4)`.
pub fn mc_sample_count(eps2_half: f64, v11: &[f64]) -> Result<usize> {
    if !(eps2_half > 0.0 && eps2_half.is_finite()) {
        return Err(Error::domain(format!("eps2_half must be positive, got {eps2_half}")));
    }
    if v11.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("variance constants"));
    }
    let vmax = v11.iter().cloned().fold(0.0f64, f64::max);
    Ok(ceil_count(vmax / eps2_half).max(MIN_SAMPLES))
}

/// `sum_l N_l C_l`.
pub fn total_cost(n: &[usize], cost: &[f64]) -> Result<f64> {
    require_same_len(n.len(), cost.len())?;
    Ok(n.iter().zip(cost).map(|(&n, &c)| n as f64 * c).sum())
}

/// Sampling error `max_e sum_l V[l][e] / N_l` implied by an allocation.
pub fn sampling_error(v: &[Vec<f64>], n: &[usize]) -> Result<f64> {
    require_same_len(v.len(), n.len())?;
    let entries = v.first().map_or(0, |r| r.len());
    let mut worst = f64::NEG_INFINITY;
    for e in 0..entries {
        let s: f64 = v.iter().zip(n).map(|(row, &nl)| row[e] / nl as f64).sum();
        worst = worst.max(s);
    }
    Ok(if entries == 0 { 0.0 } else { worst })
}
