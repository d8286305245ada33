//! Bulk accumulation of per-entry power sums over the finest-mesh covariance
//! matrix.
//!
//! Sums that involve only one node (`s_{a,0}`, `s_{0,b}` and their
//! quadrivariate analogues) are stored once per node; only genuinely mixed
//! sums are stored per half-vectorization entry. Samples are first added
//! into plain block buffers and every [`BLOCK`] samples the buffers are
//! folded into compensated totals. Values are shifted by the deterministic
//! reference solution so the sums stay well conditioned.

use super::mesh::MeshHierarchy;
use super::problem::HeatProblem;
use super::sample::{coupled_sample, SampleSeed};
use super::solve::solve_heat;
use crate::error::{require_samples, Error, Result};
use crate::mlmc::{
    level_h2_difference, level_variance_constant, vech_len, vech_pairs, LevelVariance,
};
use crate::moments::{
    classical_level_bound, h11, h2, var_h11_unbiased, var_zl_unbiased, z_l, Compensated, PowerSums1,
    PowerSums2, PowerSums4,
};
use crate::rng::Stream;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::ops::Range;

/// Samples per plain block sum before folding into compensated totals.
pub const BLOCK: usize = 256;
/// Samples per parallel shard.
pub const SHARD: u64 = 2048;

/// Which covariance entries to accumulate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum EntrySet {
    /// Every half-vectorization entry of the finest mesh.
    Full,
    /// Selected `(i, j)` node pairs.
    Pairs(Vec<(usize, usize)>),
}

#[derive(Clone, Copy, Debug)]
enum Source {
    Row(usize),
    Col(usize),
    Entry(usize),
}

// Node features of the uncoupled layout: x, x^2.
const PAIR_FEATURES: usize = 2;
const PAIR_ENTRIES: [(usize, usize); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];
const PAIR_SOURCES: [Source; 8] = [
    Source::Row(0),
    Source::Col(0),
    Source::Entry(0),
    Source::Row(1),
    Source::Col(1),
    Source::Entry(1),
    Source::Entry(2),
    Source::Entry(3),
];

// Node features of the coupled layout: g, c, g^2, c^2, g c where g is the
// shifted fine value and c the shifted coarse value.
const QUAD_FEATURES: usize = 5;
const QUAD_ENTRIES: [(usize, usize); 15] = [
    (0, 0),
    (1, 1),
    (0, 1),
    (1, 0),
    (2, 0),
    (0, 2),
    (3, 1),
    (1, 3),
    (2, 2),
    (3, 3),
    (4, 0),
    (0, 4),
    (4, 1),
    (1, 4),
    (4, 4),
];
const QUAD_SOURCES: [Source; 25] = [
    Source::Row(0),
    Source::Col(0),
    Source::Row(1),
    Source::Col(1),
    Source::Entry(0),
    Source::Entry(1),
    Source::Row(2),
    Source::Col(2),
    Source::Row(3),
    Source::Col(3),
    Source::Row(4),
    Source::Entry(2),
    Source::Entry(3),
    Source::Col(4),
    Source::Entry(4),
    Source::Entry(5),
    Source::Entry(6),
    Source::Entry(7),
    Source::Entry(8),
    Source::Entry(9),
    Source::Entry(10),
    Source::Entry(11),
    Source::Entry(12),
    Source::Entry(13),
    Source::Entry(14),
];

// Per-node features of (X+, X-) = (p, m):
// p, p^2, p^3, p^4, m, m^2, m^3, m^4, p m, p^2 m, p m^2, p^2 m^2.
const PM_FEATURES: usize = 12;

/// Per-entry power sums of one level, on the finest mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelField {
    l: usize,
    coupled: bool,
    m: usize,
    entries: Option<Vec<(usize, usize)>>,
    n: usize,
    shift: Vec<f64>,
    node_tot: Vec<Compensated>,
    pm_tot: Vec<Compensated>,
    entry_tot: Vec<Compensated>,
    node_buf: Vec<f64>,
    pm_buf: Vec<f64>,
    entry_buf: Vec<f64>,
    pending: usize,
    feat: Vec<f64>,
}

impl LevelField {
    /// Empty accumulator; `coupled` selects quadruple (fine, coarse) sums.
    pub fn new(l: usize, coupled: bool, shift: Vec<f64>, entries: EntrySet) -> Result<Self> {
        let m = shift.len();
        let entries = match entries {
            EntrySet::Full => None,
            EntrySet::Pairs(p) => {
                if let Some(&(i, j)) = p.iter().find(|&&(i, j)| i >= m || j >= m) {
                    return Err(Error::domain(format!("entry ({i}, {j}) outside {m} nodes")));
                }
                Some(p)
            }
        };
        let n_entries = entries.as_ref().map_or(vech_len(m), |p| p.len());
        let (nf, np) = if coupled {
            (QUAD_FEATURES, QUAD_ENTRIES.len())
        } else {
            (PAIR_FEATURES, PAIR_ENTRIES.len())
        };
        Ok(LevelField {
            l,
            coupled,
            m,
            entries,
            n: 0,
            shift,
            node_tot: vec![Compensated::ZERO; nf * m],
            pm_tot: vec![Compensated::ZERO; PM_FEATURES * m],
            entry_tot: vec![Compensated::ZERO; np * n_entries],
            node_buf: vec![0.0; nf * m],
            pm_buf: vec![0.0; PM_FEATURES * m],
            entry_buf: vec![0.0; np * n_entries],
            pending: 0,
            feat: vec![0.0; nf * m],
        })
    }

    pub fn level(&self) -> usize {
        self.l
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_coupled(&self) -> bool {
        self.coupled
    }

    pub fn nodes(&self) -> usize {
        self.m
    }

    /// `(i, j)` of every accumulated entry in storage order.
    pub fn entry_pairs(&self) -> Vec<(usize, usize)> {
        self.entries.clone().unwrap_or_else(|| vech_pairs(self.m))
    }

    pub fn entry_count(&self) -> usize {
        self.entries.as_ref().map_or(vech_len(self.m), |p| p.len())
    }

    /// Adds one sample given on the finest mesh. `coarse` must be present
    /// exactly when the field is coupled.
    pub fn push(&mut self, fine: &[f64], coarse: Option<&[f64]>) -> Result<()> {
        let m = self.m;
        if fine.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: fine.len() });
        }
        if fine.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("level sample"));
        }
        match (self.coupled, coarse) {
            (true, Some(c)) => {
                if c.len() != m {
                    return Err(Error::DimensionMismatch { expected: m, got: c.len() });
                }
                if c.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite("level sample"));
                }
                for (k, &f) in fine.iter().enumerate() {
                    let g = f - self.shift[k];
                    let cc = c[k] - self.shift[k];
                    self.feat[k] = g;
                    self.feat[m + k] = cc;
                    self.feat[2 * m + k] = g * g;
                    self.feat[3 * m + k] = cc * cc;
                    self.feat[4 * m + k] = g * cc;
                    self.push_pm(k, g + cc, g - cc);
                }
            }
            (false, None) => {
                for (k, &f) in fine.iter().enumerate() {
                    let g = f - self.shift[k];
                    self.feat[k] = g;
                    self.feat[m + k] = g * g;
                    self.push_pm(k, g, g);
                }
            }
            _ => return Err(Error::domain("coarse values must be given exactly for coupled levels")),
        }
        for (b, f) in self.node_buf.iter_mut().zip(&self.feat) {
            *b += f;
        }
        let pairs: &[(usize, usize)] = if self.coupled { &QUAD_ENTRIES } else { &PAIR_ENTRIES };
        let ne = self.entry_count();
        for (p, &(rf, cf)) in pairs.iter().enumerate() {
            let row = &self.feat[rf * m..(rf + 1) * m];
            let col = &self.feat[cf * m..(cf + 1) * m];
            let buf = &mut self.entry_buf[p * ne..(p + 1) * ne];
            match &self.entries {
                None => {
                    let mut off = 0;
                    for j in 0..m {
                        let cj = col[j];
                        let seg = &mut buf[off..off + m - j];
                        for (b, r) in seg.iter_mut().zip(&row[j..]) {
                            *b += r * cj;
                        }
                        off += m - j;
                    }
                }
                Some(list) => {
                    for (b, &(i, j)) in buf.iter_mut().zip(list) {
                        *b += row[i] * col[j];
                    }
                }
            }
        }
        self.n += 1;
        self.pending += 1;
        if self.pending == BLOCK {
            self.flush();
        }
        Ok(())
    }

    fn push_pm(&mut self, k: usize, p: f64, q: f64) {
        let m = self.m;
        let (p2, q2) = (p * p, q * q);
        let vals = [p, p2, p2 * p, p2 * p2, q, q2, q2 * q, q2 * q2, p * q, p2 * q, p * q2, p2 * q2];
        for (f, v) in vals.iter().enumerate() {
            self.pm_buf[f * m + k] += v;
        }
    }

    /// Folds the block buffers into the compensated totals.
    pub fn flush(&mut self) {
        for (t, b) in [
            (&mut self.node_tot, &mut self.node_buf),
            (&mut self.pm_tot, &mut self.pm_buf),
            (&mut self.entry_tot, &mut self.entry_buf),
        ] {
            for (tv, bv) in t.iter_mut().zip(b.iter_mut()) {
                tv.add(*bv);
                *bv = 0.0;
            }
        }
        self.pending = 0;
    }

    /// Adds the samples of another accumulator of the same layout.
    pub fn merge(&mut self, mut other: LevelField) -> Result<()> {
        if self.coupled != other.coupled
            || self.shift != other.shift
            || self.entries != other.entries
            || self.l != other.l
        {
            return Err(Error::domain("cannot merge level fields of different layout"));
        }
        self.flush();
        other.flush();
        for (a, b) in [
            (&mut self.node_tot, &other.node_tot),
            (&mut self.pm_tot, &other.pm_tot),
            (&mut self.entry_tot, &other.entry_tot),
        ] {
            for (x, y) in a.iter_mut().zip(b) {
                x.merge(y);
            }
        }
        self.n += other.n;
        Ok(())
    }

    fn node_value(&self, f: usize, k: usize) -> f64 {
        let i = f * self.m + k;
        self.node_tot[i].value() + self.node_buf[i]
    }

    fn pm_value(&self, f: usize, k: usize) -> f64 {
        let i = f * self.m + k;
        self.pm_tot[i].value() + self.pm_buf[i]
    }

    fn entry_value(&self, p: usize, e: usize) -> f64 {
        let i = p * self.entry_count() + e;
        self.entry_tot[i].value() + self.entry_buf[i]
    }

    fn resolve(&self, src: Source, e: usize, i: usize, j: usize) -> f64 {
        match src {
            Source::Row(f) => self.node_value(f, i),
            Source::Col(f) => self.node_value(f, j),
            Source::Entry(p) => self.entry_value(p, e),
        }
    }

    /// Bivariate sums of `(u_i, u_j)` for entry `e` of an uncoupled field.
    pub fn entry_pair_sums(&self, e: usize) -> Result<PowerSums2> {
        if self.coupled {
            return Err(Error::domain("coupled fields hold quadruple sums"));
        }
        let (i, j) = self.entry_pairs_at(e)?;
        let sums = PAIR_SOURCES.map(|s| self.resolve(s, e, i, j));
        Ok(PowerSums2::from_sums(self.n, [self.shift[i], self.shift[j]], sums))
    }

    /// Quadrivariate sums of `(fine_i, fine_j, coarse_i, coarse_j)`.
    pub fn entry_quad_sums(&self, e: usize) -> Result<PowerSums4> {
        if !self.coupled {
            return Err(Error::domain("uncoupled fields hold pair sums"));
        }
        let (i, j) = self.entry_pairs_at(e)?;
        let sums = QUAD_SOURCES.map(|s| self.resolve(s, e, i, j));
        let (si, sj) = (self.shift[i], self.shift[j]);
        Ok(PowerSums4::from_sums(self.n, [si, sj, si, sj], sums))
    }

    fn entry_pairs_at(&self, e: usize) -> Result<(usize, usize)> {
        match &self.entries {
            Some(list) => list.get(e).copied(),
            None => vech_pairs(self.m).get(e).copied(),
        }
        .ok_or_else(|| Error::domain(format!("entry {e} out of range")))
    }

    fn pm_shifts(&self, k: usize) -> (f64, f64) {
        if self.coupled {
            (2.0 * self.shift[k], 0.0)
        } else {
            (self.shift[k], self.shift[k])
        }
    }

    /// Sums of `X+` at node `k` (the sample itself on an uncoupled level).
    pub fn node_plus(&self, k: usize) -> PowerSums1 {
        let s = [0, 1, 2, 3].map(|f| self.pm_value(f, k));
        PowerSums1::from_sums(self.n, self.pm_shifts(k).0, s)
    }

    /// Sums of `X-` at node `k` (the sample itself on an uncoupled level).
    pub fn node_minus(&self, k: usize) -> PowerSums1 {
        let s = [4, 5, 6, 7].map(|f| self.pm_value(f, k));
        PowerSums1::from_sums(self.n, self.pm_shifts(k).1, s)
    }

    /// Bivariate sums of `(X+, X-)` at node `k`.
    pub fn node_plus_minus(&self, k: usize) -> PowerSums2 {
        let v = |f| self.pm_value(f, k);
        let sums = [v(0), v(4), v(8), v(1), v(5), v(9), v(10), v(11)];
        let (sp, sm) = self.pm_shifts(k);
        PowerSums2::from_sums(self.n, [sp, sm], sums)
    }

    /// Sample mean of the level correction `Y_l` at node `k`.
    pub fn mean_y(&self, k: usize) -> f64 {
        let minus = self.node_minus(k);
        minus.shift() + minus.s(1) / self.n as f64
    }

    /// Evaluates every per-entry and per-node statistic of the level.
    pub fn summarize(&self) -> Result<LevelSummary> {
        require_samples("level summary", self.n, 4)?;
        let ne = self.entry_count();
        let nf = self.n as f64;
        let pairs = self.entry_pairs();
        let mut z = Vec::with_capacity(ne);
        let mut v = Vec::with_capacity(ne);
        let mut v_cov = Vec::with_capacity(ne);
        let mut v_fine = Vec::with_capacity(if self.coupled { ne } else { 0 });
        let plus: Vec<PowerSums1> = (0..self.m).map(|k| self.node_plus(k)).collect();
        let minus: Vec<PowerSums1> = (0..self.m).map(|k| self.node_minus(k)).collect();
        for (e, &(i, j)) in pairs.iter().enumerate() {
            if self.coupled {
                let ps = self.entry_quad_sums(e)?;
                z.push(z_l(&ps)?);
                v.push(nf * var_zl_unbiased(&ps)?);
                v_fine.push(nf * var_h11_unbiased(&ps.pair(0, 1)?)?);
            } else {
                let ps = self.entry_pair_sums(e)?;
                z.push(h11(&ps)?);
                v.push(nf * var_h11_unbiased(&ps)?);
            }
            v_cov.push(nf * classical_level_bound(&plus[i], &minus[i], &plus[j], &minus[j], self.n)?);
        }
        let pm: Vec<PowerSums2> = (0..self.m).map(|k| self.node_plus_minus(k)).collect();
        let variance = LevelVariance {
            n: self.n,
            dh2: pm.iter().map(level_h2_difference).collect::<Result<_>>()?,
            v2: pm.iter().map(level_variance_constant).collect::<Result<_>>()?,
        };
        if !self.coupled {
            v_fine.clone_from(&v);
        }
        Ok(LevelSummary {
            l: self.l,
            n: self.n,
            z_vech: z,
            v_vech: v,
            v_cov_vech: v_cov,
            v_fine_vech: v_fine,
            mean_y: (0..self.m).map(|k| self.mean_y(k)).collect(),
            var_y: minus.iter().map(h2).collect::<Result<_>>()?,
            variance,
        })
    }
}

/// Statistics of one level evaluated from a [`LevelField`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub l: usize,
    pub n: usize,
    /// `Z_l` (or `h11` on an uncoupled level) per entry.
    pub z_vech: Vec<f64>,
    /// `N Var(Z_l)` estimated without bias, per entry.
    pub v_vech: Vec<f64>,
    /// `N` times the classical worst-case bound, per entry.
    pub v_cov_vech: Vec<f64>,
    /// `N Var(h11)` of the fine values alone, per entry.
    pub v_fine_vech: Vec<f64>,
    /// Sample mean of `Y_l` per node.
    pub mean_y: Vec<f64>,
    /// Unbiased sample variance of `Y_l` per node.
    pub var_y: Vec<f64>,
    /// Level terms of the multilevel variance estimator per node.
    pub variance: LevelVariance,
}

/// Reference solution used as the per-node shift.
pub fn reference_shift(problem: &HeatProblem, hier: &MeshHierarchy) -> Result<Vec<f64>> {
    solve_heat(problem, hier.finest_level(), problem.deterministic_kappa())
}

/// Generates samples `range` of level `l` in `stream` and accumulates them.
/// With `coupled = false` only the fine solution of level `l` is used,
/// which is how single-level Monte Carlo runs on the finest mesh.
#[allow(clippy::too_many_arguments)]
pub fn generate_level_accumulators(
    problem: &HeatProblem,
    hier: &MeshHierarchy,
    l: usize,
    coupled: bool,
    range: Range<u64>,
    run_seed: u64,
    stream: Stream,
    entries: &EntrySet,
) -> Result<LevelField> {
    hier.level(l)?;
    if coupled && l == 0 {
        return Err(Error::domain("level 0 has no coarse level to couple with"));
    }
    let shift = reference_shift(problem, hier)?;
    let start = range.start;
    let shards = (range.end.saturating_sub(start)).div_ceil(SHARD);
    let parts: Vec<Result<LevelField>> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut field = LevelField::new(l, coupled, shift.clone(), entries.clone())?;
            let lo = start + s * SHARD;
            let hi = (lo + SHARD).min(range.end);
            for index in lo..hi {
                let pair = coupled_sample(problem, hier, l, SampleSeed { run_seed, stream, index })?;
                let (fine, coarse) = pair.on_finest(hier)?;
                let coarse = if coupled { coarse } else { None };
                field.push(&fine, coarse.as_deref())?;
            }
            field.flush();
            Ok(field)
        })
        .collect();
    let mut out = LevelField::new(l, coupled, shift, entries.clone())?;
    for part in parts {
        out.merge(part?)?;
    }
    Ok(out)
}
