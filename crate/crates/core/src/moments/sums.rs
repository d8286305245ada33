use super::compensated::Compensated;
use crate::error::{Error, Result};

/// Shared storage for a fixed set of multi-index power sums of shifted data.
///
/// Each sum is `sum_k prod_v (x_kv - shift_v)^e_v`. A shift close to the data
/// mean keeps the higher sums well conditioned; every h-statistic is
/// translation invariant so the formulas consume shifted sums directly.
#[derive(Clone, Debug, PartialEq)]
struct Core<const D: usize, const K: usize> {
    n: usize,
    shift: [f64; D],
    sums: [Compensated; K],
    /// Adopt the first pushed sample as the shift.
    auto: bool,
}

impl<const D: usize, const K: usize> Core<D, K> {
    fn new(shift: [f64; D]) -> Self {
        Core { n: 0, shift, sums: [Compensated::ZERO; K], auto: false }
    }

    fn auto() -> Self {
        Core { auto: true, ..Core::new([0.0; D]) }
    }

    fn push(&mut self, x: [f64; D], idx: &[[u8; D]; K], max_pow: usize) -> Result<()> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("power-sum sample"));
        }
        if self.auto && self.n == 0 {
            self.shift = x;
        }
        let mut pw = [[1.0f64; 5]; D];
        for v in 0..D {
            let y = x[v] - self.shift[v];
            for p in 1..=max_pow {
                pw[v][p] = pw[v][p - 1] * y;
            }
        }
        for (k, e) in idx.iter().enumerate() {
            let mut prod = 1.0;
            for v in 0..D {
                prod *= pw[v][e[v] as usize];
            }
            self.sums[k].add(prod);
        }
        self.n += 1;
        Ok(())
    }

    fn merge(&mut self, other: &Self, idx: &[[u8; D]; K]) {
        if self.auto && self.n == 0 {
            self.shift = other.shift;
        }
        if other.shift == self.shift {
            for (a, b) in self.sums.iter_mut().zip(other.sums.iter()) {
                a.merge(b);
            }
        } else {
            let moved = other.recentered(self.shift, idx);
            for (a, b) in self.sums.iter_mut().zip(moved.sums.iter()) {
                a.merge(b);
            }
        }
        self.n += other.n;
    }

    fn value(&self, e: &[u8; D], idx: &[[u8; D]; K]) -> Option<f64> {
        if e.iter().all(|&p| p == 0) {
            return Some(self.n as f64);
        }
        idx.iter().position(|i| i == e).map(|k| self.sums[k].value())
    }

    /// Re-expresses the sums about a new shift by binomial expansion. The
    /// index set is closed under taking smaller exponents, so every lower
    /// order sum needed by the expansion is available.
    fn recentered(&self, new_shift: [f64; D], idx: &[[u8; D]; K]) -> Self {
        let mut delta = [0.0; D];
        for v in 0..D {
            delta[v] = self.shift[v] - new_shift[v];
        }
        let mut out = Core::new(new_shift);
        out.n = self.n;
        for (k, e) in idx.iter().enumerate() {
            let mut acc = Compensated::ZERO;
            let mut j = [0u8; D];
            loop {
                let mut coef = 1.0;
                for v in 0..D {
                    coef *= binom(e[v], j[v]) * delta[v].powi((e[v] - j[v]) as i32);
                }
                if coef != 0.0 {
                    let s = self.value(&j, idx).expect("index set is downward closed");
                    acc.add(coef * s);
                }
                // odometer over 0..=e
                let mut v = 0;
                loop {
                    if v == D {
                        break;
                    }
                    if j[v] < e[v] {
                        j[v] += 1;
                        break;
                    }
                    j[v] = 0;
                    v += 1;
                }
                if v == D {
                    break;
                }
            }
            out.sums[k] = acc;
        }
        out
    }

    fn from_sums(n: usize, shift: [f64; D], sums: [f64; K]) -> Self {
        Core { n, shift, sums: sums.map(Compensated::from_value), auto: false }
    }
}

fn binom(n: u8, k: u8) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Read access to a set of power sums by multi-index, used by the generic
/// h-statistic evaluator. Exponents beyond `DIM` must be zero.
pub trait PowerSumSet {
    const DIM: usize;
    fn count(&self) -> usize;
    /// Shifted sum for exponent vector `e`; `None` when not stored.
    fn sum_of(&self, e: [u8; 4]) -> Option<f64>;
}

const IDX1: [[u8; 1]; 4] = [[1], [2], [3], [4]];

/// Power sums `s_1..s_4` of one variable.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSums1(Core<1, 4>);

impl Default for PowerSums1 {
    fn default() -> Self {
        Self::new()
    }
}

impl PowerSums1 {
    /// Empty accumulator that takes its shift from the first sample.
    pub fn new() -> Self {
        PowerSums1(Core::auto())
    }

    pub fn with_shift(shift: f64) -> Self {
        PowerSums1(Core::new([shift]))
    }

    pub fn from_values(values: &[f64]) -> Result<Self> {
        let mut ps = Self::new();
        for &v in values {
            ps.push(v)?;
        }
        Ok(ps)
    }

    /// Builds an accumulator from sums that already include `shift`.
    pub fn from_sums(n: usize, shift: f64, sums: [f64; 4]) -> Self {
        PowerSums1(Core::from_sums(n, [shift], sums))
    }

    pub fn push(&mut self, x: f64) -> Result<()> {
        self.0.push([x], &IDX1, 4)
    }

    pub fn merge(&mut self, other: &Self) {
        self.0.merge(&other.0, &IDX1)
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn shift(&self) -> f64 {
        self.0.shift[0]
    }

    /// Shifted sum `sum (x - shift)^r`, r in 1..=4.
    pub fn s(&self, r: u8) -> f64 {
        self.0.value(&[r], &IDX1).expect("power in 0..=4")
    }

    /// Sum of raw (unshifted) powers.
    pub fn raw(&self, r: u8) -> f64 {
        self.0.recentered([0.0], &IDX1).value(&[r], &IDX1).expect("power in 0..=4")
    }

    pub fn recentered(&self, shift: f64) -> Self {
        PowerSums1(self.0.recentered([shift], &IDX1))
    }
}

impl PowerSumSet for PowerSums1 {
    const DIM: usize = 1;
    fn count(&self) -> usize {
        self.0.n
    }
    fn sum_of(&self, e: [u8; 4]) -> Option<f64> {
        if e[1..].iter().any(|&p| p != 0) {
            return None;
        }
        self.0.value(&[e[0]], &IDX1)
    }
}

/// Multi-indices held by [`PowerSums2`].
pub const IDX2: [[u8; 2]; 8] = [
    [1, 0],
    [0, 1],
    [1, 1],
    [2, 0],
    [0, 2],
    [2, 1],
    [1, 2],
    [2, 2],
];

/// Bivariate power sums `s_{a,b}` for the eight indices in [`IDX2`].
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSums2(Core<2, 8>);

impl Default for PowerSums2 {
    fn default() -> Self {
        Self::new()
    }
}

impl PowerSums2 {
    /// Empty accumulator that takes its shift from the first sample.
    pub fn new() -> Self {
        PowerSums2(Core::auto())
    }

    pub fn with_shift(shift: [f64; 2]) -> Self {
        PowerSums2(Core::new(shift))
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let mut ps = Self::new();
        for &(x, y) in pairs {
            ps.push(x, y)?;
        }
        Ok(ps)
    }

    /// Builds an accumulator from sums that already include `shift`, ordered
    /// as [`IDX2`].
    pub fn from_sums(n: usize, shift: [f64; 2], sums: [f64; 8]) -> Self {
        PowerSums2(Core::from_sums(n, shift, sums))
    }

    pub fn push(&mut self, x: f64, y: f64) -> Result<()> {
        self.0.push([x, y], &IDX2, 2)
    }

    pub fn merge(&mut self, other: &Self) {
        self.0.merge(&other.0, &IDX2)
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn shift(&self) -> [f64; 2] {
        self.0.shift
    }

    /// Shifted sum `s_{a,b}`; `s(0,0)` is n.
    pub fn s(&self, a: u8, b: u8) -> f64 {
        self.0.value(&[a, b], &IDX2).expect("index held by PowerSums2")
    }

    pub fn raw(&self, a: u8, b: u8) -> f64 {
        self.recentered([0.0; 2]).s(a, b)
    }

    pub fn recentered(&self, shift: [f64; 2]) -> Self {
        PowerSums2(self.0.recentered(shift, &IDX2))
    }

    /// Sums in [`IDX2`] order.
    pub fn values(&self) -> [f64; 8] {
        self.0.sums.map(|c| c.value())
    }
}

impl PowerSumSet for PowerSums2 {
    const DIM: usize = 2;
    fn count(&self) -> usize {
        self.0.n
    }
    fn sum_of(&self, e: [u8; 4]) -> Option<f64> {
        if e[2..].iter().any(|&p| p != 0) {
            return None;
        }
        self.0.value(&[e[0], e[1]], &IDX2)
    }
}

/// Multi-indices held by [`PowerSums4`].
pub const IDX4: [[u8; 4]; 25] = [
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 1, 0],
    [0, 0, 0, 1],
    [1, 1, 0, 0],
    [0, 0, 1, 1],
    [2, 0, 0, 0],
    [0, 2, 0, 0],
    [0, 0, 2, 0],
    [0, 0, 0, 2],
    [1, 0, 1, 0],
    [1, 0, 0, 1],
    [0, 1, 1, 0],
    [0, 1, 0, 1],
    [2, 1, 0, 0],
    [1, 2, 0, 0],
    [0, 0, 2, 1],
    [0, 0, 1, 2],
    [2, 2, 0, 0],
    [0, 0, 2, 2],
    [1, 1, 1, 0],
    [1, 1, 0, 1],
    [1, 0, 1, 1],
    [0, 1, 1, 1],
    [1, 1, 1, 1],
];

/// Quadrivariate power sums `s_{a,b,c,d}` over quadruples `(g, h, i, j)`:
/// fine pair `(g, h)` and coarse pair `(i, j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSums4(Core<4, 25>);

impl Default for PowerSums4 {
    fn default() -> Self {
        Self::new()
    }
}

impl PowerSums4 {
    /// Empty accumulator that takes its shift from the first sample.
    pub fn new() -> Self {
        PowerSums4(Core::auto())
    }

    pub fn with_shift(shift: [f64; 4]) -> Self {
        PowerSums4(Core::new(shift))
    }

    pub fn from_quads(quads: &[[f64; 4]]) -> Result<Self> {
        let mut ps = Self::new();
        for &q in quads {
            ps.push(q)?;
        }
        Ok(ps)
    }

    /// Builds an accumulator from sums that already include `shift`, ordered
    /// as [`IDX4`].
    pub fn from_sums(n: usize, shift: [f64; 4], sums: [f64; 25]) -> Self {
        PowerSums4(Core::from_sums(n, shift, sums))
    }

    pub fn push(&mut self, q: [f64; 4]) -> Result<()> {
        self.0.push(q, &IDX4, 2)
    }

    pub fn merge(&mut self, other: &Self) {
        self.0.merge(&other.0, &IDX4)
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn shift(&self) -> [f64; 4] {
        self.0.shift
    }

    pub fn s(&self, e: [u8; 4]) -> f64 {
        self.0.value(&e, &IDX4).expect("index held by PowerSums4")
    }

    pub fn raw(&self, e: [u8; 4]) -> f64 {
        self.recentered([0.0; 4]).s(e)
    }

    pub fn recentered(&self, shift: [f64; 4]) -> Self {
        PowerSums4(self.0.recentered(shift, &IDX4))
    }

    /// Sums in [`IDX4`] order.
    pub fn values(&self) -> [f64; 25] {
        self.0.sums.map(|c| c.value())
    }

    /// Bivariate sums of the two variables at positions `a` and `b`.
    pub fn pair(&self, a: usize, b: usize) -> Result<PowerSums2> {
        if a >= 4 || b >= 4 {
            return Err(Error::DimensionMismatch { expected: 4, got: a.max(b) + 1 });
        }
        let mut sums = [0.0; 8];
        for (k, e2) in IDX2.iter().enumerate() {
            let mut e = [0u8; 4];
            e[a] += e2[0];
            e[b] += e2[1];
            sums[k] = self
                .sum_of(e)
                .ok_or_else(|| Error::domain("pair sums not held for this index pair"))?;
        }
        Ok(PowerSums2::from_sums(self.n(), [self.0.shift[a], self.0.shift[b]], sums))
    }
}

impl PowerSumSet for PowerSums4 {
    const DIM: usize = 4;
    fn count(&self) -> usize {
        self.0.n
    }
    fn sum_of(&self, e: [u8; 4]) -> Option<f64> {
        self.0.value(&e, &IDX4)
    }
}

pub fn accumulate2(mut acc: PowerSums2, x: f64, y: f64) -> Result<PowerSums2> {
    acc.push(x, y)?;
    Ok(acc)
}

pub fn merge1(a: &PowerSums1, b: &PowerSums1) -> PowerSums1 {
    let mut out = a.clone();
    out.merge(b);
    out
}

pub fn merge2(a: &PowerSums2, b: &PowerSums2) -> PowerSums2 {
    let mut out = a.clone();
    out.merge(b);
    out
}

pub fn merge4(a: &PowerSums4, b: &PowerSums4) -> PowerSums4 {
    let mut out = a.clone();
    out.merge(b);
    out
}
