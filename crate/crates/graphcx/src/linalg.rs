//! Rank, homology and quasi-isomorphism checks.
//!
//! Ranks are computed modulo two large primes; when the two disagree, or when
//! exact mode is requested, a fraction-free integer elimination decides.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SparseRationalMatrix;

pub const PRIMES: [u64; 2] = [2_147_483_647, 2_147_483_629];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RankMode {
    /// Two primes, exact recomputation on disagreement.
    #[default]
    Modular,
    /// Always exact.
    Exact,
}

/// Coefficients of the elimination. Machine integers report overflow as
/// `None`, and the caller retries with big integers.
trait Scalar: Clone {
    fn is_zero(&self) -> bool;
    fn mul(a: &Self, b: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    /// `alpha * x - beta * y`.
    fn lin(alpha: &Self, x: &Self, beta: &Self, y: &Self) -> Option<Self>;
    /// Coefficients (alpha, beta) with `alpha * c_r - beta * p_r = 0`.
    fn factors(c_r: &Self, p_r: &Self) -> (Self, Self);
    /// Divides a column and its history by their common content.
    fn normalize(col: &mut [(usize, Self)], hist: &mut [(usize, Self)]);
}

#[derive(Debug)]
struct Overflow;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct ModP {
    x: u64,
    p: u64,
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

impl Scalar for ModP {
    fn is_zero(&self) -> bool {
        self.x == 0
    }
    fn mul(a: &Self, b: &Self) -> Option<Self> {
        Some(ModP { x: a.x * b.x % a.p, p: a.p })
    }
    fn neg(&self) -> Option<Self> {
        Some(ModP { x: (self.p - self.x) % self.p, p: self.p })
    }
    fn lin(alpha: &Self, x: &Self, beta: &Self, y: &Self) -> Option<Self> {
        let p = x.p;
        let a = alpha.x * x.x % p;
        let b = beta.x * y.x % p;
        Some(ModP { x: (a + p - b) % p, p })
    }
    fn factors(c_r: &Self, p_r: &Self) -> (Self, Self) {
        let p = c_r.p;
        let inv = pow_mod(p_r.x, p - 2, p);
        (ModP { x: 1, p }, ModP { x: c_r.x * inv % p, p })
    }
    fn normalize(_col: &mut [(usize, Self)], _hist: &mut [(usize, Self)]) {}
}

fn normalize_int<T: Integer + Clone>(col: &mut [(usize, T)], hist: &mut [(usize, T)]) {
    let mut g = T::zero();
    for (_, x) in col.iter().chain(hist.iter()) {
        g = g.gcd(x);
        if g.is_one() {
            return;
        }
    }
    if !g.is_zero() {
        for (_, x) in col.iter_mut().chain(hist.iter_mut()) {
            *x = x.clone() / g.clone();
        }
    }
}

impl Scalar for i128 {
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn mul(a: &Self, b: &Self) -> Option<Self> {
        a.checked_mul(*b)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn lin(alpha: &Self, x: &Self, beta: &Self, y: &Self) -> Option<Self> {
        alpha.checked_mul(*x)?.checked_sub(beta.checked_mul(*y)?)
    }
    fn factors(c_r: &Self, p_r: &Self) -> (Self, Self) {
        let g = Integer::gcd(c_r, p_r);
        (p_r / g, c_r / g)
    }
    fn normalize(col: &mut [(usize, Self)], hist: &mut [(usize, Self)]) {
        normalize_int(col, hist)
    }
}

impl Scalar for BigInt {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul(a: &Self, b: &Self) -> Option<Self> {
        Some(a * b)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn lin(alpha: &Self, x: &Self, beta: &Self, y: &Self) -> Option<Self> {
        Some(alpha * x - beta * y)
    }
    fn factors(c_r: &Self, p_r: &Self) -> (Self, Self) {
        let g = c_r.gcd(p_r);
        (p_r / &g, c_r / &g)
    }
    fn normalize(col: &mut [(usize, Self)], hist: &mut [(usize, Self)]) {
        normalize_int(col, hist)
    }
}

/// Column reduction state. Pivots are keyed by their leading row.
struct Reducer<S: Scalar> {
    pivot_of_row: Vec<Option<usize>>,
    pivots: Vec<Vec<(usize, S)>>,
    /// Combination of input columns producing each pivot (when tracking).
    history: Vec<Vec<(usize, S)>>,
    track: bool,
}

/// `alpha * x - beta * y` on sorted sparse vectors.
fn axpy<S: Scalar>(alpha: &S, x: &[(usize, S)], beta: &S, y: &[(usize, S)]) -> Option<Vec<(usize, S)>> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let (r, v) = if j >= y.len() || (i < x.len() && x[i].0 < y[j].0) {
            i += 1;
            (x[i - 1].0, S::mul(alpha, &x[i - 1].1)?)
        } else if i >= x.len() || x[i].0 > y[j].0 {
            j += 1;
            (y[j - 1].0, S::mul(beta, &y[j - 1].1)?.neg()?)
        } else {
            i += 1;
            j += 1;
            (x[i - 1].0, S::lin(alpha, &x[i - 1].1, beta, &y[j - 1].1)?)
        };
        if !v.is_zero() {
            out.push((r, v));
        }
    }
    Some(out)
}

impl<S: Scalar> Reducer<S> {
    fn new(rows: usize, track: bool) -> Self {
        Reducer { pivot_of_row: vec![None; rows], pivots: Vec::new(), history: Vec::new(), track }
    }

    /// Reduces `col` against the pivots. Returns the residual history when the
    /// column became zero, `None` when it became a new pivot.
    fn insert(&mut self, mut col: Vec<(usize, S)>, mut hist: Vec<(usize, S)>) -> std::result::Result<Option<Vec<(usize, S)>>, Overflow> {
        loop {
            let Some((r, c_r)) = col.first().cloned() else {
                return Ok(Some(hist));
            };
            match self.pivot_of_row[r] {
                Some(pi) => {
                    let p_r = &self.pivots[pi][0].1;
                    let (alpha, beta) = S::factors(&c_r, p_r);
                    col = axpy(&alpha, &col, &beta, &self.pivots[pi]).ok_or(Overflow)?;
                    if self.track {
                        hist = axpy(&alpha, &hist, &beta, &self.history[pi]).ok_or(Overflow)?;
                    }
                    S::normalize(&mut col, &mut hist);
                }
                None => {
                    self.pivot_of_row[r] = Some(self.pivots.len());
                    self.pivots.push(col);
                    self.history.push(hist);
                    return Ok(None);
                }
            }
        }
    }
}

fn modp_columns(m: &SparseRationalMatrix, p: u64, row_order: &[usize]) -> Vec<Vec<(usize, ModP)>> {
    let to_mod = |x: i64| -> u64 { (x as i128).rem_euclid(p as i128) as u64 };
    m.columns()
        .into_iter()
        .map(|col| {
            let mut out: Vec<(usize, ModP)> = col
                .into_iter()
                .map(|(r, x)| {
                    let num = to_mod(*x.numer());
                    let den = to_mod(*x.denom());
                    let v = num * pow_mod(den, p - 2, p) % p;
                    (row_order[r], ModP { x: v, p })
                })
                .filter(|(_, v)| v.x != 0)
                .collect();
            out.sort_by_key(|e| e.0);
            out
        })
        .collect()
}

fn int_columns<T: From<i128>>(m: &SparseRationalMatrix, row_order: &[usize]) -> Vec<Vec<(usize, T)>> {
    m.columns()
        .into_iter()
        .map(|col| {
            let l = col.iter().fold(1i64, |acc, (_, x)| acc.lcm(x.denom()));
            let mut out: Vec<(usize, i128)> =
                col.into_iter().map(|(r, x)| (row_order[r], *x.numer() as i128 * (l / x.denom()) as i128)).collect();
            out.sort_by_key(|e| e.0);
            out.into_iter().map(|(r, x)| (r, T::from(x))).collect()
        })
        .collect()
}

/// Sparse rows first: fewer fill-ins when pivots sit on sparse rows.
fn row_order(m: &SparseRationalMatrix) -> Vec<usize> {
    let mut count = vec![0usize; m.rows];
    for &(r, _, _) in m.entries() {
        count[r] += 1;
    }
    let mut idx: Vec<usize> = (0..m.rows).collect();
    idx.sort_by_key(|&r| (count[r], r));
    let mut pos = vec![0; m.rows];
    for (new, &old) in idx.iter().enumerate() {
        pos[old] = new;
    }
    pos
}

fn column_order(m: &SparseRationalMatrix) -> Vec<usize> {
    let mut count = vec![0usize; m.cols];
    for &(_, c, _) in m.entries() {
        count[c] += 1;
    }
    let mut idx: Vec<usize> = (0..m.cols).collect();
    idx.sort_by_key(|&c| (count[c], c));
    idx
}

fn rank_generic<S: Scalar>(rows: usize, cols: Vec<Vec<(usize, S)>>, order: &[usize]) -> std::result::Result<usize, Overflow> {
    let mut red = Reducer::<S>::new(rows, false);
    let mut cols: Vec<Option<Vec<(usize, S)>>> = cols.into_iter().map(Some).collect();
    for &c in order {
        let col = cols[c].take().unwrap();
        red.insert(col, Vec::new())?;
    }
    Ok(red.pivots.len())
}

pub fn rank_mod_p(m: &SparseRationalMatrix, p: u64) -> usize {
    let ro = row_order(m);
    rank_generic(m.rows, modp_columns(m, p, &ro), &column_order(m)).expect("modular arithmetic does not overflow")
}

pub fn rank_exact(m: &SparseRationalMatrix) -> usize {
    let (ro, co) = (row_order(m), column_order(m));
    rank_generic(m.rows, int_columns::<i128>(m, &ro), &co)
        .unwrap_or_else(|_| rank_generic(m.rows, int_columns::<BigInt>(m, &ro), &co).expect("big integers do not overflow"))
}

pub fn rank(m: &SparseRationalMatrix) -> usize {
    rank_with(m, RankMode::Modular)
}

pub fn rank_with(m: &SparseRationalMatrix, mode: RankMode) -> usize {
    if m.is_zero() {
        return 0;
    }
    match mode {
        RankMode::Exact => rank_exact(m),
        RankMode::Modular => {
            let a = rank_mod_p(m, PRIMES[0]);
            let b = rank_mod_p(m, PRIMES[1]);
            if a == b {
                a
            } else {
                rank_exact(m)
            }
        }
    }
}

/// A graded complex with `d_k: C_k -> C_{k+1}` (differential of degree +1).
/// `diffs[i]` maps degree `lo + i` to `lo + i + 1`.
#[derive(Clone, Debug)]
pub struct ChainComplexWindow {
    pub lo: i64,
    pub dims: Vec<usize>,
    pub diffs: Vec<SparseRationalMatrix>,
    /// Whether the complex is known to vanish just below / just above the window.
    pub closed_below: bool,
    pub closed_above: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeHomology {
    pub degree: i64,
    pub dim: usize,
    pub rank_out: usize,
    pub rank_in: usize,
    pub homology: usize,
    /// Homology here is only a bound because the window was truncated.
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologySummary {
    pub degrees: Vec<DegreeHomology>,
}

impl ChainComplexWindow {
    pub fn hi(&self) -> i64 {
        self.lo + self.dims.len() as i64 - 1
    }

    pub fn dim(&self, k: i64) -> usize {
        if k < self.lo || k > self.hi() {
            0
        } else {
            self.dims[(k - self.lo) as usize]
        }
    }

    /// Differential leaving degree `k`, if inside the window.
    pub fn d(&self, k: i64) -> Option<&SparseRationalMatrix> {
        if k < self.lo || k >= self.hi() {
            None
        } else {
            self.diffs.get((k - self.lo) as usize)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.diffs.len() + 1 != self.dims.len() && !self.dims.is_empty() {
            return Err(Error::Invalid("window needs one differential per adjacent pair".into()));
        }
        for (i, d) in self.diffs.iter().enumerate() {
            if d.cols != self.dims[i] || d.rows != self.dims[i + 1] {
                return Err(Error::Invalid(format!("differential {i} has the wrong shape")));
            }
        }
        for i in 1..self.diffs.len() {
            if !self.diffs[i].mul(&self.diffs[i - 1])?.is_zero() {
                let k = self.lo + i as i64;
                return Err(Error::NotAComplex(k - 1, k + 1));
            }
        }
        Ok(())
    }

    /// Cochain side: transposed differentials, degrees negated.
    pub fn dual(&self) -> ChainComplexWindow {
        let mut dims = self.dims.clone();
        dims.reverse();
        let mut diffs: Vec<SparseRationalMatrix> = self.diffs.iter().map(|d| d.transpose()).collect();
        diffs.reverse();
        ChainComplexWindow {
            lo: -self.hi(),
            dims,
            diffs,
            closed_below: self.closed_above,
            closed_above: self.closed_below,
        }
    }
}

pub fn homology_dims(w: &ChainComplexWindow, mode: RankMode) -> Result<HomologySummary> {
    w.validate()?;
    let ranks: Vec<usize> = w.diffs.iter().map(|d| rank_with(d, mode)).collect();
    let mut degrees = Vec::new();
    for (i, &dim) in w.dims.iter().enumerate() {
        let rank_out = if i < ranks.len() { ranks[i] } else { 0 };
        let rank_in = if i > 0 { ranks[i - 1] } else { 0 };
        let truncated = (i == 0 && !w.closed_below) || (i + 1 == w.dims.len() && !w.closed_above);
        degrees.push(DegreeHomology {
            degree: w.lo + i as i64,
            dim,
            rank_out,
            rank_in,
            homology: dim - rank_out - rank_in,
            truncated,
        });
    }
    Ok(HomologySummary { degrees })
}

impl HomologySummary {
    pub fn at(&self, k: i64) -> Option<&DegreeHomology> {
        self.degrees.iter().find(|d| d.degree == k)
    }

    pub fn euler_chain(&self) -> i64 {
        self.degrees.iter().map(|d| sign(d.degree) * d.dim as i64).sum()
    }

    pub fn euler_homology(&self) -> i64 {
        self.degrees.iter().map(|d| sign(d.degree) * d.homology as i64).sum()
    }
}

fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Per-degree chain map `f_k: src_k -> dst_{k + shift}`.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub shift: i64,
    /// Indexed by source degree offset from `src.lo`.
    pub maps: Vec<SparseRationalMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiIsoRecord {
    pub degree: i64,
    pub dim_src: usize,
    pub dim_dst: usize,
    pub h_src: usize,
    pub h_dst: usize,
    /// Zero at truncated degrees, where it is not computed.
    pub induced_rank: usize,
    pub status: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiIsoReport {
    pub records: Vec<QuasiIsoRecord>,
    pub first_failure: Option<i64>,
    pub src_homology: HomologySummary,
    pub dst_homology: HomologySummary,
}

impl QuasiIsoReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Checks `f d_src = d_dst f` in every degree where both sides are defined.
pub fn check_chain_map(f: &ChainMap, src: &ChainComplexWindow, dst: &ChainComplexWindow) -> Result<()> {
    for (i, fk) in f.maps.iter().enumerate() {
        let k = src.lo + i as i64;
        let kd = k + f.shift;
        if fk.cols != src.dim(k) || fk.rows != dst.dim(kd) {
            return Err(Error::Invalid(format!("chain map at degree {k} has the wrong shape")));
        }
        let (Some(ds), Some(dd)) = (src.d(k), dst.d(kd)) else { continue };
        let Some(fnext) = f.maps.get(i + 1) else { continue };
        let lhs = fnext.mul(ds)?;
        let rhs = dd.mul(fk)?;
        let diff = lhs.sub(&rhs)?;
        if let Some(&(_, col, _)) = diff.entries().first() {
            return Err(Error::ChainMap { index: col, graph: format!("degree {k}") });
        }
    }
    Ok(())
}

/// Rank of the map induced on homology at source degree `k`: cycles of the
/// source pushed forward and reduced modulo target boundaries. `cols` turns a
/// matrix into sorted columns over `S`.
fn induced_rank_generic<S: Scalar>(
    f: &SparseRationalMatrix,
    d_src: Option<&SparseRationalMatrix>,
    src_dim: usize,
    b_dst: Option<&SparseRationalMatrix>,
    dst_dim: usize,
    one: S,
    cols: impl Fn(&SparseRationalMatrix, &[usize]) -> Vec<Vec<(usize, S)>>,
) -> std::result::Result<usize, Overflow> {
    // cycle basis of the source
    let cycles: Vec<Vec<(usize, S)>> = match d_src {
        None => (0..src_dim).map(|i| vec![(i, one.clone())]).collect(),
        Some(d) => {
            let ident: Vec<usize> = (0..d.rows).collect();
            let mut red = Reducer::<S>::new(d.rows, true);
            let mut kernel = Vec::new();
            for (j, col) in cols(d, &ident).into_iter().enumerate() {
                if let Some(hist) = red.insert(col, vec![(j, one.clone())])? {
                    kernel.push(hist);
                }
            }
            kernel
        }
    };
    let ident: Vec<usize> = (0..dst_dim).collect();
    let fcols = cols(f, &ident);
    let mut red = Reducer::<S>::new(dst_dim, false);
    if let Some(b) = b_dst {
        for col in cols(b, &ident) {
            red.insert(col, Vec::new())?;
        }
    }
    let base = red.pivots.len();
    for z in cycles {
        let mut image: Vec<(usize, S)> = Vec::new();
        for (j, c) in z {
            let minus_c = c.neg().ok_or(Overflow)?;
            image = axpy(&one, &image, &minus_c, &fcols[j]).ok_or(Overflow)?;
        }
        red.insert(image, Vec::new())?;
    }
    Ok(red.pivots.len() - base)
}

fn induced_rank_mod_p(f: &SparseRationalMatrix, d_src: Option<&SparseRationalMatrix>, src_dim: usize, b_dst: Option<&SparseRationalMatrix>, dst_dim: usize, p: u64) -> usize {
    induced_rank_generic(f, d_src, src_dim, b_dst, dst_dim, ModP { x: 1, p }, |m, ro| modp_columns(m, p, ro))
        .expect("modular arithmetic does not overflow")
}

/// Compares homology of `src` and `dst` degree by degree and the rank of the
/// induced map. Truncated degrees are reported but not judged.
pub fn verify_quasi_iso(f: &ChainMap, src: &ChainComplexWindow, dst: &ChainComplexWindow, mode: RankMode) -> Result<QuasiIsoReport> {
    check_chain_map(f, src, dst)?;
    let hs = homology_dims(src, mode)?;
    let hd = homology_dims(dst, mode)?;
    let mut records = Vec::new();
    let mut first_failure = None;
    for (i, fk) in f.maps.iter().enumerate() {
        let k = src.lo + i as i64;
        let kd = k + f.shift;
        let (Some(a), Some(b)) = (hs.at(k), hd.at(kd)) else { continue };
        let truncated = a.truncated || b.truncated;
        // nothing to map when either side has no homology, and nothing to
        // compare at a truncated end
        let skip = truncated || a.homology == 0 || b.homology == 0;
        let ranks: Vec<usize> = if skip {
            vec![0, 0]
        } else {
            PRIMES
                .iter()
                .map(|&p| induced_rank_mod_p(fk, src.d(k), src.dim(k), dst.d(kd - 1), dst.dim(kd), p))
                .collect()
        };
        let induced_rank = if skip {
            0
        } else if ranks[0] == ranks[1] && mode == RankMode::Modular {
            ranks[0]
        } else {
            induced_rank_exact(fk, src.d(k), src.dim(k), dst.d(kd - 1), dst.dim(kd))
        };
        let ok = a.homology == b.homology && induced_rank == a.homology;
        let status = if truncated {
            "boundary".to_string()
        } else if ok {
            "iso".to_string()
        } else {
            "mismatch".to_string()
        };
        if !truncated && !ok && first_failure.is_none() {
            first_failure = Some(k);
        }
        records.push(QuasiIsoRecord {
            degree: k,
            dim_src: a.dim,
            dim_dst: b.dim,
            h_src: a.homology,
            h_dst: b.homology,
            induced_rank,
            status,
        });
    }
    // target degrees the map does not reach must be acyclic
    for b in &hd.degrees {
        let k = b.degree - f.shift;
        let covered = k >= src.lo && ((k - src.lo) as usize) < f.maps.len();
        if covered {
            continue;
        }
        let status = if b.truncated {
            "boundary"
        } else if b.homology == 0 {
            "iso"
        } else {
            "mismatch"
        };
        if status == "mismatch" && first_failure.is_none() {
            first_failure = Some(k);
        }
        records.push(QuasiIsoRecord {
            degree: k,
            dim_src: src.dim(k),
            dim_dst: b.dim,
            h_src: 0,
            h_dst: b.homology,
            induced_rank: 0,
            status: status.to_string(),
        });
    }
    records.sort_by_key(|r| r.degree);
    Ok(QuasiIsoReport { records, first_failure, src_homology: hs, dst_homology: hd })
}

fn induced_rank_exact(f: &SparseRationalMatrix, d_src: Option<&SparseRationalMatrix>, src_dim: usize, b_dst: Option<&SparseRationalMatrix>, dst_dim: usize) -> usize {
    induced_rank_generic(f, d_src, src_dim, b_dst, dst_dim, 1i128, int_columns::<i128>).unwrap_or_else(|_| {
        induced_rank_generic(f, d_src, src_dim, b_dst, dst_dim, BigInt::one(), int_columns::<BigInt>)
            .expect("big integers do not overflow")
    })
}

/// Mapping cone of `f: src -> dst` (degree-preserving after shift), as a
/// window in the target grading: `cone_k = src_{k+1-shift} + dst_k`.
pub fn mapping_cone(f: &ChainMap, src: &ChainComplexWindow, dst: &ChainComplexWindow) -> Result<ChainComplexWindow> {
    let lo = dst.lo.min(src.lo + f.shift - 1);
    let hi = dst.hi().max(src.hi() + f.shift - 1);
    let fmap = |k: i64| -> Option<&SparseRationalMatrix> {
        if k < src.lo {
            None
        } else {
            f.maps.get((k - src.lo) as usize)
        }
    };
    let mut dims = Vec::new();
    let mut diffs = Vec::new();
    for k in lo..=hi {
        let ks = k + 1 - f.shift;
        dims.push(src.dim(ks) + dst.dim(k));
        if k == hi {
            break;
        }
        // (x, y) in src_{ks} + dst_k  ->  (-d x, f x + d y) in src_{ks+1} + dst_{k+1}
        let rows = [src.dim(ks + 1), dst.dim(k + 1)];
        let cols = [src.dim(ks), dst.dim(k)];
        let mut blocks = Vec::new();
        if let Some(d) = src.d(ks) {
            blocks.push((0, 0, d.neg()));
        }
        if let Some(fk) = fmap(ks) {
            if fk.rows == rows[1] && fk.cols == cols[0] && rows[1] > 0 && cols[0] > 0 {
                blocks.push((1, 0, fk.clone()));
            }
        }
        if let Some(d) = dst.d(k) {
            blocks.push((1, 1, d.clone()));
        }
        diffs.push(SparseRationalMatrix::from_blocks(&rows, &cols, &blocks)?);
    }
    Ok(ChainComplexWindow {
        lo,
        dims,
        diffs,
        closed_below: src.closed_below && dst.closed_below,
        closed_above: src.closed_above && dst.closed_above,
    })
}
