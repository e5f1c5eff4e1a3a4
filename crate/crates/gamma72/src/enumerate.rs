//! Short-vector and coset (CVP-style) enumeration.
//!
//! The kernel is Fincke-Pohst / Schnorr-Euchner style: a depth-first walk
//! over integer coordinates against a reduced basis, pruned with a
//! floating-point Gram-Schmidt profile whose radius is inflated by a fixed
//! relative epsilon, and every candidate leaf re-verified in exact integer
//! arithmetic. Pruning error can therefore only add work, never lose a
//! vector; no count is ever recorded from floating point.
//!
//! Conventions:
//! - `short_vectors` counts both `v` and `-v` (each stored representative
//!   has multiplicity 2); the zero vector is excluded.
//! - `coset_short_vectors(L, t, b)` enumerates `{v in t + L : (v,v) <= b}`
//!   and reports each vector by its lattice part `x = v - t` (integer
//!   coordinates in L's basis), with no sign folding.
//! - Reported norms are exact rationals; with an integral Gram they are
//!   integers.

use crate::error::{Error, Result};
use crate::lattice::{IntegerLattice, LatticeVector};
use crate::linalg::QMat;
use crate::reduce::{reduce_gram, Quality};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// Relative pruning-radius inflation; guards against float rounding in the
/// Gram-Schmidt profile. Exact verification makes over-inclusion harmless.
const RADIUS_EPS: f64 = 1e-9;
/// Absolute slack added to interval endpoints when converting to integers.
const RANGE_EPS: f64 = 1e-7;

#[derive(Clone, Debug, Default)]
pub struct EnumOptions {
    /// Maximum number of tree nodes to visit before giving up.
    pub budget: Option<u64>,
    /// Collect coordinate vectors (otherwise counts only).
    pub collect: bool,
    /// Stop early once this many vectors have been recorded.
    pub stop_after: Option<u64>,
    /// Split the enumeration root across the rayon worker pool.
    pub parallel: bool,
}

#[derive(Clone, Debug)]
pub struct ShortVectorReport {
    pub bound: BigRational,
    /// Exact census: norm -> number of vectors (v and -v both counted).
    pub count_by_norm: BTreeMap<BigRational, u64>,
    /// One representative per +-pair for origin enumerations; every vector
    /// for coset enumerations. Sorted lexicographically by reduced-basis
    /// coordinates.
    pub vectors: Option<Vec<LatticeVector>>,
    pub complete: bool,
    pub nodes: u64,
}

impl ShortVectorReport {
    pub fn total(&self) -> u64 {
        self.count_by_norm.values().sum()
    }

    pub fn count_at(&self, norm: &BigRational) -> u64 {
        self.count_by_norm.get(norm).copied().unwrap_or(0)
    }

    pub fn count_at_int(&self, norm: i64) -> u64 {
        self.count_at(&BigRational::from_integer(BigInt::from(norm)))
    }

    pub fn require_complete(self) -> Result<Self> {
        if self.complete {
            Ok(self)
        } else {
            Err(Error::BudgetExceeded { nodes: self.nodes })
        }
    }
}

/// A lattice preprocessed for repeated enumeration calls.
pub struct Prepared {
    pub n: usize,
    /// Scaled reduced Gram (denom * reduced gram), row-major.
    gram: Vec<i64>,
    /// Scale factor making the Gram integral.
    denom: i64,
    /// Float Gram-Schmidt data of the scaled Gram.
    mu: Vec<f64>,
    rd: Vec<f64>,
    /// Reduced basis rows in original coordinates and its inverse.
    u: Vec<i64>,
    uinv: Vec<i64>,
    pub reduced_gram: QMat,
    pub transform: crate::linalg::ZMat,
}

impl Prepared {
    pub fn new(l: &IntegerLattice, quality: Quality) -> Result<Self> {
        Self::from_gram(&l.gram, quality)
    }

    pub fn from_gram(gram: &QMat, quality: Quality) -> Result<Self> {
        let red = reduce_gram(gram, quality)?;
        let n = gram.rows;
        let to_i64 = |v: &BigInt, what: &str| -> Result<i64> {
            v.to_i64().ok_or_else(|| {
                Error::Precondition(format!("{what} exceeds i64 range for the fast kernel"))
            })
        };
        let mut g = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                g.push(to_i64(red.gram_int.at(i, j), "gram entry")?);
            }
        }
        let denom = to_i64(&red.denom, "gram denominator")?;
        let mut u = Vec::with_capacity(n * n);
        let uq = red.transform.to_q();
        let uinv_q = uq.inverse()?;
        let uinv_z = uinv_q.to_z()?;
        let mut uinv = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                u.push(to_i64(red.transform.at(i, j), "transform entry")?);
                uinv.push(to_i64(uinv_z.at(i, j), "inverse transform entry")?);
            }
        }
        // Float Gram-Schmidt of the scaled Gram.
        let mut mu = vec![0.0f64; n * n];
        let mut rd = vec![0.0f64; n];
        for i in 0..n {
            for j in 0..i {
                let mut v = g[i * n + j] as f64;
                for k in 0..j {
                    v -= mu[i * n + k] * mu[j * n + k] * rd[k];
                }
                mu[i * n + j] = v / rd[j];
            }
            let mut v = g[i * n + i] as f64;
            for k in 0..i {
                v -= mu[i * n + k] * mu[i * n + k] * rd[k];
            }
            if v <= 0.0 {
                return Err(Error::InvariantFailure(
                    "float Gram-Schmidt lost positive definiteness".into(),
                ));
            }
            rd[i] = v;
        }
        Ok(Prepared {
            n,
            gram: g,
            denom,
            mu,
            rd,
            u,
            uinv,
            reduced_gram: red.gram,
            transform: red.transform,
        })
    }

    /// First diagonal entry of the reduced Gram: a cheap upper bound for the
    /// minimum, attained by an actual basis vector.
    pub fn first_diag(&self) -> BigRational {
        BigRational::new(BigInt::from(self.gram[0]), BigInt::from(self.denom))
    }

    pub fn short_vectors(&self, bound: &BigRational, opts: &EnumOptions) -> Result<ShortVectorReport> {
        self.run(None, bound, opts, true)
    }

    /// `t` in original-basis coordinates (rationals).
    pub fn coset_short_vectors(
        &self,
        t: &[BigRational],
        bound: &BigRational,
        opts: &EnumOptions,
    ) -> Result<ShortVectorReport> {
        if t.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "coset target has {} coordinates, lattice rank is {}",
                t.len(),
                self.n
            )));
        }
        // Map to reduced coordinates: t_red = t * U^{-1}.
        let n = self.n;
        let mut sden = BigInt::one();
        for v in t {
            sden = num_integer::lcm(sden, v.denom().clone());
        }
        let sden_i = sden
            .to_i64()
            .ok_or_else(|| Error::Precondition("coset denominator exceeds i64".into()))?;
        let mut w = vec![0i128; n];
        for j in 0..n {
            let mut acc = BigInt::zero();
            for i in 0..n {
                let num = t[i].numer() * (&sden / t[i].denom());
                acc += num * BigInt::from(self.uinv[i * n + j]);
            }
            w[j] = acc
                .to_i128()
                .ok_or_else(|| Error::Precondition("coset target too large for kernel".into()))?;
        }
        let w64: Vec<i64> = w
            .iter()
            .map(|&v| i64::try_from(v))
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Precondition("coset target too large for kernel".into()))?;
        self.run(Some((w64, sden_i)), bound, opts, false)
    }

    /// Coset enumeration with an integer-scaled target `t = t_num / sden`
    /// (original basis coordinates); avoids rational arithmetic in batch
    /// callers. Equivalent to `coset_short_vectors` with the same target.
    pub fn coset_short_vectors_scaled(
        &self,
        t_num: &[i64],
        sden: i64,
        bound: &BigRational,
        opts: &EnumOptions,
    ) -> Result<ShortVectorReport> {
        if t_num.len() != self.n {
            return Err(Error::DimensionMismatch("coset target length".into()));
        }
        let n = self.n;
        let mut w = vec![0i64; n];
        for j in 0..n {
            let mut acc: i128 = 0;
            for i in 0..n {
                acc += (t_num[i] as i128) * (self.uinv[i * n + j] as i128);
            }
            w[j] = i64::try_from(acc)
                .map_err(|_| Error::Precondition("coset target overflows kernel".into()))?;
        }
        self.run(Some((w, sden)), bound, opts, false)
    }

    /// Exact minimum norm. Enumerates strictly below the first reduced
    /// diagonal; if nothing is there, that diagonal is the minimum.
    pub fn minimum(&self, opts: &EnumOptions) -> Result<BigRational> {
        let d1 = self.first_diag();
        if self.n == 0 {
            return Err(Error::Precondition("empty lattice has no minimum".into()));
        }
        // Strictly-below bound in scaled units: d1_scaled - 1.
        let below = BigRational::new(BigInt::from(self.gram[0] - 1), BigInt::from(self.denom));
        if below.is_negative() {
            return Ok(d1);
        }
        let rep = self.run(None, &below, opts, true)?.require_complete()?;
        match rep.count_by_norm.keys().next() {
            Some(min) => Ok(min.clone()),
            None => Ok(d1),
        }
    }

    /// Original-basis coordinates of a reduced-coordinate vector.
    fn to_original(&self, z: &[i64]) -> Vec<BigInt> {
        let n = self.n;
        let mut out = vec![BigInt::zero(); n];
        for i in 0..n {
            if z[i] == 0 {
                continue;
            }
            for j in 0..n {
                out[j] += BigInt::from(z[i]) * BigInt::from(self.u[i * n + j]);
            }
        }
        out
    }

    fn run(
        &self,
        shift: Option<(Vec<i64>, i64)>,
        bound: &BigRational,
        opts: &EnumOptions,
        fold_signs: bool,
    ) -> Result<ShortVectorReport> {
        let n = self.n;
        let (w, sden) = shift.unwrap_or((vec![0i64; n], 1));
        let origin_mode = fold_signs;
        // Exact acceptance threshold in scaled units: z G z^T <= floor(bound * denom * sden^2).
        let scaled = bound
            * BigRational::from_integer(BigInt::from(self.denom))
            * BigRational::from_integer(BigInt::from(sden) * BigInt::from(sden));
        if scaled.is_negative() {
            return Err(Error::Precondition("negative enumeration bound".into()));
        }
        let bmax = scaled.floor().to_integer();
        let bmax: i64 = bmax
            .to_i64()
            .ok_or_else(|| Error::Precondition("enumeration bound exceeds i64".into()))?;
        let budget = Arc::new(AtomicU64::new(opts.budget.unwrap_or(u64::MAX)));

        let mut state = SearchState::new(self, &w, sden, bmax, origin_mode, opts, budget.clone());
        let roots = state.root_candidates();
        let mut acc = if opts.parallel && n > 1 && roots.len() > 1 {
            use rayon::prelude::*;
            let results: Vec<Partial> = roots
                .par_iter()
                .map(|&m| {
                    let mut local =
                        SearchState::new(self, &w, sden, bmax, origin_mode, opts, budget.clone());
                    local.run_root(m);
                    local.into_partial()
                })
                .collect();
            let mut merged = Partial::default();
            for r in results {
                merged.merge(r);
            }
            merged
        } else {
            for m in roots {
                state.run_root(m);
                if state.aborted() {
                    break;
                }
            }
            state.into_partial()
        };

        // Deterministic vector order: lex on reduced coordinates.
        if let Some(v) = &mut acc.vectors {
            v.sort();
        }
        let scale = BigRational::from_integer(BigInt::from(self.denom))
            * BigRational::from_integer(BigInt::from(sden) * BigInt::from(sden));
        let mut count_by_norm = BTreeMap::new();
        for (k, c) in acc.counts {
            count_by_norm.insert(BigRational::from_integer(BigInt::from(k)) / scale.clone(), c);
        }
        let vectors = acc.vectors.map(|list| {
            list.into_iter()
                .map(|(z, norm)| {
                    // Lattice part x = (z - w)/sden in reduced coords, then to original.
                    let x: Vec<i64> =
                        (0..n).map(|i| (z[i] - w[i]) / sden).collect();
                    let coords = self.to_original(&x);
                    LatticeVector {
                        coords,
                        norm: BigRational::from_integer(BigInt::from(norm)) / scale.clone(),
                    }
                })
                .collect()
        });
        Ok(ShortVectorReport {
            bound: bound.clone(),
            count_by_norm,
            vectors,
            complete: !acc.incomplete,
            nodes: acc.nodes,
        })
    }
}

#[derive(Default)]
struct Partial {
    counts: BTreeMap<i64, u64>,
    vectors: Option<Vec<(Vec<i64>, i64)>>,
    nodes: u64,
    incomplete: bool,
}

impl Partial {
    fn merge(&mut self, other: Partial) {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_insert(0) += v;
        }
        match (&mut self.vectors, other.vectors) {
            (Some(a), Some(b)) => a.extend(b),
            (a @ None, Some(b)) => *a = Some(b),
            _ => {}
        }
        self.nodes += other.nodes;
        self.incomplete |= other.incomplete;
    }
}

struct SearchState<'a> {
    p: &'a Prepared,
    n: usize,
    w: Vec<i64>,
    sden: i64,
    sden_f: f64,
    bmax: i64,
    bound_f: f64,
    origin_mode: bool,
    collect: bool,
    stop_after: u64,
    budget: Arc<AtomicU64>,
    // Per-level state.
    z: Vec<i64>,
    sigma: Vec<f64>,  // (n+1) x n: sigma[i][k] = sum_{j >= i} mu[j][k] y_j
    texact: Vec<i128>, // (n+1) x n: texact[i][k] = sum_{j >= i} G[k][j] z_j
    pf: Vec<f64>,     // float partial norms, length n+1
    pex: Vec<i128>,   // exact partial norms, length n+1
    counts: BTreeMap<i64, u64>,
    vectors: Option<Vec<(Vec<i64>, i64)>>,
    recorded: u64,
    nodes: u64,
    incomplete: bool,
    stopped: bool,
}

impl<'a> SearchState<'a> {
    fn new(
        p: &'a Prepared,
        w: &[i64],
        sden: i64,
        bmax: i64,
        origin_mode: bool,
        opts: &EnumOptions,
        budget: Arc<AtomicU64>,
    ) -> Self {
        let n = p.n;
        SearchState {
            p,
            n,
            w: w.to_vec(),
            sden,
            sden_f: sden as f64,
            bmax,
            // float partials live in y = z/sden units; the exact threshold
            // bmax is in z units, so rescale for pruning
            bound_f: (bmax as f64) / ((sden * sden) as f64) * (1.0 + RADIUS_EPS) + 1e-6,
            origin_mode,
            collect: opts.collect,
            stop_after: opts.stop_after.unwrap_or(u64::MAX),
            budget,
            z: vec![0; n],
            sigma: vec![0.0; (n + 1) * n],
            texact: vec![0; (n + 1) * n],
            pf: vec![0.0; n + 1],
            pex: vec![0; n + 1],
            counts: BTreeMap::new(),
            vectors: if opts.collect { Some(Vec::new()) } else { None },
            recorded: 0,
            nodes: 0,
            incomplete: false,
            stopped: false,
        }
    }

    fn aborted(&self) -> bool {
        self.incomplete || self.stopped
    }

    /// Candidate values of the top-level coordinate z_{n-1} (as the integer
    /// stepping parameter m with z = w + sden * m).
    fn root_candidates(&self) -> Vec<i64> {
        let k = self.n - 1;
        let (lo, hi) = self.level_range(k, 0.0, 0.0);
        let mut v: Vec<i64> = (lo..=hi).collect();
        if self.origin_mode {
            v.retain(|&m| m >= 0);
        }
        v
    }

    fn run_root(&mut self, m: i64) {
        let k = self.n - 1;
        self.enter(k, m, self.origin_mode);
    }

    /// Interval of m with (y_k + S_k)^2 rd_k <= remaining, where
    /// y_k = w_k/sden + m.
    fn level_range(&self, k: usize, s_k: f64, pf_above: f64) -> (i64, i64) {
        let rem = self.bound_f - pf_above;
        if rem < 0.0 {
            return (1, 0);
        }
        let hw = (rem / self.p.rd[k]).sqrt();
        let w0 = self.w[k] as f64 / self.sden_f;
        let center = -s_k - w0;
        let lo = (center - hw - RANGE_EPS).ceil() as i64;
        let hi = (center + hw + RANGE_EPS).floor() as i64;
        (lo, hi)
    }

    /// Fix z_k from stepping parameter m, update rows, recurse or record.
    fn enter(&mut self, k: usize, m: i64, spine: bool) {
        if self.aborted() {
            return;
        }
        if self.budget.fetch_sub(1, Ordering::Relaxed) == 0 {
            self.budget.store(0, Ordering::Relaxed);
            self.incomplete = true;
            return;
        }
        self.nodes += 1;
        let n = self.n;
        let zk = self.w[k] + self.sden * m;
        let yk = zk as f64 / self.sden_f;
        let s_k = self.sigma[(k + 1) * n + k];
        let dv = yk + s_k;
        let newpf = self.pf[k + 1] + self.p.rd[k] * dv * dv;
        if newpf > self.bound_f {
            return;
        }
        self.z[k] = zk;
        // Exact partial norm using T_k = sum_{j>k} G[k][j] z_j.
        let tk = self.texact[(k + 1) * n + k];
        let g_kk = self.p.gram[k * n + k] as i128;
        let zk_i = zk as i128;
        let pex_new = self.pex[k + 1] + zk_i * (g_kk * zk_i + 2 * tk);
        if k == 0 {
            if pex_new <= self.bmax as i128 {
                if self.origin_mode && spine && zk == 0 {
                    return; // zero vector excluded in origin mode
                }
                let norm = i64::try_from(pex_new).expect("partial norm fits i64");
                let mult = if self.origin_mode { 2 } else { 1 };
                *self.counts.entry(norm).or_insert(0) += mult;
                self.recorded += mult;
                if let Some(vs) = &mut self.vectors {
                    vs.push((self.z.clone(), norm));
                }
                if self.recorded >= self.stop_after {
                    self.stopped = true;
                }
            }
            return;
        }
        self.pf[k] = newpf;
        self.pex[k] = pex_new;
        // Row updates for levels below k.
        for j in 0..k {
            self.sigma[k * n + j] =
                self.sigma[(k + 1) * n + j] + self.p.mu[k * n + j] * yk;
            self.texact[k * n + j] =
                self.texact[(k + 1) * n + j] + (self.p.gram[k * n + j] as i128) * zk_i;
        }
        let child_spine = spine && zk == 0;
        let (lo, hi) = self.level_range(k - 1, self.sigma[k * n + (k - 1)], newpf);
        let lo = if child_spine && self.origin_mode { lo.max(0) } else { lo };
        for m2 in lo..=hi {
            self.enter(k - 1, m2, child_spine);
            if self.aborted() {
                return;
            }
        }
    }

    fn into_partial(self) -> Partial {
        Partial {
            counts: self.counts,
            vectors: self.vectors,
            nodes: self.nodes,
            incomplete: self.incomplete || self.stopped,
        }
    }
}

/// Norm census of one coset, in scaled integer units (norm appears as
/// `denom * sden^2` times the rational value).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CosetCount {
    pub counts: Vec<(i64, u64)>,
    pub complete: bool,
}

/// Buffer-reusing counter for large batches of coset queries against one
/// prepared lattice; counts only, no vector collection. Used by the census
/// inner loop (millions of calls). Must stay bit-identical to
/// `coset_short_vectors`; a cross-check test enforces that.
pub struct CosetCounter<'a> {
    p: &'a Prepared,
    sden: i64,
    bmax: i64,
    bound_f: f64,
    budget_per_call: u64,
    z: Vec<i64>,
    w: Vec<i64>,
    sigma: Vec<f64>,
    texact: Vec<i128>,
    pf: Vec<f64>,
    pex: Vec<i128>,
    counts: Vec<(i64, u64)>,
    nodes_left: u64,
    incomplete: bool,
}

impl Prepared {
    /// A counter for cosets `t = num/sden` at the given bound.
    pub fn coset_counter(&self, sden: i64, bound: &BigRational) -> Result<CosetCounter<'_>> {
        let scaled = bound
            * BigRational::from_integer(BigInt::from(self.denom))
            * BigRational::from_integer(BigInt::from(sden) * BigInt::from(sden));
        let bmax = scaled
            .floor()
            .to_integer()
            .to_i64()
            .ok_or_else(|| Error::Precondition("bound exceeds i64".into()))?;
        let n = self.n;
        Ok(CosetCounter {
            p: self,
            sden,
            bmax,
            bound_f: (bmax as f64) / ((sden * sden) as f64) * (1.0 + RADIUS_EPS) + 1e-6,
            budget_per_call: u64::MAX,
            z: vec![0; n],
            w: vec![0; n],
            sigma: vec![0.0; (n + 1) * n],
            texact: vec![0; (n + 1) * n],
            pf: vec![0.0; n + 1],
            pex: vec![0; n + 1],
            counts: Vec::new(),
            nodes_left: u64::MAX,
            incomplete: false,
        })
    }
}

impl CosetCounter<'_> {
    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget_per_call = budget;
        self
    }

    /// Exact norm census of `{v in t + L : (v,v) <= bound}` with
    /// `t = t_num / sden` in original basis coordinates.
    pub fn count(&mut self, t_num: &[i64]) -> Result<CosetCount> {
        let n = self.p.n;
        assert_eq!(t_num.len(), n);
        // t_red = t * U^{-1}, scaled by sden.
        for j in 0..n {
            let mut acc: i128 = 0;
            for i in 0..n {
                acc += (t_num[i] as i128) * (self.p.uinv[i * n + j] as i128);
            }
            self.w[j] = i64::try_from(acc)
                .map_err(|_| Error::Precondition("coset target overflows kernel".into()))?;
        }
        for v in self.sigma.iter_mut() {
            *v = 0.0;
        }
        for v in self.texact.iter_mut() {
            *v = 0;
        }
        self.pf[n] = 0.0;
        self.pex[n] = 0;
        self.counts.clear();
        self.nodes_left = self.budget_per_call;
        self.incomplete = false;
        let k = n - 1;
        let (lo, hi) = self.range(k, 0.0, 0.0);
        for m in lo..=hi {
            self.descend(k, m);
            if self.incomplete {
                break;
            }
        }
        self.counts.sort_unstable();
        Ok(CosetCount { counts: self.counts.clone(), complete: !self.incomplete })
    }

    fn range(&self, k: usize, s_k: f64, pf_above: f64) -> (i64, i64) {
        let rem = self.bound_f - pf_above;
        if rem < 0.0 {
            return (1, 0);
        }
        let hw = (rem / self.p.rd[k]).sqrt();
        let center = -s_k - self.w[k] as f64 / self.sden as f64;
        (((center - hw - RANGE_EPS).ceil()) as i64, ((center + hw + RANGE_EPS).floor()) as i64)
    }

    fn descend(&mut self, k: usize, m: i64) {
        if self.nodes_left == 0 {
            self.incomplete = true;
            return;
        }
        self.nodes_left -= 1;
        let n = self.p.n;
        let zk = self.w[k] + self.sden * m;
        let yk = zk as f64 / self.sden as f64;
        let s_k = self.sigma[(k + 1) * n + k];
        let dv = yk + s_k;
        let newpf = self.pf[k + 1] + self.p.rd[k] * dv * dv;
        if newpf > self.bound_f {
            return;
        }
        self.z[k] = zk;
        let tk = self.texact[(k + 1) * n + k];
        let zk_i = zk as i128;
        let pex_new = self.pex[k + 1] + zk_i * ((self.p.gram[k * n + k] as i128) * zk_i + 2 * tk);
        if k == 0 {
            if pex_new <= self.bmax as i128 {
                let norm = pex_new as i64;
                match self.counts.iter_mut().find(|(nn, _)| *nn == norm) {
                    Some((_, c)) => *c += 1,
                    None => self.counts.push((norm, 1)),
                }
            }
            return;
        }
        self.pf[k] = newpf;
        self.pex[k] = pex_new;
        for j in 0..k {
            self.sigma[k * n + j] = self.sigma[(k + 1) * n + j] + self.p.mu[k * n + j] * yk;
            self.texact[k * n + j] =
                self.texact[(k + 1) * n + j] + (self.p.gram[k * n + j] as i128) * zk_i;
        }
        let (lo, hi) = self.range(k - 1, self.sigma[k * n + (k - 1)], newpf);
        for m2 in lo..=hi {
            self.descend(k - 1, m2);
            if self.incomplete {
                return;
            }
        }
    }
}

/// Enumerate `{v != 0 : (v,v) <= bound}` of a lattice (fresh preprocessing;
/// use [`Prepared`] directly for repeated calls).
pub fn short_vectors(
    l: &IntegerLattice,
    bound: &BigRational,
    opts: &EnumOptions,
) -> Result<ShortVectorReport> {
    Prepared::new(l, Quality::Lll)?.short_vectors(bound, opts)
}

pub fn coset_short_vectors(
    l: &IntegerLattice,
    t: &[BigRational],
    bound: &BigRational,
    opts: &EnumOptions,
) -> Result<ShortVectorReport> {
    Prepared::new(l, Quality::Lll)?.coset_short_vectors(t, bound, opts)
}

pub fn minimum(l: &IntegerLattice) -> Result<BigRational> {
    Prepared::new(l, Quality::Lll)?.minimum(&EnumOptions::default())
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::zvec;

    fn lat(rows: &[Vec<i64>]) -> IntegerLattice {
        IntegerLattice::from_integer_gram(rows, "t").unwrap()
    }

    #[test]
    fn z_lattice_counts() {
        let l = lat(&[vec![1]]);
        let rep = short_vectors(&l, &rat(4), &EnumOptions::default()).unwrap();
        assert!(rep.complete);
        assert_eq!(rep.count_at_int(1), 2);
        assert_eq!(rep.count_at_int(4), 2);
        assert_eq!(rep.total(), 4); // +-1 and +-2
    }

    #[test]
    fn a2_root_counts() {
        let l = lat(&[vec![2, 1], vec![1, 2]]);
        let rep = short_vectors(&l, &rat(2), &EnumOptions::default()).unwrap();
        assert_eq!(rep.count_at_int(2), 6); // hexagonal lattice has 6 roots
        assert_eq!(minimum(&l).unwrap(), rat(2));
    }

    #[test]
    fn coset_with_integral_target_includes_zero() {
        let l = lat(&[vec![2, 1], vec![1, 2]]);
        let t = vec![rat(1), rat(0)];
        let rep = coset_short_vectors(&l, &t, &rat(2), &EnumOptions::default()).unwrap();
        // translate of the lattice itself: same count as short_vectors plus zero
        assert_eq!(rep.count_at_int(0), 1);
        assert_eq!(rep.count_at_int(2), 6);
    }

    #[test]
    fn coset_half_integer_shift() {
        // Z^2, coset (1/2, 1/2) + Z^2 at bound 1/2: the four half-points.
        let l = lat(&[vec![1, 0], vec![0, 1]]);
        let t = vec![BigRational::new(BigInt::one(), BigInt::from(2)); 2];
        let rep = coset_short_vectors(&l, &t, &BigRational::new(BigInt::one(), BigInt::from(2)),
            &EnumOptions { collect: true, ..Default::default() }).unwrap();
        assert_eq!(rep.total(), 4);
        let key = BigRational::new(BigInt::one(), BigInt::from(2));
        assert_eq!(rep.count_at(&key), 4);
        // lattice parts are in {0,-1}^2
        for v in rep.vectors.unwrap() {
            assert!(v.coords.iter().all(|c| c == &BigInt::zero() || c == &BigInt::from(-1)));
        }
    }

    #[test]
    fn coset_negated_target_counts_match() {
        let l = lat(&[vec![2, 1], vec![1, 4]]);
        let t = vec![BigRational::new(BigInt::from(1), BigInt::from(2)), rat(3)];
        let tneg: Vec<BigRational> = t.iter().map(|v| -v.clone()).collect();
        let a = coset_short_vectors(&l, &t, &rat(9), &EnumOptions::default()).unwrap();
        let b = coset_short_vectors(&l, &tneg, &rat(9), &EnumOptions::default()).unwrap();
        assert_eq!(a.count_by_norm, b.count_by_norm);
    }

    #[test]
    fn budget_exhaustion_reports_incomplete() {
        let l = lat(&[vec![1, 0], vec![0, 1]]);
        let rep = l_short(&l, 10_000, Some(3));
        assert!(!rep.complete);
        assert!(rep.nodes <= 4);
    }

    fn l_short(l: &IntegerLattice, bound: i64, budget: Option<u64>) -> ShortVectorReport {
        short_vectors(l, &rat(bound), &EnumOptions { budget, ..Default::default() }).unwrap()
    }

    /// Brute-force oracle over a coordinate box; independent of the kernel.
    fn brute_counts(
        gram: &[Vec<i64>],
        t: Option<&[BigRational]>,
        bound: &BigRational,
        box_radius: i64,
    ) -> BTreeMap<BigRational, u64> {
        let n = gram.len();
        let mut out = BTreeMap::new();
        let mut x = vec![-box_radius; n];
        loop {
            // norm of x + t
            let coords: Vec<BigRational> = (0..n)
                .map(|i| {
                    let mut c = BigRational::from_integer(BigInt::from(x[i]));
                    if let Some(t) = t {
                        c += &t[i];
                    }
                    c
                })
                .collect();
            let mut norm = BigRational::zero();
            for i in 0..n {
                for j in 0..n {
                    norm += &coords[i] * &coords[j]
                        * BigRational::from_integer(BigInt::from(gram[i][j]));
                }
            }
            let nonzero = coords.iter().any(|c| !c.is_zero());
            if &norm <= bound && (t.is_some() || nonzero) {
                *out.entry(norm).or_insert(0) += 1;
            }
            // increment odometer
            let mut i = 0;
            loop {
                if i == n {
                    return out;
                }
                x[i] += 1;
                if x[i] <= box_radius {
                    break;
                }
                x[i] = -box_radius;
                i += 1;
            }
        }
    }

    #[test]
    fn kernel_matches_bruteforce_on_small_lattices() {
        let cases: Vec<Vec<Vec<i64>>> = vec![
            vec![vec![2, 1], vec![1, 2]],
            vec![vec![3, 1, 0], vec![1, 4, 1], vec![0, 1, 5]],
            vec![vec![4, 1, 1], vec![1, 6, 2], vec![1, 2, 8]],
        ];
        for g in &cases {
            let l = lat(g);
            let bound = rat(12);
            let rep = short_vectors(&l, &bound, &EnumOptions::default()).unwrap();
            let oracle = brute_counts(g, None, &bound, 8);
            assert_eq!(rep.count_by_norm, oracle, "gram {:?}", g);
        }
    }

    #[test]
    fn coset_kernel_matches_bruteforce() {
        let g = vec![vec![3, 1, 0], vec![1, 4, 1], vec![0, 1, 5]];
        let l = lat(&g);
        let t = vec![
            BigRational::new(BigInt::from(1), BigInt::from(2)),
            BigRational::new(BigInt::from(-1), BigInt::from(3)),
            rat(1),
        ];
        let bound = rat(11);
        let rep = coset_short_vectors(&l, &t, &bound, &EnumOptions::default()).unwrap();
        let oracle = brute_counts(&g, Some(&t), &bound, 8);
        assert_eq!(rep.count_by_norm, oracle);
    }

    #[test]
    fn collected_vectors_verify_exactly() {
        let l = lat(&[vec![2, 1], vec![1, 4]]);
        let rep = short_vectors(&l, &rat(16), &EnumOptions { collect: true, ..Default::default() })
            .unwrap();
        let vs = rep.vectors.unwrap();
        for v in &vs {
            assert_eq!(l.norm_of(&v.coords), v.norm);
        }
        // representatives only: count is twice the number of stored vectors
        assert_eq!(rep.count_by_norm.values().sum::<u64>(), 2 * vs.len() as u64);
    }

    #[test]
    fn parallel_run_agrees_with_sequential() {
        let g = vec![vec![4, 1, 1, 0], vec![1, 6, 2, 1], vec![1, 2, 8, 1], vec![0, 1, 1, 9]];
        let l = lat(&g);
        let seq = short_vectors(&l, &rat(30), &EnumOptions::default()).unwrap();
        let par = short_vectors(&l, &rat(30), &EnumOptions { parallel: true, ..Default::default() })
            .unwrap();
        assert_eq!(seq.count_by_norm, par.count_by_norm);
    }

    #[test]
    fn minimum_of_sparse_basis() {
        // basis whose first vector is far from minimal
        let g = vec![vec![101, 70, 30], vec![70, 52, 21], vec![30, 21, 14]];
        let l = lat(&g);
        let m = minimum(&l).unwrap();
        let oracle = brute_counts(&g, None, &rat(101), 12);
        let brute_min = oracle.keys().next().unwrap().clone();
        assert_eq!(m, brute_min);
    }

    #[test]
    fn zero_coset_matches_origin_plus_zero() {
        let l = lat(&[vec![2, 1], vec![1, 2]]);
        let zero = vec![rat(0), rat(0)];
        let a = coset_short_vectors(&l, &zero, &rat(6), &EnumOptions::default()).unwrap();
        let b = short_vectors(&l, &rat(6), &EnumOptions::default()).unwrap();
        assert_eq!(a.count_at_int(0), 1);
        for (k, v) in &b.count_by_norm {
            assert_eq!(a.count_at(k), *v);
        }
    }

    #[test]
    fn coset_counter_matches_generic_kernel_on_1000_samples() {
        use rand::{Rng, SeedableRng};
        let g = vec![vec![4, 1, 1, 0], vec![1, 6, 2, 1], vec![1, 2, 8, 1], vec![0, 1, 1, 9]];
        let l = lat(&g);
        let prep = Prepared::new(&l, crate::reduce::Quality::Lll).unwrap();
        let bound = rat(9);
        let mut counter = prep.coset_counter(2, &bound).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..1000 {
            let num: Vec<i64> = (0..4).map(|_| rng.gen_range(-7..=7)).collect();
            let fast = counter.count(&num).unwrap();
            let t: Vec<BigRational> = num
                .iter()
                .map(|&x| BigRational::new(BigInt::from(x), BigInt::from(2)))
                .collect();
            let slow = prep.coset_short_vectors(&t, &bound, &EnumOptions::default()).unwrap();
            assert!(fast.complete && slow.complete);
            // identical censuses, bit for bit (fast counts are scaled by denom*sden^2)
            let scale = rat(4); // denom 1, sden 2
            let fast_map: BTreeMap<BigRational, u64> = fast
                .counts
                .iter()
                .map(|&(n, c)| (BigRational::from_integer(BigInt::from(n)) / scale.clone(), c))
                .collect();
            assert_eq!(fast_map, slow.count_by_norm, "target {num:?}");
        }
    }

    #[test]
    fn vector_of_lattice_vector_struct_is_exact() {
        let l = lat(&[vec![2, 1], vec![1, 2]]);
        let v = l.vector(zvec(&[2, -1]));
        assert_eq!(v.norm, rat(6));
    }
}
