//! Certification of candidate almost-inner derivations.
//!
//! For `z ∈ F^n` let `M(z)` be the matrix of `x -> [b_z, x]` and `v_d(z)` the
//! coordinates of `d(b_z)`. A derivation `d` is almost inner iff
//! `rank M(z) = rank [M(z) | v_d(z)]` for every `z`. Certification proceeds
//! by an exhaustive scan over finite fields, or by radical membership of the
//! minors of `[M | v_d]` in the minors ideals of `M` otherwise.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::derivations::{try_compute_spaces, refine_candidates, refine_from, restrict_to_inner_at, DerivationSpaces, ProbeLog, ProbePlan};
use crate::error::{Error, Result};
use crate::liealg::StructureTable;
use crate::linalg::{Matrix, Subspace, Vector};
use crate::polyideal::{minors, minors_indexed, Poly, PolyIdeal, PolyMatrix, PolyRing};
use crate::scalars::Field;

/// `M(z)` and one column `v_d(z)` per candidate, with identically zero rows
/// and columns removed.
#[derive(Debug, Clone)]
pub struct SymbolicSystem<F: Field> {
    ring: PolyRing<F>,
    m: PolyMatrix<F>,
    vcols: Vec<Vec<Poly<F>>>,
    kept_rows: Vec<usize>,
    kept_cols: Vec<usize>,
    candidates: Vec<Vector<F>>,
    // coeffs[i]: coefficient of z_i in [M | v_1 | ... | v_K], trimmed
    coeffs: Vec<Matrix<F>>,
}

impl<F: Field> SymbolicSystem<F> {
    pub fn ring(&self) -> &PolyRing<F> {
        &self.ring
    }
    pub fn m(&self) -> &PolyMatrix<F> {
        &self.m
    }
    pub fn v(&self, c: usize) -> &[Poly<F>] {
        &self.vcols[c]
    }
    pub fn kept_rows(&self) -> &[usize] {
        &self.kept_rows
    }
    pub fn kept_cols(&self) -> &[usize] {
        &self.kept_cols
    }
    pub fn candidates(&self) -> &[Vector<F>] {
        &self.candidates
    }
    pub fn num_candidates(&self) -> usize {
        self.candidates.len()
    }
    pub fn nvars(&self) -> usize {
        self.ring.nvars()
    }
    /// Larger side of the augmented matrix `[M | v]`.
    pub fn size(&self) -> usize {
        self.kept_rows.len().max(self.kept_cols.len() + 1)
    }

    /// `[M(z) | v_1(z) | ... | v_K(z)]` with trimmed rows and columns.
    pub fn eval_augmented(&self, z: &[F::Elem]) -> Result<Matrix<F>> {
        if z.len() != self.nvars() {
            return Err(Error::Dimension(format!("point has {} coordinates, expected {}", z.len(), self.nvars())));
        }
        let f = self.ring.field();
        let (rows, cols) = (self.kept_rows.len(), self.kept_cols.len() + self.candidates.len());
        let mut out = Matrix::zeros(f, rows, cols);
        for (zi, a) in z.iter().zip(&self.coeffs) {
            if f.is_zero(zi) {
                continue;
            }
            for r in 0..rows {
                for c in 0..cols {
                    let x = a.get(r, c);
                    if !f.is_zero(x) {
                        let cur = f.add(out.get(r, c), &f.mul(zi, x));
                        out.set(r, c, cur);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `(rank M(z), rank [M(z) | v_c(z)])`.
    pub fn ranks_at(&self, c: usize, z: &[F::Elem]) -> Result<(usize, usize)> {
        let w = self.eval_augmented(z)?;
        let ncols = self.kept_cols.len();
        let rows: Vec<Vector<F>> = w.row_vecs().into_iter().map(|r| r[..ncols].to_vec()).collect();
        let aug: Vec<Vector<F>> = w.row_vecs().into_iter().map(|r| {
            let mut x = r[..ncols].to_vec();
            x.push(r[ncols + c].clone());
            x
        }).collect();
        let f = self.ring.field();
        Ok((Matrix::from_rows(f, ncols, rows)?.rank(), Matrix::from_rows(f, ncols + 1, aug)?.rank()))
    }
}

/// Builds `M(z)` with `m[k][j] = sum_i z_i sigma_ij^k` and `v_d(z)_k = sum_j z_j d[j, k]`.
pub fn build_symbolic<F: Field>(t: &StructureTable<F>, candidates: &[Vector<F>]) -> Result<SymbolicSystem<F>> {
    let (f, n) = (t.field(), t.dim());
    if let Some(bad) = candidates.iter().find(|d| d.len() != n * n) {
        return Err(Error::Dimension(format!("candidate has {} entries, expected {}", bad.len(), n * n)));
    }
    let m_nonzero = |k: usize, j: usize| (0..n).any(|i| !f.is_zero(t.sigma0(i, j, k)));
    let v_nonzero = |k: usize| candidates.iter().any(|d| (0..n).any(|j| !f.is_zero(&d[j * n + k])));
    let kept_rows: Vec<usize> = (0..n).filter(|&k| (0..n).any(|j| m_nonzero(k, j)) || v_nonzero(k)).collect();
    let kept_cols: Vec<usize> = (0..n).filter(|&j| (0..n).any(|k| m_nonzero(k, j))).collect();
    let ring = PolyRing::with_prefix(f, "z", n);

    let width = kept_cols.len() + candidates.len();
    let mut coeffs = vec![Matrix::zeros(f, kept_rows.len(), width); n];
    for (i, a) in coeffs.iter_mut().enumerate() {
        for (r, &k) in kept_rows.iter().enumerate() {
            for (c, &j) in kept_cols.iter().enumerate() {
                a.set(r, c, t.sigma0(i, j, k).clone());
            }
            for (c, d) in candidates.iter().enumerate() {
                a.set(r, kept_cols.len() + c, d[i * n + k].clone());
            }
        }
    }
    let linear = |r: usize, c: usize| {
        let col: Vec<F::Elem> = coeffs.iter().map(|a| a.get(r, c).clone()).collect();
        ring.linear_form(&col)
    };
    let mut m = PolyMatrix::zeros(kept_rows.len(), kept_cols.len());
    for r in 0..kept_rows.len() {
        for c in 0..kept_cols.len() {
            m.set(r, c, linear(r, c));
        }
    }
    let vcols = (0..candidates.len())
        .map(|c| (0..kept_rows.len()).map(|r| linear(r, kept_cols.len() + c)).collect())
        .collect();
    Ok(SymbolicSystem { ring, m, vcols, kept_rows, kept_cols, candidates: candidates.to_vec(), coeffs })
}

/// Whether `M(z) x = v_c(z)` is solvable.
pub fn rank_check_at<F: Field>(sys: &SymbolicSystem<F>, c: usize, z: &[F::Elem]) -> Result<bool> {
    let (a, b) = sys.ranks_at(c, z)?;
    Ok(a == b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Minors,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Containment {
    pub r: usize,
    pub minors_tested: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    CertifiedAid {
        method: Method,
        #[serde(skip_serializing_if = "Vec::is_empty", default)]
        containments: Vec<Containment>,
    },
    Refuted {
        method: Method,
        witness: Vec<String>,
        rank_m: usize,
        rank_augmented: usize,
        #[serde(skip_serializing_if = "Vec::is_empty", default)]
        containments: Vec<Containment>,
        r1_failure: bool,
    },
    Inconclusive {
        reason: String,
        #[serde(skip_serializing_if = "Vec::is_empty", default)]
        containments: Vec<Containment>,
        failing_minor: Option<String>,
        groebner_basis: Vec<String>,
        points_tried: u64,
        r1_failure: bool,
    },
}

impl Verdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::CertifiedAid { .. })
    }
    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }
    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Verdict::Inconclusive { .. })
    }
}

/// Outcome of the minors test for one candidate.
#[derive(Debug, Clone)]
pub struct MinorsOutcome<F: Field> {
    pub containments: Vec<Containment>,
    /// First minor of `[M | v]` outside the radical, with its size.
    pub failure: Option<(usize, Poly<F>)>,
}

/// The ideals `I_r` generated by the `r x r` minors of `M`, for `r` in
/// `1..=min(rows, cols + 1)`; sizes beyond `M` give the zero ideal.
pub fn minors_ideals<F: Field>(sys: &SymbolicSystem<F>) -> Result<Vec<PolyIdeal<F>>> {
    let (rows, cols) = (sys.kept_rows.len(), sys.kept_cols.len());
    let top = rows.min(cols + 1);
    (1..=top)
        .map(|r| {
            let gens = if r <= rows.min(cols) { minors(&sys.ring, &sys.m, r)? } else { Vec::new() };
            Ok(PolyIdeal::new(&sys.ring, gens))
        })
        .collect()
}

/// Tests `w ∈ √I_r` for every `r x r` minor `w` of `[M | v_c]` that involves
/// the `v_c` column, for every `r ≥ 1`; stops at the first failure.
pub fn certify_minors<F: Field>(sys: &SymbolicSystem<F>, c: usize, ideals: &[PolyIdeal<F>]) -> Result<MinorsOutcome<F>> {
    let aug = sys.m.augment_column(&sys.vcols[c])?;
    let vcol = sys.kept_cols.len();
    let mut containments = Vec::new();
    for (idx, ideal) in ideals.iter().enumerate() {
        let r = idx + 1;
        let mut tested = 0;
        for (_, cols, w) in minors_indexed(&sys.ring, &aug, r)? {
            if !cols.contains(&vcol) || w.is_zero() {
                continue;
            }
            tested += 1;
            if !ideal.radical_contains(&w) {
                containments.push(Containment { r, minors_tested: tested, holds: false });
                return Ok(MinorsOutcome { containments, failure: Some((r, w)) });
            }
        }
        containments.push(Containment { r, minors_tested: tested, holds: true });
    }
    Ok(MinorsOutcome { containments, failure: None })
}

/// Outcome of a witness search.
#[derive(Debug, Clone)]
pub struct WitnessSearch<F: Field> {
    pub witness: Option<Vector<F>>,
    pub points_tried: u64,
    /// Reduced Groebner basis of `<K_r, w*y - 1>` in `z_1..z_n, y`, rendered.
    pub groebner_basis: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessConfig {
    pub height: u64,
    pub budget: u64,
    pub scan_budget: u64,
    pub seed: u64,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig { height: 3, budget: 2_000_000, scan_budget: 100_000_000, seed: 0 }
    }
}

/// Searches the base field for `z` with `rank M(z) < rank [M(z) | v_c(z)]`.
/// Finite fields are scanned projectively when small enough and sampled
/// otherwise; `Q` and `Q(i)` use a grid of small-height points, level by
/// level. Any rank drop is accepted, which includes the points where `K_r`
/// vanishes and `w` does not.
pub fn find_witness<F: Field>(sys: &SymbolicSystem<F>, c: usize, r: usize, w: &Poly<F>, config: &WitnessConfig) -> Result<WitnessSearch<F>> {
    let f = sys.ring.field();
    let n = sys.nvars();
    let ext = sys.ring.extend("y");
    let groebner = {
        let mut gens: Vec<Poly<F>> = if r <= sys.kept_rows.len().min(sys.kept_cols.len()) {
            minors(&sys.ring, &sys.m, r)?.iter().map(|g| sys.ring.embed(g, 1)).collect()
        } else {
            Vec::new()
        };
        let y = ext.var(n);
        gens.push(ext.sub(&ext.mul(&ext.embed(w, 1), &y), &ext.one()));
        ext.groebner_basis(&gens.into_iter().filter(|g| !g.is_zero()).collect::<Vec<_>>())
    };
    let rendered: Vec<String> = groebner.iter().map(|g| ext.render(g)).collect();
    let is_witness = |z: &[F::Elem]| -> Result<bool> { Ok(!rank_check_at(sys, c, z)?) };
    let confirm = |z: &[F::Elem]| -> Result<()> {
        // a witness where w does not vanish is a zero of the basis at y = 1/w(z)
        let wz = sys.ring.eval(w, z)?;
        let rank_low = sys.ranks_at(c, z)?.0 < r;
        if !f.is_zero(&wz) && rank_low {
            let mut pt = z.to_vec();
            pt.push(f.inv(&wz)?);
            for g in &groebner {
                if !f.is_zero(&ext.eval(g, &pt)?) {
                    return Err(Error::Input("witness does not satisfy the Groebner basis".into()));
                }
            }
        }
        Ok(())
    };

    let mut tried = 0u64;
    if f.order().is_some() {
        match projective_count(f, n) {
            Some(total) if total <= config.scan_budget as u128 => {
                let elems = f.enumerate()?;
                for idx in 0..total as u64 {
                    tried += 1;
                    let z = point_at(&elems, n, idx);
                    if is_witness(&z)? {
                        confirm(&z)?;
                        return Ok(WitnessSearch { witness: Some(z), points_tried: tried, groebner_basis: rendered });
                    }
                }
            }
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                while tried < config.budget {
                    tried += 1;
                    let z: Vector<F> = (0..n).map(|_| f.random(&mut rng)).collect();
                    if is_witness(&z)? {
                        confirm(&z)?;
                        return Ok(WitnessSearch { witness: Some(z), points_tried: tried, groebner_basis: rendered });
                    }
                }
            }
        }
        return Ok(WitnessSearch { witness: None, points_tried: tried, groebner_basis: rendered });
    }

    for level in 1..=config.height {
        let grid = f.small_elements(level);
        let found = grid_level(f, n, &grid, level, config.budget, &mut tried, |z| is_witness(z))?;
        if let Some(z) = found {
            confirm(&z)?;
            return Ok(WitnessSearch { witness: Some(z), points_tried: tried, groebner_basis: rendered });
        }
        if tried >= config.budget {
            break;
        }
    }
    Ok(WitnessSearch { witness: None, points_tried: tried, groebner_basis: rendered })
}

/// Projective points with coordinates in `grid` whose largest height is
/// exactly `level` (or any point at level 1), first nonzero coordinate 1.
fn grid_level<F: Field>(
    f: &F,
    n: usize,
    grid: &[F::Elem],
    level: u64,
    budget: u64,
    tried: &mut u64,
    mut test: impl FnMut(&[F::Elem]) -> Result<bool>,
) -> Result<Option<Vector<F>>> {
    let heights: Vec<u64> = grid.iter().map(|x| f.height(x)).collect();
    let zero_idx = grid.iter().position(|x| f.is_zero(x));
    for lead in 0..n {
        let tail = n - lead - 1;
        let mut digits = vec![0usize; tail];
        loop {
            let max_h = digits.iter().map(|&d| heights[d]).max().unwrap_or(1).max(1);
            if max_h == level || level == 1 {
                let mut z = vec![f.zero(); n];
                z[lead] = f.one();
                for (t, &d) in digits.iter().enumerate() {
                    z[lead + 1 + t] = grid[d].clone();
                }
                let trivial_tail = zero_idx.is_some() && tail > 0 && digits.iter().all(|&d| Some(d) == zero_idx);
                if level == 1 || !trivial_tail {
                    if *tried >= budget {
                        return Ok(None);
                    }
                    *tried += 1;
                    if test(&z)? {
                        return Ok(Some(z));
                    }
                }
            }
            let mut pos = tail;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < grid.len() {
                    break;
                }
                digits[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if pos == usize::MAX || tail == 0 {
                break;
            }
        }
    }
    Ok(None)
}

/// `V ∩ D_z`; fails unless this is strictly smaller than `V`.
pub fn refine_with_witness<F: Field>(t: &StructureTable<F>, v: &Subspace<F>, z: &[F::Elem]) -> Result<Subspace<F>> {
    let next = restrict_to_inner_at(t, v, z)?;
    if next.dim() < v.dim() {
        Ok(next)
    } else {
        Err(Error::NotAWitness)
    }
}

/// Number of projective points of `F^n`, if the field is finite and the count fits.
pub fn projective_count<F: Field>(f: &F, n: usize) -> Option<u128> {
    let q = f.order()? as u128;
    let total = q.checked_pow(n as u32)?;
    Some((total - 1) / (q - 1))
}

/// Scan order: leading position ascending (first nonzero coordinate is 1),
/// then the remaining coordinates as base-q digits, last one fastest, with
/// digit `d` meaning `elems[d]`.
pub fn point_at<T: Clone>(elems: &[T], n: usize, mut index: u64) -> Vec<T> {
    let q = elems.len() as u64;
    let mut lead = 0;
    loop {
        let block = q.pow((n - lead - 1) as u32);
        if index < block {
            break;
        }
        index -= block;
        lead += 1;
    }
    let mut z = vec![elems[0].clone(); n];
    z[lead] = elems[1].clone();
    for pos in (lead + 1..n).rev() {
        z[pos] = elems[(index % q) as usize].clone();
        index /= q;
    }
    z
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExhaustiveOutcome {
    pub projective_points: u64,
    /// First failing scan index per candidate.
    pub first_failure: Vec<Option<u64>>,
    pub kernel: ScanKernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKernel {
    Packed,
    Generic,
}

const CHUNK: u64 = 1 << 15;

/// Runs the rank test at one representative of every projective point.
/// Candidates failing nowhere are almost inner; the others get the first
/// failing point in scan order.
pub fn exhaustive_verify<F: Field>(sys: &SymbolicSystem<F>, scan_budget: u64, force_generic: bool) -> Result<ExhaustiveOutcome> {
    let f = sys.ring.field();
    let n = sys.nvars();
    if f.order().is_none() {
        return Err(Error::NotEnumerable(f.spec().to_string()));
    }
    let total = projective_count(f, n).unwrap_or(u128::MAX);
    if total > scan_budget as u128 {
        return Err(Error::BudgetExceeded { points: total, budget: scan_budget });
    }
    let total = total as u64;
    let elems = f.enumerate()?;
    let packed = !force_generic && packed_values(f, &elems).is_some();
    let first_failure = if packed {
        let p = f.order().unwrap() as usize;
        match p {
            2 => scan_packed::<F, 2>(sys, &elems, total),
            3 => scan_packed::<F, 3>(sys, &elems, total),
            5 => scan_packed::<F, 5>(sys, &elems, total),
            7 => scan_packed::<F, 7>(sys, &elems, total),
            11 => scan_packed::<F, 11>(sys, &elems, total),
            13 => scan_packed::<F, 13>(sys, &elems, total),
            _ => unreachable!("packed_values admits only these primes"),
        }
    } else {
        scan_generic(sys, &elems, total)
    };
    Ok(ExhaustiveOutcome {
        projective_points: total,
        first_failure,
        kernel: if packed { ScanKernel::Packed } else { ScanKernel::Generic },
    })
}

/// Digit values when `F` is a prime field of order at most 13 whose
/// enumeration is `0, 1, ..., p-1`.
fn packed_values<F: Field>(f: &F, elems: &[F::Elem]) -> Option<()> {
    let q = f.order()?;
    if f.prime_field()? as u64 != q || ![2, 3, 5, 7, 11, 13].contains(&q) {
        return None;
    }
    elems.iter().enumerate().all(|(d, e)| *e == f.from_i64(d as i64)).then_some(())
}

fn chunks(n: usize, q: u64) -> Vec<(usize, u64, u64, u64)> {
    // (lead, start of the chunk within the lead block, length, global index)
    let mut out = Vec::new();
    let mut offset = 0u64;
    for lead in 0..n {
        let block = q.pow((n - lead - 1) as u32);
        let mut start = 0;
        while start < block {
            let len = CHUNK.min(block - start);
            out.push((lead, start, len, offset + start));
            start += len;
        }
        offset += block;
    }
    out
}

struct Minimum(Vec<AtomicU64>);

impl Minimum {
    fn new(k: usize) -> Self {
        Minimum((0..k).map(|_| AtomicU64::new(u64::MAX)).collect())
    }
    fn record(&self, c: usize, idx: u64) {
        self.0[c].fetch_min(idx, Ordering::Relaxed);
    }
    /// Whether no candidate can still improve at indices `>= idx`.
    fn settled_before(&self, idx: u64) -> bool {
        self.0.iter().all(|a| a.load(Ordering::Relaxed) < idx)
    }
    fn finish(self) -> Vec<Option<u64>> {
        self.0.into_iter().map(|a| a.into_inner()).map(|x| (x != u64::MAX).then_some(x)).collect()
    }
}

fn scan_packed<F: Field, const P: usize>(sys: &SymbolicSystem<F>, elems: &[F::Elem], total: u64) -> Vec<Option<u64>> {
    let f = sys.ring.field();
    let n = sys.nvars();
    let (rows, mcols, k) = (sys.kept_rows.len(), sys.kept_cols.len(), sys.candidates.len());
    let width = mcols + k;
    let digit = |e: &F::Elem| elems.iter().position(|x| x == e).expect("element of the field") as u8;
    let coeffs: Vec<Vec<u8>> = sys
        .coeffs
        .iter()
        .map(|a| (0..rows).flat_map(|r| (0..width).map(move |c| (r, c))).map(|(r, c)| digit(a.get(r, c))).collect())
        .collect();
    let mut inv = [0u8; P];
    for (a, slot) in inv.iter_mut().enumerate().skip(1) {
        *slot = (1..P).find(|b| a * b % P == 1).unwrap() as u8;
    }
    let _ = f;
    let best = Minimum::new(k);
    let all = chunks(n, P as u64);
    all.par_iter().for_each(|&(lead, start, len, global)| {
        if best.settled_before(global) {
            return;
        }
        let tail = n - lead - 1;
        let mut digits = vec![0u8; tail];
        let mut s = start;
        for pos in (0..tail).rev() {
            digits[pos] = (s % P as u64) as u8;
            s /= P as u64;
        }
        let mut w = coeffs[lead].clone();
        for (t, &d) in digits.iter().enumerate() {
            for _ in 0..d {
                add_into::<P>(&mut w, &coeffs[lead + 1 + t]);
            }
        }
        let mut scratch = vec![0u8; w.len()];
        for step in 0..len {
            let idx = global + step;
            scratch.copy_from_slice(&w);
            let failing = eliminate::<P>(&mut scratch, rows, mcols, k, &inv);
            if failing != 0 || k > 64 {
                if k > 64 {
                    for c in failing_columns::<P>(&scratch, rows, mcols, k) {
                        best.record(c, idx);
                    }
                } else {
                    for c in 0..k {
                        if failing >> c & 1 == 1 {
                            best.record(c, idx);
                        }
                    }
                }
                if best.settled_before(idx + 1) {
                    return;
                }
            }
            // odometer step; every touched digit grows by one mod P
            let mut pos = tail;
            while pos > 0 {
                pos -= 1;
                add_into::<P>(&mut w, &coeffs[lead + 1 + pos]);
                digits[pos] += 1;
                if digits[pos] as usize == P {
                    digits[pos] = 0;
                } else {
                    break;
                }
            }
        }
    });
    let _ = total;
    best.finish()
}

#[inline]
fn add_into<const P: usize>(w: &mut [u8], a: &[u8]) {
    for (x, y) in w.iter_mut().zip(a) {
        let s = *x + *y;
        *x = if s as usize >= P { s - P as u8 } else { s };
    }
}

/// Forward elimination on the first `mcols` columns; returns a bit mask of
/// candidate columns with a nonzero entry in a row of zero `M` part.
#[inline]
fn eliminate<const P: usize>(s: &mut [u8], rows: usize, mcols: usize, k: usize, inv: &[u8; P]) -> u64 {
    let width = mcols + k;
    let mut rank = 0;
    for col in 0..mcols {
        let Some(piv) = (rank..rows).find(|&r| s[r * width + col] != 0) else {
            continue;
        };
        if piv != rank {
            for c in col..width {
                s.swap(piv * width + c, rank * width + c);
            }
        }
        let pinv = inv[s[rank * width + col] as usize] as usize;
        for r in rank + 1..rows {
            let e = s[r * width + col] as usize;
            if e == 0 {
                continue;
            }
            // row_r -= (e / pivot) * row_rank
            let factor = P - e * pinv % P;
            for c in col..width {
                let v = s[r * width + c] as usize + factor * s[rank * width + c] as usize;
                s[r * width + c] = (v % P) as u8;
            }
        }
        rank += 1;
        if rank == rows {
            return 0;
        }
    }
    let mut mask = 0u64;
    for r in rank..rows {
        for c in 0..k.min(64) {
            if s[r * width + mcols + c] != 0 {
                mask |= 1 << c;
            }
        }
    }
    mask
}

fn failing_columns<const P: usize>(s: &[u8], rows: usize, mcols: usize, k: usize) -> Vec<usize> {
    // only called after `eliminate`; rows with a zero M part come last
    let width = mcols + k;
    let zero_rows: Vec<usize> = (0..rows).filter(|&r| s[r * width..r * width + mcols].iter().all(|&x| x == 0)).collect();
    (0..k).filter(|&c| zero_rows.iter().any(|&r| s[r * width + mcols + c] != 0)).collect()
}

fn scan_generic<F: Field>(sys: &SymbolicSystem<F>, elems: &[F::Elem], total: u64) -> Vec<Option<u64>> {
    let f = sys.ring.field();
    let n = sys.nvars();
    let (mcols, k) = (sys.kept_cols.len(), sys.candidates.len());
    let best = Minimum::new(k);
    let nchunks = total.div_ceil(CHUNK);
    (0..nchunks).into_par_iter().for_each(|ch| {
        let start = ch * CHUNK;
        if best.settled_before(start) {
            return;
        }
        for idx in start..(start + CHUNK).min(total) {
            let z = point_at(elems, n, idx);
            let w = sys.eval_augmented(&z).expect("point has n coordinates");
            // reduce the candidate columns against the column space of M
            let rows = w.row_vecs();
            let mt: Vec<Vector<F>> = (0..mcols).map(|c| rows.iter().map(|r| r[c].clone()).collect()).collect();
            let space = Subspace::from_vectors(f, rows.len(), mt).expect("lengths agree");
            let mut any = false;
            for c in 0..k {
                let v: Vector<F> = rows.iter().map(|r| r[mcols + c].clone()).collect();
                if !space.contains(&v) {
                    best.record(c, idx);
                    any = true;
                }
            }
            if any && best.settled_before(idx + 1) {
                return;
            }
        }
    });
    best.finish()
}

/// Limits and seeds for [`compute_aid`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AidConfig {
    pub plan: ProbePlan,
    pub minors_limit: usize,
    pub scan_budget: u64,
    pub witness_height: u64,
    pub witness_budget: u64,
    pub hunt_budget: usize,
    pub max_rounds: usize,
    pub force_generic_scan: bool,
    /// Excluded from reports so that output does not depend on it.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for AidConfig {
    fn default() -> Self {
        AidConfig {
            plan: ProbePlan::default(),
            minors_limit: 8,
            scan_budget: 100_000_000,
            witness_height: 3,
            witness_budget: 2_000_000,
            hunt_budget: 20_000,
            max_rounds: 64,
            force_generic_scan: false,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundKind {
    Exhaustive,
    Hunt,
    Minors,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateVerdict {
    pub candidate: usize,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub kind: RoundKind,
    pub candidates: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projective_points: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan_kernel: Option<ScanKernel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hunt: Option<ProbeLog>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub verdicts: Vec<CandidateVerdict>,
    pub dim_after: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimensions {
    pub algebra: usize,
    pub center: usize,
    pub der: usize,
    pub inn: usize,
    pub complement: usize,
    pub refined: usize,
    pub aid_lower: usize,
    pub aid_upper: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub algebra: String,
    pub field: String,
    pub config: AidConfig,
    pub dims: Dimensions,
    pub probe_log: ProbeLog,
    pub rounds: Vec<Round>,
    /// True when every remaining candidate is certified, so AID is exact.
    pub complete: bool,
}

#[derive(Debug, Clone)]
pub struct AidResult<F: Field> {
    pub spaces: DerivationSpaces<F>,
    /// Candidate space left by the probe loop.
    pub refined: Subspace<F>,
    /// Candidate space after witness refinement; all of it certified when complete.
    pub candidates: Subspace<F>,
    pub certified: Subspace<F>,
    pub lower: Subspace<F>,
    pub upper: Subspace<F>,
    pub report: CertificationReport,
}

impl<F: Field> AidResult<F> {
    pub fn is_complete(&self) -> bool {
        self.report.complete
    }
    /// AID when certification is complete.
    pub fn aid(&self) -> Option<&Subspace<F>> {
        self.is_complete().then_some(&self.lower)
    }
}

fn render_point<F: Field>(f: &F, z: &[F::Elem]) -> Vec<String> {
    z.iter().map(|c| f.render(c)).collect()
}

fn in_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| Error::Input(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(job))
        }
        None => Ok(job()),
    }
}

/// `Inn ⊕ (U ∩ AID)` via refinement, then exhaustive or minors certification,
/// refining with every witness found until no candidate is refuted.
pub fn compute_aid<F: Field>(t: &StructureTable<F>, config: &AidConfig) -> Result<AidResult<F>> {
    in_pool(config.threads, || compute_aid_inner(t, config))?
}

fn compute_aid_inner<F: Field>(t: &StructureTable<F>, config: &AidConfig) -> Result<AidResult<F>> {
    let f = t.field();
    let n = t.dim();
    let spaces = try_compute_spaces(t)?;
    let (refined, probe_log) = refine_candidates(&spaces, t, &config.plan);
    let mut v = refined.clone();
    let mut rounds: Vec<Round> = Vec::new();
    let mut hunted = false;
    let mut certified = Subspace::zero(f, n * n);
    let mut complete = true;

    loop {
        if v.is_zero() {
            break;
        }
        if rounds.len() >= config.max_rounds {
            complete = false;
            break;
        }
        let sys = build_symbolic(t, v.basis())?;
        let k = sys.num_candidates();

        if let Some(total) = projective_count(f, n) {
            if total <= config.scan_budget as u128 {
                let (verdicts, witnesses, out) = exhaustive_round(&sys, config)?;
                if witnesses.is_empty() {
                    rounds.push(round(RoundKind::Exhaustive, k, Some(&out), None, verdicts, v.dim()));
                    certified = v.clone();
                    break;
                }
                v = apply_witnesses(t, &v, &witnesses)?;
                rounds.push(round(RoundKind::Exhaustive, k, Some(&out), None, verdicts, v.dim()));
                continue;
            }
            if !hunted {
                hunted = true;
                let plan = ProbePlan { seed: config.plan.seed.wrapping_add(1), budget: config.hunt_budget, patience: config.hunt_budget };
                let (next, log) = refine_from(t, &v, &plan);
                let shrank = next.dim() < v.dim();
                v = next;
                rounds.push(round(RoundKind::Hunt, k, None, Some(log), Vec::new(), v.dim()));
                if shrank {
                    continue;
                }
            }
        }

        let (verdicts, witnesses) = minors_round(&sys, config)?;
        if !witnesses.is_empty() {
            v = apply_witnesses(t, &v, &witnesses)?;
            rounds.push(round(RoundKind::Minors, k, None, None, verdicts, v.dim()));
            continue;
        }
        complete = verdicts.iter().all(|c| c.verdict.is_certified());
        let good = verdicts.iter().filter(|c| c.verdict.is_certified()).map(|c| v.basis()[c.candidate].clone()).collect();
        rounds.push(round(RoundKind::Minors, k, None, None, verdicts, v.dim()));
        certified = Subspace::from_vectors(f, n * n, good)?;
        break;
    }

    let lower = spaces.inn.sum(&certified)?;
    let upper = spaces.inn.sum(&v)?;
    let complete = complete && lower == upper;
    let report = CertificationReport {
        algebra: t.name().to_string(),
        field: f.spec().to_string(),
        config: config.clone(),
        dims: Dimensions {
            algebra: n,
            center: t.center().dim(),
            der: spaces.der.dim(),
            inn: spaces.inn.dim(),
            complement: spaces.complement_u.dim(),
            refined: refined.dim(),
            aid_lower: lower.dim(),
            aid_upper: upper.dim(),
        },
        probe_log,
        rounds,
        complete,
    };
    Ok(AidResult { spaces, refined, candidates: v, certified, lower, upper, report })
}

type RoundVerdicts<F> = (Vec<CandidateVerdict>, Vec<Vector<F>>);

/// Exhaustive scan of every candidate; returns verdicts and the witnesses found.
fn exhaustive_round<F: Field>(sys: &SymbolicSystem<F>, config: &AidConfig) -> Result<(Vec<CandidateVerdict>, Vec<Vector<F>>, ExhaustiveOutcome)> {
    let f = sys.ring.field();
    let n = sys.nvars();
    let out = exhaustive_verify(sys, config.scan_budget, config.force_generic_scan)?;
    let elems = f.enumerate()?;
    let mut witnesses = Vec::new();
    let mut verdicts = Vec::new();
    for c in 0..sys.num_candidates() {
        let verdict = match out.first_failure[c] {
            None => Verdict::CertifiedAid { method: Method::Exhaustive, containments: Vec::new() },
            Some(idx) => {
                let z = point_at(&elems, n, idx);
                let (rank_m, rank_augmented) = sys.ranks_at(c, &z)?;
                let verdict = Verdict::Refuted {
                    method: Method::Exhaustive,
                    witness: render_point(f, &z),
                    rank_m,
                    rank_augmented,
                    containments: Vec::new(),
                    r1_failure: rank_m == 0,
                };
                witnesses.push(z);
                verdict
            }
        };
        verdicts.push(CandidateVerdict { candidate: c, verdict });
    }
    Ok((verdicts, witnesses, out))
}

/// Minors test for every candidate, with a witness search after each failure.
fn minors_round<F: Field>(sys: &SymbolicSystem<F>, config: &AidConfig) -> Result<RoundVerdicts<F>> {
    let f = sys.ring.field();
    let k = sys.num_candidates();
    if sys.size() > config.minors_limit {
        let verdicts = (0..k)
            .map(|c| CandidateVerdict {
                candidate: c,
                verdict: Verdict::Inconclusive {
                    reason: format!("too large for minors method: size {} exceeds limit {}", sys.size(), config.minors_limit),
                    containments: Vec::new(),
                    failing_minor: None,
                    groebner_basis: Vec::new(),
                    points_tried: 0,
                    r1_failure: false,
                },
            })
            .collect();
        return Ok((verdicts, Vec::new()));
    }
    let ideals = minors_ideals(sys)?;
    for ideal in &ideals {
        ideal.groebner_basis();
    }
    let wcfg = WitnessConfig { height: config.witness_height, budget: config.witness_budget, scan_budget: config.scan_budget, seed: config.plan.seed };
    let outcomes: Vec<Result<(Verdict, Option<Vector<F>>)>> = (0..k)
        .into_par_iter()
        .map(|c| {
            let out = certify_minors(sys, c, &ideals)?;
            let Some((r, w)) = out.failure else {
                return Ok((Verdict::CertifiedAid { method: Method::Minors, containments: out.containments }, None));
            };
            let search = find_witness(sys, c, r, &w, &wcfg)?;
            Ok(match search.witness {
                Some(z) => {
                    let (rank_m, rank_augmented) = sys.ranks_at(c, &z)?;
                    let verdict = Verdict::Refuted {
                        method: Method::Minors,
                        witness: render_point(f, &z),
                        rank_m,
                        rank_augmented,
                        containments: out.containments,
                        r1_failure: r == 1,
                    };
                    (verdict, Some(z))
                }
                None => (
                    Verdict::Inconclusive {
                        reason: format!("minor of size {r} outside the radical and no witness in the base field search"),
                        containments: out.containments,
                        failing_minor: Some(sys.ring.render(&w)),
                        groebner_basis: search.groebner_basis,
                        points_tried: search.points_tried,
                        r1_failure: r == 1,
                    },
                    None,
                ),
            })
        })
        .collect();
    let mut verdicts = Vec::new();
    let mut witnesses = Vec::new();
    for (c, o) in outcomes.into_iter().enumerate() {
        let (verdict, z) = o?;
        witnesses.extend(z);
        verdicts.push(CandidateVerdict { candidate: c, verdict });
    }
    Ok((verdicts, witnesses))
}

/// One certification pass over the given derivations, without refinement:
/// exhaustive when the field is finite and the scan fits, minors otherwise.
pub fn certify_candidates<F: Field>(t: &StructureTable<F>, candidates: &[Vector<F>], config: &AidConfig) -> Result<Round> {
    in_pool(config.threads, || {
        let sys = build_symbolic(t, candidates)?;
        let k = sys.num_candidates();
        let within = projective_count(t.field(), t.dim()).is_some_and(|c| c <= config.scan_budget as u128);
        if within {
            let (verdicts, _, out) = exhaustive_round(&sys, config)?;
            Ok(round(RoundKind::Exhaustive, k, Some(&out), None, verdicts, k))
        } else {
            let (verdicts, _) = minors_round(&sys, config)?;
            Ok(round(RoundKind::Minors, k, None, None, verdicts, k))
        }
    })?
}

fn round(kind: RoundKind, candidates: usize, scan: Option<&ExhaustiveOutcome>, hunt: Option<ProbeLog>, verdicts: Vec<CandidateVerdict>, dim_after: usize) -> Round {
    Round {
        kind,
        candidates,
        projective_points: scan.map(|s| s.projective_points),
        scan_kernel: scan.map(|s| s.kernel),
        hunt,
        verdicts,
        dim_after,
    }
}

/// Intersects with `D_z` for each witness in order; the first must shrink `V`.
fn apply_witnesses<F: Field>(t: &StructureTable<F>, v: &Subspace<F>, witnesses: &[Vector<F>]) -> Result<Subspace<F>> {
    let mut cur = refine_with_witness(t, v, &witnesses[0])?;
    for z in &witnesses[1..] {
        cur = restrict_to_inner_at(t, &cur, z)?;
    }
    Ok(cur)
}

/// Flattened maps `g -> z(g)`.
pub fn central_maps<F: Field>(t: &StructureTable<F>) -> Subspace<F> {
    let (f, n) = (t.field(), t.dim());
    let center = t.center();
    let mut gens = Vec::new();
    for j in 0..n {
        for c in center.basis() {
            let mut d = vec![f.zero(); n * n];
            d[j * n..(j + 1) * n].clone_from_slice(c);
            gens.push(d);
        }
    }
    Subspace::from_vectors(f, n * n, gens).expect("lengths agree")
}

/// `AID ∩ (Inn + W)` with `W` the maps into the centre.
pub fn compute_caid<F: Field>(t: &StructureTable<F>, aid: &Subspace<F>) -> Result<Subspace<F>> {
    let inn = crate::derivations::compute_inn(t);
    aid.intersect(&inn.sum(&central_maps(t))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{dim5_l8211, g6_23, heisenberg3};
    use crate::derivations::{compute_inn, compute_spaces, inner, is_derivation};
    use crate::scalars::{FiniteField, GaussianRationals, Rationals};

    fn gauss_point(s: &[&str]) -> Vec<<GaussianRationals as Field>::Elem> {
        s.iter().map(|x| GaussianRationals.parse(x).unwrap()).collect()
    }

    #[test]
    fn abelian_system_is_empty_and_refutes() {
        let q = Rationals;
        let t = StructureTable::abelian(&q, 3);
        let d = crate::catalog::derivation_from_images(&q, 3, &[(1, &[(2, 1)])]);
        let sys = build_symbolic(&t, &[d]).unwrap();
        assert_eq!(sys.kept_cols().len(), 0);
        assert_eq!(sys.kept_rows(), &[1]);
        assert!(!rank_check_at(&sys, 0, &t.basis_vector(1)).unwrap());
        let ideals = minors_ideals(&sys).unwrap();
        let out = certify_minors(&sys, 0, &ideals).unwrap();
        assert_eq!(out.failure.as_ref().map(|x| x.0), Some(1));
        let r = compute_aid(&t, &AidConfig::default()).unwrap();
        assert_eq!(r.lower.dim(), 0);
        assert!(r.is_complete());
    }

    #[test]
    fn g623_trimmed_matrix_and_certification() {
        let q = Rationals;
        let t = g6_23(&q);
        let s = compute_spaces(&t);
        let (v, _) = refine_candidates(&s, &t, &ProbePlan::default());
        assert_eq!(v.dim(), 2);
        let sys = build_symbolic(&t, v.basis()).unwrap();
        let ring = sys.ring();
        let p = |x: &str| ring.parse(x).unwrap();
        assert_eq!((sys.kept_rows().len(), sys.kept_cols().len()), (3, 4));
        let expected = [
            [p("-z2"), p("z1"), Poly::zero(), Poly::zero()],
            [p("-z3"), p("-z4"), p("z1"), p("z2")],
            [p("-z4"), Poly::zero(), Poly::zero(), p("z1")],
        ];
        for (r, row) in expected.iter().enumerate() {
            for (c, e) in row.iter().enumerate() {
                assert_eq!(sys.m().get(r, c), e, "entry ({r}, {c})");
            }
        }
        let ideals = minors_ideals(&sys).unwrap();
        for c in 0..2 {
            let out = certify_minors(&sys, c, &ideals).unwrap();
            assert!(out.failure.is_none());
            assert_eq!(out.containments.iter().map(|x| x.r).collect::<Vec<_>>(), vec![1, 2, 3]);
            assert!(rank_check_at(&sys, c, &t.basis_vector(1)).unwrap());
        }
    }

    #[test]
    fn g623_reference_candidate_certifies() {
        // last column (-z1, 0, 0): d(b_z) = -z1 * (first kept row basis vector)
        let q = Rationals;
        let t = g6_23(&q);
        let sys0 = build_symbolic(&t, &[]).unwrap();
        let row_basis = sys0.kept_rows()[0];
        let mut d = vec![q.zero(); 36];
        d[row_basis] = q.from_i64(-1);
        assert!(is_derivation(&t, &d));
        let sys = build_symbolic(&t, &[d]).unwrap();
        let ideals = minors_ideals(&sys).unwrap();
        assert!(certify_minors(&sys, 0, &ideals).unwrap().failure.is_none());
    }

    #[test]
    fn inner_derivations_pass_everywhere() {
        let q = Rationals;
        let t = g6_23(&q);
        let a = vec![q.from_i64(1), q.from_i64(-2), q.zero(), q.from_i64(3), q.zero(), q.from_i64(1)];
        let sys = build_symbolic(&t, &[inner(&t, &a)]).unwrap();
        for z in [t.basis_vector(1), a.clone(), vec![q.from_i64(2); 6]] {
            assert!(rank_check_at(&sys, 0, &z).unwrap());
        }
        let f = FiniteField::prime(3).unwrap();
        let t3 = heisenberg3(&f);
        let sys = build_symbolic(&t3, &[inner(&t3, &t3.basis_vector(1))]).unwrap();
        let out = exhaustive_verify(&sys, 1000, false).unwrap();
        assert_eq!(out.first_failure, vec![None]);
    }

    #[test]
    fn dim5_over_gaussians() {
        let f = GaussianRationals;
        let t = dim5_l8211(&f);
        let s = compute_spaces(&t);
        assert_eq!(s.complement_u.dim(), 2);
        let (v, _) = refine_candidates(&s, &t, &ProbePlan::default());
        let sys = build_symbolic(&t, v.basis()).unwrap();
        let ring = sys.ring();
        let p = |x: &str| ring.parse(x).unwrap();
        // the untrimmed 3x5 matrix has an identically zero third column, dropped by trimming
        assert_eq!(sys.kept_cols(), &[0, 1, 3, 4]);
        let mut rows: Vec<Vec<Poly<GaussianRationals>>> = (0..3).map(|r| (0..4).map(|c| sys.m().get(r, c).clone()).collect()).collect();
        let mut expected = vec![
            vec![p("-z4"), p("-z5"), p("z1"), p("z2")],
            vec![p("z5"), p("-z4"), p("z2"), p("-z1")],
            vec![Poly::zero(), Poly::zero(), p("-z5"), p("z4")],
        ];
        let key = |r: &Vec<Poly<GaussianRationals>>| format!("{r:?}");
        rows.sort_by_key(key);
        expected.sort_by_key(key);
        assert_eq!(rows, expected);

        let known = gauss_point(&["1", "1", "0", "-i", "1"]);
        let ideals = minors_ideals(&sys).unwrap();
        let mut refuted = 0;
        for c in 0..v.dim() {
            let out = certify_minors(&sys, c, &ideals).unwrap();
            let (r, w) = out.failure.expect("containment fails");
            assert_eq!(r, 3);
            let search = find_witness(&sys, c, r, &w, &WitnessConfig::default()).unwrap();
            let z = search.witness.expect("witness over Q(i)");
            assert!(!rank_check_at(&sys, c, &z).unwrap());
            refuted += usize::from(!rank_check_at(&sys, c, &known).unwrap());
        }
        assert!(refuted > 0);
        let one = refine_with_witness(&t, &v, &known).unwrap();
        assert_eq!(one.dim(), 1);
        assert!(matches!(refine_with_witness(&t, &v, &t.zero_vector()), Err(Error::NotAWitness)));
        let r = compute_aid(&t, &AidConfig::default()).unwrap();
        assert!(r.is_complete());
        assert_eq!(r.lower, r.spaces.inn);
    }

    #[test]
    fn dim5_over_rationals_is_inconclusive() {
        let q = Rationals;
        let t = dim5_l8211(&q);
        let r = compute_aid(&t, &AidConfig::default()).unwrap();
        assert!(!r.is_complete());
        assert_eq!((r.report.dims.aid_lower, r.report.dims.aid_upper), (r.spaces.inn.dim(), r.spaces.inn.dim() + 2));
        let last = r.report.rounds.last().unwrap();
        let Verdict::Inconclusive { groebner_basis, .. } = &last.verdicts[0].verdict else { panic!("{last:?}") };
        let ring = PolyRing::with_prefix(&q, "z", 5).extend("y");
        let gens: Vec<_> = groebner_basis.iter().map(|g| ring.parse(g).unwrap()).collect();
        let ideal = PolyIdeal::new(&ring, gens);
        assert!(ideal.contains(&ring.parse("z4^2+z5^2").unwrap()));
    }

    #[test]
    fn packed_and_generic_scans_agree() {
        for p in [2u32, 3, 5] {
            let f = FiniteField::prime(p).unwrap();
            for t in [heisenberg3(&f), dim5_l8211(&f), g6_23(&f)] {
                let s = compute_spaces(&t);
                let sys = build_symbolic(&t, s.complement_u.basis()).unwrap();
                let a = exhaustive_verify(&sys, 1_000_000, false).unwrap();
                let b = exhaustive_verify(&sys, 1_000_000, true).unwrap();
                assert_eq!(a.kernel, ScanKernel::Packed);
                assert_eq!(b.kernel, ScanKernel::Generic);
                assert_eq!(a.first_failure, b.first_failure, "{} over GF({p})", t.name());
                let elems = f.enumerate().unwrap();
                for (c, idx) in a.first_failure.iter().enumerate() {
                    if let Some(idx) = idx {
                        assert!(!rank_check_at(&sys, c, &point_at(&elems, t.dim(), *idx)).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn scan_budget_and_point_order() {
        let f = FiniteField::prime(3).unwrap();
        let elems = f.enumerate().unwrap();
        let pts: Vec<_> = (0..13).map(|i| point_at(&elems, 3, i)).collect();
        assert_eq!(pts[0], vec![f.one(), f.zero(), f.zero()]);
        assert_eq!(pts[9], vec![f.zero(), f.one(), f.zero()]);
        assert_eq!(pts[12], vec![f.zero(), f.zero(), f.one()]);
        assert_eq!(projective_count(&f, 3), Some(13));
        let t = g6_23(&f);
        let sys = build_symbolic(&t, &[]).unwrap();
        assert!(matches!(exhaustive_verify(&sys, 10, false), Err(Error::BudgetExceeded { .. })));
        assert!(exhaustive_verify(&build_symbolic(&g6_23(&Rationals), &[]).unwrap(), 10, false).is_err());
    }

    #[test]
    fn heisenberg_gf2_matches_brute_force() {
        let f = FiniteField::prime(2).unwrap();
        let t = heisenberg3(&f);
        let r = compute_aid(&t, &AidConfig::default()).unwrap();
        assert!(r.is_complete());
        let der = compute_spaces(&t).der;
        let elems = f.enumerate().unwrap();
        // all 2^9 maps, kept when they are derivations sending each a into [g, a]
        let mut found = Vec::new();
        for mask in 0u32..512 {
            let d: Vec<_> = (0..9).map(|i| elems[(mask >> i & 1) as usize]).collect();
            if !der.contains(&d) {
                continue;
            }
            let ok = (1u64..8).all(|idx| {
                let a: Vec<_> = (0..3).map(|i| elems[(idx >> i & 1) as usize]).collect();
                let img = crate::derivations::apply(&f, 3, &d, &a);
                let span = Subspace::from_vectors(&f, 3, (1..=3).map(|j| t.bracket(&t.basis_vector(j), &a).unwrap()).collect()).unwrap();
                span.contains(&img)
            });
            if ok {
                found.push(d);
            }
        }
        assert_eq!(Subspace::from_vectors(&f, 9, found).unwrap(), r.lower);
    }

    #[test]
    fn caid_chain() {
        let q = Rationals;
        let t = g6_23(&q);
        let r = compute_aid(&t, &AidConfig::default()).unwrap();
        let aid = r.aid().unwrap();
        let caid = compute_caid(&t, aid).unwrap();
        let inn = compute_inn(&t);
        assert!(caid.contains_subspace(&inn));
        assert!(aid.contains_subspace(&caid));
        // definition-level oracle: d is central almost inner iff d - ad(a) maps into the centre for some a
        let center = t.center();
        let n = 6;
        let mut count = inn.dim();
        for d in Subspace::quotient_basis(aid, &inn).unwrap() {
            // unknown a: d(b_j) - [a, b_j] ≡ 0 modulo the centre for all j
            let mut sys = Matrix::zeros(&q, n * n, n + 1);
            for j in 0..n {
                let rhs = center.reduce(&d[j * n..(j + 1) * n]);
                for i in 0..n {
                    let col = center.reduce(&t.bracket(&t.basis_vector(i + 1), &t.basis_vector(j + 1)).unwrap());
                    for k in 0..n {
                        sys.set(j * n + k, i, col[k].clone());
                    }
                }
                for k in 0..n {
                    sys.set(j * n + k, n, rhs[k].clone());
                }
            }
            let a_part: Vec<Vector<Rationals>> = (0..n * n).map(|r| sys.row(r)[..n].to_vec()).collect();
            let a_mat = Matrix::from_rows(&q, n, a_part).unwrap();
            let rhs: Vec<_> = (0..n * n).map(|r| sys.get(r, n).clone()).collect();
            if a_mat.solve(&rhs).unwrap().is_some() {
                count += 1;
            }
        }
        assert!(count <= caid.dim());
        assert!((4..=6).contains(&caid.dim()));
    }
}
