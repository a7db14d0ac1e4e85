//! Dense exact linear algebra and the subspace lattice.

use crate::error::{Error, Result};
use crate::scalars::Field;

pub type Vector<F> = Vec<<F as Field>::Elem>;

/// Row-major dense matrix over `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Matrix { field: field.clone(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: &F, cols: usize, rows: Vec<Vector<F>>) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Dimension(format!("row {i} has length {}, expected {cols}", r.len())));
            }
            data.extend(r);
        }
        Ok(Matrix { field: field.clone(), rows: n, cols, data })
    }

    /// Convenience constructor from small integers.
    pub fn from_i64(field: &F, rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows.iter().flat_map(|r| r.iter().map(|&x| field.from_i64(x))).collect();
        Matrix { field: field.clone(), rows: rows.len(), cols, data }
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn get(&self, r: usize, c: usize) -> &F::Elem {
        &self.data[r * self.cols + c]
    }
    pub fn set(&mut self, r: usize, c: usize, v: F::Elem) {
        self.data[r * self.cols + c] = v;
    }
    pub fn row(&self, r: usize) -> &[F::Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
    pub fn row_vecs(&self) -> Vec<Vector<F>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }
    pub fn column(&self, c: usize) -> Vector<F> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix<F>) -> Result<Matrix<F>> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if f.is_zero(a) {
                    continue;
                }
                for c in 0..other.cols {
                    let cur = f.add(out.get(r, c), &f.mul(a, other.get(k, c)));
                    out.set(r, c, cur);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[F::Elem]) -> Result<Vector<F>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        let f = &self.field;
        Ok((0..self.rows).map(|r| dot(f, self.row(r), v)).collect())
    }

    pub fn sub(&self, other: &Matrix<F>) -> Result<Matrix<F>> {
        self.check_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension("matrix shapes differ".into()));
        }
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f.sub(a, b)).collect();
        Ok(Matrix { field: f.clone(), rows: self.rows, cols: self.cols, data })
    }

    /// Appends the columns of `other` on the right.
    pub fn augment(&self, other: &Matrix<F>) -> Result<Matrix<F>> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(Error::Dimension("row counts differ".into()));
        }
        let rows = (0..self.rows)
            .map(|r| {
                let mut v = self.row(r).to_vec();
                v.extend_from_slice(other.row(r));
                v
            })
            .collect();
        Matrix::from_rows(&self.field, self.cols + other.cols, rows)
    }

    fn check_field(&self, other: &Matrix<F>) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!("{} vs {}", self.field.spec(), other.field.spec())));
        }
        Ok(())
    }

    /// Reduced row echelon form by Gauss-Jordan elimination, with the rank
    /// and the pivot columns.
    pub fn rref(&self) -> (Matrix<F>, usize, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let rank = pivots.len();
        (m, rank, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| !f.is_zero(self.get(i, c))) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    self.data.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.get(r, c)).expect("pivot is nonzero");
            for j in c..cols {
                let v = f.mul(self.get(r, j), &inv);
                self.set(r, j, v);
            }
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c).clone();
                if f.is_zero(&factor) {
                    continue;
                }
                for j in c..cols {
                    let v = f.sub(self.get(i, j), &f.mul(&factor, self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Right null space `{v : M v = 0}`.
    pub fn kernel(&self) -> Subspace<F> {
        let f = &self.field;
        let (red, _rank, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![f.zero(); self.cols];
            v[free] = f.one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(red.get(i, free));
            }
            basis.push(v);
        }
        Subspace::from_vectors(f, self.cols, basis).expect("kernel vectors have the ambient length")
    }

    /// Some `x` with `M x = v` (free variables set to zero), or `None` when
    /// `v` is outside the column space.
    pub fn solve(&self, v: &[F::Elem]) -> Result<Option<Vector<F>>> {
        if v.len() != self.rows {
            return Err(Error::Dimension(format!("right side has length {}, matrix has {} rows", v.len(), self.rows)));
        }
        let f = &self.field;
        let rhs = Matrix { field: f.clone(), rows: self.rows, cols: 1, data: v.to_vec() };
        let (red, _rank, pivots) = self.augment(&rhs)?.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![f.zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = red.get(i, self.cols).clone();
        }
        Ok(Some(x))
    }
}

pub fn dot<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> F::Elem {
    let mut acc = f.zero();
    for (x, y) in a.iter().zip(b) {
        if !f.is_zero(x) && !f.is_zero(y) {
            acc = f.add(&acc, &f.mul(x, y));
        }
    }
    acc
}

pub fn axpy<F: Field>(f: &F, y: &mut [F::Elem], a: &F::Elem, x: &[F::Elem]) {
    if f.is_zero(a) {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        if !f.is_zero(xi) {
            *yi = f.add(yi, &f.mul(a, xi));
        }
    }
}

pub fn scale<F: Field>(f: &F, a: &F::Elem, x: &[F::Elem]) -> Vector<F> {
    x.iter().map(|xi| f.mul(a, xi)).collect()
}

pub fn is_zero_vec<F: Field>(f: &F, v: &[F::Elem]) -> bool {
    v.iter().all(|x| f.is_zero(x))
}

/// A subspace of `F^ambient` stored by its reduced row echelon basis, so
/// equal subspaces have identical representations.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<F: Field> {
    field: F,
    ambient: usize,
    basis: Vec<Vector<F>>,
    pivots: Vec<usize>,
}

impl<F: Field> Subspace<F> {
    pub fn zero(field: &F, ambient: usize) -> Self {
        Subspace { field: field.clone(), ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(field: &F, ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![field.zero(); ambient];
                v[i] = field.one();
                v
            })
            .collect();
        Subspace { field: field.clone(), ambient, basis, pivots: (0..ambient).collect() }
    }

    /// The span of `vectors`.
    pub fn from_vectors(field: &F, ambient: usize, vectors: Vec<Vector<F>>) -> Result<Self> {
        let m = Matrix::from_rows(field, ambient, vectors)?;
        let (red, rank, pivots) = m.rref();
        let basis = (0..rank).map(|r| red.row(r).to_vec()).collect();
        Ok(Subspace { field: field.clone(), ambient, basis, pivots })
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[Vector<F>] {
        &self.basis
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    fn check(&self, other: &Subspace<F>) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!("{} vs {}", self.field.spec(), other.field.spec())));
        }
        if self.ambient != other.ambient {
            return Err(Error::Dimension(format!("ambient dimensions {} and {}", self.ambient, other.ambient)));
        }
        Ok(())
    }

    /// Residue of `v` after clearing every pivot column of the basis.
    pub fn reduce(&self, v: &[F::Elem]) -> Vector<F> {
        let f = &self.field;
        let mut out = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let c = out[p].clone();
            if !f.is_zero(&c) {
                axpy(f, &mut out, &f.neg(&c), row);
            }
        }
        out
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        v.len() == self.ambient && is_zero_vec(&self.field, &self.reduce(v))
    }

    /// Coordinates of `v` in the canonical basis, or `None` if `v` is outside.
    pub fn coordinates(&self, v: &[F::Elem]) -> Option<Vector<F>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn contains_subspace(&self, other: &Subspace<F>) -> bool {
        other.ambient == self.ambient && other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace<F>) -> Result<Subspace<F>> {
        self.check(other)?;
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Subspace::from_vectors(&self.field, self.ambient, vs)
    }

    /// Intersection through the kernel of the stacked system
    /// `sum x_i a_i - sum y_j b_j = 0`.
    pub fn intersect(&self, other: &Subspace<F>) -> Result<Subspace<F>> {
        self.check(other)?;
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(f, self.ambient));
        }
        let (r, s) = (self.dim(), other.dim());
        let mut sys = Matrix::zeros(f, self.ambient, r + s);
        for (i, a) in self.basis.iter().enumerate() {
            for (k, x) in a.iter().enumerate() {
                sys.set(k, i, x.clone());
            }
        }
        for (j, b) in other.basis.iter().enumerate() {
            for (k, x) in b.iter().enumerate() {
                sys.set(k, r + j, f.neg(x));
            }
        }
        let ker = sys.kernel();
        let vecs = ker
            .basis()
            .iter()
            .map(|sol| {
                let mut v = vec![f.zero(); self.ambient];
                for (i, a) in self.basis.iter().enumerate() {
                    axpy(f, &mut v, &sol[i], a);
                }
                v
            })
            .collect();
        Subspace::from_vectors(f, self.ambient, vecs)
    }

    /// Vectors of `big` whose span complements `self` inside `big`: the
    /// canonical basis vectors of `big` are taken greedily in order whenever
    /// they are independent of `self` and of those already chosen.
    pub fn quotient_basis(big: &Subspace<F>, small: &Subspace<F>) -> Result<Vec<Vector<F>>> {
        big.check(small)?;
        if !big.contains_subspace(small) {
            return Err(Error::NotSubspace("the smaller space is not contained in the larger one".into()));
        }
        let mut acc = small.clone();
        let mut chosen = Vec::new();
        for v in &big.basis {
            if acc.dim() == big.dim() {
                break;
            }
            if !acc.contains(v) {
                acc = acc.with_vector(v.clone());
                chosen.push(v.clone());
            }
        }
        Ok(chosen)
    }

    /// Deterministic complement `c` of `self` in `big`: `self + c = big` and `self ∩ c = 0`.
    pub fn complement_in(&self, big: &Subspace<F>) -> Result<Subspace<F>> {
        let vs = Subspace::quotient_basis(big, self)?;
        Subspace::from_vectors(&self.field, self.ambient, vs)
    }

    /// `self + span(v)`, keeping the canonical form.
    pub fn with_vector(&self, v: Vector<F>) -> Subspace<F> {
        let f = &self.field;
        let mut r = self.reduce(&v);
        let Some(p) = r.iter().position(|x| !f.is_zero(x)) else {
            return self.clone();
        };
        let inv = f.inv(&r[p]).expect("nonzero");
        r = scale(f, &inv, &r);
        let mut basis = Vec::with_capacity(self.basis.len() + 1);
        let mut pivots = Vec::with_capacity(self.basis.len() + 1);
        let mut inserted = false;
        for (row, &q) in self.basis.iter().zip(&self.pivots) {
            if !inserted && p < q {
                basis.push(r.clone());
                pivots.push(p);
                inserted = true;
            }
            let mut row = row.clone();
            let c = row[p].clone();
            if !f.is_zero(&c) {
                axpy(f, &mut row, &f.neg(&c), &r);
            }
            basis.push(row);
            pivots.push(q);
        }
        if !inserted {
            basis.push(r);
            pivots.push(p);
        }
        Subspace { field: f.clone(), ambient: self.ambient, basis, pivots }
    }
}
