//! Lie algebras given by structure constants on a fixed basis `b_1, ..., b_n`.
//!
//! Basis indices are 1-based in every public constructor, error and file
//! format; the dense tables inside are 0-based.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, Matrix, Subspace, Vector};
use crate::scalars::{Field, FieldSpec};

/// Coordinates of an element over the fixed basis.
pub type LieVector<F> = Vector<F>;

#[derive(Debug, Clone, PartialEq)]
pub struct StructureTable<F: Field> {
    name: String,
    field: F,
    dim: usize,
    /// sigma[(i*n + j)*n + k] = coefficient of b_k in [b_i, b_j], all i, j.
    sigma: Vec<F::Elem>,
}

impl<F: Field> StructureTable<F> {
    /// Builds a table from entries `(i, j, k, c)` meaning `[b_i, b_j]` has
    /// `c` as coefficient of `b_k`; only `i < j` may be given. Repeated
    /// entries for the same `(i, j, k)` are added.
    pub fn new(name: impl Into<String>, field: &F, dim: usize, entries: Vec<(usize, usize, usize, F::Elem)>) -> Result<Self> {
        let mut sigma = vec![field.zero(); dim * dim * dim];
        for (i, j, k, c) in entries {
            if i == 0 || j == 0 || k == 0 || i > dim || j > dim || k > dim {
                return Err(Error::IndexOutOfRange(format!("({i}, {j}, {k}) in dimension {dim}")));
            }
            if i >= j {
                return Err(Error::Input(format!("bracket [b{i}, b{j}] must be listed with i < j")));
            }
            let (i, j, k) = (i - 1, j - 1, k - 1);
            let at = (i * dim + j) * dim + k;
            sigma[at] = field.add(&sigma[at], &c);
            let at = (j * dim + i) * dim + k;
            sigma[at] = field.sub(&sigma[at], &c);
        }
        Ok(StructureTable { name: name.into(), field: field.clone(), dim, sigma })
    }

    /// Same as [`StructureTable::new`] with small integer constants.
    pub fn from_int_brackets(name: &str, field: &F, dim: usize, brackets: &[(usize, usize, &[(usize, i64)])]) -> Result<Self> {
        let entries = brackets
            .iter()
            .flat_map(|&(i, j, terms)| terms.iter().map(move |&(k, c)| (i, j, k, field.from_i64(c))))
            .collect();
        Self::new(name, field, dim, entries)
    }

    pub fn abelian(field: &F, dim: usize) -> Self {
        Self::new(format!("abelian({dim})"), field, dim, Vec::new()).expect("no entries")
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// sigma_{i,j}^k with 0-based indices.
    #[inline]
    pub fn sigma0(&self, i: usize, j: usize, k: usize) -> &F::Elem {
        &self.sigma[(i * self.dim + j) * self.dim + k]
    }

    /// sigma_{i,j}^k with 1-based indices.
    pub fn constant(&self, i: usize, j: usize, k: usize) -> &F::Elem {
        self.sigma0(i - 1, j - 1, k - 1)
    }

    /// Coordinates of `[b_i, b_j]` (0-based).
    pub fn bracket_basis0(&self, i: usize, j: usize) -> &[F::Elem] {
        let start = (i * self.dim + j) * self.dim;
        &self.sigma[start..start + self.dim]
    }

    /// Nonzero entries `(i, j, k, c)` with `i < j`, 1-based, in index order.
    pub fn entries(&self) -> Vec<(usize, usize, usize, F::Elem)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let c = self.sigma0(i, j, k);
                    if !self.field.is_zero(c) {
                        out.push((i + 1, j + 1, k + 1, c.clone()));
                    }
                }
            }
        }
        out
    }

    pub fn basis_vector(&self, i: usize) -> LieVector<F> {
        let mut v = vec![self.field.zero(); self.dim];
        v[i - 1] = self.field.one();
        v
    }

    pub fn zero_vector(&self) -> LieVector<F> {
        vec![self.field.zero(); self.dim]
    }

    pub fn bracket(&self, x: &[F::Elem], y: &[F::Elem]) -> Result<LieVector<F>> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(Error::Dimension(format!(
                "vectors of length {} and {} in dimension {}",
                x.len(),
                y.len(),
                self.dim
            )));
        }
        let f = &self.field;
        let mut out = self.zero_vector();
        for (i, xi) in x.iter().enumerate() {
            if f.is_zero(xi) {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if f.is_zero(yj) || i == j {
                    continue;
                }
                axpy(f, &mut out, &f.mul(xi, yj), self.bracket_basis0(i, j));
            }
        }
        Ok(out)
    }

    /// Jacobi check on all basis triples `i < j < k`; the error names the
    /// first violating triple (1-based).
    pub fn validate(&self) -> Result<()> {
        let n = self.dim;
        let f = &self.field;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (bi, bj, bk) = (self.basis_vector(i + 1), self.basis_vector(j + 1), self.basis_vector(k + 1));
                    let t1 = self.bracket(&self.bracket(&bi, &bj)?, &bk)?;
                    let t2 = self.bracket(&self.bracket(&bj, &bk)?, &bi)?;
                    let t3 = self.bracket(&self.bracket(&bk, &bi)?, &bj)?;
                    if t1.iter().zip(&t2).zip(&t3).any(|((a, b), c)| !f.is_zero(&f.add(&f.add(a, b), c))) {
                        return Err(Error::Jacobi(i + 1, j + 1, k + 1));
                    }
                }
            }
        }
        Ok(())
    }

    /// Matrix of `b -> [a, b]` acting on coordinate columns: column `j`
    /// holds `[a, b_j]`.
    pub fn ad_matrix(&self, a: &[F::Elem]) -> Result<Matrix<F>> {
        let f = &self.field;
        let mut m = Matrix::zeros(f, self.dim, self.dim);
        for j in 0..self.dim {
            let col = self.bracket(a, &self.basis_vector(j + 1))?;
            for (k, c) in col.into_iter().enumerate() {
                m.set(k, j, c);
            }
        }
        Ok(m)
    }

    /// The centre, as the kernel of `z -> ([z, b_1], ..., [z, b_n])`.
    pub fn center(&self) -> Subspace<F> {
        let n = self.dim;
        let mut sys = Matrix::zeros(&self.field, n * n, n);
        for j in 0..n {
            for k in 0..n {
                for i in 0..n {
                    sys.set(j * n + k, i, self.sigma0(i, j, k).clone());
                }
            }
        }
        sys.kernel()
    }

    /// The same constants read in a larger field.
    pub fn extend_scalars<G: Field>(&self, target: &G) -> Result<StructureTable<G>> {
        let (from, to) = (self.field.spec(), target.spec());
        if !embeds(&from, &to) {
            return Err(Error::NoEmbedding { from: from.to_string(), to: to.to_string() });
        }
        let entries = self
            .entries()
            .into_iter()
            .map(|(i, j, k, c)| {
                let q = self.field.as_rational(&c).ok_or_else(|| Error::NoEmbedding {
                    from: from.to_string(),
                    to: to.to_string(),
                })?;
                Ok((i, j, k, target.from_rational(&q)?))
            })
            .collect::<Result<Vec<_>>>()?;
        StructureTable::new(format!("{}@{}", self.name, to), target, self.dim, entries)
    }

    pub fn to_json(&self) -> TableJson {
        let mut brackets: Vec<BracketJson> = Vec::new();
        for (i, j, k, c) in self.entries() {
            let term = TermJson { k, c: self.field.render(&c) };
            match brackets.last_mut() {
                Some(b) if b.i == i && b.j == j => b.terms.push(term),
                _ => brackets.push(BracketJson { i, j, terms: vec![term] }),
            }
        }
        TableJson { name: self.name.clone(), field: self.field.spec(), dim: self.dim, brackets }
    }

    pub fn from_json(field: &F, json: &TableJson, validate: bool) -> Result<Self> {
        if field.spec() != json.field {
            return Err(Error::FieldMismatch(format!("{} vs {}", field.spec(), json.field)));
        }
        let mut entries = Vec::new();
        for b in &json.brackets {
            if b.i == 0 || b.j > json.dim || b.i >= b.j {
                return Err(Error::Input(format!("bracket [b{}, b{}] must satisfy 1 <= i < j <= {}", b.i, b.j, json.dim)));
            }
            for t in &b.terms {
                entries.push((b.i, b.j, t.k, field.parse(&t.c)?));
            }
        }
        let table = StructureTable::new(json.name.clone(), field, json.dim, entries)?;
        if validate {
            table.validate()?;
        }
        Ok(table)
    }
}

/// Whether `from` sits canonically inside `to`.
pub fn embeds(from: &FieldSpec, to: &FieldSpec) -> bool {
    match (from, to) {
        (a, b) if a == b => true,
        (FieldSpec::Rational, FieldSpec::GaussianRational) => true,
        (FieldSpec::Finite { p, k: 1, .. }, FieldSpec::Finite { p: q, .. }) => p == q,
        _ => false,
    }
}

/// On-disk structure-constant format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableJson {
    pub name: String,
    pub field: FieldSpec,
    pub dim: usize,
    pub brackets: Vec<BracketJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketJson {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub k: usize,
    pub c: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::scalars::{FiniteField, Rationals};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn abelian_is_valid_and_flat() {
        let t = StructureTable::abelian(&Rationals, 5);
        t.validate().unwrap();
        assert!(t.ad_matrix(&t.basis_vector(2)).unwrap().is_zero());
        assert_eq!(t.center().dim(), 5);
    }

    #[test]
    fn g623_brackets_and_adjoint() {
        let q = Rationals;
        let t = catalog::g6_23(&q);
        assert_eq!(t.bracket(&t.basis_vector(1), &t.basis_vector(2)).unwrap(), t.basis_vector(3));
        let x: Vec<_> = (1..=6).map(|i| q.from_i64(i * i - 3)).collect();
        assert!(t.bracket(&x, &x).unwrap().iter().all(|c| q.is_zero(c)));
        let ad1 = t.ad_matrix(&t.basis_vector(1)).unwrap();
        let expected_images = [(2, 3), (3, 5), (4, 6)];
        for j in 1..=6 {
            let col = ad1.column(j - 1);
            match expected_images.iter().find(|&&(src, _)| src == j) {
                Some(&(_, dst)) => assert_eq!(col, t.basis_vector(dst)),
                None => assert!(col.iter().all(|c| q.is_zero(c))),
            }
        }
        let centre = t.center();
        let expected = Subspace::from_vectors(&q, 6, vec![t.basis_vector(5), t.basis_vector(6)]).unwrap();
        assert_eq!(centre, expected);
    }

    #[test]
    fn corrupted_g623_fails_jacobi() {
        let q = Rationals;
        // b5 and b6 are both central, so [b1,b3] = b6 is still a Lie algebra
        let still_valid = StructureTable::from_int_brackets(
            "moved",
            &q,
            6,
            &[(1, 2, &[(3, 1)]), (1, 3, &[(6, 1)]), (1, 4, &[(6, 1)]), (2, 4, &[(5, 1)])],
        )
        .unwrap();
        still_valid.validate().unwrap();
        // [b1,b3] = b4 breaks Jacobi on (b1, b2, b3)
        let bad = StructureTable::from_int_brackets(
            "broken",
            &q,
            6,
            &[(1, 2, &[(3, 1)]), (1, 3, &[(4, 1)]), (1, 4, &[(6, 1)]), (2, 4, &[(5, 1)])],
        )
        .unwrap();
        // first violating triple in index order, by direct evaluation
        let mut first = None;
        'outer: for i in 1..=6 {
            for j in i + 1..=6 {
                for k in j + 1..=6 {
                    let (bi, bj, bk) = (bad.basis_vector(i), bad.basis_vector(j), bad.basis_vector(k));
                    let s: Vec<_> = (0..6)
                        .map(|c| {
                            let a = &bad.bracket(&bad.bracket(&bi, &bj).unwrap(), &bk).unwrap()[c];
                            let b = &bad.bracket(&bad.bracket(&bj, &bk).unwrap(), &bi).unwrap()[c];
                            let d = &bad.bracket(&bad.bracket(&bk, &bi).unwrap(), &bj).unwrap()[c];
                            a + b + d
                        })
                        .collect();
                    if s.iter().any(|x| !q.is_zero(x)) {
                        first = Some((i, j, k));
                        break 'outer;
                    }
                }
            }
        }
        let (i, j, k) = first.expect("the corrupted table violates Jacobi");
        assert_eq!(bad.validate(), Err(Error::Jacobi(i, j, k)));
    }

    #[test]
    fn g3_known_entries() {
        let f = FiniteField::prime(3).unwrap();
        let t = catalog::g3_sah(&f);
        t.validate().unwrap();
        assert_eq!(t.dim(), 15);
        let mut two_v7 = t.zero_vector();
        two_v7[6] = f.from_i64(2);
        assert_eq!(t.bracket(&t.basis_vector(1), &t.basis_vector(2)).unwrap(), two_v7);
        let centre = t.center();
        let expected = Subspace::from_vectors(&f, 15, (13..=15).map(|i| t.basis_vector(i)).collect()).unwrap();
        assert_eq!(centre, expected);
    }

    #[test]
    fn ad_is_a_homomorphism() {
        let f = FiniteField::prime(3).unwrap();
        let t = catalog::g3_sah(&f);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a: Vec<_> = (0..15).map(|_| f.random(&mut rng)).collect();
            let b: Vec<_> = (0..15).map(|_| f.random(&mut rng)).collect();
            let x: Vec<_> = (0..15).map(|_| f.random(&mut rng)).collect();
            let lhs = t.bracket(&t.bracket(&a, &b).unwrap(), &x).unwrap();
            let (ada, adb) = (t.ad_matrix(&a).unwrap(), t.ad_matrix(&b).unwrap());
            let rhs: Vec<_> = ada
                .mul(&adb)
                .unwrap()
                .sub(&adb.mul(&ada).unwrap())
                .unwrap()
                .mul_vec(&x)
                .unwrap();
            assert_eq!(lhs, rhs);
            assert!(t.ad_matrix(&a).unwrap().mul_vec(&a).unwrap().iter().all(|c| f.is_zero(c)));
        }
        for z in t.center().basis() {
            assert!(t.ad_matrix(z).unwrap().is_zero());
        }
    }

    #[test]
    fn heisenberg_centre() {
        let t = catalog::heisenberg3(&Rationals);
        let c = t.center();
        assert_eq!(c.dim(), 1);
        assert!(c.contains(&t.basis_vector(3)));
    }

    #[test]
    fn scalar_extension() {
        let f3 = FiniteField::prime(3).unwrap();
        let f27 = FiniteField::with_default_modulus(3, 3).unwrap();
        let a = StructureTable::abelian(&f3, 3).extend_scalars(&f27).unwrap();
        assert_eq!(a.dim(), 3);
        assert_eq!(a.entries().len(), 0);
        let g = catalog::g3_sah(&f3).extend_scalars(&f27).unwrap();
        g.validate().unwrap();
        assert_eq!(g.entries().len(), catalog::g3_sah(&f3).entries().len());
        let f2 = FiniteField::prime(2).unwrap();
        assert!(matches!(
            StructureTable::abelian(&f2, 2).extend_scalars(&f27),
            Err(Error::NoEmbedding { .. })
        ));
    }

    #[test]
    fn rejects_bad_indices() {
        let q = Rationals;
        assert!(StructureTable::from_int_brackets("x", &q, 3, &[(2, 1, &[(3, 1)])]).is_err());
        assert!(StructureTable::from_int_brackets("x", &q, 3, &[(1, 1, &[(3, 1)])]).is_err());
        assert!(matches!(
            StructureTable::from_int_brackets("x", &q, 3, &[(1, 2, &[(4, 1)])]),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let f = FiniteField::prime(3).unwrap();
        let t = catalog::g3_sah(&f);
        let text = serde_json::to_string(&t.to_json()).unwrap();
        let back: TableJson = serde_json::from_str(&text).unwrap();
        assert_eq!(StructureTable::from_json(&f, &back, true).unwrap(), t);
    }
}
