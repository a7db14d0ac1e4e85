//! Quotients of derivation algebras: `Sha(g) = AID(g)/Inn(g)` and
//! `Out(g) = Der(g)/Inn(g)`, with structure constants on coset representatives.

use crate::derivations::commutator;
use crate::error::{Error, Result};
use crate::liealg::{StructureTable, TableJson};
use crate::linalg::{Matrix, Subspace, Vector};
use crate::scalars::Field;

#[derive(Debug, Clone)]
pub struct QuotientAlgebra<F: Field> {
    pub coset_reps: Vec<Vector<F>>,
    pub table: StructureTable<F>,
    pub denominator: Subspace<F>,
    /// Whether the span of the representatives is itself closed under the bracket.
    pub reps_closed: bool,
}

/// Quotient with representatives chosen by [`Subspace::quotient_basis`].
pub fn build_quotient<F: Field>(name: &str, numerator: &Subspace<F>, denominator: &Subspace<F>, t: &StructureTable<F>) -> Result<QuotientAlgebra<F>> {
    let reps = Subspace::quotient_basis(numerator, denominator)?;
    build_quotient_with_reps(name, reps, denominator, t)
}

/// Quotient of `denominator ⊕ span(reps)` by `denominator`.
pub fn build_quotient_with_reps<F: Field>(name: &str, reps: Vec<Vector<F>>, denominator: &Subspace<F>, t: &StructureTable<F>) -> Result<QuotientAlgebra<F>> {
    let (f, n) = (t.field(), t.dim());
    let nn = n * n;
    let m = reps.len();
    if let Some(bad) = reps.iter().chain(denominator.basis()).find(|v| v.len() != nn) {
        return Err(Error::Dimension(format!("derivation with {} entries, expected {nn}", bad.len())));
    }
    let numerator = denominator.sum(&Subspace::from_vectors(f, nn, reps.clone())?)?;
    if numerator.dim() != denominator.dim() + m {
        return Err(Error::NotSubspace("representatives are dependent modulo the denominator".into()));
    }
    let den = denominator.basis();
    for (a, x) in reps.iter().enumerate() {
        for (b, d) in den.iter().enumerate() {
            if !denominator.contains(&commutator(f, n, x, d)) {
                return Err(Error::NotIdeal(format!("representative {}", a + 1), format!("denominator basis element {}", b + 1)));
            }
        }
    }
    for (a, x) in den.iter().enumerate() {
        for y in &den[a + 1..] {
            if !denominator.contains(&commutator(f, n, x, y)) {
                return Err(Error::NotClosed("denominator is not a subalgebra".into()));
            }
        }
    }
    // columns: representatives, then the denominator basis
    let mut cols: Vec<&Vector<F>> = reps.iter().collect();
    cols.extend(den.iter());
    let mut basis = Matrix::zeros(f, nn, cols.len());
    for (c, v) in cols.iter().enumerate() {
        for (r, x) in v.iter().enumerate() {
            basis.set(r, c, x.clone());
        }
    }
    let rep_span = Subspace::from_vectors(f, nn, reps.clone())?;
    let mut reps_closed = true;
    let mut entries = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            let c = commutator(f, n, &reps[a], &reps[b]);
            let coords = basis
                .solve(&c)?
                .ok_or_else(|| Error::NotClosed(format!("bracket of representatives {} and {} leaves the numerator", a + 1, b + 1)))?;
            reps_closed &= rep_span.contains(&c);
            for (k, x) in coords[..m].iter().enumerate() {
                if !f.is_zero(x) {
                    entries.push((a + 1, b + 1, k + 1, x.clone()));
                }
            }
        }
    }
    let table = StructureTable::new(name, f, m, entries)?;
    Ok(QuotientAlgebra { coset_reps: reps, table, denominator: denominator.clone(), reps_closed })
}

pub fn is_abelian<F: Field>(q: &QuotientAlgebra<F>) -> bool {
    q.table.entries().is_empty()
}

/// Bracket of cosets given by coordinates in the representative basis.
pub fn bracket_cosets<F: Field>(q: &QuotientAlgebra<F>, x: &[F::Elem], y: &[F::Elem]) -> Result<Vector<F>> {
    q.table.bracket(x, y)
}

/// Coordinates of the coset of `d` in the representative basis.
pub fn coset_of<F: Field>(q: &QuotientAlgebra<F>, d: &[F::Elem]) -> Result<Vector<F>> {
    let f = q.table.field();
    let nn = d.len();
    let mut cols: Vec<&Vector<F>> = q.coset_reps.iter().collect();
    cols.extend(q.denominator.basis().iter());
    let mut basis = Matrix::zeros(f, nn, cols.len());
    for (c, v) in cols.iter().enumerate() {
        for (r, x) in v.iter().enumerate() {
            basis.set(r, c, x.clone());
        }
    }
    let coords = basis.solve(d)?.ok_or_else(|| Error::NotSubspace("derivation outside the numerator".into()))?;
    Ok(coords[..q.coset_reps.len()].to_vec())
}

pub fn quotient_json<F: Field>(q: &QuotientAlgebra<F>) -> TableJson {
    q.table.to_json()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aidcert::{compute_aid, AidConfig};
    use crate::catalog::{derivation_from_images, g3_sah, g6_23, heisenberg3, G3_D1, G3_D2};
    use crate::derivations::{compute_spaces, inner};
    use crate::scalars::{FiniteField, Rationals};
    use rand::{Rng, SeedableRng};

    #[test]
    fn trivial_quotients() {
        let q = Rationals;
        let t = g6_23(&q);
        let s = compute_spaces(&t);
        let z = build_quotient("zero", &s.inn, &s.inn, &t).unwrap();
        assert_eq!(z.table.dim(), 0);
        assert!(is_abelian(&z));
        let a = StructureTable::abelian(&q, 3);
        let r = compute_aid(&a, &AidConfig::default()).unwrap();
        let sha = build_quotient("sha", &r.lower, &r.spaces.inn, &a).unwrap();
        assert_eq!(sha.table.dim(), 0);
        assert!(is_abelian(&sha));
    }

    #[test]
    fn out_of_heisenberg_is_a_lie_algebra() {
        let q = Rationals;
        let t = heisenberg3(&q);
        let s = compute_spaces(&t);
        let out = build_quotient("out", &s.der, &s.inn, &t).unwrap();
        assert_eq!(out.table.dim(), s.der.dim() - s.inn.dim());
        out.table.validate().unwrap();
        // gl2 acting on span(b1, b2) is not abelian
        assert!(!is_abelian(&out));
        // brackets of representatives reduce to the table constants
        for (a, x) in out.coset_reps.iter().enumerate() {
            for (b, y) in out.coset_reps.iter().enumerate() {
                let got = coset_of(&out, &commutator(&q, 3, x, y)).unwrap();
                let (ea, eb) = (out.table.basis_vector(a + 1), out.table.basis_vector(b + 1));
                assert_eq!(got, bracket_cosets(&out, &ea, &eb).unwrap());
            }
        }
    }

    #[test]
    fn well_defined_on_cosets() {
        let q = Rationals;
        let t = g6_23(&q);
        let r = compute_aid(&t, &AidConfig::default()).unwrap();
        let sha = build_quotient("sha", &r.lower, &r.spaces.inn, &t).unwrap();
        assert_eq!(sha.table.dim(), 2);
        for x in &sha.coset_reps {
            for y in &sha.coset_reps {
                for d in r.spaces.inn.basis() {
                    let shifted: Vec<_> = x.iter().zip(d).map(|(a, b)| q.add(a, b)).collect();
                    let diff: Vec<_> =
                        commutator(&q, 6, &shifted, y).iter().zip(commutator(&q, 6, x, y)).map(|(a, b)| q.sub(a, &b)).collect();
                    assert!(r.spaces.inn.contains(&diff));
                }
            }
        }
        // oracle: direct bracket of the two representatives reduced modulo Inn
        let c = commutator(&q, 6, &sha.coset_reps[0], &sha.coset_reps[1]);
        assert_eq!(is_abelian(&sha), r.spaces.inn.contains(&c));
    }

    #[test]
    fn non_ideal_is_rejected() {
        let q = Rationals;
        let t = heisenberg3(&q);
        let s = compute_spaces(&t);
        // span(ad b1) is not an ideal of Der
        let small = Subspace::from_vectors(&q, 9, vec![inner(&t, &t.basis_vector(1))]).unwrap();
        assert!(matches!(build_quotient("x", &s.der, &small, &t), Err(Error::NotIdeal(..))));
    }

    #[test]
    fn sha_of_g3_is_non_abelian() {
        let f = FiniteField::prime(3).unwrap();
        let t = g3_sah(&f);
        let s = compute_spaces(&t);
        // the refined complement (dimension 21), as certified by the scan in the acceptance suite
        let (v, _) = crate::derivations::refine_candidates(&s, &t, &Default::default());
        let sha = build_quotient_with_reps("sha", v.basis().to_vec(), &s.inn, &t).unwrap();
        assert_eq!(sha.table.dim(), 21);
        assert!(!is_abelian(&sha));
        sha.table.validate().unwrap();
        let d1 = derivation_from_images(&f, 15, G3_D1);
        let d2 = derivation_from_images(&f, 15, G3_D2);
        let (c1, c2) = (coset_of(&sha, &d1).unwrap(), coset_of(&sha, &d2).unwrap());
        let br = bracket_cosets(&sha, &c1, &c2).unwrap();
        assert!(br.iter().any(|x| !f.is_zero(x)));
        assert!(!s.inn.contains(&commutator(&f, 15, &d1, &d2)));
        // Jacobi on random coset triples
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let mut pick = || (0..21).map(|_| f.from_i64(rng.random_range(0..3))).collect::<Vec<_>>();
            let (x, y, z) = (pick(), pick(), pick());
            let j1 = bracket_cosets(&sha, &bracket_cosets(&sha, &x, &y).unwrap(), &z).unwrap();
            let j2 = bracket_cosets(&sha, &bracket_cosets(&sha, &y, &z).unwrap(), &x).unwrap();
            let j3 = bracket_cosets(&sha, &bracket_cosets(&sha, &z, &x).unwrap(), &y).unwrap();
            assert!((0..21).all(|k| f.is_zero(&f.add(&f.add(&j1[k], &j2[k]), &j3[k]))));
            assert!(bracket_cosets(&sha, &x, &x).unwrap().iter().all(|c| f.is_zero(c)));
        }
    }
}
