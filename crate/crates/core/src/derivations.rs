//! Derivations, inner derivations, a complement of `Inn` in `Der`, the
//! spaces `D_z` and the candidate refinement loop.
//!
//! A derivation is stored flattened row-major: entry `(j, k)` sits at index
//! `j * n + k` and means `d(b_j) = sum_k d[j, k] b_k`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liealg::StructureTable;
use crate::linalg::{axpy, Matrix, Subspace, Vector};
use crate::scalars::Field;

/// Image of `x` under the flattened derivation `d`.
pub fn apply<F: Field>(field: &F, n: usize, d: &[F::Elem], x: &[F::Elem]) -> Vector<F> {
    let mut out = vec![field.zero(); n];
    for (j, xj) in x.iter().enumerate() {
        if !field.is_zero(xj) {
            axpy(field, &mut out, xj, &d[j * n..(j + 1) * n]);
        }
    }
    out
}

/// Operator commutator `a∘b − b∘a`, which in row convention is `B·A − A·B`.
pub fn commutator<F: Field>(field: &F, n: usize, a: &[F::Elem], b: &[F::Elem]) -> Vector<F> {
    let mut out = vec![field.zero(); n * n];
    for j in 0..n {
        for m in 0..n {
            let (bjm, ajm) = (&b[j * n + m], &a[j * n + m]);
            for k in 0..n {
                let t = field.sub(&field.mul(bjm, &a[m * n + k]), &field.mul(ajm, &b[m * n + k]));
                out[j * n + k] = field.add(&out[j * n + k], &t);
            }
        }
    }
    out
}

/// Flattened `ad(a)`.
pub fn inner<F: Field>(t: &StructureTable<F>, a: &[F::Elem]) -> Vector<F> {
    let (f, n) = (t.field(), t.dim());
    let mut out = vec![f.zero(); n * n];
    for (i, ai) in a.iter().enumerate() {
        if f.is_zero(ai) {
            continue;
        }
        for j in 0..n {
            axpy(f, &mut out[j * n..(j + 1) * n], ai, t.bracket_basis0(i, j));
        }
    }
    out
}

pub fn reshape<F: Field>(field: &F, n: usize, d: &[F::Elem]) -> Result<Matrix<F>> {
    if d.len() != n * n {
        return Err(Error::Dimension(format!("flattened derivation has {} entries, expected {}", d.len(), n * n)));
    }
    Matrix::from_rows(field, n, d.chunks(n).map(|r| r.to_vec()).collect())
}

pub fn flatten<F: Field>(m: &Matrix<F>) -> Vector<F> {
    m.row_vecs().into_iter().flatten().collect()
}

/// Leibniz rule on every basis pair `i < j`.
pub fn is_derivation<F: Field>(t: &StructureTable<F>, d: &[F::Elem]) -> bool {
    let (f, n) = (t.field(), t.dim());
    if d.len() != n * n {
        return false;
    }
    for i in 0..n {
        for j in i + 1..n {
            let bi = t.basis_vector(i + 1);
            let bj = t.basis_vector(j + 1);
            let lhs = apply(f, n, d, t.bracket_basis0(i, j));
            let r1 = t.bracket(&apply(f, n, d, &bi), &bj).expect("dimensions agree");
            let r2 = t.bracket(&bi, &apply(f, n, d, &bj)).expect("dimensions agree");
            if lhs.iter().zip(r1.iter().zip(&r2)).any(|(l, (a, b))| !f.is_zero(&f.sub(l, &f.add(a, b)))) {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq)]
pub enum DerivationTag<F: Field> {
    Inner(Vector<F>),
    Candidate,
    CertifiedAid,
}

/// A derivation with its `n x n` coefficient matrix (row `j` = `d(b_j)`).
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation<F: Field> {
    pub matrix: Matrix<F>,
    pub tag: DerivationTag<F>,
}

impl<F: Field> Derivation<F> {
    pub fn from_flat(t: &StructureTable<F>, d: &[F::Elem], tag: DerivationTag<F>) -> Result<Self> {
        if !is_derivation(t, d) {
            return Err(Error::Input("matrix violates the Leibniz rule".into()));
        }
        Ok(Derivation { matrix: reshape(t.field(), t.dim(), d)?, tag })
    }

    pub fn inner(t: &StructureTable<F>, a: &[F::Elem]) -> Self {
        let d = inner(t, a);
        Derivation { matrix: reshape(t.field(), t.dim(), &d).expect("square"), tag: DerivationTag::Inner(a.to_vec()) }
    }

    pub fn flat(&self) -> Vector<F> {
        flatten(&self.matrix)
    }

    pub fn apply(&self, x: &[F::Elem]) -> Vector<F> {
        apply(self.matrix.field(), self.matrix.rows(), &self.flat(), x)
    }

    pub fn bracket(&self, other: &Derivation<F>) -> Derivation<F> {
        let n = self.matrix.rows();
        let c = commutator(self.matrix.field(), n, &self.flat(), &other.flat());
        Derivation { matrix: reshape(self.matrix.field(), n, &c).expect("square"), tag: DerivationTag::Candidate }
    }
}

/// Null space of the Leibniz system in the `n²` unknowns `d[j, k]`.
pub fn compute_der<F: Field>(t: &StructureTable<F>) -> Subspace<F> {
    let (f, n) = (t.field(), t.dim());
    let pairs = n * n.saturating_sub(1) / 2;
    let mut sys = Matrix::zeros(f, pairs * n, n * n);
    let mut row = 0;
    for i in 0..n {
        for j in i + 1..n {
            for l in 0..n {
                for k in 0..n {
                    // sigma_ij^k d_kl - sigma_kj^l d_ik - sigma_ik^l d_jk
                    let mut add = |col: usize, c: &F::Elem, negate: bool| {
                        if !f.is_zero(c) {
                            let c = if negate { f.neg(c) } else { c.clone() };
                            let cur = f.add(sys.get(row, col), &c);
                            sys.set(row, col, cur);
                        }
                    };
                    add(k * n + l, t.sigma0(i, j, k), false);
                    add(i * n + k, t.sigma0(k, j, l), true);
                    add(j * n + k, t.sigma0(i, k, l), true);
                }
                row += 1;
            }
        }
    }
    sys.kernel()
}

/// Span of `ad(b_1), ..., ad(b_n)`.
pub fn compute_inn<F: Field>(t: &StructureTable<F>) -> Subspace<F> {
    let n = t.dim();
    let gens = (1..=n).map(|i| inner(t, &t.basis_vector(i))).collect();
    Subspace::from_vectors(t.field(), n * n, gens).expect("lengths agree")
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivationSpaces<F: Field> {
    pub der: Subspace<F>,
    pub inn: Subspace<F>,
    pub complement_u: Subspace<F>,
}

/// Panics on tables failing the Jacobi identity; see [`try_compute_spaces`].
pub fn compute_spaces<F: Field>(t: &StructureTable<F>) -> DerivationSpaces<F> {
    try_compute_spaces(t).expect("table satisfies the Jacobi identity")
}

/// Fails when some `ad(b_i)` is not a derivation, which happens exactly when
/// an unvalidated table breaks the Jacobi identity.
pub fn try_compute_spaces<F: Field>(t: &StructureTable<F>) -> Result<DerivationSpaces<F>> {
    let der = compute_der(t);
    let inn = compute_inn(t);
    let reps = Subspace::quotient_basis(&der, &inn)
        .map_err(|_| Error::Input("inner derivations are not derivations: the table fails the Jacobi identity".into()))?;
    let complement_u = Subspace::from_vectors(t.field(), t.dim() * t.dim(), reps)?;
    Ok(DerivationSpaces { der, inn, complement_u })
}

/// `{d ∈ space : d(z) ∈ [z, g]}`.
pub fn restrict_to_inner_at<F: Field>(t: &StructureTable<F>, space: &Subspace<F>, z: &[F::Elem]) -> Result<Subspace<F>> {
    let (f, n) = (t.field(), t.dim());
    if z.len() != n {
        return Err(Error::Dimension(format!("point has {} coordinates, algebra has dimension {n}", z.len())));
    }
    if space.is_zero() {
        return Ok(space.clone());
    }
    let image = Subspace::from_vectors(f, n, (1..=n).map(|j| t.bracket(z, &t.basis_vector(j))).collect::<Result<_>>()?)?;
    let basis = space.basis();
    let mut sys = Matrix::zeros(f, n, basis.len());
    for (s, d) in basis.iter().enumerate() {
        for (k, c) in image.reduce(&apply(f, n, d, z)).into_iter().enumerate() {
            sys.set(k, s, c);
        }
    }
    let kernel = sys.kernel();
    let vectors = kernel
        .basis()
        .iter()
        .map(|c| {
            let mut v = vec![f.zero(); n * n];
            for (cs, d) in c.iter().zip(basis) {
                if !f.is_zero(cs) {
                    axpy(f, &mut v, cs, d);
                }
            }
            v
        })
        .collect();
    Subspace::from_vectors(f, n * n, vectors)
}

/// `D_z0`: the derivations of the complement that agree with some `ad(x)` on `z0`.
#[allow(non_snake_case)]
pub fn compute_D_z0<F: Field>(spaces: &DerivationSpaces<F>, t: &StructureTable<F>, z0: &[F::Elem]) -> Result<Subspace<F>> {
    restrict_to_inner_at(t, &spaces.complement_u, z0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbePlan {
    pub seed: u64,
    pub budget: usize,
    pub patience: usize,
}

impl Default for ProbePlan {
    fn default() -> Self {
        ProbePlan { seed: 0, budget: 2000, patience: 25 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    Basis,
    Pair,
    Random,
}

/// A probe that shrank the candidate space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeEvent {
    pub index: usize,
    pub kind: ProbeKind,
    pub z: Vec<String>,
    pub dim_after: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeLog {
    pub plan: ProbePlan,
    pub start_dim: usize,
    pub probes_used: usize,
    pub final_dim: usize,
    pub events: Vec<ProbeEvent>,
}

/// Deterministic probe sequence: basis vectors, pairwise sums, then seeded
/// random vectors, capped at `plan.budget` in total.
pub fn probe_points<'a, F: Field>(t: &'a StructureTable<F>, plan: &ProbePlan) -> impl Iterator<Item = (ProbeKind, Vector<F>)> + 'a {
    let n = t.dim();
    let f = t.field().clone();
    let basis = (1..=n).map(move |i| (ProbeKind::Basis, t.basis_vector(i)));
    let pairs = (0..n).flat_map(move |i| {
        (i + 1..n).map(move |j| {
            let mut v = t.zero_vector();
            v[i] = t.field().one();
            v[j] = t.field().one();
            (ProbeKind::Pair, v)
        })
    });
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let random = std::iter::repeat_with(move || {
        // support size uniform in 1..=n, so low-rank loci are hit often
        let support = rng.random_range(1..=n.max(1));
        let mut v: Vec<F::Elem> = vec![f.zero(); n];
        for i in rand::seq::index::sample(&mut rng, n, support.min(n)) {
            v[i] = f.random(&mut rng);
        }
        (ProbeKind::Random, v)
    });
    basis.chain(pairs).chain(random).take(plan.budget)
}

/// Intersects the complement with `D_z` over the probe plan. A phase is
/// abandoned after `patience` consecutive probes that leave the space
/// unchanged; the loop ends when the space is zero or the random phase stalls.
pub fn refine_candidates<F: Field>(spaces: &DerivationSpaces<F>, t: &StructureTable<F>, plan: &ProbePlan) -> (Subspace<F>, ProbeLog) {
    refine_from(t, &spaces.complement_u, plan)
}

/// The refinement loop of [`refine_candidates`] started from any space of derivations.
pub fn refine_from<F: Field>(t: &StructureTable<F>, start: &Subspace<F>, plan: &ProbePlan) -> (Subspace<F>, ProbeLog) {
    let f = t.field();
    let mut v = start.clone();
    let start_dim = v.dim();
    let mut events = Vec::new();
    let mut stable = 0;
    let mut used = 0;
    let mut phase = ProbeKind::Basis;
    for (index, (kind, z)) in probe_points(t, plan).enumerate() {
        if kind != phase {
            // each phase gets its own patience window
            phase = kind;
            stable = 0;
        }
        if v.is_zero() || stable >= plan.patience {
            if kind == ProbeKind::Random || v.is_zero() {
                break;
            }
            continue;
        }
        used = index + 1;
        let next = restrict_to_inner_at(t, &v, &z).expect("probe has the algebra's dimension");
        if next.dim() < v.dim() {
            stable = 0;
            events.push(ProbeEvent { index, kind, z: z.iter().map(|c| f.render(c)).collect(), dim_after: next.dim() });
            v = next;
        } else {
            stable += 1;
        }
    }
    let final_dim = v.dim();
    (v, ProbeLog { plan: *plan, start_dim, probes_used: used, final_dim, events })
}
