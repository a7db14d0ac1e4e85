//! Built-in fixture algebras and runtime dispatch over the base field.

use crate::error::{Error, Result};
use crate::liealg::{StructureTable, TableJson};
use crate::linalg::{Matrix, Subspace, Vector};
use crate::scalars::{Field, FieldSpec, FiniteField, GaussianRationals, Rationals};

pub fn heisenberg3<F: Field>(field: &F) -> StructureTable<F> {
    StructureTable::from_int_brackets("heisenberg3", field, 3, &[(1, 2, &[(3, 1)])]).expect("valid indices")
}

/// Six-dimensional nilpotent algebra with `[b1,b2]=b3, [b1,b3]=b5, [b1,b4]=b6, [b2,b4]=b5`.
pub fn g6_23<F: Field>(field: &F) -> StructureTable<F> {
    StructureTable::from_int_brackets(
        "g6_23",
        field,
        6,
        &[(1, 2, &[(3, 1)]), (1, 3, &[(5, 1)]), (1, 4, &[(6, 1)]), (2, 4, &[(5, 1)])],
    )
    .expect("valid indices")
}

/// Five-dimensional solvable algebra with `[b1,b4]=b1, [b1,b5]=-b2,
/// [b2,b4]=b2, [b2,b5]=b1, [b4,b5]=b3`.
pub fn dim5_l8211<F: Field>(field: &F) -> StructureTable<F> {
    StructureTable::from_int_brackets(
        "dim5_L8211",
        field,
        5,
        &[
            (1, 4, &[(1, 1)]),
            (1, 5, &[(2, -1)]),
            (2, 4, &[(2, 1)]),
            (2, 5, &[(1, 1)]),
            (4, 5, &[(3, 1)]),
        ],
    )
    .expect("valid indices")
}

/// Fifteen-dimensional algebra over a field of characteristic 3 attached
/// to a group of order 3^15 via its 3-central series.
pub fn g3_sah<F: Field>(field: &F) -> StructureTable<F> {
    const B: &[(usize, usize, &[(usize, i64)])] = &[
        (1, 2, &[(7, 2)]),
        (1, 3, &[(7, 1), (8, 2)]),
        (1, 4, &[(10, 2)]),
        (1, 5, &[(11, 1)]),
        (1, 6, &[(12, 1)]),
        (1, 10, &[(13, 2)]),
        (1, 11, &[(14, 1), (15, 1)]),
        (1, 12, &[(15, 2)]),
        (2, 3, &[(8, 2), (9, 1)]),
        (2, 4, &[(12, 2)]),
        (2, 5, &[(10, 2), (12, 1)]),
        (2, 6, &[(11, 1)]),
        (2, 10, &[(13, 1), (15, 2)]),
        (2, 11, &[(13, 1), (14, 2), (15, 1)]),
        (2, 12, &[(14, 1), (15, 2)]),
        (3, 4, &[(11, 2)]),
        (3, 5, &[(11, 1), (12, 2)]),
        (3, 6, &[(10, 2), (12, 1)]),
        (3, 10, &[(13, 2), (14, 1)]),
        (3, 11, &[(13, 1), (14, 2), (15, 2)]),
        (3, 12, &[(13, 1), (14, 1), (15, 2)]),
        (4, 7, &[(13, 1)]),
        (4, 8, &[(15, 2)]),
        (4, 9, &[(14, 1), (15, 1)]),
        (5, 7, &[(14, 1), (15, 1)]),
        (5, 8, &[(13, 2), (15, 1)]),
        (5, 9, &[(14, 2), (15, 1)]),
        (6, 7, &[(15, 2)]),
        (6, 8, &[(14, 2), (15, 2)]),
        (6, 9, &[(13, 2), (15, 1)]),
    ];
    StructureTable::from_int_brackets("g3_sah", field, 15, B).expect("valid indices")
}

/// The two non-commuting almost-inner derivations of `g3_sah`, as lists
/// of images `(j, [(k, c)])` meaning `d(v_j) = sum c v_k`.
pub const G3_D1: &[(usize, &[(usize, i64)])] = &[
    (2, &[(7, 1)]),
    (3, &[(7, 2), (8, 1)]),
    (4, &[(11, 2), (12, 2)]),
    (5, &[(10, 2)]),
    (6, &[(10, 1)]),
    (10, &[(14, 1)]),
    (11, &[(13, 1)]),
    (12, &[(13, 2)]),
];
pub const G3_D2: &[(usize, &[(usize, i64)])] = &[
    (2, &[(10, 1)]),
    (7, &[(13, 1)]),
    (8, &[(13, 1)]),
    (9, &[(13, 2), (14, 2)]),
];

/// Flattened derivation matrix (row `j` = coordinates of `d(b_j)`) from an image list.
pub fn derivation_from_images<F: Field>(field: &F, n: usize, images: &[(usize, &[(usize, i64)])]) -> Vector<F> {
    let mut v = vec![field.zero(); n * n];
    for &(j, terms) in images {
        for &(k, c) in terms {
            v[(j - 1) * n + (k - 1)] = field.from_i64(c);
        }
    }
    v
}

/// `psl(3)` in characteristic 3: trace-zero 3x3 matrices modulo the
/// scalars (the identity has trace 3 = 0). Coset representatives come from
/// [`Subspace::quotient_basis`] applied to `sl(3)` and the span of the
/// identity, inside the 9-dimensional space of flattened 3x3 matrices.
pub fn psl3_f3<F: Field>(field: &F) -> Result<StructureTable<F>> {
    if field.characteristic() != 3 {
        return Err(Error::InvalidField(format!("psl3_f3 needs characteristic 3, got {}", field.spec())));
    }
    let f = field;
    let unit = |r: usize, c: usize| {
        let mut v = vec![f.zero(); 9];
        v[r * 3 + c] = f.one();
        v
    };
    let mut sl3: Vec<Vector<F>> = Vec::new();
    for r in 0..3 {
        for c in 0..3 {
            if r != c {
                sl3.push(unit(r, c));
            }
        }
    }
    let diff = |a: usize, b: usize| {
        let mut v = unit(a, a);
        v[b * 3 + b] = f.neg(&f.one());
        v
    };
    sl3.push(diff(0, 1));
    sl3.push(diff(1, 2));
    let sl3 = Subspace::from_vectors(f, 9, sl3)?;
    let identity: Vector<F> = (0..9).map(|i| if i % 4 == 0 { f.one() } else { f.zero() }).collect();
    let scalars = Subspace::from_vectors(f, 9, vec![identity.clone()])?;
    let reps = Subspace::quotient_basis(&sl3, &scalars)?;
    let dim = reps.len();

    // columns: reps..., identity; solve for coordinates of each commutator
    let mut cols = reps.clone();
    cols.push(identity);
    let basis_matrix = Matrix::from_rows(f, 9, cols)?.transpose();
    let mat = |v: &Vector<F>| Matrix::from_rows(f, 3, v.chunks(3).map(|r| r.to_vec()).collect()).expect("3x3");
    let mut entries = Vec::new();
    for a in 0..dim {
        for b in a + 1..dim {
            let (x, y) = (mat(&reps[a]), mat(&reps[b]));
            let comm = x.mul(&y)?.sub(&y.mul(&x)?)?;
            let flat: Vector<F> = (0..3).flat_map(|r| comm.row(r).to_vec()).collect();
            let coords = basis_matrix
                .solve(&flat)?
                .ok_or_else(|| Error::NotClosed("commutator left sl(3)".into()))?;
            for (k, c) in coords.into_iter().take(dim).enumerate() {
                if !f.is_zero(&c) {
                    entries.push((a + 1, b + 1, k + 1, c));
                }
            }
        }
    }
    StructureTable::new("psl3_f3", f, dim, entries)
}

/// Field chosen at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyField {
    Rational(Rationals),
    Gaussian(GaussianRationals),
    Finite(FiniteField),
}

impl AnyField {
    pub fn from_spec(spec: &FieldSpec) -> Result<AnyField> {
        Ok(match spec {
            FieldSpec::Rational => AnyField::Rational(Rationals),
            FieldSpec::GaussianRational => AnyField::Gaussian(GaussianRationals),
            FieldSpec::Finite { .. } => AnyField::Finite(FiniteField::from_spec(spec)?),
        })
    }
}

/// Structure table over a field chosen at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyTable {
    Rational(StructureTable<Rationals>),
    Gaussian(StructureTable<GaussianRationals>),
    Finite(StructureTable<FiniteField>),
}

/// Runs a generic expression against whichever table variant is present.
#[macro_export]
macro_rules! with_table {
    ($any:expr, $t:ident => $body:expr) => {
        match $any {
            $crate::catalog::AnyTable::Rational($t) => $body,
            $crate::catalog::AnyTable::Gaussian($t) => $body,
            $crate::catalog::AnyTable::Finite($t) => $body,
        }
    };
}

impl AnyTable {
    pub fn spec(&self) -> FieldSpec {
        with_table!(self, t => t.field().spec())
    }
    pub fn name(&self) -> &str {
        with_table!(self, t => t.name())
    }
    pub fn dim(&self) -> usize {
        with_table!(self, t => t.dim())
    }
    pub fn validate(&self) -> Result<()> {
        with_table!(self, t => t.validate())
    }
    pub fn to_json(&self) -> TableJson {
        with_table!(self, t => t.to_json())
    }

    pub fn from_json(json: &TableJson, validate: bool) -> Result<AnyTable> {
        Ok(match AnyField::from_spec(&json.field)? {
            AnyField::Rational(f) => AnyTable::Rational(StructureTable::from_json(&f, json, validate)?),
            AnyField::Gaussian(f) => AnyTable::Gaussian(StructureTable::from_json(&f, json, validate)?),
            AnyField::Finite(f) => AnyTable::Finite(StructureTable::from_json(&f, json, validate)?),
        })
    }

    pub fn parse_json(text: &str, validate: bool) -> Result<AnyTable> {
        let json: TableJson = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
        AnyTable::from_json(&json, validate)
    }

    pub fn extend_scalars(&self, target: &FieldSpec) -> Result<AnyTable> {
        Ok(match AnyField::from_spec(target)? {
            AnyField::Rational(f) => AnyTable::Rational(with_table!(self, t => t.extend_scalars(&f))?),
            AnyField::Gaussian(f) => AnyTable::Gaussian(with_table!(self, t => t.extend_scalars(&f))?),
            AnyField::Finite(f) => AnyTable::Finite(with_table!(self, t => t.extend_scalars(&f))?),
        })
    }
}

/// Catalog entries with their default base field.
pub const CATALOG: &[(&str, &str, &str)] = &[
    ("abelian(n)", "Q", "abelian algebra of dimension n"),
    ("heisenberg3", "Q", "three-dimensional Heisenberg algebra [b1,b2]=b3"),
    ("g6_23", "Q", "6-dim nilpotent: [b1,b2]=b3 [b1,b3]=b5 [b1,b4]=b6 [b2,b4]=b5"),
    ("dim5_L8211", "Q(i)", "5-dim solvable: [b1,b4]=b1 [b1,b5]=-b2 [b2,b4]=b2 [b2,b5]=b1 [b4,b5]=b3"),
    ("g3_sah", "GF(3)", "15-dim algebra over GF(3) with non-abelian AID/Inn"),
    ("psl3_f3", "GF(3)", "psl(3) in characteristic 3, dimension 7"),
];

/// Looks up a catalog entry. `NAME` uses the default field, `NAME(FIELD)`
/// overrides it, and the abelian family takes `abelian(N)` or
/// `abelian(N,FIELD)`.
pub fn catalog(name: &str) -> Result<AnyTable> {
    let t: String = name.chars().filter(|c| !c.is_whitespace()).collect();
    let (base, args) = match t.split_once('(') {
        Some((b, rest)) => {
            let inner = rest.strip_suffix(')').ok_or_else(|| Error::UnknownCatalog(name.into()))?;
            (b.to_string(), Some(inner.to_string()))
        }
        None => (t.clone(), None),
    };
    let unknown = || Error::UnknownCatalog(name.into());
    let (dim_arg, field_arg) = if base == "abelian" {
        let args = args.ok_or_else(unknown)?;
        let (d, f) = match args.split_once(',') {
            Some((d, f)) => (d.to_string(), Some(f.to_string())),
            None => (args, None),
        };
        (Some(d.parse::<usize>().map_err(|_| unknown())?), f)
    } else {
        (None, args)
    };
    let default = CATALOG
        .iter()
        .find(|(n, _, _)| n.split('(').next() == Some(base.as_str()))
        .ok_or_else(unknown)?
        .1;
    let spec = FieldSpec::parse_short(field_arg.as_deref().unwrap_or(default))?;
    let table = match AnyField::from_spec(&spec)? {
        AnyField::Rational(f) => AnyTable::Rational(build(&base, dim_arg, &f)?),
        AnyField::Gaussian(f) => AnyTable::Gaussian(build(&base, dim_arg, &f)?),
        AnyField::Finite(f) => AnyTable::Finite(build(&base, dim_arg, &f)?),
    };
    table.validate()?;
    Ok(table)
}

fn build<F: Field>(base: &str, dim: Option<usize>, f: &F) -> Result<StructureTable<F>> {
    let t = match base {
        "abelian" => StructureTable::abelian(f, dim.unwrap_or(1)),
        "heisenberg3" => heisenberg3(f),
        "g6_23" => g6_23(f),
        "dim5_L8211" => dim5_l8211(f),
        "g3_sah" => g3_sah(f),
        "psl3_f3" => psl3_f3(f)?,
        other => return Err(Error::UnknownCatalog(other.into())),
    };
    let default_field = CATALOG.iter().find(|(n, _, _)| n.split('(').next() == Some(base)).map(|e| e.1);
    let spec = f.spec();
    let is_default = default_field.and_then(|d| FieldSpec::parse_short(d).ok()).as_ref() == Some(&spec);
    Ok(if is_default || base == "abelian" { t } else { t.with_name(format!("{base}({spec})")) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_catalog_entry_validates() {
        for name in ["abelian(4)", "abelian(3,GF(2))", "heisenberg3", "heisenberg3(GF(2))", "g6_23", "dim5_L8211", "dim5_L8211(Q)", "g3_sah", "g3_sah(GF(27))", "psl3_f3"] {
            let t = catalog(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            t.validate().unwrap();
        }
    }

    #[test]
    fn catalog_dimensions_and_fields() {
        assert_eq!(catalog("g3_sah").unwrap().dim(), 15);
        assert_eq!(catalog("psl3_f3").unwrap().dim(), 7);
        assert_eq!(catalog("g6_23").unwrap().spec(), FieldSpec::Rational);
        assert_eq!(catalog("dim5_L8211").unwrap().spec(), FieldSpec::GaussianRational);
        assert_eq!(catalog("abelian(5)").unwrap().dim(), 5);
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!(matches!(catalog("g7_1"), Err(Error::UnknownCatalog(_))));
        assert!(matches!(catalog("abelian"), Err(Error::UnknownCatalog(_))));
        assert!(catalog("g3_sah(Q)").is_err(), "Jacobi fails outside characteristic 3");
        assert!(catalog("psl3_f3(GF(2))").is_err());
    }

    #[test]
    fn psl3_is_sl3_mod_scalars() {
        // dim sl3 = 8, the identity is traceless in characteristic 3
        let f = FiniteField::prime(3).unwrap();
        let t = psl3_f3(&f).unwrap();
        assert_eq!(t.dim(), 8 - 1);
        t.validate().unwrap();
        // psl(3) in characteristic 3 is simple, so its centre is trivial
        assert_eq!(t.center().dim(), 0);
    }

    #[test]
    fn json_round_trip_through_any_table() {
        let t = catalog("dim5_L8211").unwrap();
        let text = serde_json::to_string(&t.to_json()).unwrap();
        assert_eq!(AnyTable::parse_json(&text, true).unwrap(), t);
    }

    #[test]
    fn extension_through_any_table() {
        let t = catalog("g3_sah").unwrap();
        let ext = t.extend_scalars(&FieldSpec::parse_short("GF(27)").unwrap()).unwrap();
        assert_eq!(ext.dim(), 15);
        assert!(t.extend_scalars(&FieldSpec::parse_short("GF(8)").unwrap()).is_err());
    }
}
