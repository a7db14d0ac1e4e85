use lieaid_core::aidcert::{compute_aid, compute_caid, AidConfig};
use lieaid_core::catalog::{catalog, AnyTable};
use lieaid_core::derivations::{compute_spaces, ProbePlan};
use lieaid_core::liealg::StructureTable;
use lieaid_core::report::aid_report;
use lieaid_core::scalars::{Field, FieldSpec, FiniteField, GaussianRationals, Rationals};
use lieaid_core::sha::build_quotient_with_reps;
use proptest::prelude::*;

/// `F x ⋉_A F^k` with `[x, e_j] = sum_i a_ji e_i`.
fn semidirect<F: Field>(f: &F, k: usize, a: &[i64]) -> StructureTable<F> {
    let mut entries = Vec::new();
    for j in 0..k {
        for i in 0..k {
            let c = a[j * k + i];
            if c != 0 {
                entries.push((1, j + 2, i + 2, f.from_i64(c)));
            }
        }
    }
    StructureTable::new("semidirect", f, k + 1, entries).unwrap()
}

/// Two-step nilpotent: `[e_i, e_j] = sum_k c_ijk z_k` with central `z`.
fn two_step<F: Field>(f: &F, g: usize, z: usize, c: &[i64]) -> StructureTable<F> {
    let mut entries = Vec::new();
    let mut at = 0;
    for i in 1..=g {
        for j in i + 1..=g {
            for k in 0..z {
                let v = c[at % c.len()];
                at += 1;
                if v != 0 {
                    entries.push((i, j, g + k + 1, f.from_i64(v)));
                }
            }
        }
    }
    StructureTable::new("two_step", f, g + z, entries).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn table_json_round_trips(k in 1usize..4, a in prop::collection::vec(-2i64..3, 9)) {
        let f = FiniteField::prime(5).unwrap();
        let t = semidirect(&f, k, &a);
        let back = StructureTable::from_json(&f, &t.to_json(), true).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn derivation_dims_survive_scalar_extension(k in 1usize..4, a in prop::collection::vec(-2i64..3, 9)) {
        let t = semidirect(&Rationals, k, &a);
        let e = t.extend_scalars(&GaussianRationals).unwrap();
        let (s, se) = (compute_spaces(&t), compute_spaces(&e));
        prop_assert_eq!(s.der.dim(), se.der.dim());
        prop_assert_eq!(s.inn.dim(), se.inn.dim());
    }

    #[test]
    fn aid_bounds_are_ordered(c in prop::collection::vec(-1i64..2, 6), seed in 0u64..1000) {
        let f = FiniteField::prime(3).unwrap();
        let t = two_step(&f, 3, 2, &c);
        let cfg = AidConfig { plan: ProbePlan { seed, ..ProbePlan::default() }, ..AidConfig::default() };
        let r = compute_aid(&t, &cfg).unwrap();
        prop_assert!(r.is_complete());
        prop_assert!(r.lower.contains_subspace(&r.spaces.inn));
        prop_assert!(r.spaces.der.contains_subspace(&r.lower));
        let caid = compute_caid(&t, &r.lower).unwrap();
        prop_assert!(caid.contains_subspace(&r.spaces.inn) && r.lower.contains_subspace(&caid));
        // the answer does not depend on the seed
        let other = compute_aid(&t, &AidConfig::default()).unwrap();
        prop_assert_eq!(other.lower, r.lower);
    }

    #[test]
    fn sha_tables_satisfy_jacobi(c in prop::collection::vec(-1i64..2, 12)) {
        let f = FiniteField::prime(3).unwrap();
        let t = two_step(&f, 4, 2, &c);
        let r = compute_aid(&t, &AidConfig::default()).unwrap();
        let q = build_quotient_with_reps("sha", r.certified.basis().to_vec(), &r.spaces.inn, &t).unwrap();
        prop_assert_eq!(q.table.dim(), r.lower.dim() - r.spaces.inn.dim());
        prop_assert!(q.table.validate().is_ok());
    }
}

#[test]
fn reports_are_reproducible() {
    let t = catalog("g6_23").unwrap();
    let cfg = AidConfig::default();
    let a = aid_report("sha", &t, &cfg, false).unwrap().to_json();
    let b = aid_report("sha", &t, &cfg, false).unwrap().to_json();
    assert_eq!(a, b);
}

#[test]
fn catalog_overrides_and_extension() {
    let t = catalog("heisenberg3(GF(7))").unwrap();
    assert_eq!(t.spec(), FieldSpec::finite(7, 1).unwrap());
    let e = t.extend_scalars(&FieldSpec::finite(7, 2).unwrap()).unwrap();
    assert_eq!(e.dim(), 3);
    let back = AnyTable::parse_json(&serde_json::to_string(&e.to_json()).unwrap(), true).unwrap();
    assert_eq!(back.to_json(), e.to_json());
    assert!(catalog("heisenberg3(Q)").unwrap().extend_scalars(&FieldSpec::finite(3, 1).unwrap()).is_err());
    assert!(catalog("abelian(4,GF(2))").is_ok());
    assert!(catalog("nonexistent").is_err());
}

#[test]
fn psl3_aid_equals_inn_in_both_routes() {
    let f = FiniteField::prime(3).unwrap();
    let t = lieaid_core::catalog::psl3_f3(&f).unwrap();
    // refinement alone with a tiny plan leaves work for the scan
    let small = AidConfig { plan: ProbePlan { seed: 0, budget: 1, patience: 1 }, ..AidConfig::default() };
    for cfg in [AidConfig::default(), small] {
        let r = compute_aid(&t, &cfg).unwrap();
        assert!(r.is_complete());
        assert_eq!(r.lower, r.spaces.inn);
    }
}
