//! Command drivers over run-time tables and the report they produce.
//!
//! JSON output depends only on the input and the configuration: timings are
//! included only on request and the thread count never.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::aidcert::{certify_candidates, compute_aid, compute_caid, AidConfig, CertificationReport, Round};
use crate::catalog::AnyTable;
use crate::derivations::{is_derivation, try_compute_spaces};
use crate::error::{Error, Result};
use crate::liealg::{StructureTable, TableJson, TermJson};
use crate::linalg::{Subspace, Vector};
use crate::scalars::Field;
use crate::sha::{build_quotient, build_quotient_with_reps, is_abelian};
use crate::with_table;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SpaceDims {
    pub algebra: usize,
    pub center: usize,
    pub der: usize,
    pub inn: usize,
    pub complement: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub aid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub aid_upper: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub caid: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientReport {
    pub kind: String,
    pub dim: usize,
    pub abelian: bool,
    /// Whether the span of the chosen representatives is closed under the bracket.
    pub reps_closed: bool,
    /// False when the numerator is only a certified lower bound.
    pub exact: bool,
    pub table: TableJson,
}

/// One derivation given as images `d(b_j) = sum_k c b_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivationJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub images: Vec<ImageJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageJson {
    pub j: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateCheck {
    pub name: String,
    pub is_derivation: bool,
    pub inner: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub field: String,
    pub description: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub algebra: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub field: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub valid: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dims: Option<SpaceDims>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub basis: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certification: Option<CertificationReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub candidates: Option<Vec<CandidateCheck>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub candidate_round: Option<Round>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quotient: Option<QuotientReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub catalog: Option<Vec<CatalogEntry>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub table: Option<TableJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings_ms: Option<BTreeMap<String, u64>>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.into(), ..Default::default() }
    }

    fn for_table(command: &str, t: &AnyTable) -> Self {
        Report { command: command.into(), algebra: Some(t.name().into()), field: Some(t.spec().to_string()), ..Default::default() }
    }

    /// True when a certification left some candidate undecided.
    pub fn inconclusive(&self) -> bool {
        let cert = self.certification.as_ref().is_some_and(|c| !c.complete);
        let round = self.candidate_round.as_ref().is_some_and(|r| r.verdicts.iter().any(|v| v.verdict.is_inconclusive()));
        cert || round
    }

    /// 0 on success, 2 when certification is inconclusive.
    pub fn exit_code(&self) -> i32 {
        if self.inconclusive() {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| out.push_str(&format!("{k:<14} {v}\n"));
        line("command", self.command.clone());
        if let Some(a) = &self.algebra {
            line("algebra", a.clone());
        }
        if let Some(f) = &self.field {
            line("field", f.clone());
        }
        if let Some(s) = self.seed {
            line("seed", s.to_string());
        }
        if let Some(v) = self.valid {
            line("valid", v.to_string());
        }
        if let Some(d) = &self.dims {
            line("dim g", d.algebra.to_string());
            line("dim centre", d.center.to_string());
            line("dim Der", d.der.to_string());
            line("dim Inn", d.inn.to_string());
            line("dim U", d.complement.to_string());
            match (d.aid, d.aid_upper) {
                (Some(a), Some(u)) if a != u => line("dim AID", format!("between {a} and {u} (inconclusive)")),
                (Some(a), _) => line("dim AID", a.to_string()),
                _ => {}
            }
            if let Some(c) = d.caid {
                line("dim CAID", c.to_string());
            }
        }
        if let Some(c) = &self.certification {
            let cfg = &c.config;
            line(
                "config",
                format!(
                    "probe budget {}, patience {}, minors limit {}, scan budget {}, witness height {}",
                    cfg.plan.budget, cfg.plan.patience, cfg.minors_limit, cfg.scan_budget, cfg.witness_height
                ),
            );
            line("refined V", format!("{} after {} probes", c.dims.refined, c.probe_log.probes_used));
            for (i, r) in c.rounds.iter().enumerate() {
                let extra = r.projective_points.map(|p| format!(", {p} projective points")).unwrap_or_default();
                line(&format!("round {}", i + 1), format!("{} on {} candidates{extra}, dim V after {}", format!("{:?}", r.kind).to_lowercase(), r.candidates, r.dim_after));
                for v in &r.verdicts {
                    line("", format!("candidate {}: {}", v.candidate + 1, serde_json::to_string(&v.verdict).expect("serializes")));
                }
            }
            line("complete", c.complete.to_string());
        }
        if let Some(r) = &self.candidate_round {
            for v in &r.verdicts {
                line("verdict", format!("candidate {}: {}", v.candidate + 1, serde_json::to_string(&v.verdict).expect("serializes")));
            }
        }
        if let Some(cs) = &self.candidates {
            for c in cs {
                line("candidate", format!("{}: derivation {}, inner {}", c.name, c.is_derivation, c.inner));
            }
        }
        if let Some(q) = &self.quotient {
            line(&format!("dim {}", q.kind), q.dim.to_string());
            line("abelian", q.abelian.to_string());
            line("reps closed", q.reps_closed.to_string());
            if !q.exact {
                line("note", "quotient of the certified lower bound only".into());
            }
        }
        if let Some(b) = &self.basis {
            for v in b {
                line("basis", format!("[{}]", v.join(", ")));
            }
        }
        if let Some(cat) = &self.catalog {
            for e in cat {
                line(&e.name, format!("{} ({})", e.description, e.field));
            }
        }
        if let Some(t) = &self.table {
            out.push_str(&serde_json::to_string_pretty(t).expect("serializes"));
            out.push('\n');
        }
        if let Some(tm) = &self.timings_ms {
            for (k, v) in tm {
                out.push_str(&format!("{:<14} {v} ms\n", format!("time {k}")));
            }
        }
        out
    }
}

/// Wall-clock stopwatch feeding the optional timings map.
pub struct Timer {
    start: Instant,
    laps: BTreeMap<String, u64>,
}

impl Timer {
    pub fn start() -> Self {
        Timer { start: Instant::now(), laps: BTreeMap::new() }
    }
    pub fn lap(&mut self, name: &str) {
        self.laps.insert(name.into(), self.start.elapsed().as_millis() as u64);
    }
    pub fn into_map(self) -> BTreeMap<String, u64> {
        self.laps
    }
}

fn render_basis<F: Field>(f: &F, s: &Subspace<F>) -> Vec<Vec<String>> {
    s.basis().iter().map(|v| v.iter().map(|c| f.render(c)).collect()).collect()
}

fn space_dims<F: Field>(t: &StructureTable<F>) -> Result<SpaceDims> {
    let s = try_compute_spaces(t)?;
    Ok(SpaceDims {
        algebra: t.dim(),
        center: t.center().dim(),
        der: s.der.dim(),
        inn: s.inn.dim(),
        complement: s.complement_u.dim(),
        ..Default::default()
    })
}

pub fn validate_report(t: &AnyTable) -> Report {
    let mut r = Report::for_table("validate", t);
    r.valid = Some(t.validate().is_ok());
    r
}

/// `der`, `inn` or `center`: dimensions and a basis of the requested space.
pub fn space_report(command: &str, t: &AnyTable) -> Result<Report> {
    let mut r = Report::for_table(command, t);
    with_table!(t, t => {
        let f = t.field();
        r.dims = Some(space_dims(t)?);
        let basis = match command {
            "der" => try_compute_spaces(t)?.der,
            "inn" => try_compute_spaces(t)?.inn,
            "center" => t.center(),
            other => return Err(Error::Input(format!("unknown space {other:?}"))),
        };
        r.basis = Some(render_basis(f, &basis));
    });
    Ok(r)
}

fn dims_from(c: &CertificationReport) -> SpaceDims {
    SpaceDims {
        algebra: c.dims.algebra,
        center: c.dims.center,
        der: c.dims.der,
        inn: c.dims.inn,
        complement: c.dims.complement,
        aid: Some(c.dims.aid_lower),
        aid_upper: Some(c.dims.aid_upper),
        caid: None,
    }
}

/// `aid`, `caid` and `sha` share one pipeline run.
pub fn aid_report(command: &str, t: &AnyTable, config: &AidConfig, timings: bool) -> Result<Report> {
    let mut r = Report::for_table(command, t);
    r.seed = Some(config.plan.seed);
    let mut timer = Timer::start();
    with_table!(t, t => {
        let res = compute_aid(t, config)?;
        timer.lap("aid");
        let mut dims = dims_from(&res.report);
        match command {
            "aid" => {}
            "caid" => {
                dims.caid = Some(compute_caid(t, &res.lower)?.dim());
                timer.lap("caid");
            }
            "sha" => {
                let exact = res.is_complete();
                let q = build_quotient_with_reps("sha", res.certified.basis().to_vec(), &res.spaces.inn, t)?;
                timer.lap("sha");
                r.quotient = Some(QuotientReport {
                    kind: "Sha".into(),
                    dim: q.table.dim(),
                    abelian: is_abelian(&q),
                    reps_closed: q.reps_closed,
                    exact,
                    table: q.table.to_json(),
                });
            }
            other => return Err(Error::Input(format!("unknown command {other:?}"))),
        }
        r.dims = Some(dims);
        r.certification = Some(res.report);
    });
    if timings {
        r.timings_ms = Some(timer.into_map());
    }
    Ok(r)
}

/// `Out(g) = Der(g)/Inn(g)`.
pub fn out_report(t: &AnyTable) -> Result<Report> {
    let mut r = Report::for_table("out", t);
    with_table!(t, t => {
        let s = try_compute_spaces(t)?;
        let q = build_quotient("out", &s.der, &s.inn, t)?;
        r.dims = Some(space_dims(t)?);
        r.quotient = Some(QuotientReport {
            kind: "Out".into(),
            dim: q.table.dim(),
            abelian: is_abelian(&q),
            reps_closed: q.reps_closed,
            exact: true,
            table: q.table.to_json(),
        });
    });
    Ok(r)
}

fn derivation_vector<F: Field>(t: &StructureTable<F>, d: &DerivationJson) -> Result<Vector<F>> {
    let (f, n) = (t.field(), t.dim());
    let mut v = vec![f.zero(); n * n];
    for img in &d.images {
        if img.j == 0 || img.j > n {
            return Err(Error::IndexOutOfRange(format!("image index {} outside 1..={n}", img.j)));
        }
        for term in &img.terms {
            if term.k == 0 || term.k > n {
                return Err(Error::IndexOutOfRange(format!("term index {} outside 1..={n}", term.k)));
            }
            let c = f.parse(&term.c)?;
            let slot = &mut v[(img.j - 1) * n + term.k - 1];
            *slot = f.add(slot, &c);
        }
    }
    Ok(v)
}

/// Certifies user-supplied derivations directly, without refinement.
pub fn certify_report(t: &AnyTable, derivations: &[DerivationJson], config: &AidConfig) -> Result<Report> {
    let mut r = Report::for_table("certify", t);
    r.seed = Some(config.plan.seed);
    with_table!(t, t => {
        let inn = try_compute_spaces(t)?.inn;
        let mut checks = Vec::new();
        let mut vectors = Vec::new();
        for (i, d) in derivations.iter().enumerate() {
            let v = derivation_vector(t, d)?;
            let ok = is_derivation(t, &v);
            checks.push(CandidateCheck {
                name: d.name.clone().unwrap_or_else(|| format!("d{}", i + 1)),
                is_derivation: ok,
                inner: inn.contains(&v),
            });
            if !ok {
                return Err(Error::Input(format!("candidate {} is not a derivation", i + 1)));
            }
            vectors.push(v);
        }
        r.candidates = Some(checks);
        r.candidate_round = Some(certify_candidates(t, &vectors, config)?);
    });
    Ok(r)
}

pub fn catalog_list_report() -> Report {
    let mut r = Report::new("catalog list");
    r.catalog = Some(
        crate::catalog::CATALOG
            .iter()
            .map(|(n, f, d)| CatalogEntry { name: n.to_string(), field: f.to_string(), description: d.to_string() })
            .collect(),
    );
    r
}

pub fn table_report(command: &str, t: &AnyTable) -> Report {
    let mut r = Report::for_table(command, t);
    r.table = Some(t.to_json());
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;

    #[test]
    fn empty_report_is_valid_json() {
        let r = Report::new("noop");
        let text = r.to_json();
        assert_eq!(Report::from_json(&text).unwrap(), r);
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn g623_report_round_trips() {
        let t = catalog("g6_23").unwrap();
        let r = aid_report("aid", &t, &AidConfig::default(), false).unwrap();
        let d = r.dims.as_ref().unwrap();
        assert_eq!((d.der, d.inn, d.aid), (14, 4, Some(6)));
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
        assert_eq!(r.exit_code(), 0);
        assert!(r.to_text().contains("dim AID"));
        assert!(!r.to_json().contains("timings"));
    }

    #[test]
    fn dim5_over_q_exits_inconclusive_with_obstruction() {
        let t = catalog("dim5_L8211(Q)").unwrap();
        let r = aid_report("aid", &t, &AidConfig::default(), false).unwrap();
        assert_eq!(r.exit_code(), 2);
        let json = r.to_json();
        assert!(json.contains("groebner_basis"));
        assert!(json.contains("z4^2 + z5^2"), "{json}");
    }

    #[test]
    fn certify_inner_and_outer() {
        let t = catalog("heisenberg3").unwrap();
        let inner = DerivationJson {
            name: Some("ad1".into()),
            images: vec![ImageJson { j: 2, terms: vec![TermJson { k: 3, c: "1".into() }] }],
        };
        let diag = DerivationJson {
            name: None,
            images: vec![
                ImageJson { j: 1, terms: vec![TermJson { k: 1, c: "1".into() }] },
                ImageJson { j: 3, terms: vec![TermJson { k: 3, c: "1".into() }] },
            ],
        };
        let r = certify_report(&t, &[inner, diag], &AidConfig::default()).unwrap();
        let round = r.candidate_round.unwrap();
        assert!(round.verdicts[0].verdict.is_certified());
        assert!(round.verdicts[1].verdict.is_refuted());
        let bad = DerivationJson { name: None, images: vec![ImageJson { j: 1, terms: vec![TermJson { k: 1, c: "1".into() }] }] };
        assert!(certify_report(&t, &[bad], &AidConfig::default()).is_err());
    }

    #[test]
    fn space_and_out_reports() {
        let t = catalog("heisenberg3").unwrap();
        let r = space_report("der", &t).unwrap();
        assert_eq!(r.basis.unwrap().len(), 6);
        let r = space_report("center", &t).unwrap();
        assert_eq!(r.basis.unwrap().len(), 1);
        let r = out_report(&t).unwrap();
        assert_eq!(r.quotient.unwrap().dim, 4);
        assert!(space_report("nope", &t).is_err());
    }
}
