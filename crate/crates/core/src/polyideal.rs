//! Sparse multivariate polynomials under grevlex, Buchberger's algorithm,
//! ideal and radical membership, and minors of polynomial matrices.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::scalars::Field;

/// Exponent vector, ordered by degree-reverse-lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    deg: u32,
    exps: Vec<u16>,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial { deg: 0, exps: vec![0; nvars] }
    }

    pub fn from_exps(exps: Vec<u16>) -> Self {
        let deg = exps.iter().map(|&e| e as u32).sum();
        Monomial { deg, exps }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = Monomial::one(nvars);
        m.exps[i] = 1;
        m.deg = 1;
        m
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }
    pub fn exps(&self) -> &[u16] {
        &self.exps
    }
    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial { deg: self.deg + other.deg, exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect() }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.deg <= other.deg && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial { deg: other.deg - self.deg, exps: other.exps.iter().zip(&self.exps).map(|(a, b)| a - b).collect() }
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial::from_exps(self.exps.iter().zip(&other.exps).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| *a == 0 || *b == 0)
    }

    fn extended(&self, extra: usize) -> Monomial {
        let mut exps = self.exps.clone();
        exps.extend(std::iter::repeat_n(0, extra));
        Monomial { deg: self.deg, exps }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg.cmp(&other.deg).then_with(|| {
            for (a, b) in self.exps.iter().zip(&other.exps).rev() {
                if a != b {
                    // smaller exponent in the last differing variable wins
                    return b.cmp(a);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial with terms sorted by decreasing monomial; no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly<F: Field> {
    terms: Vec<(Monomial, F::Elem)>,
}

impl<F: Field> Poly<F> {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn terms(&self) -> &[(Monomial, F::Elem)] {
        &self.terms
    }
    pub fn leading(&self) -> Option<&(Monomial, F::Elem)> {
        self.terms.first()
    }
    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.0)
    }
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.0.deg).max()
    }
    pub fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one()
    }
}

/// A polynomial ring `F[x_1, ..., x_m]` with named variables.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyRing<F: Field> {
    field: F,
    vars: Vec<String>,
}

impl<F: Field> PolyRing<F> {
    pub fn new(field: &F, vars: Vec<String>) -> Self {
        PolyRing { field: field.clone(), vars }
    }

    /// Ring with variables `prefix1, ..., prefixN`.
    pub fn with_prefix(field: &F, prefix: &str, n: usize) -> Self {
        Self::new(field, (1..=n).map(|i| format!("{prefix}{i}")).collect())
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn nvars(&self) -> usize {
        self.vars.len()
    }
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// The ring with one more variable appended at the end.
    pub fn extend(&self, name: &str) -> PolyRing<F> {
        let mut vars = self.vars.clone();
        vars.push(name.to_string());
        PolyRing::new(&self.field, vars)
    }

    /// Image of `f` in a ring that has `extra` more trailing variables.
    pub fn embed(&self, f: &Poly<F>, extra: usize) -> Poly<F> {
        Poly { terms: f.terms.iter().map(|(m, c)| (m.extended(extra), c.clone())).collect() }
    }

    pub fn constant(&self, c: F::Elem) -> Poly<F> {
        if self.field.is_zero(&c) {
            Poly::zero()
        } else {
            Poly { terms: vec![(Monomial::one(self.nvars()), c)] }
        }
    }

    pub fn one(&self) -> Poly<F> {
        self.constant(self.field.one())
    }

    pub fn var(&self, i: usize) -> Poly<F> {
        Poly { terms: vec![(Monomial::var(self.nvars(), i), self.field.one())] }
    }

    /// `sum_i coeffs[i] * x_i`.
    pub fn linear_form(&self, coeffs: &[F::Elem]) -> Poly<F> {
        let f = &self.field;
        let mut terms: Vec<(Monomial, F::Elem)> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !f.is_zero(c))
            .map(|(i, c)| (Monomial::var(self.nvars(), i), c.clone()))
            .collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    pub fn from_terms(&self, terms: Vec<(Monomial, F::Elem)>) -> Poly<F> {
        let f = &self.field;
        let mut map: HashMap<Monomial, F::Elem> = HashMap::new();
        for (m, c) in terms {
            let e = map.entry(m).or_insert_with(|| f.zero());
            *e = f.add(e, &c);
        }
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !f.is_zero(c)).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    pub fn add(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        self.combine(a, b, false)
    }

    pub fn sub(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        self.combine(a, b, true)
    }

    fn combine(&self, a: &Poly<F>, b: &Poly<F>, negate_b: bool) -> Poly<F> {
        let f = &self.field;
        let mut out = Vec::with_capacity(a.terms.len() + b.terms.len());
        let (mut i, mut j) = (0, 0);
        let nb = |c: &F::Elem| if negate_b { f.neg(c) } else { c.clone() };
        while i < a.terms.len() && j < b.terms.len() {
            match a.terms[i].0.cmp(&b.terms[j].0) {
                Ordering::Greater => {
                    out.push(a.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((b.terms[j].0.clone(), nb(&b.terms[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = f.add(&a.terms[i].1, &nb(&b.terms[j].1));
                    if !f.is_zero(&c) {
                        out.push((a.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a.terms[i..].iter().cloned());
        out.extend(b.terms[j..].iter().map(|(m, c)| (m.clone(), nb(c))));
        Poly { terms: out }
    }

    pub fn neg(&self, a: &Poly<F>) -> Poly<F> {
        Poly { terms: a.terms.iter().map(|(m, c)| (m.clone(), self.field.neg(c))).collect() }
    }

    pub fn scale(&self, a: &Poly<F>, c: &F::Elem) -> Poly<F> {
        if self.field.is_zero(c) {
            return Poly::zero();
        }
        Poly { terms: a.terms.iter().map(|(m, x)| (m.clone(), self.field.mul(x, c))).collect() }
    }

    /// `c * m * a`.
    pub fn mul_term(&self, a: &Poly<F>, m: &Monomial, c: &F::Elem) -> Poly<F> {
        if self.field.is_zero(c) {
            return Poly::zero();
        }
        Poly { terms: a.terms.iter().map(|(n, x)| (n.mul(m), self.field.mul(x, c))).collect() }
    }

    pub fn mul(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        let mut acc = Poly::zero();
        for (m, c) in &b.terms {
            acc = self.add(&acc, &self.mul_term(a, m, c));
        }
        acc
    }

    pub fn pow(&self, a: &Poly<F>, e: u32) -> Poly<F> {
        (0..e).fold(self.one(), |acc, _| self.mul(&acc, a))
    }

    pub fn monic(&self, a: &Poly<F>) -> Poly<F> {
        match a.leading() {
            Some((_, c)) => self.scale(a, &self.field.inv(c).expect("leading coefficient is nonzero")),
            None => Poly::zero(),
        }
    }

    pub fn eval(&self, a: &Poly<F>, point: &[F::Elem]) -> Result<F::Elem> {
        if point.len() != self.nvars() {
            return Err(Error::Dimension(format!("point has {} coordinates, ring has {} variables", point.len(), self.nvars())));
        }
        let f = &self.field;
        let mut acc = f.zero();
        for (m, c) in &a.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.exps) {
                if e > 0 {
                    t = f.mul(&t, &f.pow(x, e as u64));
                }
            }
            acc = f.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Full reduction of `a` by `basis` (whose leading coefficients need not be 1).
    pub fn normal_form(&self, a: &Poly<F>, basis: &[Poly<F>]) -> Poly<F> {
        let f = &self.field;
        let mut p = a.clone();
        let mut rem: Vec<(Monomial, F::Elem)> = Vec::new();
        while let Some((m, c)) = p.terms.first().cloned() {
            let divisor = basis.iter().find(|g| g.leading_monomial().is_some_and(|lm| lm.divides(&m)));
            match divisor {
                Some(g) => {
                    let (lm, lc) = g.leading().expect("nonzero");
                    let q = lm.quotient_of(&m);
                    let factor = f.div(&c, lc).expect("nonzero");
                    p = self.sub(&p, &self.mul_term(g, &q, &factor));
                }
                None => {
                    rem.push((m, c));
                    p.terms.remove(0);
                }
            }
        }
        Poly { terms: rem }
    }

    fn s_poly(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        let (la, ca) = a.leading().expect("nonzero");
        let (lb, cb) = b.leading().expect("nonzero");
        let l = la.lcm(lb);
        let f = &self.field;
        let ta = self.mul_term(a, &la.quotient_of(&l), &f.inv(ca).expect("nonzero"));
        let tb = self.mul_term(b, &lb.quotient_of(&l), &f.inv(cb).expect("nonzero"));
        self.sub(&ta, &tb)
    }

    /// Reduced Groebner basis under grevlex, sorted by increasing leading
    /// monomial. `<0>` gives the empty list and a unit ideal gives `[1]`.
    pub fn groebner_basis(&self, gens: &[Poly<F>]) -> Vec<Poly<F>> {
        let mut basis: Vec<Poly<F>> = Vec::new();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut done: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();

        let insert = |basis: &mut Vec<Poly<F>>, pairs: &mut Vec<(usize, usize)>, g: Poly<F>| -> bool {
            let g = self.monic(&g);
            let unit = g.is_constant();
            let idx = basis.len();
            basis.push(g);
            for i in 0..idx {
                pairs.push((i, idx));
            }
            unit
        };

        for g in gens {
            let r = self.normal_form(g, &basis);
            if !r.is_zero() && insert(&mut basis, &mut pairs, r) {
                return vec![self.one()];
            }
        }

        loop {
            // normal strategy: smallest lcm degree, then pair index
            let Some(pos) = (0..pairs.len()).min_by_key(|&p| {
                let (i, j) = pairs[p];
                let l = basis[i].leading_monomial().unwrap().lcm(basis[j].leading_monomial().unwrap());
                (l.deg, i, j)
            }) else {
                break;
            };
            let (i, j) = pairs.swap_remove(pos);
            done.insert((i, j));
            let (li, lj) = (basis[i].leading_monomial().unwrap(), basis[j].leading_monomial().unwrap());
            if li.coprime(lj) {
                continue;
            }
            let l = li.lcm(lj);
            let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
            let chain = (0..basis.len()).any(|k| {
                k != i
                    && k != j
                    && basis[k].leading_monomial().unwrap().divides(&l)
                    && done.contains(&key(i, k))
                    && done.contains(&key(j, k))
            });
            if chain {
                continue;
            }
            let s = self.s_poly(&basis[i], &basis[j]);
            let r = self.normal_form(&s, &basis);
            if !r.is_zero() && insert(&mut basis, &mut pairs, r) {
                return vec![self.one()];
            }
        }
        self.reduce_basis(basis)
    }

    fn reduce_basis(&self, basis: Vec<Poly<F>>) -> Vec<Poly<F>> {
        // drop elements whose leading monomial is divisible by another's
        let mut minimal: Vec<Poly<F>> = Vec::new();
        for (i, g) in basis.iter().enumerate() {
            let lg = g.leading_monomial().unwrap();
            let redundant = basis.iter().enumerate().any(|(j, h)| {
                let lh = h.leading_monomial().unwrap();
                j != i && lh.divides(lg) && (lh != lg || j < i)
            });
            if !redundant {
                minimal.push(g.clone());
            }
        }
        let mut reduced = Vec::with_capacity(minimal.len());
        for i in 0..minimal.len() {
            let others: Vec<Poly<F>> = minimal.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, g)| g.clone()).collect();
            let (lm, lc) = minimal[i].leading().unwrap().clone();
            let tail = Poly { terms: minimal[i].terms[1..].to_vec() };
            let tail = self.normal_form(&tail, &others);
            let mut terms = vec![(lm, lc)];
            terms.extend(tail.terms);
            reduced.push(self.monic(&Poly { terms }));
        }
        reduced.sort_by(|a, b| a.leading_monomial().unwrap().cmp(b.leading_monomial().unwrap()));
        reduced
    }

    /// Human-readable form such as `2*z1^2*z5*y - 1`.
    pub fn render(&self, a: &Poly<F>) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (m, c)) in a.terms.iter().enumerate() {
            let raw = self.field.render(c);
            let simple = !raw[1..].contains(['+', '-']);
            let (negative, body) = if raw.starts_with('-') && simple {
                (true, raw[1..].to_string())
            } else if simple {
                (false, raw)
            } else {
                (false, format!("({raw})"))
            };
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if body != "1" || m.is_one() {
                factors.push(body);
            }
            for (v, &e) in self.vars.iter().zip(&m.exps) {
                match e {
                    0 => {}
                    1 => factors.push(v.clone()),
                    _ => factors.push(format!("{v}^{e}")),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    /// Parses sums of products of variables, `^` powers and scalar
    /// coefficients; parenthesised scalars such as `(1+i)` are accepted.
    pub fn parse(&self, s: &str) -> Result<Poly<F>> {
        let bad = |why: &str| Error::Input(format!("cannot parse polynomial {s:?}: {why}"));
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(bad("empty"));
        }
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut depth = 0i32;
        let mut cur = String::new();
        let mut negative = false;
        let chars: Vec<char> = text.chars().collect();
        for (idx, &ch) in chars.iter().enumerate() {
            match ch {
                '(' | '[' => depth += 1,
                ')' | ']' => depth -= 1,
                _ => {}
            }
            let prev = if idx > 0 { chars[idx - 1] } else { '+' };
            if depth == 0 && (ch == '+' || ch == '-') && !matches!(prev, '^' | '/' | '*') {
                if !cur.is_empty() {
                    terms.push((negative, std::mem::take(&mut cur)));
                }
                negative = ch == '-';
                continue;
            }
            cur.push(ch);
        }
        if !cur.is_empty() {
            terms.push((negative, cur));
        }
        let f = &self.field;
        let mut acc = Poly::zero();
        for (neg, term) in terms {
            let mut coef = f.one();
            let mut mono = Monomial::one(self.nvars());
            for factor in term.split('*') {
                if factor.is_empty() {
                    return Err(bad("empty factor"));
                }
                let (base, exp) = match factor.rsplit_once('^') {
                    Some((b, e)) if !b.ends_with(')') || b.starts_with('(') => {
                        (b, e.parse::<u16>().map_err(|_| bad("bad exponent"))?)
                    }
                    _ => (factor, 1),
                };
                if let Some(i) = self.vars.iter().position(|v| v == base) {
                    mono.exps[i] += exp;
                    mono.deg += exp as u32;
                } else {
                    let inner = base.strip_prefix('(').and_then(|b| b.strip_suffix(')')).unwrap_or(base);
                    let c = f.parse(inner)?;
                    coef = f.mul(&coef, &f.pow(&c, exp as u64));
                }
            }
            if neg {
                coef = f.neg(&coef);
            }
            acc = self.add(&acc, &self.from_terms(vec![(mono, coef)]));
        }
        Ok(acc)
    }
}

/// Finitely generated ideal with a lazily computed reduced Groebner basis.
#[derive(Debug)]
pub struct PolyIdeal<F: Field> {
    ring: PolyRing<F>,
    generators: Vec<Poly<F>>,
    groebner: OnceLock<Vec<Poly<F>>>,
}

impl<F: Field> Clone for PolyIdeal<F> {
    fn clone(&self) -> Self {
        let groebner = OnceLock::new();
        if let Some(g) = self.groebner.get() {
            let _ = groebner.set(g.clone());
        }
        PolyIdeal { ring: self.ring.clone(), generators: self.generators.clone(), groebner }
    }
}

impl<F: Field> PolyIdeal<F> {
    /// Zero generators are dropped and repeated ones deduplicated.
    pub fn new(ring: &PolyRing<F>, generators: Vec<Poly<F>>) -> Self {
        let mut gens: Vec<Poly<F>> = Vec::new();
        for g in generators {
            if !g.is_zero() && !gens.contains(&g) {
                gens.push(g);
            }
        }
        PolyIdeal { ring: ring.clone(), generators: gens, groebner: OnceLock::new() }
    }

    pub fn ring(&self) -> &PolyRing<F> {
        &self.ring
    }
    pub fn generators(&self) -> &[Poly<F>] {
        &self.generators
    }

    pub fn groebner_basis(&self) -> &[Poly<F>] {
        self.groebner.get_or_init(|| self.ring.groebner_basis(&self.generators))
    }

    pub fn is_unit(&self) -> bool {
        let g = self.groebner_basis();
        g.len() == 1 && g[0].is_constant()
    }

    pub fn contains(&self, f: &Poly<F>) -> bool {
        self.ring.normal_form(f, self.groebner_basis()).is_zero()
    }

    /// `f` lies in the radical iff `1 ∈ <I, 1 - y f>` with a fresh variable `y`.
    pub fn radical_contains(&self, f: &Poly<F>) -> bool {
        if self.contains(f) {
            return true;
        }
        let ext = self.ring.extend("_y");
        let y = ext.var(ext.nvars() - 1);
        let fy = ext.mul(&y, &ext.embed(f, 1));
        let mut gens: Vec<Poly<F>> = self.generators.iter().map(|g| ext.embed(g, 1)).collect();
        gens.push(ext.sub(&ext.one(), &fy));
        let g = ext.groebner_basis(&gens);
        g.len() == 1 && g[0].is_constant()
    }
}

pub fn ideal_member<F: Field>(f: &Poly<F>, ideal: &PolyIdeal<F>) -> bool {
    ideal.contains(f)
}

pub fn radical_member<F: Field>(f: &Poly<F>, ideal: &PolyIdeal<F>) -> bool {
    ideal.radical_contains(f)
}

/// Dense matrix of polynomials over one ring.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix<F: Field> {
    rows: usize,
    cols: usize,
    entries: Vec<Poly<F>>,
}

impl<F: Field> PolyMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix { rows, cols, entries: vec![Poly::zero(); rows * cols] }
    }
    pub fn from_rows(rows: Vec<Vec<Poly<F>>>) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged polynomial matrix".into()));
        }
        let n = rows.len();
        Ok(PolyMatrix { rows: n, cols, entries: rows.into_iter().flatten().collect() })
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn get(&self, r: usize, c: usize) -> &Poly<F> {
        &self.entries[r * self.cols + c]
    }
    pub fn set(&mut self, r: usize, c: usize, p: Poly<F>) {
        self.entries[r * self.cols + c] = p;
    }

    /// Keeps the listed rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix<F> {
        let entries = rows.iter().flat_map(|&r| cols.iter().map(move |&c| self.get(r, c).clone())).collect();
        PolyMatrix { rows: rows.len(), cols: cols.len(), entries }
    }

    /// Appends one column.
    pub fn augment_column(&self, col: &[Poly<F>]) -> Result<PolyMatrix<F>> {
        if col.len() != self.rows {
            return Err(Error::Dimension("column length differs from row count".into()));
        }
        let rows = (0..self.rows)
            .map(|r| {
                let mut v: Vec<Poly<F>> = (0..self.cols).map(|c| self.get(r, c).clone()).collect();
                v.push(col[r].clone());
                v
            })
            .collect();
        PolyMatrix::from_rows(rows)
    }

    pub fn eval(&self, ring: &PolyRing<F>, point: &[F::Elem]) -> Result<crate::linalg::Matrix<F>> {
        let mut m = crate::linalg::Matrix::zeros(ring.field(), self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, ring.eval(self.get(r, c), point)?);
            }
        }
        Ok(m)
    }
}

/// Row or column subsets of size `r` out of `n`, in lexicographic order.
pub fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..r).collect();
    if r > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..r).rev().find(|&i| cur[i] != i + n - r) else {
            break;
        };
        cur[i] += 1;
        for j in i + 1..r {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}

/// All `r x r` minors, indexed by (row subset, column subset) in
/// lexicographic order, zero minors included.
pub fn minors_indexed<F: Field>(ring: &PolyRing<F>, m: &PolyMatrix<F>, r: usize) -> Result<Vec<(Vec<usize>, Vec<usize>, Poly<F>)>> {
    if r == 0 || r > m.rows.min(m.cols) {
        return Err(Error::Dimension(format!("minor size {r} outside 1..={}", m.rows.min(m.cols))));
    }
    if m.rows > 64 || m.cols > 64 {
        return Err(Error::Dimension("minors limited to 64 rows and columns".into()));
    }
    // Laplace expansion along the first row of each submatrix, memoised on
    // (row mask, column mask)
    let mut memo: HashMap<(u64, u64), Poly<F>> = HashMap::new();
    let mut out = Vec::new();
    for rows in subsets(m.rows, r) {
        for cols in subsets(m.cols, r) {
            let d = det_memo(ring, m, &rows, &cols, &mut memo);
            out.push((rows.clone(), cols, d));
        }
    }
    Ok(out)
}

pub fn minors<F: Field>(ring: &PolyRing<F>, m: &PolyMatrix<F>, r: usize) -> Result<Vec<Poly<F>>> {
    Ok(minors_indexed(ring, m, r)?.into_iter().map(|(_, _, p)| p).collect())
}

fn mask(ix: &[usize]) -> u64 {
    ix.iter().fold(0u64, |acc, &i| acc | (1u64 << i))
}

fn det_memo<F: Field>(
    ring: &PolyRing<F>,
    m: &PolyMatrix<F>,
    rows: &[usize],
    cols: &[usize],
    memo: &mut HashMap<(u64, u64), Poly<F>>,
) -> Poly<F> {
    if rows.len() == 1 {
        return m.get(rows[0], cols[0]).clone();
    }
    let key = (mask(rows), mask(cols));
    if let Some(p) = memo.get(&key) {
        return p.clone();
    }
    let mut acc = Poly::zero();
    for (idx, &c) in cols.iter().enumerate() {
        let entry = m.get(rows[0], c);
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let sub = det_memo(ring, m, &rows[1..], &rest, memo);
        let term = ring.mul(entry, &sub);
        acc = if idx % 2 == 0 { ring.add(&acc, &term) } else { ring.sub(&acc, &term) };
    }
    memo.insert(key, acc.clone());
    acc
}
