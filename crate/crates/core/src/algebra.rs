//! Weil algebras presented as quotients of polynomial rings by monomial
//! ideals, their unital morphisms, tensor products and canonical maps.
//!
//! Every algebra carries an explicit monomial basis ordered by total degree
//! and then lexicographically with `x1 > x2 > ...`, so `basis[0]` is always the
//! unit monomial and the augmentation is the coefficient at index 0.
//! Multiplication is stored as a table of structure constants.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num::{One, Zero};
use thiserror::Error;

use crate::linalg;
use crate::report::ValidationReport;
use crate::scalar::{format_rational, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("generator `{generator}` has no vanishing pure power; the quotient is infinite-dimensional")]
    InfiniteDimension { generator: String },
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("the unit monomial was declared vanishing; the quotient is the zero ring")]
    DegenerateIdeal,
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("morphism not well defined: vanishing monomial {monomial} maps to {image}")]
    NotWellDefined { monomial: String, image: String },
    #[error("image of generator `{generator}` has nonzero constant term")]
    AugmentationViolation { generator: String },
    #[error("expected {expected} generator images, got {found}")]
    ImageCount { expected: usize, found: usize },
    #[error("vector of length {found} does not match algebra dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cannot compose: target `{target}` differs from source `{source_name}`")]
    SourceTargetMismatch { target: String, source_name: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
}

/// Power product of generators, stored as generator index -> exponent (>= 1).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(BTreeMap<usize, u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn var(generator: usize) -> Self {
        Self::power(generator, 1)
    }

    pub fn power(generator: usize, exponent: u32) -> Self {
        let mut m = BTreeMap::new();
        if exponent > 0 {
            m.insert(generator, exponent);
        }
        Monomial(m)
    }

    pub fn from_exponents(exponents: &[u32]) -> Self {
        Monomial(
            exponents
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(g, &e)| (g, e))
                .collect(),
        )
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn exponent(&self, generator: usize) -> u32 {
        self.0.get(&generator).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().map(|(&g, &e)| (g, e))
    }

    pub fn dense(&self, generators: usize) -> Vec<u32> {
        (0..generators).map(|g| self.exponent(g)).collect()
    }

    /// Pure power `g^p` when the monomial has a single generator in its support.
    pub fn as_pure_power(&self) -> Option<(usize, u32)> {
        if self.0.len() == 1 {
            self.0.iter().next().map(|(&g, &e)| (g, e))
        } else {
            None
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().all(|(g, &e)| other.exponent(*g) >= e)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (&g, &e) in &other.0 {
            *out.entry(g).or_insert(0) += e;
        }
        Monomial(out)
    }

    pub fn shifted(&self, offset: usize) -> Monomial {
        Monomial(self.0.iter().map(|(&g, &e)| (g + offset, e)).collect())
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.is_one() {
            return "1".to_string();
        }
        self.0
            .iter()
            .map(|(&g, &e)| {
                let name = names.get(g).map_or_else(|| format!("g{g}"), Clone::clone);
                if e == 1 {
                    name
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Parses `x^2*y` against a generator list. `1` is the unit monomial.
    pub fn parse(text: &str, names: &[String]) -> Result<Monomial, AlgebraError> {
        let text = text.trim();
        if text == "1" {
            return Ok(Monomial::one());
        }
        let mut m = Monomial::one();
        for factor in text.split('*') {
            let factor = factor.trim();
            let (name, exp) = match factor.split_once('^') {
                Some((n, e)) => {
                    let e = e.trim().parse::<u32>().map_err(|_| {
                        AlgebraError::BadParameter(format!("bad exponent in `{factor}`"))
                    })?;
                    (n.trim(), e)
                }
                None => (factor, 1),
            };
            let g = names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| AlgebraError::UnknownGenerator(name.to_string()))?;
            m = m.mul(&Monomial::power(g, exp));
        }
        Ok(m)
    }
}

/// Degree first, then lexicographic with earlier generators ranking higher.
fn graded_order(a: &Monomial, b: &Monomial, generators: usize) -> Ordering {
    a.degree()
        .cmp(&b.degree())
        .then_with(|| b.dense(generators).cmp(&a.dense(generators)))
}

/// Multiplication table entry: a linear combination of basis indices.
pub type Terms = Vec<(usize, Rational)>;

/// Finite-dimensional local algebra `k[g1..gn] / I` with `I` a monomial ideal.
#[derive(Clone, Debug, PartialEq)]
pub struct WeilAlgebra {
    name: String,
    generator_names: Vec<String>,
    vanishing: Vec<Monomial>,
    basis: Vec<Monomial>,
    struct_const: Vec<Terms>,
    nilpotency_index: usize,
}

/// Constructor families for the everyday algebras.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StandardAlgebra {
    /// The base field itself.
    Base,
    /// `k[x1..xn] / (all degree-2 monomials)`: first-order infinitesimals.
    Dual(usize),
    /// `k[x] / (x^{r+1})`: r-jets in one variable.
    Jet(usize),
    /// `k[x1..xn] / (x1^{r1+1}, ..., xn^{rn+1})`.
    Mixed(Vec<usize>),
}

impl WeilAlgebra {
    /// Builds `k[generators] / (vanishing)`.
    pub fn present<S: AsRef<str>>(
        generator_names: &[S],
        vanishing: Vec<Monomial>,
    ) -> Result<WeilAlgebra, AlgebraError> {
        let names: Vec<String> = generator_names.iter().map(|s| s.as_ref().to_string()).collect();
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(AlgebraError::DuplicateGenerator(n.clone()));
            }
        }
        let n = names.len();
        for v in &vanishing {
            if v.is_one() {
                return Err(AlgebraError::DegenerateIdeal);
            }
            if let Some((g, _)) = v.exponents().find(|(g, _)| *g >= n) {
                return Err(AlgebraError::UnknownGenerator(format!("g{g}")));
            }
        }
        let mut bounds = Vec::with_capacity(n);
        for (g, name) in names.iter().enumerate() {
            let bound = vanishing
                .iter()
                .filter_map(Monomial::as_pure_power)
                .filter(|&(h, _)| h == g)
                .map(|(_, e)| e)
                .min()
                .ok_or_else(|| AlgebraError::InfiniteDimension { generator: name.clone() })?;
            bounds.push(bound);
        }
        let mut basis = Vec::new();
        let mut exps = vec![0u32; n];
        loop {
            let m = Monomial::from_exponents(&exps);
            if !vanishing.iter().any(|v| v.divides(&m)) {
                basis.push(m);
            }
            // odometer over the box of exponents below the pure-power bounds
            let mut pos = 0;
            while pos < n {
                exps[pos] += 1;
                if exps[pos] < bounds[pos] {
                    break;
                }
                exps[pos] = 0;
                pos += 1;
            }
            if pos == n {
                break;
            }
        }
        basis.sort_by(|a, b| graded_order(a, b, n));
        let name = default_name(&names, &vanishing);
        Ok(Self::from_monomial_basis(name, names, vanishing, basis))
    }

    fn from_monomial_basis(
        name: String,
        generator_names: Vec<String>,
        vanishing: Vec<Monomial>,
        basis: Vec<Monomial>,
    ) -> WeilAlgebra {
        let index: HashMap<&Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let dim = basis.len();
        let mut struct_const = Vec::with_capacity(dim * dim);
        for a in &basis {
            for b in &basis {
                let product = a.mul(b);
                let terms = match index.get(&product) {
                    Some(&k) if !vanishing.iter().any(|v| v.divides(&product)) => {
                        vec![(k, Rational::one())]
                    }
                    _ => Vec::new(),
                };
                struct_const.push(terms);
            }
        }
        let nilpotency_index = basis.iter().map(Monomial::degree).max().unwrap_or(0) as usize + 1;
        WeilAlgebra { name, generator_names, vanishing, basis, struct_const, nilpotency_index }
    }

    pub fn standard(kind: &StandardAlgebra) -> Result<WeilAlgebra, AlgebraError> {
        let indexed = |n: usize| -> Vec<String> {
            if n == 1 {
                vec!["x".to_string()]
            } else {
                (1..=n).map(|i| format!("x{i}")).collect()
            }
        };
        let (name, alg) = match kind {
            StandardAlgebra::Base => ("base".to_string(), Self::present::<&str>(&[], vec![])?),
            StandardAlgebra::Dual(n) => {
                if *n == 0 {
                    return Err(AlgebraError::BadParameter("dual(n) needs n >= 1".into()));
                }
                let mut rels = Vec::new();
                for i in 0..*n {
                    for j in i..*n {
                        rels.push(Monomial::var(i).mul(&Monomial::var(j)));
                    }
                }
                (format!("dual:{n}"), Self::present(&indexed(*n), rels)?)
            }
            StandardAlgebra::Jet(r) => {
                if *r == 0 {
                    return Err(AlgebraError::BadParameter("jet(r) needs r >= 1".into()));
                }
                (format!("jet:{r}"), Self::present(&["x"], vec![Monomial::power(0, *r as u32 + 1)])?)
            }
            StandardAlgebra::Mixed(orders) => {
                if orders.is_empty() || orders.contains(&0) {
                    return Err(AlgebraError::BadParameter(
                        "mixed(r1..rn) needs n >= 1 and every ri >= 1".into(),
                    ));
                }
                let rels = orders
                    .iter()
                    .enumerate()
                    .map(|(g, &r)| Monomial::power(g, r as u32 + 1))
                    .collect();
                let label = orders.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
                (format!("mixed:{label}"), Self::present(&indexed(orders.len()), rels)?)
            }
        };
        Ok(alg.with_name(name))
    }

    pub fn base() -> WeilAlgebra {
        Self::standard(&StandardAlgebra::Base).expect("base algebra")
    }

    pub fn dual(n: usize) -> Result<WeilAlgebra, AlgebraError> {
        Self::standard(&StandardAlgebra::Dual(n))
    }

    pub fn jet(r: usize) -> Result<WeilAlgebra, AlgebraError> {
        Self::standard(&StandardAlgebra::Jet(r))
    }

    pub fn mixed(orders: &[usize]) -> Result<WeilAlgebra, AlgebraError> {
        Self::standard(&StandardAlgebra::Mixed(orders.to_vec()))
    }

    /// `k[x1..xn] / (x_i^{r_i+1})` allowing zero orders (a zero order kills
    /// the generator). Used for seeding derivative extraction.
    pub fn truncated(orders: &[usize]) -> WeilAlgebra {
        let names: Vec<String> = if orders.len() == 1 {
            vec!["x".into()]
        } else {
            (1..=orders.len()).map(|i| format!("x{i}")).collect()
        };
        let rels = orders
            .iter()
            .enumerate()
            .map(|(g, &r)| Monomial::power(g, r as u32 + 1))
            .collect();
        let label = orders.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        Self::present(&names, rels)
            .expect("pure powers bound every generator")
            .with_name(format!("trunc:{label}"))
    }

    /// Assembles an algebra from an explicit table without checking any law.
    /// Pair with [`WeilAlgebra::validate`].
    pub fn from_raw_parts(
        name: impl Into<String>,
        generator_names: Vec<String>,
        vanishing: Vec<Monomial>,
        basis: Vec<Monomial>,
        struct_const: Vec<Terms>,
        nilpotency_index: usize,
    ) -> Result<WeilAlgebra, AlgebraError> {
        let dim = basis.len();
        if dim == 0 || struct_const.len() != dim * dim {
            return Err(AlgebraError::DimensionMismatch {
                expected: dim * dim,
                found: struct_const.len(),
            });
        }
        if struct_const.iter().flatten().any(|(k, _)| *k >= dim) {
            return Err(AlgebraError::BadParameter("structure constant index out of range".into()));
        }
        Ok(WeilAlgebra {
            name: name.into(),
            generator_names,
            vanishing,
            basis,
            struct_const,
            nilpotency_index,
        })
    }

    /// Copy with one multiplication-table entry replaced.
    pub fn with_struct_const_entry(&self, i: usize, j: usize, terms: Terms) -> WeilAlgebra {
        let mut out = self.clone();
        let dim = self.dim();
        out.struct_const[i * dim + j] = terms;
        out
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    pub fn vanishing_monomials(&self) -> &[Monomial] {
        &self.vanishing
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn nilpotency_index(&self) -> usize {
        self.nilpotency_index
    }

    pub fn struct_const(&self, i: usize, j: usize) -> &Terms {
        &self.struct_const[i * self.dim() + j]
    }

    pub fn basis_index(&self, m: &Monomial) -> Option<usize> {
        self.basis.iter().position(|b| b == m)
    }

    pub fn basis_name(&self, i: usize) -> String {
        self.basis[i].render(&self.generator_names)
    }

    pub fn basis_names(&self) -> Vec<String> {
        (0..self.dim()).map(|i| self.basis_name(i)).collect()
    }

    /// Coefficient vector of a monomial after reduction (zero if it vanishes).
    pub fn monomial_vector(&self, m: &Monomial) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        if !self.vanishing.iter().any(|z| z.divides(m)) {
            if let Some(i) = self.basis_index(m) {
                v[i] = Rational::one();
            }
        }
        v
    }

    pub fn generator_vector(&self, generator: usize) -> Vec<Rational> {
        self.monomial_vector(&Monomial::var(generator))
    }

    /// Product of two coefficient vectors through the structure constants.
    pub fn mul_vectors<S: Scalar>(&self, a: &[S], b: &[S]) -> Vec<S> {
        let dim = self.dim();
        debug_assert_eq!(a.len(), dim);
        debug_assert_eq!(b.len(), dim);
        let zero = S::zero_in(&a[0].ctx());
        let mut out = vec![zero; dim];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_null() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                let terms = &self.struct_const[i * dim + j];
                if terms.is_empty() || bj.is_null() {
                    continue;
                }
                let p = ai.clone() * bj.clone();
                for (k, c) in terms {
                    let add = p.mul_rational(c);
                    out[*k] = std::mem::replace(&mut out[*k], S::zero_in(&a[0].ctx())) + add;
                }
            }
        }
        out
    }

    fn unit_vector(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        v[i] = Rational::one();
        v
    }

    /// Least `r` with `m^r = 0`, computed from the table by spanning powers of
    /// the augmentation ideal. `None` if the ideal is not nilpotent.
    pub fn computed_nilpotency_index(&self) -> Option<usize> {
        let dim = self.dim();
        let mut power: Vec<Vec<Rational>> =
            linalg::row_reduce((1..dim).map(|i| self.unit_vector(i)).collect());
        let mut r = 1;
        while !power.is_empty() {
            if r > dim {
                return None;
            }
            let mut next = Vec::new();
            for u in &power {
                for j in 1..dim {
                    let p = self.mul_vectors(u, &self.unit_vector(j));
                    if p.iter().any(|c| !c.is_zero()) {
                        next.push(p);
                    }
                }
            }
            power = linalg::row_reduce(next);
            r += 1;
        }
        Some(r)
    }

    /// Exhaustive check of the algebra laws over all basis pairs and triples.
    pub fn validate(&self) -> ValidationReport {
        let dim = self.dim();
        let e = |i: usize| self.unit_vector(i);
        let mut report = ValidationReport::new();

        report.record(
            "unit_basis",
            (!self.basis[0].is_one()).then(|| format!("basis[0] = {}", self.basis_name(0))),
        );

        let mut witness = None;
        'comm: for i in 0..dim {
            for j in i + 1..dim {
                if self.mul_vectors(&e(i), &e(j)) != self.mul_vectors(&e(j), &e(i)) {
                    witness = Some(format!("({}, {})", self.basis_name(i), self.basis_name(j)));
                    break 'comm;
                }
            }
        }
        report.record("commutativity", witness);

        let mut witness = None;
        'assoc: for i in 0..dim {
            for j in 0..dim {
                let ij = self.mul_vectors(&e(i), &e(j));
                for k in 0..dim {
                    let left = self.mul_vectors(&ij, &e(k));
                    let jk = self.mul_vectors(&e(j), &e(k));
                    let right = self.mul_vectors(&e(i), &jk);
                    if left != right {
                        witness = Some(format!(
                            "({}, {}, {})",
                            self.basis_name(i),
                            self.basis_name(j),
                            self.basis_name(k)
                        ));
                        break 'assoc;
                    }
                }
            }
        }
        report.record("associativity", witness);

        let witness = (0..dim)
            .find(|&i| self.mul_vectors(&e(0), &e(i)) != e(i) || self.mul_vectors(&e(i), &e(0)) != e(i))
            .map(|i| format!("1 * {} != {}", self.basis_name(i), self.basis_name(i)));
        report.record("unit", witness);

        let witness = match self.computed_nilpotency_index() {
            Some(r) if r == self.nilpotency_index => None,
            Some(r) => Some(format!("stored index {} but m^{} = 0 first", self.nilpotency_index, r)),
            None => Some("augmentation ideal is not nilpotent".to_string()),
        };
        report.record("nilpotency", witness);

        let witness = self
            .struct_const
            .iter()
            .position(|t| t.len() > 1 || t.iter().any(|(_, c)| !c.is_one()))
            .map(|p| format!("entry ({}, {})", self.basis_name(p / dim), self.basis_name(p % dim)));
        report.record("monomial_form", witness);
        report
    }

    /// Multiplication table rendered as `b_i * b_j = ...` rows.
    pub fn multiplication_table(&self) -> Vec<Vec<String>> {
        let dim = self.dim();
        (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| render_terms(self.struct_const(i, j), &self.basis_names()))
                    .collect()
            })
            .collect()
    }

    /// Parses the algebra text format:
    ///
    /// ```text
    /// algebra D2
    /// gens x y
    /// rel x^2
    /// rel x*y
    /// rel y^2
    /// ```
    pub fn parse_text(text: &str) -> Result<WeilAlgebra, AlgebraError> {
        let mut name = None;
        let mut gens: Option<Vec<String>> = None;
        let mut rels = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| AlgebraError::Parse { line: lineno + 1, message };
            let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            match keyword {
                "algebra" if name.is_none() => name = Some(rest.trim().to_string()),
                "gens" if name.is_some() && gens.is_none() => {
                    gens = Some(rest.split_whitespace().map(str::to_string).collect());
                }
                "rel" => {
                    let g = gens.as_ref().ok_or_else(|| err("`rel` before `gens`".into()))?;
                    let m = Monomial::parse(rest, g).map_err(|e| err(e.to_string()))?;
                    rels.push(m);
                }
                other => return Err(err(format!("unexpected `{other}`"))),
            }
        }
        let name = name.ok_or(AlgebraError::Parse { line: 1, message: "missing `algebra` line".into() })?;
        let gens = gens.ok_or(AlgebraError::Parse { line: 2, message: "missing `gens` line".into() })?;
        Ok(Self::present(&gens, rels)?.with_name(name))
    }

    /// Renders the algebra in the text format accepted by [`WeilAlgebra::parse_text`].
    pub fn to_text(&self) -> String {
        let mut out = format!("algebra {}\ngens {}\n", self.name, self.generator_names.join(" "));
        for v in &self.vanishing {
            out.push_str(&format!("rel {}\n", v.render(&self.generator_names)));
        }
        out
    }

    /// Builtin spec (`base`, `dual:<n>`, `jet:<r>`, `mixed:<r1>,<r2>,...`) or a
    /// path to an algebra text file.
    pub fn load(spec: &str) -> Result<WeilAlgebra, AlgebraError> {
        if let Some(kind) = parse_builtin(spec)? {
            return Self::standard(&kind);
        }
        let path = Path::new(spec);
        let text = std::fs::read_to_string(path).map_err(|e| AlgebraError::Io {
            path: spec.to_string(),
            message: e.to_string(),
        })?;
        Self::parse_text(&text)
    }
}

fn parse_builtin(spec: &str) -> Result<Option<StandardAlgebra>, AlgebraError> {
    let bad = || AlgebraError::BadParameter(format!("malformed builtin algebra `{spec}`"));
    let number = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    if spec == "base" {
        return Ok(Some(StandardAlgebra::Base));
    }
    let Some((kind, arg)) = spec.split_once(':') else {
        return Ok(None);
    };
    let kind = match kind {
        "dual" => StandardAlgebra::Dual(number(arg)?),
        "jet" => StandardAlgebra::Jet(number(arg)?),
        "mixed" => StandardAlgebra::Mixed(arg.split(',').map(number).collect::<Result<_, _>>()?),
        _ => return Ok(None),
    };
    Ok(Some(kind))
}

fn default_name(names: &[String], vanishing: &[Monomial]) -> String {
    let rels: Vec<String> = vanishing.iter().map(|m| m.render(names)).collect();
    format!("k[{}]/({})", names.join(","), rels.join(","))
}

pub(crate) fn render_terms(terms: &Terms, names: &[String]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    terms
        .iter()
        .map(|(k, c)| {
            if c.is_one() {
                names[*k].clone()
            } else {
                format!("{}*{}", format_rational(c), names[*k])
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

impl fmt::Display for WeilAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (dim {}, basis {{{}}})", self.name, self.dim(), self.basis_names().join(", "))
    }
}

/// Tensor product `W1 ⊗ W2` with its two canonical inclusions.
///
/// Basis element `(i, j)` (that is `b_i ⊗ c_j`) sits at index `i + dim(W1) * j`.
/// Generators are renamed with `_1` / `_2` suffixes.
pub fn tensor(
    left: &Arc<WeilAlgebra>,
    right: &Arc<WeilAlgebra>,
) -> (Arc<WeilAlgebra>, WeilMorphism, WeilMorphism) {
    let product = Arc::new(tensor_algebra(left, right));
    let d1 = left.dim();
    let d2 = right.dim();
    let mut incl1 = zero_matrix(d1 * d2, d1);
    for i in 0..d1 {
        incl1[i][i] = Rational::one();
    }
    let mut incl2 = zero_matrix(d1 * d2, d2);
    for j in 0..d2 {
        incl2[d1 * j][j] = Rational::one();
    }
    let incl1 = WeilMorphism { source: left.clone(), target: product.clone(), matrix: incl1 };
    let incl2 = WeilMorphism { source: right.clone(), target: product.clone(), matrix: incl2 };
    (product, incl1, incl2)
}

fn tensor_algebra(left: &WeilAlgebra, right: &WeilAlgebra) -> WeilAlgebra {
    let d1 = left.dim();
    let d2 = right.dim();
    let offset = left.generator_names.len();
    let generator_names: Vec<String> = left
        .generator_names
        .iter()
        .map(|g| format!("{g}_1"))
        .chain(right.generator_names.iter().map(|g| format!("{g}_2")))
        .collect();
    let vanishing = left
        .vanishing
        .iter()
        .cloned()
        .chain(right.vanishing.iter().map(|m| m.shifted(offset)))
        .collect();
    let mut basis = Vec::with_capacity(d1 * d2);
    for j in 0..d2 {
        for i in 0..d1 {
            basis.push(left.basis[i].mul(&right.basis[j].shifted(offset)));
        }
    }
    let dim = d1 * d2;
    let mut struct_const = vec![Vec::new(); dim * dim];
    for a in 0..dim {
        let (i, j) = (a % d1, a / d1);
        for b in 0..dim {
            let (i2, j2) = (b % d1, b / d1);
            let mut terms = Vec::new();
            for (k, c) in left.struct_const(i, i2) {
                for (l, d) in right.struct_const(j, j2) {
                    terms.push((k + d1 * l, c * d));
                }
            }
            struct_const[a * dim + b] = terms;
        }
    }
    WeilAlgebra {
        name: format!("{}⊗{}", left.name, right.name),
        generator_names,
        vanishing,
        basis,
        struct_const,
        nilpotency_index: left.nilpotency_index + right.nilpotency_index - 1,
    }
}

fn zero_matrix(rows: usize, cols: usize) -> Vec<Vec<Rational>> {
    vec![vec![Rational::zero(); cols]; rows]
}

/// Unital algebra homomorphism, stored as the `dim(target) x dim(source)`
/// matrix of images of source basis elements.
#[derive(Clone, Debug, PartialEq)]
pub struct WeilMorphism {
    source: Arc<WeilAlgebra>,
    target: Arc<WeilAlgebra>,
    matrix: Vec<Vec<Rational>>,
}

fn same_algebra(a: &Arc<WeilAlgebra>, b: &Arc<WeilAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl WeilMorphism {
    /// Extends generator images multiplicatively and checks that every
    /// vanishing monomial of the source is sent to zero.
    pub fn from_generator_images(
        source: &Arc<WeilAlgebra>,
        target: &Arc<WeilAlgebra>,
        images: &[Vec<Rational>],
    ) -> Result<WeilMorphism, AlgebraError> {
        let gens = source.generator_names.len();
        if images.len() != gens {
            return Err(AlgebraError::ImageCount { expected: gens, found: images.len() });
        }
        for (g, img) in images.iter().enumerate() {
            if img.len() != target.dim() {
                return Err(AlgebraError::DimensionMismatch { expected: target.dim(), found: img.len() });
            }
            if !img[0].is_zero() {
                return Err(AlgebraError::AugmentationViolation {
                    generator: source.generator_names[g].clone(),
                });
            }
        }
        let image_of = |m: &Monomial| -> Vec<Rational> {
            let mut acc = target.unit_vector(0);
            for (g, e) in m.exponents() {
                for _ in 0..e {
                    acc = target.mul_vectors(&acc, &images[g]);
                }
            }
            acc
        };
        for v in &source.vanishing {
            let img = image_of(v);
            if img.iter().any(|c| !c.is_zero()) {
                return Err(AlgebraError::NotWellDefined {
                    monomial: v.render(&source.generator_names),
                    image: render_vector(&img, &target.basis_names()),
                });
            }
        }
        let mut matrix = zero_matrix(target.dim(), source.dim());
        for (col, m) in source.basis.iter().enumerate() {
            for (row, c) in image_of(m).into_iter().enumerate() {
                matrix[row][col] = c;
            }
        }
        Ok(WeilMorphism { source: source.clone(), target: target.clone(), matrix })
    }

    /// Raw constructor; pair with [`WeilMorphism::validate`].
    pub fn from_matrix(
        source: &Arc<WeilAlgebra>,
        target: &Arc<WeilAlgebra>,
        matrix: Vec<Vec<Rational>>,
    ) -> Result<WeilMorphism, AlgebraError> {
        if matrix.len() != target.dim() || matrix.iter().any(|r| r.len() != source.dim()) {
            return Err(AlgebraError::DimensionMismatch {
                expected: target.dim() * source.dim(),
                found: matrix.iter().map(Vec::len).sum(),
            });
        }
        Ok(WeilMorphism { source: source.clone(), target: target.clone(), matrix })
    }

    pub fn identity(algebra: &Arc<WeilAlgebra>) -> WeilMorphism {
        let dim = algebra.dim();
        let matrix = (0..dim).map(|i| algebra.unit_vector(i)).collect();
        WeilMorphism { source: algebra.clone(), target: algebra.clone(), matrix }
    }

    /// Augmentation `W -> k`: the constant term.
    pub fn augmentation(algebra: &Arc<WeilAlgebra>) -> WeilMorphism {
        let mut row = vec![Rational::zero(); algebra.dim()];
        row[0] = Rational::one();
        WeilMorphism { source: algebra.clone(), target: Arc::new(WeilAlgebra::base()), matrix: vec![row] }
    }

    /// Unit `k -> W`.
    pub fn unit(algebra: &Arc<WeilAlgebra>) -> WeilMorphism {
        let matrix = (0..algebra.dim())
            .map(|i| vec![if i == 0 { Rational::one() } else { Rational::zero() }])
            .collect();
        WeilMorphism { source: Arc::new(WeilAlgebra::base()), target: algebra.clone(), matrix }
    }

    /// `(augmentation, unit)`.
    pub fn canonical(algebra: &Arc<WeilAlgebra>) -> (WeilMorphism, WeilMorphism) {
        (Self::augmentation(algebra), Self::unit(algebra))
    }

    pub fn source(&self) -> &Arc<WeilAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<WeilAlgebra> {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.matrix
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &WeilMorphism) -> Result<WeilMorphism, AlgebraError> {
        compose(self, next)
    }

    pub fn apply_vector<S: Scalar>(&self, v: &[S]) -> Vec<S> {
        let zero = S::zero_in(&v[0].ctx());
        self.matrix
            .iter()
            .map(|row| {
                row.iter().zip(v).fold(zero.clone(), |acc, (c, x)| {
                    if c.is_zero() || x.is_null() {
                        acc
                    } else {
                        acc + x.mul_rational(c)
                    }
                })
            })
            .collect()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.source.dim() == self.target.dim() && linalg::inverse(&self.matrix).is_some()
    }

    /// Unit, multiplicativity on all basis pairs, and augmentation compatibility.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        let s = &self.source;
        let t = &self.target;
        let image = |v: &[Rational]| self.apply_vector(v);
        report.record(
            "unit",
            (image(&s.unit_vector(0)) != t.unit_vector(0)).then(|| "1 is not sent to 1".to_string()),
        );
        let mut witness = None;
        'mult: for i in 0..s.dim() {
            for j in 0..s.dim() {
                let lhs = image(&s.mul_vectors(&s.unit_vector(i), &s.unit_vector(j)));
                let rhs = t.mul_vectors(&image(&s.unit_vector(i)), &image(&s.unit_vector(j)));
                if lhs != rhs {
                    witness = Some(format!("({}, {})", s.basis_name(i), s.basis_name(j)));
                    break 'mult;
                }
            }
        }
        report.record("multiplicative", witness);
        let witness = (0..s.dim())
            .find(|&i| self.matrix[0][i] != if i == 0 { Rational::one() } else { Rational::zero() })
            .map(|i| format!("augmentation of image of {} differs", s.basis_name(i)));
        report.record("augmentation", witness);
        report
    }
}

/// `second ∘ first`.
pub fn compose(first: &WeilMorphism, second: &WeilMorphism) -> Result<WeilMorphism, AlgebraError> {
    if !same_algebra(&first.target, &second.source) {
        return Err(AlgebraError::SourceTargetMismatch {
            target: first.target.name.clone(),
            source_name: second.source.name.clone(),
        });
    }
    Ok(WeilMorphism {
        source: first.source.clone(),
        target: second.target.clone(),
        matrix: linalg::mat_mul(&second.matrix, &first.matrix),
    })
}

/// `f ⊗ g : W1 ⊗ W3 -> W2 ⊗ W4`, the Kronecker product on pair bases.
pub fn tensor_of_morphisms(f: &WeilMorphism, g: &WeilMorphism) -> WeilMorphism {
    let (source, _, _) = tensor(&f.source, &g.source);
    let (target, _, _) = tensor(&f.target, &g.target);
    let (d1, d2) = (f.source.dim(), f.target.dim());
    let mut matrix = zero_matrix(target.dim(), source.dim());
    for (k, f_row) in f.matrix.iter().enumerate() {
        for (l, g_row) in g.matrix.iter().enumerate() {
            for (i, a) in f_row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in g_row.iter().enumerate() {
                    if !b.is_zero() {
                        matrix[k + d2 * l][i + d1 * j] = a * b;
                    }
                }
            }
        }
    }
    WeilMorphism { source, target, matrix }
}

/// The identification `W ⊗ k -> W` dropping the unit factor.
pub fn tensor_unit_iso(algebra: &Arc<WeilAlgebra>) -> WeilMorphism {
    let base = Arc::new(WeilAlgebra::base());
    let (product, _, _) = tensor(algebra, &base);
    let dim = algebra.dim();
    let matrix = (0..dim).map(|i| algebra.unit_vector(i)).collect();
    WeilMorphism { source: product, target: algebra.clone(), matrix }
}

pub(crate) fn render_vector(v: &[Rational], names: &[String]) -> String {
    let terms: Vec<String> = v
        .iter()
        .zip(names)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, n)| if n == "1" { format_rational(c) } else { format!("{}*{}", format_rational(c), n) })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn names(a: &WeilAlgebra) -> Vec<String> {
        a.basis_names()
    }

    /// Monomials not divisible by any relation, enumerated independently over
    /// a generous exponent box.
    fn enumerate_basis(gens: usize, rels: &[Monomial], max_exp: u32) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let total = (max_exp + 1).pow(gens as u32);
        for code in 0..total {
            let mut c = code;
            let exps: Vec<u32> = (0..gens)
                .map(|_| {
                    let e = c % (max_exp + 1);
                    c /= max_exp + 1;
                    e
                })
                .collect();
            let m = Monomial::from_exponents(&exps);
            if !rels.iter().any(|r| r.divides(&m)) {
                out.push(exps);
            }
        }
        out
    }

    #[test]
    fn base_is_one_dimensional() {
        let k = WeilAlgebra::present::<&str>(&[], vec![]).unwrap();
        assert_eq!(k.dim(), 1);
        assert_eq!(k.nilpotency_index(), 1);
        assert!(k.validate().all_passed());
    }

    #[test]
    fn presentations_match_enumeration_oracle() {
        let cases: Vec<(Vec<&str>, Vec<Monomial>)> = vec![
            (vec!["x"], vec![Monomial::power(0, 2)]),
            (
                vec!["x", "y"],
                vec![Monomial::power(0, 2), Monomial::var(0).mul(&Monomial::var(1)), Monomial::power(1, 2)],
            ),
            (vec!["x"], vec![Monomial::power(0, 4)]),
            (vec!["x", "y"], vec![Monomial::power(0, 3), Monomial::power(1, 2), Monomial::var(0).mul(&Monomial::var(1))]),
        ];
        for (gens, rels) in cases {
            let alg = WeilAlgebra::present(&gens, rels.clone()).unwrap();
            let oracle = enumerate_basis(gens.len(), &rels, 6);
            assert_eq!(alg.dim(), oracle.len());
            let mut ours: Vec<Vec<u32>> = alg.basis().iter().map(|m| m.dense(gens.len())).collect();
            ours.sort();
            let mut oracle = oracle;
            oracle.sort();
            assert_eq!(ours, oracle);
        }
    }

    #[test]
    fn named_examples() {
        let d = WeilAlgebra::present(&["x"], vec![Monomial::power(0, 2)]).unwrap();
        assert_eq!(names(&d), ["1", "x"]);
        assert_eq!(d.nilpotency_index(), 2);
        let d2 = WeilAlgebra::present(
            &["x", "y"],
            vec![Monomial::power(0, 2), Monomial::var(0).mul(&Monomial::var(1)), Monomial::power(1, 2)],
        )
        .unwrap();
        assert_eq!(names(&d2), ["1", "x", "y"]);
        let j3 = WeilAlgebra::present(&["x"], vec![Monomial::power(0, 4)]).unwrap();
        assert_eq!(names(&j3), ["1", "x", "x^2", "x^3"]);
        assert_eq!(WeilAlgebra::dual(2).unwrap().dim(), 3);
        assert_eq!(names(&WeilAlgebra::mixed(&[1, 1]).unwrap()), ["1", "x1", "x2", "x1*x2"]);
    }

    #[test]
    fn presentation_errors() {
        assert_eq!(
            WeilAlgebra::present(&["x", "y"], vec![Monomial::power(0, 2)]),
            Err(AlgebraError::InfiniteDimension { generator: "y".into() })
        );
        assert_eq!(
            WeilAlgebra::present(&["x", "x"], vec![Monomial::power(0, 2)]),
            Err(AlgebraError::DuplicateGenerator("x".into()))
        );
        assert!(matches!(WeilAlgebra::dual(0), Err(AlgebraError::BadParameter(_))));
        assert!(matches!(WeilAlgebra::jet(0), Err(AlgebraError::BadParameter(_))));
        assert!(matches!(WeilAlgebra::mixed(&[1, 0]), Err(AlgebraError::BadParameter(_))));
    }

    #[test]
    fn corrupted_table_fails_associativity_with_witness() {
        let j3 = WeilAlgebra::jet(3).unwrap();
        assert!(j3.validate().all_passed());
        // swap x*x = x^2 and x*x^2 = x^3
        let a = j3.struct_const(1, 1).clone();
        let b = j3.struct_const(1, 2).clone();
        let bad = j3.with_struct_const_entry(1, 1, b).with_struct_const_entry(1, 2, a);
        let report = bad.validate();
        let assoc = report.get("associativity").unwrap();
        assert!(!assoc.passed);
        assert!(assoc.witness.is_some());
    }

    #[test]
    fn tensor_examples() {
        let d = Arc::new(WeilAlgebra::dual(1).unwrap());
        let (dd, _, _) = tensor(&d, &d);
        assert_eq!(dd.dim(), 4);
        assert_eq!(names(&dd), ["1", "x_1", "x_2", "x_1*x_2"]);
        assert_eq!(dd.nilpotency_index(), 3);
        assert_eq!(dd.computed_nilpotency_index(), Some(3));
        assert!(dd.validate().all_passed());

        let j2 = Arc::new(WeilAlgebra::jet(2).unwrap());
        let (jd, _, _) = tensor(&j2, &d);
        assert_eq!(jd.dim(), 6);
        assert!(jd.validate().all_passed());

        let iso = tensor_unit_iso(&j2);
        assert!(iso.is_isomorphism());
        assert!(iso.validate().all_passed());
    }

    #[test]
    fn inclusions_are_morphisms() {
        let j2 = Arc::new(WeilAlgebra::jet(2).unwrap());
        let d = Arc::new(WeilAlgebra::dual(1).unwrap());
        let (_, i1, i2) = tensor(&j2, &d);
        assert!(i1.validate().all_passed());
        assert!(i2.validate().all_passed());
    }

    fn scaled(c: i64) -> WeilMorphism {
        let d = Arc::new(WeilAlgebra::dual(1).unwrap());
        WeilMorphism::from_generator_images(&d, &d, &[vec![int(0), int(c)]]).unwrap()
    }

    #[test]
    fn generator_image_construction() {
        for c in -3..=3 {
            assert!(scaled(c).validate().all_passed());
        }
        let d = Arc::new(WeilAlgebra::dual(1).unwrap());
        let j2 = Arc::new(WeilAlgebra::jet(2).unwrap());
        let (dd, _, _) = tensor(&d, &d);
        let x_plus_y = vec![int(0), int(1), int(1), int(0)];
        let phi = WeilMorphism::from_generator_images(&j2, &dd, &[x_plus_y.clone()]).unwrap();
        assert!(phi.validate().all_passed());
        let err = WeilMorphism::from_generator_images(&d, &dd, &[x_plus_y]).unwrap_err();
        assert!(matches!(err, AlgebraError::NotWellDefined { .. }), "{err}");
        let err = WeilMorphism::from_generator_images(&d, &d, &[vec![int(1), int(1)]]).unwrap_err();
        assert_eq!(err, AlgebraError::AugmentationViolation { generator: "x".into() });
    }

    #[test]
    fn composition() {
        let six = compose(&scaled(2), &scaled(3)).unwrap();
        assert_eq!(six, scaled(6));
        let d = Arc::new(WeilAlgebra::dual(1).unwrap());
        let id = WeilMorphism::identity(&d);
        assert_eq!(compose(&id, &scaled(5)).unwrap(), scaled(5));
        let (aug, unit) = WeilMorphism::canonical(&d);
        let kk = compose(&unit, &aug).unwrap();
        assert_eq!(kk.matrix(), &[vec![int(1)]]);
        assert!(matches!(compose(&aug, &scaled(2)), Err(AlgebraError::SourceTargetMismatch { .. })));
    }

    #[test]
    fn kronecker_products() {
        let d = Arc::new(WeilAlgebra::dual(1).unwrap());
        let id = WeilMorphism::identity(&d);
        let (aug, _) = WeilMorphism::canonical(&d);
        let kill = tensor_of_morphisms(&id, &aug);
        assert_eq!(kill.target().dim(), 2);
        // y = x_2 sits at index 2 of D⊗D and must vanish
        assert!(kill.matrix().iter().all(|row| row[2].is_zero()));
        assert_eq!(kill.matrix()[1][1], int(1));

        let idid = tensor_of_morphisms(&id, &id);
        assert_eq!(idid.matrix(), WeilMorphism::identity(idid.source()).matrix());

        let six = tensor_of_morphisms(&scaled(2), &scaled(3));
        assert_eq!(six.matrix()[3][3], int(6));
    }

    #[test]
    fn text_format_round_trip() {
        let text = "algebra D2\ngens x y\nrel x^2\nrel x*y\nrel y^2\n";
        let alg = WeilAlgebra::parse_text(text).unwrap();
        assert_eq!(alg.name(), "D2");
        assert_eq!(alg.dim(), 3);
        assert_eq!(WeilAlgebra::parse_text(&alg.to_text()).unwrap(), alg);
        assert_eq!(WeilAlgebra::load("mixed:1,2").unwrap().dim(), 6);
        assert_eq!(WeilAlgebra::load("base").unwrap().dim(), 1);
        assert!(matches!(
            WeilAlgebra::parse_text("algebra A\ngens x\nrel z^2"),
            Err(AlgebraError::Parse { line: 3, .. })
        ));
    }
}
