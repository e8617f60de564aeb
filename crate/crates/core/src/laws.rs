//! The twelve structural laws as runnable checks over the numeric model
//! (Weil numbers over rationals or floats) and the finite-set model.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{compose, tensor, tensor_of_morphisms, AlgebraError, Monomial, WeilAlgebra, WeilMorphism};
use crate::expr::{ExprError, SmoothMap};
use crate::fincat::bundled::{self, DataInstance};
use crate::fincat::{
    alpha_of, equalizer, exp_compat_check, functors_up_to_iso, localization_check, nat_transformations, precompose,
    precompose_nat, product, slice_morphisms, terminal, verify_slice_ccc, Bound, Endofunctor, FinCat, FinCatError,
    FinFunctor, IteratedObject, NatTrans, NaturalFamily,
};
use crate::functor::{lift_eval_with, nest_iso, unnest_iso, FunctorError};
use crate::number::{NumError, WeilCtx, WeilNumber};
use crate::scalar::{normwise_rel_error, parse_rational, Rational, Scalar, ScalarMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LawId {
    L1,
    L2,
    L3,
    L4,
    L5,
    L6,
    L7,
    L8,
    L9,
    L10,
    L11,
    L12,
}

impl LawId {
    pub const ALL: [LawId; 12] = [
        LawId::L1,
        LawId::L2,
        LawId::L3,
        LawId::L4,
        LawId::L5,
        LawId::L6,
        LawId::L7,
        LawId::L8,
        LawId::L9,
        LawId::L10,
        LawId::L11,
        LawId::L12,
    ];
}

impl fmt::Display for LawId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for LawId {
    type Err = LawError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LawId::ALL
            .into_iter()
            .find(|l| l.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| LawError::UnknownLaw(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Numeric,
    Finset,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Numeric => "numeric",
            Model::Finset => "finset",
        })
    }
}

#[derive(Debug, Error)]
pub enum LawError {
    #[error("law {law} is not available in the {model} model")]
    UnavailableInModel { law: LawId, model: Model },
    #[error("unknown law `{0}`")]
    UnknownLaw(String),
    #[error(transparent)]
    FinCat(#[from] FinCatError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Functor(#[from] FunctorError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("corpus line {line}: {message}")]
    Corpus { line: usize, message: String },
}

/// One row of the law listing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawInfo {
    pub id: LawId,
    pub name: &'static str,
    pub statement: &'static str,
    pub numeric: bool,
    pub finset: bool,
}

impl LawInfo {
    pub fn available(&self, model: Model) -> bool {
        match model {
            Model::Numeric => self.numeric,
            Model::Finset => self.finset,
        }
    }
}

pub fn enumerate_laws() -> Vec<LawInfo> {
    let row = |id, name, statement, numeric, finset| LawInfo { id, name, statement, numeric, finset };
    vec![
        row(LawId::L1, "limits", "Lifting preserves finite limits: products, equalizers and the terminal object.", true, true),
        row(LawId::L2, "unit", "Lifting along the base algebra is the identity.", true, true),
        row(
            LawId::L3,
            "tensor-composition",
            "Lifting along W1 and then W2 equals lifting along W1 ⊗ W2, after the nesting reindexing.",
            true,
            true,
        ),
        row(
            LawId::L4,
            "exponential",
            "Lifting commutes with exponentials: the comparison (M^N)∘G -> (M∘G)^(N∘G) is an isomorphism.",
            false,
            true,
        ),
        row(LawId::L5, "alpha-identity", "The transformation induced by an identity morphism is the identity.", true, true),
        row(LawId::L6, "alpha-composition", "Induced transformations compose: α(ψ∘φ) = α(ψ)·α(φ).", true, true),
        row(
            LawId::L7,
            "alpha-exponential",
            "Induced transformations are compatible with exponentials: the two comparison composites agree.",
            false,
            true,
        ),
        row(LawId::L8, "real-line", "The lift of the real line is R ⊗ W with its ring structure.", true, false),
        row(LawId::L9, "alpha-real-line", "The induced transformation on the real line is R ⊗ φ.", true, false),
        row(LawId::L10, "slice-exponential", "Every slice is cartesian closed: fiberwise exponentials satisfy currying.", false, true),
        row(LawId::L11, "alpha-naturality", "Induced transformations are natural in the lifted map.", true, true),
        row(
            LawId::L12,
            "localization",
            "The sliced construction over a sliced object is the sliced construction over its total object.",
            false,
            true,
        ),
    ]
}

/// Markdown traceability table, kept in `docs/laws.md`.
pub fn laws_markdown() -> String {
    let mut out = String::from("# Laws\n\nGenerated from `enumerate_laws`.\n\n| id | name | statement | numeric | finset |\n|---|---|---|---|---|\n");
    let mark = |b: bool| if b { "yes" } else { "no" };
    for l in enumerate_laws() {
        out.push_str(&format!("| {} | {} | {} | {} | {} |\n", l.id, l.name, l.statement, mark(l.numeric), mark(l.finset)));
    }
    out
}

/// One run request. Empty override lists mean the curated defaults.
#[derive(Clone, Debug)]
pub struct LawInstance {
    pub law: LawId,
    pub model: Model,
    pub mode: ScalarMode,
    pub seed: u64,
    pub bound: Bound,
    pub algebras: Vec<Arc<WeilAlgebra>>,
    pub morphisms: Vec<WeilMorphism>,
    pub maps: Vec<SmoothMap>,
}

impl LawInstance {
    pub fn new(law: LawId, model: Model) -> LawInstance {
        LawInstance {
            law,
            model,
            mode: ScalarMode::Rational,
            seed: 0,
            bound: Bound::default(),
            algebras: Vec::new(),
            morphisms: Vec::new(),
            maps: Vec::new(),
        }
    }

    pub fn mode(mut self, mode: ScalarMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LawReport {
    pub law_id: LawId,
    pub model: Model,
    pub mode: ScalarMode,
    pub instances_run: u64,
    pub failures: u64,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    pub exact: bool,
    pub witnesses: Vec<String>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

const FLOAT_TOLERANCE: f64 = 1e-10;
const MAX_WITNESSES: usize = 5;

struct Tally {
    report: LawReport,
}

impl Tally {
    fn new(law: LawId, model: Model, mode: ScalarMode) -> Tally {
        Tally {
            report: LawReport {
                law_id: law,
                model,
                mode,
                instances_run: 0,
                failures: 0,
                max_abs_error: 0.0,
                max_rel_error: 0.0,
                exact: true,
                witnesses: Vec::new(),
            },
        }
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.report.instances_run += 1;
        if !ok {
            self.fail(witness());
        }
    }

    fn fail(&mut self, witness: String) {
        self.report.failures += 1;
        self.report.exact = false;
        if self.report.witnesses.len() < MAX_WITNESSES {
            self.report.witnesses.push(witness);
        }
    }

    /// Exact equality in rational mode, relative error within tolerance in
    /// float mode.
    fn compare<S: Scalar>(&mut self, actual: &[S], expected: &[S], witness: impl FnOnce() -> String) {
        self.report.instances_run += 1;
        let (mut a, mut b) = (Vec::new(), Vec::new());
        actual.iter().for_each(|x| x.flatten_f64(&mut a));
        expected.iter().for_each(|x| x.flatten_f64(&mut b));
        if a.len() != b.len() {
            self.fail(witness());
            return;
        }
        let abs = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let rel = normwise_rel_error(&a, &b);
        let equal = actual == expected;
        if !equal {
            self.report.exact = false;
        }
        if abs.is_finite() {
            self.report.max_abs_error = self.report.max_abs_error.max(abs);
        }
        if rel.is_finite() {
            self.report.max_rel_error = self.report.max_rel_error.max(rel);
        }
        let ok = match S::mode() {
            ScalarMode::Rational => equal,
            ScalarMode::Float => rel.is_finite() && rel <= FLOAT_TOLERANCE,
        };
        if !ok {
            self.fail(format!("{} (relative error {rel:e})", witness()));
        }
    }

    fn finish(mut self) -> LawReport {
        if self.report.mode == ScalarMode::Float && self.report.model == Model::Numeric {
            self.report.exact &= self.report.max_abs_error == 0.0;
        }
        self.report
    }
}

/// A corpus entry: a map with its base point.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub map: SmoothMap,
    pub point: Vec<Rational>,
    pub source: String,
}

/// Lines `vars ; point ; expression`, `#` comments.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>, LawError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |message: &str| LawError::Corpus { line: n + 1, message: message.to_string() };
        let parts: Vec<&str> = line.splitn(3, ';').map(str::trim).collect();
        let [vars, point, expr] = parts[..] else {
            return Err(bad("expected `vars ; point ; expression`"));
        };
        let vars: Vec<&str> = vars.split_whitespace().collect();
        let point = point
            .split(',')
            .map(|p| parse_rational(p).ok_or_else(|| bad("malformed coordinate")))
            .collect::<Result<Vec<_>, _>>()?;
        if point.len() != vars.len() {
            return Err(bad("point and variables differ in length"));
        }
        let map = SmoothMap::scalar(expr, &vars)?;
        out.push(CorpusEntry { map, point, source: expr.to_string() });
    }
    Ok(out)
}

/// Polynomial and rational maps, evaluable exactly.
pub fn rational_corpus() -> Vec<CorpusEntry> {
    parse_corpus(include_str!("../data/corpus/rational.txt")).expect("bundled corpus parses")
}

/// Maps built from exp, log, trigonometric and related primitives.
pub fn transcendental_corpus() -> Vec<CorpusEntry> {
    parse_corpus(include_str!("../data/corpus/transcendental.txt")).expect("bundled corpus parses")
}

fn arc(a: WeilAlgebra) -> Arc<WeilAlgebra> {
    Arc::new(a)
}

/// `dual:1, dual:2, jet:2, jet:3, mixed:1,1, dual:1 ⊗ dual:1, jet:2 ⊗ dual:1`.
pub fn default_algebras() -> Vec<Arc<WeilAlgebra>> {
    let d1 = arc(WeilAlgebra::dual(1).expect("dual"));
    let j2 = arc(WeilAlgebra::jet(2).expect("jet"));
    vec![
        d1.clone(),
        arc(WeilAlgebra::dual(2).expect("dual")),
        j2.clone(),
        arc(WeilAlgebra::jet(3).expect("jet")),
        arc(WeilAlgebra::mixed(&[1, 1]).expect("mixed")),
        tensor(&d1, &d1).0,
        tensor(&j2, &d1).0,
    ]
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Curated morphisms between the default algebras.
pub fn default_morphisms() -> Vec<WeilMorphism> {
    let d1 = arc(WeilAlgebra::dual(1).expect("dual"));
    let j2 = arc(WeilAlgebra::jet(2).expect("jet"));
    let j3 = arc(WeilAlgebra::jet(3).expect("jet"));
    let mixed = arc(WeilAlgebra::mixed(&[1, 1]).expect("mixed"));
    let dd = tensor(&d1, &d1).0;
    let sum: Vec<Rational> = dd.generator_vector(0).iter().zip(dd.generator_vector(1)).map(|(a, b)| a + b).collect();
    let square = |a: &Arc<WeilAlgebra>| a.monomial_vector(&Monomial::power(0, 2));
    let scaled = |v: Vec<Rational>, k: i64| v.into_iter().map(|c| c * q(k)).collect::<Vec<_>>();
    let build = |s: &Arc<WeilAlgebra>, t: &Arc<WeilAlgebra>, images: Vec<Vec<Rational>>| {
        WeilMorphism::from_generator_images(s, t, &images).expect("curated morphism is well defined")
    };
    vec![
        build(&j2, &dd, vec![sum]),
        tensor_of_morphisms(&WeilMorphism::augmentation(&d1), &WeilMorphism::identity(&d1)),
        build(&j3, &j2, vec![j2.generator_vector(0)]),
        build(&d1, &j2, vec![square(&j2)]),
        build(&j2, &j3, vec![square(&j3)]),
        build(&mixed, &d1, vec![d1.generator_vector(0), scaled(d1.generator_vector(0), 3)]),
        WeilMorphism::augmentation(&j3),
        WeilMorphism::unit(&arc(WeilAlgebra::dual(2).expect("dual"))),
        WeilMorphism::identity(&mixed),
    ]
}

/// `W1 ⊗ W2` presented directly by generators and relations, with the map
/// from the pair basis of [`tensor`] to its basis.
fn presented_product(w1: &WeilAlgebra, w2: &WeilAlgebra) -> Result<(Arc<WeilAlgebra>, Vec<usize>), LawError> {
    let n1 = w1.generator_names().len();
    let n2 = w2.generator_names().len();
    let names: Vec<String> = (0..n1 + n2).map(|g| format!("g{g}")).collect();
    let mut rels: Vec<Monomial> = w1.vanishing_monomials().to_vec();
    rels.extend(w2.vanishing_monomials().iter().map(|m| m.shifted(n1)));
    let presented = arc(WeilAlgebra::present(&names, rels)?);
    let mut index = vec![0; w1.dim() * w2.dim()];
    for (j, b) in w2.basis().iter().enumerate() {
        for (i, a) in w1.basis().iter().enumerate() {
            let m = a.mul(&b.shifted(n1));
            index[i + w1.dim() * j] = presented
                .basis_index(&m)
                .ok_or_else(|| LawError::Corpus { line: 0, message: format!("{m:?} missing from the presented product") })?;
        }
    }
    Ok((presented, index))
}

struct NumericSetup {
    algebras: Vec<Arc<WeilAlgebra>>,
    morphisms: Vec<WeilMorphism>,
    corpus: Vec<CorpusEntry>,
}

impl NumericSetup {
    fn from(instance: &LawInstance) -> NumericSetup {
        let algebras = if instance.algebras.is_empty() { default_algebras() } else { instance.algebras.clone() };
        let morphisms = if instance.morphisms.is_empty() { default_morphisms() } else { instance.morphisms.clone() };
        let corpus = if instance.maps.is_empty() {
            let mut c = rational_corpus();
            if instance.mode == ScalarMode::Float {
                c.extend(transcendental_corpus());
            }
            c
        } else {
            instance
                .maps
                .iter()
                .map(|m| CorpusEntry { map: m.clone(), point: vec![Rational::new(1.into(), 3.into()); m.arity()], source: m.render().join(", ") })
                .collect()
        };
        NumericSetup { algebras, morphisms, corpus }
    }
}

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(-5i64..=5).into(), rng.gen_range(1i64..=6).into())
}

/// A point of `W` over `base`: augmentation `base`, random nilpotent part.
fn random_point<S: Scalar>(rng: &mut ChaCha8Rng, algebra: &Arc<WeilAlgebra>, base: &Rational) -> WeilNumber<S>
where
    S::Ctx: Default,
{
    let ctx = S::Ctx::default();
    let coeffs = (0..algebra.dim())
        .map(|k| S::from_rational(&ctx, &if k == 0 { base.clone() } else { small_rational(rng) }))
        .collect();
    WeilNumber::new(algebra, coeffs).expect("dimension matches")
}

fn ctx_over<S: Scalar>(algebra: &Arc<WeilAlgebra>) -> WeilCtx<S::Ctx>
where
    S::Ctx: Default,
{
    WeilCtx { algebra: algebra.clone(), inner: S::Ctx::default() }
}

fn lift<S: Scalar>(f: &SmoothMap, algebra: &Arc<WeilAlgebra>, x: &[WeilNumber<S>]) -> Result<Vec<WeilNumber<S>>, LawError>
where
    S::Ctx: Default,
{
    Ok(lift_eval_with(f, &ctx_over::<S>(algebra), x)?)
}

fn coeffs<S: Scalar>(values: &[WeilNumber<S>]) -> Vec<S> {
    values.iter().flat_map(|v| v.coeffs().iter().cloned()).collect()
}

/// `matrix · v`, computed without the morphism code.
fn matrix_apply<S: Scalar>(matrix: &[Vec<Rational>], v: &[S]) -> Vec<S> {
    matrix
        .iter()
        .map(|row| {
            let ctx = v[0].ctx();
            row.iter().zip(v).fold(S::zero_in(&ctx), |acc, (m, x)| acc + x.mul_rational(m))
        })
        .collect()
}

fn matrix_product(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum()).collect())
        .collect()
}

fn run_numeric<S: Scalar>(instance: &LawInstance) -> Result<LawReport, LawError>
where
    S::Ctx: Default,
{
    let setup = NumericSetup::from(instance);
    let mut rng = ChaCha8Rng::seed_from_u64(instance.seed ^ (instance.law as u64) << 32);
    let mut t = Tally::new(instance.law, Model::Numeric, S::mode());
    let corpus: Vec<&CorpusEntry> = setup.corpus.iter().filter(|e| S::mode() == ScalarMode::Float || e.map.is_rational()).collect();
    let points = |rng: &mut ChaCha8Rng, w: &Arc<WeilAlgebra>, e: &CorpusEntry| -> Vec<WeilNumber<S>> {
        e.point.iter().map(|a| random_point::<S>(rng, w, a)).collect()
    };
    match instance.law {
        LawId::L1 => {
            for w in &setup.algebras {
                for pair in corpus.windows(2) {
                    let (f, g) = (pair[0], pair[1]);
                    if f.map.arity() != g.map.arity() {
                        continue;
                    }
                    let x = points(&mut rng, w, f);
                    let both = SmoothMap::tuple(&[f.map.clone(), g.map.clone()]).expect("same arity");
                    let joint = lift(&both, w, &x)?;
                    let mut separate = lift(&f.map, w, &x)?;
                    separate.extend(lift(&g.map, w, &x)?);
                    t.compare(&coeffs(&joint), &coeffs(&separate), || format!("pairing of `{}` and `{}` over {}", f.source, g.source, w.name()));
                }
                let x = points(&mut rng, w, corpus[0]);
                let constant = SmoothMap::scalar("7/3", &["x"])?;
                let one = WeilNumber::constant(w, S::from_rational(&S::Ctx::default(), &Rational::new(7.into(), 3.into())));
                let lifted = lift(&constant, w, &x[..1])?;
                t.compare(&coeffs(&lifted), one.coeffs(), || format!("terminal map over {}", w.name()));
            }
        }
        LawId::L2 => {
            let base = arc(WeilAlgebra::base());
            for e in &corpus {
                let ctx = S::Ctx::default();
                let x: Vec<S> = e.point.iter().map(|a| S::from_rational(&ctx, a)).collect();
                let lifted_in: Vec<WeilNumber<S>> = x.iter().map(|v| WeilNumber::constant(&base, v.clone())).collect();
                let lifted = lift(&e.map, &base, &lifted_in)?;
                let direct = e.map.eval::<S>(&ctx, &x).map_err(FunctorError::from)?;
                t.compare(&coeffs(&lifted), &direct, || format!("`{}` over the base algebra", e.source));
            }
        }
        LawId::L3 => {
            let d1 = arc(WeilAlgebra::dual(1)?);
            let j2 = arc(WeilAlgebra::jet(2)?);
            let pairs: Vec<(Arc<WeilAlgebra>, Arc<WeilAlgebra>)> = if instance.algebras.is_empty() {
                let a = &setup.algebras;
                vec![
                    (d1.clone(), j2.clone()),
                    (j2.clone(), d1.clone()),
                    (a[1].clone(), a[4].clone()),
                    (a[3].clone(), d1.clone()),
                    (d1.clone(), d1.clone()),
                    (a[4].clone(), a[2].clone()),
                ]
            } else {
                setup.algebras.iter().flat_map(|w| [(w.clone(), d1.clone()), (d1.clone(), w.clone())]).collect()
            };
            for (w1, w2) in &pairs {
                let product = tensor(w1, w2).0;
                let (presented, index) = presented_product(w1, w2)?;
                for e in &corpus {
                    let x = points(&mut rng, &product, e);
                    let flat = lift(&e.map, &product, &x)?;
                    let nested_in = x.iter().map(|v| nest_iso(w1, w2, v)).collect::<Result<Vec<_>, _>>()?;
                    let ctx = WeilCtx { algebra: w2.clone(), inner: ctx_over::<S>(w1) };
                    let nested_out = lift_eval_with::<WeilNumber<S>>(&e.map, &ctx, &nested_in)?;
                    let unnested = nested_out.iter().map(|v| unnest_iso(w1, w2, v)).collect::<Result<Vec<_>, _>>()?;
                    let label = || format!("`{}` over {} then {}", e.source, w1.name(), w2.name());
                    t.compare(&coeffs(&unnested), &coeffs(&flat), label);
                    let moved: Vec<WeilNumber<S>> = x
                        .iter()
                        .map(|v| {
                            let mut c = vec![S::zero_in(&S::Ctx::default()); presented.dim()];
                            for (k, value) in v.coeffs().iter().enumerate() {
                                c[index[k]] = value.clone();
                            }
                            WeilNumber::new(&presented, c).expect("dimension matches")
                        })
                        .collect();
                    let reference = lift(&e.map, &presented, &moved)?;
                    let back: Vec<S> = unnested
                        .iter()
                        .flat_map(|v| {
                            let mut c = vec![S::zero_in(&S::Ctx::default()); presented.dim()];
                            for (k, value) in v.coeffs().iter().enumerate() {
                                c[index[k]] = value.clone();
                            }
                            c
                        })
                        .collect();
                    t.compare(&back, &coeffs(&reference), || {
                        format!("`{}` over {} then {} against the presented product", e.source, w1.name(), w2.name())
                    });
                }
            }
        }
        LawId::L5 => {
            for w in &setup.algebras {
                let id = WeilMorphism::identity(w);
                for e in &corpus {
                    let x = points(&mut rng, w, e);
                    let y = lift(&e.map, w, &x)?;
                    let pushed = y.iter().map(|v| v.push_along(&id)).collect::<Result<Vec<_>, _>>()?;
                    t.compare(&coeffs(&pushed), &coeffs(&y), || format!("identity of {} on `{}`", w.name(), e.source));
                }
            }
        }
        LawId::L6 => {
            for phi in &setup.morphisms {
                for psi in setup.morphisms.iter().filter(|p| p.source() == phi.target()) {
                    let both = compose(phi, psi)?;
                    let oracle = matrix_product(psi.matrix(), phi.matrix());
                    t.check(both.matrix() == oracle.as_slice(), || {
                        format!("composite {} -> {} -> {} differs from the matrix product", phi.source().name(), phi.target().name(), psi.target().name())
                    });
                    for e in &corpus {
                        let x = points(&mut rng, phi.source(), e);
                        let y = lift(&e.map, phi.source(), &x)?;
                        let once = y.iter().map(|v| v.push_along(&both)).collect::<Result<Vec<_>, _>>()?;
                        let twice = y
                            .iter()
                            .map(|v| v.push_along(phi).and_then(|u| u.push_along(psi)))
                            .collect::<Result<Vec<_>, _>>()?;
                        t.compare(&coeffs(&once), &coeffs(&twice), || {
                            format!("`{}` along {} -> {} -> {}", e.source, phi.source().name(), phi.target().name(), psi.target().name())
                        });
                    }
                }
            }
        }
        LawId::L8 => {
            let mul = SmoothMap::scalar("x*y", &["x", "y"])?;
            let add = SmoothMap::scalar("x+y", &["x", "y"])?;
            let ident = SmoothMap::scalar("x", &["x", "y"])?;
            for w in &setup.algebras {
                for _ in 0..4 {
                    let base = small_rational(&mut rng);
                    let a = random_point::<S>(&mut rng, w, &base);
                    let base = small_rational(&mut rng);
                    let b = random_point::<S>(&mut rng, w, &base);
                    let xs = [a.clone(), b.clone()];
                    let product = w.mul_vectors(a.coeffs(), b.coeffs());
                    t.compare(&coeffs(&lift(&mul, w, &xs)?), &product, || format!("product over {}", w.name()));
                    let sum: Vec<S> = a.coeffs().iter().zip(b.coeffs()).map(|(u, v)| u.clone() + v.clone()).collect();
                    t.compare(&coeffs(&lift(&add, w, &xs)?), &sum, || format!("sum over {}", w.name()));
                    t.compare(&coeffs(&lift(&ident, w, &xs)?), a.coeffs(), || format!("identity map over {}", w.name()));
                }
            }
        }
        LawId::L9 => {
            for phi in &setup.morphisms {
                let w = phi.source();
                let one = WeilNumber::constant(w, S::one_in(&S::Ctx::default()));
                t.compare(one.push_along(phi)?.coeffs(), WeilNumber::constant(phi.target(), S::one_in(&S::Ctx::default())).coeffs(), || {
                    format!("unit along {} -> {}", w.name(), phi.target().name())
                });
                for _ in 0..4 {
                    let base = small_rational(&mut rng);
                    let a = random_point::<S>(&mut rng, w, &base);
                    let base = small_rational(&mut rng);
                    let b = random_point::<S>(&mut rng, w, &base);
                    let pushed = a.push_along(phi)?;
                    t.compare(pushed.coeffs(), &matrix_apply(phi.matrix(), a.coeffs()), || {
                        format!("coefficients along {} -> {}", w.name(), phi.target().name())
                    });
                    let left = a.try_mul(&b)?.push_along(phi)?;
                    let right = pushed.try_mul(&b.push_along(phi)?)?;
                    t.compare(left.coeffs(), right.coeffs(), || format!("multiplicativity along {} -> {}", w.name(), phi.target().name()));
                }
            }
        }
        LawId::L11 => {
            for phi in &setup.morphisms {
                for e in &corpus {
                    let x = points(&mut rng, phi.source(), e);
                    let pushed_in = x.iter().map(|v| v.push_along(phi)).collect::<Result<Vec<_>, _>>()?;
                    let after = lift(&e.map, phi.target(), &pushed_in)?;
                    let before = lift(&e.map, phi.source(), &x)?.iter().map(|v| v.push_along(phi)).collect::<Result<Vec<_>, _>>()?;
                    t.compare(&coeffs(&before), &coeffs(&after), || {
                        format!("`{}` along {} -> {}", e.source, phi.source().name(), phi.target().name())
                    });
                }
            }
        }
        law => return Err(LawError::UnavailableInModel { law, model: Model::Numeric }),
    }
    Ok(t.finish())
}

/// Every endofunctor the finite checks use, grouped by category.
fn endofunctors_of(cat: &Arc<FinCat>) -> Vec<Endofunctor> {
    let mut out: Vec<Endofunctor> = Vec::new();
    for p in bundled::plain_endofunctors() {
        for g in [Some(p.functor.clone()), p.family.map(|f| f.target)].into_iter().flatten() {
            if g.cat() == cat && !out.contains(&g) {
                out.push(g);
            }
        }
    }
    for o in 0..cat.object_count() {
        out.push(Endofunctor::constant(cat, o));
    }
    out
}

/// Families used for the α laws: canonical maps of every datum and the
/// family into the shift.
fn families() -> Vec<NaturalFamily> {
    let mut out = Vec::new();
    for d in bundled::endofunctor_data() {
        out.push(d.data.p_family().expect("typed"));
        out.push(d.data.i_family().expect("typed"));
    }
    for p in bundled::plain_endofunctors() {
        if let Some(f) = p.family {
            if !out.contains(&f) {
                out.push(f);
            }
        }
    }
    out
}

fn small_functors(cat: &Arc<FinCat>, max: usize, bound: Bound) -> Result<Vec<Arc<FinFunctor>>, LawError> {
    Ok(functors_up_to_iso(cat, max, bound)?.into_iter().map(Arc::new).collect())
}

fn localization_inputs(d: &DataInstance, bound: Bound) -> Result<Vec<(crate::fincat::SlicedObject, Arc<FinFunctor>, Vec<IteratedObject>)>, LawError> {
    let cat = d.data.functor.cat();
    let mut out = Vec::new();
    let rs = [Arc::new(terminal(cat)), Arc::new(bundled::constant(cat, 2))];
    for l in small_functors(cat, 1, bound)? {
        let fam = bundled::sliced_family(&l, bound)?;
        for (k, a) in fam.objects.iter().enumerate() {
            let mut objects = Vec::new();
            for x in &fam.objects {
                for f in slice_morphisms(&x.structure, &a.structure, bound)? {
                    objects.push(IteratedObject::new(a, x.clone(), f)?);
                }
            }
            out.push((a.clone(), rs[k % 2].clone(), objects));
        }
    }
    Ok(out)
}

fn run_finset(instance: &LawInstance) -> Result<LawReport, LawError> {
    let bound = instance.bound;
    let mut t = Tally::new(instance.law, Model::Finset, instance.mode);
    match instance.law {
        LawId::L1 => {
            for cat in bundled::categories() {
                let fs = small_functors(&cat, 2, bound)?;
                for g in endofunctors_of(&cat) {
                    let one = Arc::new(terminal(&cat));
                    t.check(precompose(&g, &one)?.same_tables(&one), || format!("{} on the terminal functor", g.name()));
                    for m in &fs {
                        for n in &fs {
                            let (mn, _, _) = product(m, n)?;
                            let (mgng, _, _) = product(&Arc::new(precompose(&g, m)?), &Arc::new(precompose(&g, n)?))?;
                            t.check(precompose(&g, &mn)?.same_tables(&mgng), || format!("{} on {m} × {n}", g.name()));
                        }
                        let ends = nat_transformations(m, m, bound)?;
                        for (f1, f2) in ends.iter().zip(ends.iter().skip(1)) {
                            let (e, _) = equalizer(f1, f2)?;
                            let mg = Arc::new(precompose(&g, m)?);
                            let (eg, _) = equalizer(&precompose_nat(&g, f1, &mg, &mg)?, &precompose_nat(&g, f2, &mg, &mg)?)?;
                            t.check(precompose(&g, &e)?.same_tables(&eg), || format!("{} on an equalizer inside {m}", g.name()));
                        }
                    }
                }
            }
        }
        LawId::L2 => {
            for cat in bundled::categories() {
                let id = Endofunctor::identity(&cat);
                for m in small_functors(&cat, 2, bound)? {
                    t.check(precompose(&id, &m)? == *m, || format!("identity on {m}"));
                }
            }
        }
        LawId::L3 => {
            for cat in bundled::categories() {
                let gs = endofunctors_of(&cat);
                for m in small_functors(&cat, 2, bound)? {
                    for g1 in &gs {
                        for g2 in &gs {
                            let nested = precompose(g2, &Arc::new(precompose(g1, &m)?))?;
                            let direct = precompose(&g1.after(g2), &m)?;
                            t.check(nested.same_tables(&direct), || format!("{} then {} on {m}", g1.name(), g2.name()));
                        }
                    }
                }
            }
        }
        LawId::L4 | LawId::L7 => {
            for p in bundled::plain_endofunctors() {
                let cat = p.functor.cat();
                let fs = small_functors(cat, 2, bound)?;
                for m in &fs {
                    for n in &fs {
                        let r = exp_compat_check(&p.functor, m, n, p.family.as_ref(), bound)?;
                        if instance.law == LawId::L4 {
                            for c in &r.comparisons {
                                t.check(c.natural && c.isomorphism, || {
                                    format!("{} ({}) on {m}^{n}: {}", p.name, c.endofunctor, c.witness.clone().unwrap_or_default())
                                });
                            }
                        } else if let Some(eq) = r.composites_equal {
                            t.check(eq, || format!("{} on {m}^{n}: {}", p.name, r.composite_witness.clone().unwrap_or_default()));
                        }
                    }
                }
            }
        }
        LawId::L5 => {
            for cat in bundled::categories() {
                for g in endofunctors_of(&cat) {
                    let eta = NaturalFamily::identity(&g);
                    for m in small_functors(&cat, 2, bound)? {
                        let a = alpha_of(&eta, &m)?;
                        t.check(a == NatTrans::identity(a.source()), || format!("identity family of {} on {m}", g.name()));
                    }
                }
            }
        }
        LawId::L6 => {
            let fams = families();
            for first in &fams {
                for second in fams.iter().filter(|s| s.source == first.target) {
                    let both = second.after(first)?;
                    for m in small_functors(first.source.cat(), 2, bound)? {
                        let composite = alpha_of(&both, &m)?;
                        let stepwise = alpha_of(second, &m)?.after(&alpha_of(first, &m)?)?;
                        t.check(composite == stepwise, || format!("{} ⇒ {} ⇒ {} on {m}", first.source.name(), first.target.name(), second.target.name()));
                    }
                }
            }
        }
        LawId::L10 => {
            for cat in bundled::categories() {
                for fam in bundled::sliced_families(&cat, bound)?.iter().filter(|f| f.base.sizes().iter().all(|&n| n <= 1)) {
                    for a in &fam.objects {
                        for b in &fam.objects {
                            let r = verify_slice_ccc(a, b, &fam.probes, &fam.probe_morphisms, bound)?;
                            for o in &r.outcomes {
                                t.check(o.passed(), || format!("{} over {}: {}", o.probe, fam.base, o.witness.clone().unwrap_or_default()));
                            }
                        }
                    }
                }
            }
        }
        LawId::L11 => {
            for eta in families() {
                let cat = eta.source.cat();
                let fs = small_functors(cat, 2, bound)?;
                for m in &fs {
                    for n in &fs {
                        let (mg1, ng1) = (Arc::new(precompose(&eta.source, m)?), Arc::new(precompose(&eta.source, n)?));
                        let (mg2, ng2) = (Arc::new(precompose(&eta.target, m)?), Arc::new(precompose(&eta.target, n)?));
                        let am = alpha_of(&eta, m)?;
                        let an = alpha_of(&eta, n)?;
                        for f in nat_transformations(m, n, bound)?.iter().take(8) {
                            let left = an.after(&precompose_nat(&eta.source, f, &mg1, &ng1)?)?;
                            let right = precompose_nat(&eta.target, f, &mg2, &ng2)?.after(&am)?;
                            t.check(left == right, || format!("{} ⇒ {} along a map {m} ⇒ {n}", eta.source.name(), eta.target.name()));
                        }
                    }
                }
            }
        }
        LawId::L12 => {
            for d in bundled::endofunctor_data() {
                let second = d.second.as_ref().map(|(s, e)| (s, e));
                for (a, r, objects) in localization_inputs(&d, bound)? {
                    let report = localization_check(&d.data, &a, &r, &objects, second, bound)?;
                    for c in &report.checks {
                        t.check(c.passed, || format!("{} {} over {}: {}", d.name, c.name, a.total, c.witness.clone().unwrap_or_default()));
                    }
                }
            }
        }
        law => return Err(LawError::UnavailableInModel { law, model: Model::Finset }),
    }
    Ok(t.finish())
}

pub fn run_law(instance: &LawInstance) -> Result<LawReport, LawError> {
    let info = enumerate_laws().into_iter().find(|l| l.id == instance.law).expect("every law is listed");
    if !info.available(instance.model) {
        return Err(LawError::UnavailableInModel { law: instance.law, model: instance.model });
    }
    match (instance.model, instance.mode) {
        (Model::Numeric, ScalarMode::Rational) => run_numeric::<Rational>(instance),
        (Model::Numeric, ScalarMode::Float) => run_numeric::<f64>(instance),
        (Model::Finset, _) => run_finset(instance),
    }
}

/// Configuration for a full suite run.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub mode: ScalarMode,
    pub seed: u64,
    pub bound: Bound,
    /// Restrict to these laws; empty means all.
    pub laws: Vec<LawId>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { mode: ScalarMode::Rational, seed: 0, bound: Bound::default(), laws: Vec::new() }
    }
}

/// Runs every available (law, model) pair, sorted by law then model.
pub fn run_all(config: &SuiteConfig) -> Result<Vec<LawReport>, LawError> {
    let jobs: Vec<LawInstance> = enumerate_laws()
        .into_iter()
        .filter(|l| config.laws.is_empty() || config.laws.contains(&l.id))
        .flat_map(|l| {
            let (numeric, finset) = (l.numeric, l.finset);
            [(Model::Numeric, numeric), (Model::Finset, finset)].into_iter().filter(|&(_, ok)| ok).map(|(m, _)| m).map(move |m| {
                let mut inst = LawInstance::new(l.id, m).mode(config.mode).seed(config.seed);
                inst.bound = config.bound;
                inst
            })
        })
        .collect();
    let mut reports = jobs.par_iter().map(run_law).collect::<Result<Vec<_>, _>>()?;
    reports.sort_by(|a, b| (a.law_id, a.model).cmp(&(b.law_id, b.model)));
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listing_shape() {
        let laws = enumerate_laws();
        assert_eq!(laws.len(), 12);
        for id in [LawId::L4, LawId::L7, LawId::L10, LawId::L12] {
            let l = laws.iter().find(|l| l.id == id).unwrap();
            assert!(l.finset && !l.numeric);
        }
        for id in [LawId::L8, LawId::L9] {
            let l = laws.iter().find(|l| l.id == id).unwrap();
            assert!(l.numeric && !l.finset);
        }
        assert_eq!("l3".parse::<LawId>().unwrap(), LawId::L3);
        assert!("L13".parse::<LawId>().is_err());
    }

    #[test]
    fn docs_table_is_current() {
        let doc = include_str!("../docs/laws.md");
        assert_eq!(doc, laws_markdown());
    }

    #[test]
    fn corpora_are_large_enough() {
        assert!(rational_corpus().len() >= 10);
        assert!(rational_corpus().iter().all(|e| e.map.is_rational()));
        assert_eq!(transcendental_corpus().len(), 12);
        assert!(default_algebras().len() >= 5 && default_morphisms().len() >= 5);
        for phi in default_morphisms() {
            assert!(phi.validate().all_passed(), "{}", phi.validate());
        }
    }

    #[test]
    fn unavailable_model_is_an_error() {
        let r = run_law(&LawInstance::new(LawId::L4, Model::Numeric));
        assert!(matches!(r, Err(LawError::UnavailableInModel { .. })));
        let r = run_law(&LawInstance::new(LawId::L8, Model::Finset));
        assert!(matches!(r, Err(LawError::UnavailableInModel { .. })));
    }

    #[test]
    fn presented_product_matches_tensor() {
        let d1 = arc(WeilAlgebra::dual(1).unwrap());
        let j2 = arc(WeilAlgebra::jet(2).unwrap());
        let (p, index) = presented_product(&j2, &d1).unwrap();
        assert_eq!(p.dim(), 6);
        let mut sorted = index.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn rational_l3_is_exact() {
        let r = run_law(&LawInstance::new(LawId::L3, Model::Numeric)).unwrap();
        assert!(r.passed() && r.exact, "{r:?}");
        assert!(r.instances_run > 0);
    }

    #[test]
    fn full_suite_passes_in_both_modes() {
        for mode in [ScalarMode::Rational, ScalarMode::Float] {
            let reports = run_all(&SuiteConfig { mode, ..SuiteConfig::default() }).unwrap();
            assert_eq!(reports.len(), 18);
            for r in &reports {
                assert!(r.passed(), "{} {} {:?}: {:?}", r.law_id, r.model, mode, r.witnesses);
                assert!(r.instances_run > 0, "{} {}", r.law_id, r.model);
            }
        }
    }
}
