//! Command-line front end. [`run_command`] does all the work so the binary
//! stays a two-liner and tests can drive it in-process.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{tensor, AlgebraError, WeilAlgebra, WeilMorphism};
use crate::expr::{ExprError, SmoothMap};
use crate::fincat::{load_instance, Bound, CheckKind, FinCatError};
use crate::functor::{lift_eval, partials, FunctorError, JetTable, Normalization};
use crate::laws::{run_all, LawError, LawId, LawReport, SuiteConfig};
use crate::number::WeilNumber;
use crate::scalar::{format_rational, parse_rational, rational_to_f64, Rational, Scalar, ScalarMode};

#[derive(Parser, Debug)]
#[command(name = "weilad", version, about = "Weil-algebra derivatives and finite functor-category checks")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Enumeration bound for the finite model (defaults to WEILAD_MAX_ENUM or 10^7).
    #[arg(long, global = true)]
    pub max_enum: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Human,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Inspect Weil algebras.
    #[command(subcommand)]
    Algebra(AlgebraCommand),
    /// Derivatives of a one-variable map up to an order.
    Jet {
        /// Inline expression in `x`, or a function file.
        #[arg(long = "fn")]
        function: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value = "float")]
        scalar: ScalarMode,
        #[arg(long, default_value = "derivative")]
        normalization: Normalization,
    },
    /// Mixed partial derivatives up to per-variable orders.
    Partials {
        /// Inline expression in `x, y, z` (or `x1 ... xn`), or a function file.
        #[arg(long = "fn")]
        function: String,
        /// Comma-separated point.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Comma-separated orders, one per variable.
        #[arg(long)]
        orders: String,
        #[arg(long, default_value = "float")]
        scalar: ScalarMode,
        #[arg(long, default_value = "derivative")]
        normalization: Normalization,
    },
    /// Algebra morphisms.
    #[command(subcommand)]
    Morphism(MorphismCommand),
    /// The law suite.
    #[command(subcommand)]
    Laws(LawsCommand),
    /// Finite-model checks on instance files.
    #[command(subcommand)]
    Model(ModelCommand),
}

#[derive(Subcommand, Debug)]
pub enum AlgebraCommand {
    /// Basis, dimension, nilpotency and multiplication table.
    Info { spec: String },
    /// Tensor product and its inclusions.
    Tensor { left: String, right: String },
}

#[derive(Subcommand, Debug)]
pub enum MorphismCommand {
    /// Push an element along the morphism given by generator images.
    Apply {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Images of the source generators as `;`-separated polynomials in
        /// the target generators.
        #[arg(long)]
        images: String,
        /// Element of the source as a polynomial in its generators.
        #[arg(long)]
        value: String,
        #[arg(long, default_value = "rational")]
        scalar: ScalarMode,
    },
}

#[derive(Subcommand, Debug)]
pub enum LawsCommand {
    /// Run the curated law suite.
    Run {
        #[arg(long)]
        law: Option<LawId>,
        #[arg(long, default_value = "rational")]
        scalar: ScalarMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum ModelCommand {
    /// Run a check on an instance file.
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        check: CheckKind,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Functor(#[from] FunctorError),
    #[error(transparent)]
    FinCat(#[from] FinCatError),
    #[error(transparent)]
    Law(#[from] LawError),
    #[error("{0}")]
    Input(String),
}

/// What a finished invocation produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandOutput {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Outcome {
    value: Value,
    human: String,
    ok: bool,
}

trait Render: Scalar {
    fn to_json(&self) -> Value;
    fn to_text(&self) -> String;
    fn parse_scalar(text: &str) -> Option<Self>;
}

impl Render for f64 {
    fn to_json(&self) -> Value {
        if self.is_finite() {
            json!(self)
        } else {
            json!(self.to_string())
        }
    }

    fn to_text(&self) -> String {
        self.to_string()
    }

    fn parse_scalar(text: &str) -> Option<f64> {
        text.trim().parse().ok().or_else(|| parse_rational(text).map(|q| rational_to_f64(&q)))
    }
}

impl Render for Rational {
    fn to_json(&self) -> Value {
        json!(format_rational(self))
    }

    fn to_text(&self) -> String {
        format_rational(self)
    }

    fn parse_scalar(text: &str) -> Option<Rational> {
        parse_rational(text)
    }
}

fn render_all<S: Render>(xs: &[S]) -> Vec<Value> {
    xs.iter().map(Render::to_json).collect()
}

fn text_all<S: Render>(xs: &[S]) -> String {
    xs.iter().map(Render::to_text).collect::<Vec<_>>().join(", ")
}

fn default_variables(n: usize) -> Vec<String> {
    match n {
        1..=3 => ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect(),
        _ => (1..=n).map(|k| format!("x{k}")).collect(),
    }
}

fn load_map(function: &str, arity: usize) -> Result<SmoothMap, CliError> {
    let path = Path::new(function);
    if path.is_file() {
        let map = SmoothMap::load_function_file(path)?;
        if map.arity() != arity {
            return Err(CliError::Input(format!("{function} takes {} variables, the point has {arity}", map.arity())));
        }
        return Ok(map);
    }
    let vars = default_variables(arity);
    let vars: Vec<&str> = vars.iter().map(String::as_str).collect();
    Ok(SmoothMap::scalar(function, &vars)?)
}

fn parse_list<T>(text: &str, what: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(|t| parse(t.trim()).ok_or_else(|| CliError::Input(format!("malformed {what} `{}`", t.trim()))))
        .collect()
}

fn jet_outcome<S: Render>(table: &JetTable<S>, function: &str) -> Outcome {
    let names = table.algebra.generator_names().to_vec();
    let entries: Vec<Value> = table
        .entries
        .iter()
        .map(|(m, v)| json!({"monomial": m.render(&names), "exponents": m.dense(names.len()), "values": render_all(v)}))
        .collect();
    let mut human = format!("{function} at ({}), {}\n", text_all(&table.base_point), table.normalization);
    for (name, v) in table.rows() {
        human.push_str(&format!("  {name:>10}  {}\n", text_all(v)));
    }
    Outcome {
        value: json!({
            "function": function,
            "at": render_all(&table.base_point),
            "normalization": table.normalization,
            "entries": entries,
        }),
        human,
        ok: true,
    }
}

fn run_jet<S: Render>(function: &str, at: &str, order: usize, normalization: Normalization) -> Result<Outcome, CliError> {
    let map = load_map(function, 1)?;
    let a = S::parse_scalar(at).ok_or_else(|| CliError::Input(format!("malformed point `{at}`")))?;
    let table = partials(&map, &[a], &[order], normalization)?;
    let mut out = jet_outcome(&table, function);
    let values: Vec<Value> = table.entries.iter().map(|(_, v)| v[0].to_json()).collect();
    out.value["order"] = json!(order);
    out.value["values"] = Value::Array(values);
    Ok(out)
}

fn run_partials<S: Render>(function: &str, at: &str, orders: &str, normalization: Normalization) -> Result<Outcome, CliError> {
    let point = parse_list(at, "coordinate", S::parse_scalar)?;
    let orders = parse_list(orders, "order", |t| t.parse::<usize>().ok())?;
    if orders.len() != point.len() {
        return Err(CliError::Input(format!("{} orders for a {}-dimensional point", orders.len(), point.len())));
    }
    let map = load_map(function, point.len())?;
    let table = partials(&map, &point, &orders, normalization)?;
    let mut out = jet_outcome(&table, function);
    out.value["orders"] = json!(orders);
    Ok(out)
}

fn algebra_json(w: &WeilAlgebra) -> Value {
    let report = w.validate();
    json!({
        "name": w.name(),
        "generators": w.generator_names(),
        "relations": w.vanishing_monomials().iter().map(|m| m.render(w.generator_names())).collect::<Vec<_>>(),
        "dim": w.dim(),
        "nilpotency": w.nilpotency_index(),
        "basis": w.basis_names(),
        "multiplication_table": w.multiplication_table(),
        "valid": report.all_passed(),
    })
}

fn algebra_text(w: &WeilAlgebra) -> String {
    let mut out = format!("{w}\nnilpotency {}\n", w.nilpotency_index());
    let names = w.basis_names();
    for (i, row) in w.multiplication_table().iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            out.push_str(&format!("  {} * {} = {entry}\n", names[i], names[j]));
        }
    }
    out
}

fn matrix_json(phi: &WeilMorphism) -> Value {
    json!(phi.matrix().iter().map(|row| row.iter().map(format_rational).collect::<Vec<_>>()).collect::<Vec<_>>())
}

/// A polynomial in the generators of `w`, read as an element of `w`.
fn element_of(w: &Arc<WeilAlgebra>, text: &str) -> Result<Vec<Rational>, CliError> {
    let names = w.generator_names();
    let vars: Vec<&str> = names.iter().map(String::as_str).collect();
    let map = SmoothMap::scalar(text, &vars)?;
    if !map.is_rational() {
        return Err(CliError::Input(format!("`{text}` is not a polynomial")));
    }
    let inputs: Vec<WeilNumber<Rational>> = (0..names.len()).map(|g| WeilNumber::variable(w, Rational::default(), g)).collect();
    let value = if inputs.is_empty() {
        let c = map.eval::<Rational>(&(), &[]).map_err(FunctorError::from)?;
        WeilNumber::constant(w, c[0].clone())
    } else {
        lift_eval(&map, w, &inputs)?.remove(0)
    };
    Ok(value.into_coeffs())
}

fn run_morphism<S: Render>(from: &str, to: &str, images: &str, value: &str) -> Result<Outcome, CliError>
where
    S::Ctx: Default,
{
    let source = Arc::new(WeilAlgebra::load(from)?);
    let target = Arc::new(WeilAlgebra::load(to)?);
    let images = images
        .split(';')
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(|t| element_of(&target, t))
        .collect::<Result<Vec<_>, _>>()?;
    let phi = WeilMorphism::from_generator_images(&source, &target, &images)?;
    let ctx = S::Ctx::default();
    let x: Vec<S> = element_of(&source, value)?.iter().map(|q| S::from_rational(&ctx, q)).collect();
    let y = phi.apply_vector(&x);
    let human = format!(
        "{} -> {}\n  value  {}\n  image  {}\n",
        source.name(),
        target.name(),
        text_all(&x),
        text_all(&y)
    );
    Ok(Outcome {
        value: json!({
            "source": source.name(),
            "target": target.name(),
            "matrix": matrix_json(&phi),
            "value": render_all(&x),
            "image": render_all(&y),
            "target_basis": target.basis_names(),
        }),
        human,
        ok: true,
    })
}

fn laws_text(reports: &[LawReport]) -> String {
    let mut out = format!("{:<4} {:<8} {:<9} {:>9} {:>8} {:>12}  result\n", "law", "model", "mode", "instances", "failures", "max rel err");
    for r in reports {
        out.push_str(&format!(
            "{:<4} {:<8} {:<9} {:>9} {:>8} {:>12.3e}  {}\n",
            r.law_id.to_string(),
            r.model.to_string(),
            r.mode.to_string(),
            r.instances_run,
            r.failures,
            r.max_rel_error,
            if r.passed() { "pass" } else { "FAIL" }
        ));
        for w in &r.witnesses {
            out.push_str(&format!("     {w}\n"));
        }
    }
    out
}

fn execute(cli: &Cli, bound: Bound) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Algebra(AlgebraCommand::Info { spec }) => {
            let w = WeilAlgebra::load(spec)?;
            let ok = w.validate().all_passed();
            Ok(Outcome { value: algebra_json(&w), human: algebra_text(&w), ok })
        }
        Command::Algebra(AlgebraCommand::Tensor { left, right }) => {
            let a = Arc::new(WeilAlgebra::load(left)?);
            let b = Arc::new(WeilAlgebra::load(right)?);
            let (p, i1, i2) = tensor(&a, &b);
            let ok = p.validate().all_passed();
            let value = json!({
                "product": algebra_json(&p),
                "left_inclusion": matrix_json(&i1),
                "right_inclusion": matrix_json(&i2),
            });
            Ok(Outcome { value, human: algebra_text(&p), ok })
        }
        Command::Jet { function, at, order, scalar, normalization } => match scalar {
            ScalarMode::Rational => run_jet::<Rational>(function, at, *order, *normalization),
            ScalarMode::Float => run_jet::<f64>(function, at, *order, *normalization),
        },
        Command::Partials { function, at, orders, scalar, normalization } => match scalar {
            ScalarMode::Rational => run_partials::<Rational>(function, at, orders, *normalization),
            ScalarMode::Float => run_partials::<f64>(function, at, orders, *normalization),
        },
        Command::Morphism(MorphismCommand::Apply { from, to, images, value, scalar }) => match scalar {
            ScalarMode::Rational => run_morphism::<Rational>(from, to, images, value),
            ScalarMode::Float => run_morphism::<f64>(from, to, images, value),
        },
        Command::Laws(LawsCommand::Run { law, scalar, seed }) => {
            let config = SuiteConfig { mode: *scalar, seed: *seed, bound, laws: law.iter().copied().collect() };
            let reports = run_all(&config)?;
            let ok = reports.iter().all(LawReport::passed);
            Ok(Outcome { value: json!(reports), human: laws_text(&reports), ok })
        }
        Command::Model(ModelCommand::Check { input, check }) => {
            let instance = load_instance(input)?;
            let (ok, value) = instance.run_check(*check, bound)?;
            let human = format!("{} on {}: {}\n", check_name(*check), input.display(), if ok { "pass" } else { "FAIL" });
            Ok(Outcome { value, human, ok })
        }
    }
}

fn check_name(kind: CheckKind) -> &'static str {
    match kind {
        CheckKind::Ccc => "ccc",
        CheckKind::SliceCcc => "slice-ccc",
        CheckKind::ExpCompat => "exp-compat",
        CheckKind::Localization => "localization",
    }
}

/// Parses `argv` (including the program name) and runs it. Status 0 on
/// success, 1 when a law or check fails, 2 on usage or input errors.
pub fn run_command<I, T>(argv: I) -> CommandOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if status == 0 {
                CommandOutput { status, stdout: text, stderr: String::new() }
            } else {
                CommandOutput { status, stdout: String::new(), stderr: text }
            };
        }
    };
    let bound = cli.max_enum.map(Bound).unwrap_or_default();
    match execute(&cli, bound) {
        Ok(out) => {
            let stdout = match cli.format {
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&out.value).expect("json")),
                Format::Human => out.human,
            };
            CommandOutput { status: if out.ok { 0 } else { 1 }, stdout, stderr: String::new() }
        }
        Err(e) => {
            let stdout = match cli.format {
                Format::Json => format!("{}\n", json!({"error": e.to_string()})),
                Format::Human => String::new(),
            };
            CommandOutput { status: 2, stdout, stderr: format!("error: {e}\n") }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, Value) {
        let out = run_command(std::iter::once("weilad").chain(args.iter().copied()));
        let value = serde_json::from_str(&out.stdout).unwrap_or(Value::Null);
        (out.status, value)
    }

    #[test]
    fn jet_of_exp_at_zero() {
        let (status, v) = run(&["jet", "--fn", "exp(x)", "--at", "0", "--order", "3"]);
        assert_eq!(status, 0);
        assert_eq!(v["values"], json!([1.0, 1.0, 1.0, 1.0]));
    }

    #[test]
    fn exact_jet_prints_fractions() {
        let (status, v) = run(&["jet", "--fn", "1/(1-x)", "--at", "1/2", "--order", "2", "--scalar", "rational"]);
        assert_eq!(status, 0);
        assert_eq!(v["values"], json!(["2", "4", "16"]));
    }

    #[test]
    fn base_algebra_info() {
        let (status, v) = run(&["algebra", "info", "base"]);
        assert_eq!(status, 0);
        assert_eq!(v["dim"], json!(1));
        assert_eq!(v["nilpotency"], json!(1));
    }

    #[test]
    fn morphism_apply_sums_generators() {
        let (status, v) = run(&["morphism", "apply", "--from", "jet:2", "--to", "mixed:1,1", "--images", "x1 + x2", "--value", "1 + x + x^2"]);
        assert_eq!(status, 0, "{v}");
        let basis: Vec<&str> = v["target_basis"].as_array().unwrap().iter().map(|b| b.as_str().unwrap()).collect();
        let image: Vec<&str> = v["image"].as_array().unwrap().iter().map(|b| b.as_str().unwrap()).collect();
        let coeff = |name: &str| image[basis.iter().position(|b| *b == name).unwrap()];
        assert_eq!((coeff("1"), coeff("x1"), coeff("x2"), coeff("x1*x2")), ("1", "1", "1", "2"));
    }

    #[test]
    fn usage_and_input_errors() {
        assert_eq!(run(&["jet", "--fn", "x"]).0, 2);
        let (status, v) = run(&["algebra", "info", "dual:q"]);
        assert_eq!(status, 2);
        assert!(v["error"].is_string());
        assert_eq!(run(&["laws", "run", "--law", "L13"]).0, 2);
    }
}
