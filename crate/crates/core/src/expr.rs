//! Expression DAGs for smooth maps `R^n -> R^m` and their evaluation over any
//! [`Scalar`].
//!
//! Nodes are hash-consed, so syntactically identical subtrees are stored
//! once and evaluated once per evaluation. Children always have smaller ids
//! than their parents, which makes a single forward sweep a valid schedule.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use num::Zero;
use thiserror::Error;

use crate::number::{pow_unsigned, NumError, Primitive};
use crate::scalar::{format_rational, parse_rational, Rational, Scalar};

pub type ExprId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Variable(usize),
    Constant(Rational),
    Binary(BinOp, ExprId, ExprId),
    /// Integer power, the one binary operator with a literal right operand.
    PowInt(ExprId, i32),
    Neg(ExprId),
    Unary(Primitive, ExprId),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("unknown function `{name}` at position {position}")]
    UnknownFunction { name: String, position: usize },
    #[error("unknown variable `{name}` at position {position}")]
    UnknownVariable { name: String, position: usize },
    #[error("variable index {index} out of range for arity {arity}")]
    VariableOutOfRange { index: usize, arity: usize },
    #[error("function file: {0}")]
    FunctionFile(String),
}

/// Failure while evaluating a node, naming the node.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("evaluating `{node}`: {source}")]
pub struct EvalError {
    pub node_id: ExprId,
    pub node: String,
    #[source]
    pub source: NumError,
}

/// Hash-consed node arena.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExprGraph {
    nodes: Vec<Node>,
    index: HashMap<Node, ExprId>,
}

impl ExprGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: ExprId) -> &Node {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Interns `node`, folding constant subtrees.
    pub fn add(&mut self, node: Node) -> ExprId {
        let node = self.fold(node);
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    fn constant(&self, id: ExprId) -> Option<&Rational> {
        match &self.nodes[id] {
            Node::Constant(c) => Some(c),
            _ => None,
        }
    }

    fn fold(&self, node: Node) -> Node {
        match &node {
            Node::Binary(op, a, b) => {
                if let (Some(x), Some(y)) = (self.constant(*a), self.constant(*b)) {
                    let value = match op {
                        BinOp::Add => x + y,
                        BinOp::Sub => x - y,
                        BinOp::Mul => x * y,
                        BinOp::Div if !y.is_zero() => x / y,
                        BinOp::Div => return node,
                    };
                    return Node::Constant(value);
                }
                node
            }
            Node::Neg(a) => match self.constant(*a) {
                Some(x) => Node::Constant(-x),
                None => node,
            },
            Node::PowInt(a, n) => match self.constant(*a) {
                Some(x) if *n >= 0 => Node::Constant(num::pow(x.clone(), *n as usize)),
                Some(x) if !x.is_zero() => Node::Constant(num::pow(x.recip(), n.unsigned_abs() as usize)),
                _ => node,
            },
            _ => node,
        }
    }

    pub fn variable(&mut self, i: usize) -> ExprId {
        self.add(Node::Variable(i))
    }

    pub fn constant_node(&mut self, c: Rational) -> ExprId {
        self.add(Node::Constant(c))
    }

    pub fn render(&self, id: ExprId, names: &[String]) -> String {
        match &self.nodes[id] {
            Node::Variable(i) => names.get(*i).cloned().unwrap_or_else(|| format!("v{i}")),
            Node::Constant(c) => {
                let s = format_rational(c);
                if s.contains('/') || s.starts_with('-') {
                    format!("({s})")
                } else {
                    s
                }
            }
            Node::Binary(op, a, b) => {
                format!("({} {} {})", self.render(*a, names), op.symbol(), self.render(*b, names))
            }
            Node::PowInt(a, n) => {
                if *n < 0 {
                    format!("{}^({n})", self.render(*a, names))
                } else {
                    format!("{}^{n}", self.render(*a, names))
                }
            }
            Node::Neg(a) => format!("(-{})", self.render(*a, names)),
            Node::Unary(p, a) => {
                let inner = self.render(*a, names);
                match p {
                    Primitive::PowInt(n) => format!("{inner}^{n}"),
                    other => format!("{}({})", other.name(), inner.trim_start_matches('(').trim_end_matches(')')),
                }
            }
        }
    }

    fn reachable(&self, roots: &[ExprId]) -> Vec<bool> {
        let mut mark = vec![false; self.nodes.len()];
        let mut stack: Vec<ExprId> = roots.to_vec();
        while let Some(id) = stack.pop() {
            if mark[id] {
                continue;
            }
            mark[id] = true;
            match &self.nodes[id] {
                Node::Binary(_, a, b) => stack.extend([*a, *b]),
                Node::PowInt(a, _) | Node::Neg(a) | Node::Unary(_, a) => stack.push(*a),
                Node::Variable(_) | Node::Constant(_) => {}
            }
        }
        mark
    }

    /// Evaluates `roots` at `inputs`; every reachable node is computed once.
    pub fn eval<S: Scalar>(&self, roots: &[ExprId], ctx: &S::Ctx, inputs: &[S]) -> Result<Vec<S>, EvalError> {
        let live = self.reachable(roots);
        let mut values: Vec<Option<S>> = vec![None; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            if !live[id] {
                continue;
            }
            let get = |i: ExprId| values[i].clone().expect("children precede parents");
            let fail = |source: NumError| EvalError { node_id: id, node: self.render(id, &[]), source };
            let v = match node {
                Node::Variable(i) => inputs
                    .get(*i)
                    .cloned()
                    .ok_or_else(|| fail(NumError::Length { expected: i + 1, found: inputs.len() }))?,
                Node::Constant(c) => S::from_rational(ctx, c),
                Node::Binary(op, a, b) => {
                    let (x, y) = (get(*a), get(*b));
                    match op {
                        BinOp::Add => x + y,
                        BinOp::Sub => x - y,
                        BinOp::Mul => x * y,
                        BinOp::Div => x * y.try_recip().ok_or_else(|| fail(NumError::NotAUnit))?,
                    }
                }
                Node::PowInt(a, n) => {
                    let x = get(*a);
                    if *n >= 0 {
                        pow_unsigned(&x, *n as u64)
                    } else {
                        let inv = x.try_recip().ok_or_else(|| fail(NumError::NotAUnit))?;
                        pow_unsigned(&inv, n.unsigned_abs() as u64)
                    }
                }
                Node::Neg(a) => -get(*a),
                Node::Unary(p, a) => crate::number::apply_primitive(*p, &get(*a)).map_err(fail)?,
            };
            values[id] = Some(v);
        }
        Ok(roots.iter().map(|&r| values[r].clone().expect("root evaluated")).collect())
    }
}

/// A single expression together with its arena.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub graph: ExprGraph,
    pub root: ExprId,
}

/// Parses one expression over the named variables.
pub fn parse_expr<S: AsRef<str>>(text: &str, variables: &[S]) -> Result<Expr, ExprError> {
    let names: Vec<String> = variables.iter().map(|v| v.as_ref().to_string()).collect();
    let mut graph = ExprGraph::new();
    let root = Parser::new(text, &names, &mut graph).parse_all()?;
    Ok(Expr { graph, root })
}

/// A smooth map `R^arity -> R^outputs`, all outputs sharing one arena.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothMap {
    variables: Vec<String>,
    graph: ExprGraph,
    outputs: Vec<ExprId>,
}

impl SmoothMap {
    pub fn parse<S: AsRef<str>>(outputs: &[&str], variables: &[S]) -> Result<SmoothMap, ExprError> {
        let names: Vec<String> = variables.iter().map(|v| v.as_ref().to_string()).collect();
        let mut graph = ExprGraph::new();
        let mut roots = Vec::new();
        for text in outputs {
            roots.push(Parser::new(text, &names, &mut graph).parse_all()?);
        }
        Ok(SmoothMap { variables: names, graph, outputs: roots })
    }

    /// Single-output convenience over `x` (or the given variables).
    pub fn scalar(text: &str, variables: &[&str]) -> Result<SmoothMap, ExprError> {
        Self::parse(&[text], variables)
    }

    pub fn from_graph(variables: Vec<String>, graph: ExprGraph, outputs: Vec<ExprId>) -> Result<SmoothMap, ExprError> {
        let arity = variables.len();
        for node in graph.nodes() {
            if let Node::Variable(i) = node {
                if *i >= arity {
                    return Err(ExprError::VariableOutOfRange { index: *i, arity });
                }
            }
        }
        Ok(SmoothMap { variables, graph, outputs })
    }

    /// Function-file format: a `vars x y ...` line, then one output expression
    /// per line. Blank lines and `#` comments are ignored.
    pub fn parse_function_file(text: &str) -> Result<SmoothMap, ExprError> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| ExprError::FunctionFile("empty file".into()))?;
        let vars: Vec<&str> = match header.strip_prefix("vars") {
            Some(rest) if rest.is_empty() || rest.starts_with(char::is_whitespace) => rest.split_whitespace().collect(),
            _ => return Err(ExprError::FunctionFile("first line must be `vars ...`".into())),
        };
        let outputs: Vec<&str> = lines.collect();
        if outputs.is_empty() {
            return Err(ExprError::FunctionFile("no output expressions".into()));
        }
        Self::parse(&outputs, &vars)
    }

    pub fn load_function_file(path: &Path) -> Result<SmoothMap, ExprError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExprError::FunctionFile(format!("{}: {e}", path.display())))?;
        Self::parse_function_file(&text)
    }

    pub fn arity(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn outputs(&self) -> &[ExprId] {
        &self.outputs
    }

    pub fn graph(&self) -> &ExprGraph {
        &self.graph
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    /// The map restricted to one output.
    pub fn component(&self, i: usize) -> SmoothMap {
        SmoothMap { variables: self.variables.clone(), graph: self.graph.clone(), outputs: vec![self.outputs[i]] }
    }

    /// Tuples several maps over the same variables into one.
    pub fn tuple(maps: &[SmoothMap]) -> Option<SmoothMap> {
        let first = maps.first()?;
        let mut graph = ExprGraph::new();
        let mut outputs = Vec::new();
        for m in maps {
            if m.variables != first.variables {
                return None;
            }
            let mut remap = Vec::with_capacity(m.graph.len());
            for node in m.graph.nodes() {
                let node = match node {
                    Node::Binary(op, a, b) => Node::Binary(*op, remap[*a], remap[*b]),
                    Node::PowInt(a, n) => Node::PowInt(remap[*a], *n),
                    Node::Neg(a) => Node::Neg(remap[*a]),
                    Node::Unary(p, a) => Node::Unary(*p, remap[*a]),
                    leaf => leaf.clone(),
                };
                remap.push(graph.add(node));
            }
            outputs.extend(m.outputs.iter().map(|&o| remap[o]));
        }
        Some(SmoothMap { variables: first.variables.clone(), graph, outputs })
    }

    pub fn eval<S: Scalar>(&self, ctx: &S::Ctx, inputs: &[S]) -> Result<Vec<S>, EvalError> {
        if inputs.len() != self.arity() {
            return Err(EvalError {
                node_id: 0,
                node: "<inputs>".into(),
                source: NumError::Length { expected: self.arity(), found: inputs.len() },
            });
        }
        self.graph.eval(&self.outputs, ctx, inputs)
    }

    /// Whether every node stays inside the exact (polynomial/rational) fragment.
    pub fn is_rational(&self) -> bool {
        self.graph.nodes().iter().all(|n| {
            !matches!(n, Node::Unary(p, _) if !matches!(p, Primitive::PowInt(_) | Primitive::Recip))
        })
    }

    pub fn render(&self) -> Vec<String> {
        self.outputs.iter().map(|&o| self.graph.render(o, &self.variables)).collect()
    }
}

impl fmt::Display for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) -> ({})", self.variables.join(", "), self.render().join(", "))
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    names: &'a [String],
    graph: &'a mut ExprGraph,
}

impl<'a> Parser<'a> {
    fn new(text: &str, names: &'a [String], graph: &'a mut ExprGraph) -> Self {
        Parser { chars: text.chars().collect(), pos: 0, names, graph }
    }

    /// 1-based position of the current character.
    fn position(&self) -> usize {
        self.pos + 1
    }

    fn error(&self, message: impl Into<String>) -> ExprError {
        ExprError::Parse { position: self.position(), message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn parse_all(&mut self) -> Result<ExprId, ExprError> {
        let id = self.expr()?;
        if self.peek().is_some() {
            return Err(self.error("unexpected trailing input"));
        }
        Ok(id)
    }

    fn expr(&mut self) -> Result<ExprId, ExprError> {
        let mut left = self.term()?;
        loop {
            let op = match self.peek() {
                Some('+') => BinOp::Add,
                Some('-') => BinOp::Sub,
                _ => return Ok(left),
            };
            self.pos += 1;
            let right = self.term()?;
            left = self.graph.add(Node::Binary(op, left, right));
        }
    }

    fn term(&mut self) -> Result<ExprId, ExprError> {
        let mut left = self.unary()?;
        loop {
            let op = match self.peek() {
                Some('*') => BinOp::Mul,
                Some('/') => BinOp::Div,
                _ => return Ok(left),
            };
            self.pos += 1;
            let right = self.unary()?;
            left = self.graph.add(Node::Binary(op, left, right));
        }
    }

    fn unary(&mut self) -> Result<ExprId, ExprError> {
        if self.eat('-') {
            let inner = self.unary()?;
            return Ok(self.graph.add(Node::Neg(inner)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprId, ExprError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let parenthesized = self.eat('(');
        self.skip_ws();
        let start = self.pos;
        if self.chars.get(self.pos) == Some(&'-') {
            self.pos += 1;
        }
        while self.chars.get(self.pos).is_some_and(char::is_ascii_digit) {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        let n: i32 = text.parse().map_err(|_| {
            self.pos = start;
            self.error("exponent must be an integer literal")
        })?;
        if parenthesized {
            self.expect(')')?;
        }
        Ok(self.graph.add(Node::PowInt(base, n)))
    }

    fn atom(&mut self) -> Result<ExprId, ExprError> {
        let Some(c) = self.peek() else {
            return Err(self.error("unexpected end of input"));
        };
        if c == '(' {
            self.pos += 1;
            let inner = self.expr()?;
            self.expect(')')?;
            return Ok(inner);
        }
        if c.is_ascii_digit() || c == '.' {
            return self.number();
        }
        if c.is_alphabetic() || c == '_' {
            let start = self.pos;
            while self.chars.get(self.pos).is_some_and(|c| c.is_alphanumeric() || *c == '_') {
                self.pos += 1;
            }
            let name: String = self.chars[start..self.pos].iter().collect();
            if self.peek() == Some('(') {
                let primitive = Primitive::from_name(&name)
                    .ok_or(ExprError::UnknownFunction { name: name.clone(), position: start + 1 })?;
                self.pos += 1;
                let arg = self.expr()?;
                self.expect(')')?;
                return Ok(self.graph.add(Node::Unary(primitive, arg)));
            }
            let index = self
                .names
                .iter()
                .position(|n| *n == name)
                .ok_or(ExprError::UnknownVariable { name, position: start + 1 })?;
            return Ok(self.graph.variable(index));
        }
        Err(self.error(format!("unexpected `{c}`")))
    }

    fn number(&mut self) -> Result<ExprId, ExprError> {
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit() || *c == '.') {
            self.pos += 1;
        }
        // exponent suffix: 1e-3, 2.5E4
        if matches!(self.chars.get(self.pos), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.chars.get(self.pos), Some('+' | '-')) {
                self.pos += 1;
            }
            if self.chars.get(self.pos).is_some_and(char::is_ascii_digit) {
                while self.chars.get(self.pos).is_some_and(char::is_ascii_digit) {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        let value = parse_rational(&text).ok_or_else(|| {
            ExprError::Parse { position: start + 1, message: format!("malformed number `{text}`") }
        })?;
        Ok(self.graph.constant_node(value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn parses_polynomial() {
        let e = parse_expr("x^2 + 1", &["x"]).unwrap();
        let g = &e.graph;
        let Node::Binary(BinOp::Add, a, b) = g.node(e.root) else { panic!("{:?}", g.node(e.root)) };
        assert_eq!(g.node(*a), &Node::PowInt(0, 2));
        assert_eq!(g.node(0), &Node::Variable(0));
        assert_eq!(g.node(*b), &Node::Constant(int(1)));
    }

    #[test]
    fn shares_identical_subtrees() {
        let e = parse_expr("sin(x)*sin(x)", &["x"]).unwrap();
        let Node::Binary(BinOp::Mul, a, b) = e.graph.node(e.root) else { panic!() };
        assert_eq!(a, b);
        assert_eq!(e.graph.len(), 3);
    }

    #[test]
    fn reports_positions() {
        assert_eq!(
            parse_expr("log(x", &["x"]).unwrap_err(),
            ExprError::Parse { position: 6, message: "expected `)`".into() }
        );
        assert_eq!(
            parse_expr("foo(x)", &["x"]).unwrap_err(),
            ExprError::UnknownFunction { name: "foo".into(), position: 1 }
        );
        assert_eq!(
            parse_expr("x + z", &["x"]).unwrap_err(),
            ExprError::UnknownVariable { name: "z".into(), position: 5 }
        );
        assert!(matches!(parse_expr("x^1.5", &["x"]), Err(ExprError::Parse { .. })));
        assert!(matches!(parse_expr("x +", &["x"]), Err(ExprError::Parse { .. })));
    }

    #[test]
    fn rational_literals_fold_exactly() {
        let e = parse_expr("3/4", &["x"]).unwrap();
        assert_eq!(e.graph.node(e.root), &Node::Constant(ratio(3, 4)));
        let f = SmoothMap::scalar("x/3 + 0.5", &["x"]).unwrap();
        assert_eq!(f.eval::<Rational>(&(), &[int(3)]).unwrap(), vec![ratio(3, 2)]);
    }

    #[test]
    fn evaluates_with_precedence() {
        let f = SmoothMap::scalar("-x^2 + 2*x*y - y^(-1)", &["x", "y"]).unwrap();
        let v = f.eval::<Rational>(&(), &[int(3), int(2)]).unwrap();
        assert_eq!(v, vec![int(-9) + int(12) - ratio(1, 2)]);
        let g = SmoothMap::scalar("exp(log(x))", &["x"]).unwrap();
        assert!((g.eval::<f64>(&(), &[2.5]).unwrap()[0] - 2.5).abs() < 1e-15);
    }

    #[test]
    fn evaluation_errors_name_the_node() {
        let f = SmoothMap::scalar("1/(x - 1)", &["x"]).unwrap();
        let err = f.eval::<Rational>(&(), &[int(1)]).unwrap_err();
        assert_eq!(err.source, NumError::NotAUnit);
        assert!(err.node.contains('/'), "{}", err.node);
        let g = SmoothMap::scalar("sin(x)", &["x"]).unwrap();
        assert!(matches!(g.eval::<Rational>(&(), &[int(1)]).unwrap_err().source, NumError::UnsupportedInRationalMode(_)));
    }

    #[test]
    fn function_file_and_tuples() {
        let f = SmoothMap::parse_function_file("# demo\nvars x y\nx*y\nx + y\n").unwrap();
        assert_eq!(f.arity(), 2);
        assert_eq!(f.output_count(), 2);
        let t = SmoothMap::tuple(&[f.component(1), f.component(0)]).unwrap();
        assert_eq!(t.eval::<Rational>(&(), &[int(2), int(5)]).unwrap(), vec![int(7), int(10)]);
        assert!(SmoothMap::parse_function_file("x*y").is_err());
    }
}
