//! The Weil functor on smooth maps: lifting a map to W-points, nesting
//! versus tensoring, derivative extraction, and a finite-difference oracle.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{tensor, Monomial, WeilAlgebra};
use crate::expr::{EvalError, SmoothMap};
use crate::number::{NumError, WeilCtx, WeilNumber};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FunctorError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("map has arity {expected}, got {found} inputs")]
    Arity { expected: usize, found: usize },
}

/// Which convention a [`JetTable`] reports.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Taylor coefficients `f^(e)(a) / e!`.
    Raw,
    /// Partial derivatives `f^(e)(a)`.
    #[default]
    Derivative,
}

impl FromStr for Normalization {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "raw" => Ok(Normalization::Raw),
            "derivative" => Ok(Normalization::Derivative),
            other => Err(format!("unknown normalization `{other}` (raw|derivative)")),
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::Raw => "raw",
            Normalization::Derivative => "derivative",
        })
    }
}

/// Coefficients of `T^W(f)` at a seeded point, one vector (over outputs) per
/// basis monomial.
#[derive(Clone, Debug)]
pub struct JetTable<S: Scalar> {
    pub algebra: Arc<WeilAlgebra>,
    pub base_point: Vec<S>,
    pub entries: Vec<(Monomial, Vec<S>)>,
    pub normalization: Normalization,
}

impl<S: Scalar> JetTable<S> {
    pub fn get(&self, m: &Monomial) -> Option<&[S]> {
        self.entries.iter().find(|(k, _)| k == m).map(|(_, v)| v.as_slice())
    }

    /// Entry by exponent vector, e.g. `[1, 1]` for `x1 x2`.
    pub fn at(&self, exponents: &[u32]) -> Option<&[S]> {
        self.get(&Monomial::from_exponents(exponents))
    }

    /// Lookup for single-output maps.
    pub fn value(&self, exponents: &[u32]) -> Option<&S> {
        self.at(exponents).and_then(|v| v.first())
    }

    pub fn rows(&self) -> impl Iterator<Item = (String, &[S])> + '_ {
        let names = self.algebra.generator_names();
        self.entries.iter().map(move |(m, v)| (m.render(names), v.as_slice()))
    }

    pub fn renormalize(&self, to: Normalization) -> JetTable<S> {
        if to == self.normalization {
            return self.clone();
        }
        let entries = self
            .entries
            .iter()
            .map(|(m, v)| {
                let f = factorial_product(m);
                let scale = match to {
                    Normalization::Derivative => f,
                    Normalization::Raw => f.recip(),
                };
                (m.clone(), v.iter().map(|c| c.mul_rational(&scale)).collect())
            })
            .collect();
        JetTable { entries, normalization: to, ..self.clone() }
    }
}

fn factorial_product(m: &Monomial) -> Rational {
    let mut acc = BigInt::from(1);
    for (_, e) in m.exponents() {
        for k in 2..=e {
            acc *= k;
        }
    }
    Rational::from_integer(acc)
}

/// `T^W(f)` at a W-point, with an explicit scalar context (needed for
/// constant-only maps and for nested scalar types).
pub fn lift_eval_with<S: Scalar>(
    f: &SmoothMap,
    ctx: &WeilCtx<S::Ctx>,
    inputs: &[WeilNumber<S>],
) -> Result<Vec<WeilNumber<S>>, FunctorError> {
    if inputs.len() != f.arity() {
        return Err(FunctorError::Arity { expected: f.arity(), found: inputs.len() });
    }
    for x in inputs {
        if x.algebra() != &ctx.algebra {
            return Err(NumError::AlgebraMismatch {
                left: x.algebra().name().to_string(),
                right: ctx.algebra.name().to_string(),
            }
            .into());
        }
    }
    Ok(f.eval::<WeilNumber<S>>(ctx, inputs)?)
}

/// `T^W(f)` applied to a W-point.
pub fn lift_eval<S: Scalar>(
    f: &SmoothMap,
    algebra: &Arc<WeilAlgebra>,
    inputs: &[WeilNumber<S>],
) -> Result<Vec<WeilNumber<S>>, FunctorError>
where
    S::Ctx: Default,
{
    let inner = inputs.first().map(|x| x.augmentation().ctx()).unwrap_or_default();
    lift_eval_with(f, &WeilCtx { algebra: algebra.clone(), inner }, inputs)
}

/// Seeds `a_i + x_i` over `k[x] / (x_i^{r_i+1})` and reads the coefficients.
pub fn partials<S: Scalar>(
    f: &SmoothMap,
    point: &[S],
    orders: &[usize],
    normalization: Normalization,
) -> Result<JetTable<S>, FunctorError> {
    if point.len() != f.arity() || orders.len() != f.arity() {
        return Err(FunctorError::Arity { expected: f.arity(), found: point.len().min(orders.len()) });
    }
    let algebra = Arc::new(WeilAlgebra::truncated(orders));
    let seeds: Vec<WeilNumber<S>> = point
        .iter()
        .enumerate()
        .map(|(g, a)| {
            if orders[g] == 0 {
                WeilNumber::constant(&algebra, a.clone())
            } else {
                WeilNumber::variable(&algebra, a.clone(), g)
            }
        })
        .collect();
    let ctx = match point.first() {
        Some(a) => WeilCtx { algebra: algebra.clone(), inner: a.ctx() },
        None => return Err(FunctorError::Arity { expected: 1, found: 0 }),
    };
    let values = lift_eval_with(f, &ctx, &seeds)?;
    let entries = algebra
        .basis()
        .iter()
        .enumerate()
        .map(|(k, m)| (m.clone(), values.iter().map(|v| v.coeffs()[k].clone()).collect()))
        .collect();
    let raw = JetTable { algebra, base_point: point.to_vec(), entries, normalization: Normalization::Raw };
    Ok(raw.renormalize(normalization))
}

/// Derivatives of a one-variable map up to order `r` at `a`.
pub fn jet<S: Scalar>(
    f: &SmoothMap,
    a: &S,
    order: usize,
    normalization: Normalization,
) -> Result<JetTable<S>, FunctorError> {
    if f.arity() != 1 {
        return Err(FunctorError::Arity { expected: 1, found: f.arity() });
    }
    partials(f, std::slice::from_ref(a), &[order], normalization)
}

/// Reads a value over `W1 ⊗ W2` as a `W2`-number whose coefficients are
/// `W1`-numbers: `nested[j][i] = value[i + dim(W1) * j]`.
pub fn nest_iso<S: Scalar>(
    w1: &Arc<WeilAlgebra>,
    w2: &Arc<WeilAlgebra>,
    value: &WeilNumber<S>,
) -> Result<WeilNumber<WeilNumber<S>>, NumError> {
    let (product, _, _) = tensor(w1, w2);
    if value.algebra().as_ref() != product.as_ref() {
        return Err(NumError::AlgebraMismatch {
            left: value.algebra().name().to_string(),
            right: product.name().to_string(),
        });
    }
    let d1 = w1.dim();
    let inner: Vec<WeilNumber<S>> = value
        .coeffs()
        .chunks(d1)
        .map(|chunk| WeilNumber::new(w1, chunk.to_vec()))
        .collect::<Result<_, _>>()?;
    WeilNumber::new(w2, inner)
}

/// Inverse of [`nest_iso`].
pub fn unnest_iso<S: Scalar>(
    w1: &Arc<WeilAlgebra>,
    w2: &Arc<WeilAlgebra>,
    nested: &WeilNumber<WeilNumber<S>>,
) -> Result<WeilNumber<S>, NumError> {
    if nested.algebra().as_ref() != w2.as_ref() {
        return Err(NumError::AlgebraMismatch {
            left: nested.algebra().name().to_string(),
            right: w2.name().to_string(),
        });
    }
    let mut flat = Vec::with_capacity(w1.dim() * w2.dim());
    for c in nested.coeffs() {
        if c.algebra().as_ref() != w1.as_ref() {
            return Err(NumError::AlgebraMismatch {
                left: c.algebra().name().to_string(),
                right: w1.name().to_string(),
            });
        }
        flat.extend(c.coeffs().iter().cloned());
    }
    let (product, _, _) = tensor(w1, w2);
    WeilNumber::new(&product, flat)
}

/// Base step of the oracle; the effective step for total order `k` is `k * BASE_STEP`.
pub const BASE_STEP: f64 = 1e-3;

/// Mixed partial `∂^e f(a)` for every output, by tensor-product central
/// differences with one Richardson step. Points where `f` fails to evaluate
/// contribute NaN.
pub fn fd_oracle(f: &SmoothMap, point: &[f64], exponents: &[u32]) -> Vec<f64> {
    let total: u32 = exponents.iter().sum();
    if total == 0 {
        return eval_or_nan(f, point);
    }
    let h = BASE_STEP * total as f64;
    let coarse = central_difference(f, point, exponents, h);
    let fine = central_difference(f, point, exponents, h / 2.0);
    coarse.iter().zip(&fine).map(|(c, d)| (4.0 * d - c) / 3.0).collect()
}

fn eval_or_nan(f: &SmoothMap, x: &[f64]) -> Vec<f64> {
    f.eval::<f64>(&(), x).unwrap_or_else(|_| vec![f64::NAN; f.output_count()])
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn central_difference(f: &SmoothMap, point: &[f64], exponents: &[u32], h: f64) -> Vec<f64> {
    // one 1-D stencil per variable: offsets (k/2 - j) h, weights (-1)^j C(k, j)
    let stencils: Vec<Vec<(f64, f64)>> = exponents
        .iter()
        .map(|&k| {
            (0..=k)
                .map(|j| {
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    ((k as f64 / 2.0 - j as f64) * h, sign * binomial(k, j))
                })
                .collect()
        })
        .collect();
    let mut acc = vec![0.0; f.output_count()];
    let mut idx = vec![0usize; stencils.len()];
    loop {
        let mut x = point.to_vec();
        let mut weight = 1.0;
        for (v, (stencil, &i)) in stencils.iter().zip(&idx).enumerate() {
            x[v] += stencil[i].0;
            weight *= stencil[i].1;
        }
        for (a, y) in acc.iter_mut().zip(eval_or_nan(f, &x)) {
            *a += weight * y;
        }
        let mut pos = 0;
        while pos < idx.len() {
            idx[pos] += 1;
            if idx[pos] < stencils[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == idx.len() {
            break;
        }
    }
    let scale = h.powi(exponents.iter().sum::<u32>() as i32);
    acc.iter().map(|a| a / scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::WeilMorphism;
    use crate::scalar::{int, ratio};

    fn arc(w: WeilAlgebra) -> Arc<WeilAlgebra> {
        Arc::new(w)
    }

    #[test]
    fn square_over_dual_numbers() {
        let w = arc(WeilAlgebra::dual(1).unwrap());
        let f = SmoothMap::scalar("x^2", &["x"]).unwrap();
        let x = WeilNumber::variable(&w, int(3), 0);
        let y = lift_eval(&f, &w, &[x]).unwrap();
        assert_eq!(y[0].coeffs(), &[int(9), int(6)]);
    }

    #[test]
    fn base_algebra_is_plain_evaluation() {
        let w = arc(WeilAlgebra::base());
        let f = SmoothMap::scalar("exp(sin(x)) / (1 + x^2)", &["x"]).unwrap();
        for x in [-1.3, 0.0, 0.4, 2.0] {
            let lifted = lift_eval(&f, &w, &[WeilNumber::constant(&w, x)]).unwrap();
            assert_eq!(lifted[0].coeffs(), f.eval::<f64>(&(), &[x]).unwrap().as_slice());
        }
    }

    #[test]
    fn exp_jet_at_zero() {
        let w = arc(WeilAlgebra::jet(3).unwrap());
        let f = SmoothMap::scalar("exp(x)", &["x"]).unwrap();
        let y = lift_eval(&f, &w, &[WeilNumber::variable(&w, 0.0, 0)]).unwrap();
        let expected = [1.0, 1.0, 0.5, 1.0 / 6.0];
        for (a, b) in y[0].coeffs().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn jets_in_both_normalizations() {
        let c = SmoothMap::scalar("7/2", &["x"]).unwrap();
        let t = jet(&c, &int(1), 3, Normalization::Raw).unwrap();
        let vals: Vec<Rational> = t.entries.iter().map(|(_, v)| v[0].clone()).collect();
        assert_eq!(vals, vec![ratio(7, 2), int(0), int(0), int(0)]);

        let sq = SmoothMap::scalar("x^2", &["x"]).unwrap();
        let t = jet(&sq, &int(3), 2, Normalization::Raw).unwrap();
        let vals: Vec<Rational> = t.entries.iter().map(|(_, v)| v[0].clone()).collect();
        assert_eq!(vals, vec![int(9), int(6), int(1)]);
        let d = t.renormalize(Normalization::Derivative);
        assert_eq!(d.value(&[2]), Some(&int(2)));

        let sin = SmoothMap::scalar("sin(x)", &["x"]).unwrap();
        let t = jet(&sin, &0.0, 5, Normalization::Raw).unwrap();
        let expected = [0.0, 1.0, 0.0, -1.0 / 6.0, 0.0, 1.0 / 120.0];
        for (k, e) in expected.iter().enumerate() {
            assert!((t.value(&[k as u32]).unwrap() - e).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_partials() {
        let f = SmoothMap::scalar("x*y", &["x", "y"]).unwrap();
        let t = partials(&f, &[int(2), int(5)], &[1, 1], Normalization::Derivative).unwrap();
        assert_eq!(t.value(&[1, 1]), Some(&int(1)));
        assert_eq!(t.value(&[1, 0]), Some(&int(5)));
        assert_eq!(t.value(&[0, 1]), Some(&int(2)));

        let lin = SmoothMap::scalar("3*x - y/2 + 1", &["x", "y"]).unwrap();
        let t = partials(&lin, &[int(1), int(-4)], &[2, 2], Normalization::Derivative).unwrap();
        for (m, v) in &t.entries {
            if m.degree() >= 2 {
                assert_eq!(v[0], int(0), "{m:?}");
            }
        }

        let g = SmoothMap::scalar("exp(x*y)", &["x", "y"]).unwrap();
        let t = partials(&g, &[0.0, 0.0], &[1, 1], Normalization::Derivative).unwrap();
        let fd = fd_oracle(&g, &[0.0, 0.0], &[1, 1])[0];
        assert!((t.value(&[1, 1]).unwrap() - fd).abs() < 1e-6);
        assert!((fd - 1.0).abs() < 1e-6);
    }

    #[test]
    fn nesting_round_trip_and_unit() {
        let w1 = arc(WeilAlgebra::jet(2).unwrap());
        let w2 = arc(WeilAlgebra::dual(2).unwrap());
        let (t, _, _) = tensor(&w1, &w2);
        let v: Vec<Rational> = (0..t.dim() as i64).map(|k| ratio(k * k - 3, k + 1)).collect();
        let value = WeilNumber::<Rational>::new(&t, v).unwrap();
        let nested = nest_iso(&w1, &w2, &value).unwrap();
        assert_eq!(nested.coeffs()[1].coeffs()[2], value.coeffs()[2 + 3]);
        assert_eq!(unnest_iso(&w1, &w2, &nested).unwrap(), value);

        let one = WeilNumber::constant(&t, int(1));
        let nested = nest_iso(&w1, &w2, &one).unwrap();
        assert_eq!(nested.coeffs()[0], WeilNumber::constant(&w1, int(1)));
        assert!(nested.coeffs()[1..].iter().all(|c| c.coeffs().iter().all(|q| *q == int(0))));

        let wrong = WeilNumber::constant(&w1, int(1));
        assert!(matches!(nest_iso(&w1, &w2, &wrong), Err(NumError::AlgebraMismatch { .. })));
    }

    #[test]
    fn nested_square_matches_tensor() {
        let d = arc(WeilAlgebra::dual(1).unwrap());
        let (t, i1, i2) = tensor(&d, &d);
        let f = SmoothMap::scalar("x^2", &["x"]).unwrap();
        // seed 3 + e1 + e2 over the tensor
        let x = WeilNumber::variable(&t, int(3), 0).try_add(&WeilNumber::variable(&t, int(0), 1)).unwrap();
        let flat = lift_eval(&f, &t, &[x]).unwrap().remove(0);
        // nested: (3 + e1) over W1, then + e2 over W2
        let inner = WeilNumber::variable(&d, int(3), 0);
        let nested_in = WeilNumber::variable(&d, inner.clone(), 0);
        let ctx = WeilCtx { algebra: d.clone(), inner: inner.ctx() };
        let nested = lift_eval_with(&f, &ctx, &[nested_in]).unwrap().remove(0);
        assert_eq!(unnest_iso(&d, &d, &nested).unwrap(), flat);
        assert_eq!(flat.coeffs(), &[int(9), int(6), int(6), int(2)]);
        assert!(i1.validate().all_passed() && i2.validate().all_passed());
        let _ = WeilMorphism::identity(&t);
    }

    #[test]
    fn finite_differences() {
        let cube = SmoothMap::scalar("x^3", &["x"]).unwrap();
        assert!((fd_oracle(&cube, &[1.0], &[2])[0] - 6.0).abs() < 1e-6);
        let c = SmoothMap::scalar("2.5", &["x", "y"]).unwrap();
        for e in [[1, 0], [0, 2], [1, 2]] {
            assert!(fd_oracle(&c, &[0.3, -1.0], &e)[0].abs() < 1e-8);
        }
        let g = SmoothMap::scalar("sin(x)*cos(y)", &["x", "y"]).unwrap();
        let want = -(0.3f64).cos() * (0.7f64).sin();
        assert!((fd_oracle(&g, &[0.3, 0.7], &[1, 1])[0] - want).abs() < 1e-5);
    }
}
