//! Weil numbers: elements of `R ⊗ W`, with ring arithmetic, inversion of
//! units, smooth primitives lifted by truncated Taylor expansion, and
//! push-forward along algebra morphisms.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::{BigInt, One, ToPrimitive, Zero};
use thiserror::Error;

use crate::algebra::{WeilAlgebra, WeilMorphism};
use crate::scalar::{format_rational, inv_factorial, int, Rational, Scalar, ScalarMode, Transcendental};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumError {
    #[error("operands live over different algebras (`{left}` vs `{right}`)")]
    AlgebraMismatch { left: String, right: String },
    #[error("operands use different scalar modes")]
    ScalarModeMismatch,
    #[error("not a unit: augmentation is zero")]
    NotAUnit,
    #[error("{primitive}: {detail}")]
    Domain { primitive: &'static str, detail: String },
    #[error("`{0}` is not available with exact rational scalars")]
    UnsupportedInRationalMode(&'static str),
    #[error("coefficient vector has length {found}, algebra dimension is {expected}")]
    Length { expected: usize, found: usize },
}

/// Smooth one-variable primitives that can be lifted to Weil numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Primitive {
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Sqrt,
    Atan,
    Tanh,
    PowInt(i32),
    Recip,
}

impl Primitive {
    pub fn name(&self) -> String {
        match self {
            Primitive::PowInt(n) => format!("pow_int({n})"),
            Primitive::Recip => "recip".into(),
            other => other.transcendental().expect("transcendental").name().into(),
        }
    }

    pub fn from_name(name: &str) -> Option<Primitive> {
        Some(match name {
            "exp" => Primitive::Exp,
            "log" | "ln" => Primitive::Log,
            "sin" => Primitive::Sin,
            "cos" => Primitive::Cos,
            "tan" => Primitive::Tan,
            "sqrt" => Primitive::Sqrt,
            "atan" => Primitive::Atan,
            "tanh" => Primitive::Tanh,
            "recip" => Primitive::Recip,
            _ => return None,
        })
    }

    fn transcendental(&self) -> Option<Transcendental> {
        Some(match self {
            Primitive::Exp => Transcendental::Exp,
            Primitive::Log => Transcendental::Log,
            Primitive::Sin => Transcendental::Sin,
            Primitive::Cos => Transcendental::Cos,
            Primitive::Tan => Transcendental::Tan,
            Primitive::Sqrt => Transcendental::Sqrt,
            Primitive::Atan => Transcendental::Atan,
            Primitive::Tanh => Transcendental::Tanh,
            Primitive::PowInt(_) | Primitive::Recip => return None,
        })
    }

    /// Normalized Taylor coefficients `f^(i)(a) / i!` for `i < order`.
    pub fn taylor_coefficients<S: Scalar>(&self, a: &S, order: usize) -> Result<Vec<S>, NumError> {
        let ctx = a.ctx();
        let q = |r: &Rational| S::from_rational(&ctx, r);
        let mut out = Vec::with_capacity(order);
        if order == 0 {
            return Ok(out);
        }
        let recip_of = |x: &S, primitive: &'static str| {
            x.try_recip().ok_or_else(|| NumError::Domain {
                primitive,
                detail: "derivative undefined at a non-unit point".into(),
            })
        };
        match self {
            Primitive::Exp => {
                let e = a.eval_transcendental(Transcendental::Exp)?;
                out.extend((0..order).map(|i| e.mul_rational(&inv_factorial(i))));
            }
            Primitive::Sin | Primitive::Cos => {
                let s = a.eval_transcendental(Transcendental::Sin)?;
                let c = a.eval_transcendental(Transcendental::Cos)?;
                let cycle = match self {
                    Primitive::Sin => [s.clone(), c.clone(), -s, -c],
                    _ => [c.clone(), -s.clone(), -c, s],
                };
                out.extend((0..order).map(|i| cycle[i % 4].mul_rational(&inv_factorial(i))));
            }
            Primitive::Log => {
                out.push(a.eval_transcendental(Transcendental::Log)?);
                if order > 1 {
                    let inv = recip_of(a, "log")?;
                    let mut power = inv.clone();
                    for i in 1..order {
                        let sign = if i % 2 == 1 { 1 } else { -1 };
                        out.push(power.mul_rational(&Rational::new(BigInt::from(sign), BigInt::from(i))));
                        power = power * inv.clone();
                    }
                }
            }
            Primitive::Recip => {
                let inv = a.try_recip().ok_or(NumError::NotAUnit)?;
                let mut power = inv.clone();
                for i in 0..order {
                    out.push(if i % 2 == 0 { power.clone() } else { -power.clone() });
                    power = power * inv.clone();
                }
            }
            Primitive::PowInt(n) => {
                let n = *n;
                for i in 0..order {
                    let coeff = generalized_binomial(&int(n as i64), i);
                    if coeff.is_zero() {
                        out.push(S::zero_in(&ctx));
                        continue;
                    }
                    let exponent = n as i64 - i as i64;
                    out.push(int_power(a, exponent, "pow_int")?.mul_rational(&coeff));
                }
            }
            Primitive::Sqrt => {
                let root = a.eval_transcendental(Transcendental::Sqrt)?;
                out.push(root.clone());
                if order > 1 {
                    let inv = recip_of(a, "sqrt")?;
                    let half = Rational::new(BigInt::one(), BigInt::from(2));
                    let mut scaled = root;
                    for i in 1..order {
                        scaled = scaled * inv.clone();
                        out.push(scaled.mul_rational(&generalized_binomial(&half, i)));
                    }
                }
            }
            Primitive::Tan | Primitive::Tanh => {
                let (f, sign) = match self {
                    Primitive::Tan => (Transcendental::Tan, 1),
                    _ => (Transcendental::Tanh, -1),
                };
                let t = a.eval_transcendental(f)?;
                // d/dx P(t) = P'(t) (1 + sign t^2), starting from P_0(t) = t
                let mut poly = vec![Rational::zero(), Rational::one()];
                for i in 0..order {
                    out.push(eval_poly(&poly, &t, &q).mul_rational(&inv_factorial(i)));
                    poly = poly_mul(&poly_derivative(&poly), &[int(1), int(0), int(sign)]);
                }
            }
            Primitive::Atan => {
                out.push(a.eval_transcendental(Transcendental::Atan)?);
                if order > 1 {
                    let one_plus_sq = S::one_in(&ctx) + a.clone() * a.clone();
                    let u = recip_of(&one_plus_sq, "atan")?;
                    // atan^(i)(x) = Q_i(x) / (1 + x^2)^i,
                    // Q_{i+1} = Q_i' (1 + x^2) - 2 i x Q_i
                    let mut poly = vec![Rational::one()];
                    let mut u_pow = u.clone();
                    for i in 1..order {
                        out.push((eval_poly(&poly, a, &q) * u_pow.clone()).mul_rational(&inv_factorial(i)));
                        let grow = poly_mul(&poly_derivative(&poly), &[int(1), int(0), int(1)]);
                        let shrink = poly_mul(&poly, &[int(0), int(-2 * i as i64)]);
                        poly = poly_add(&grow, &shrink);
                        u_pow = u_pow * u.clone();
                    }
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// `f(x)` for any scalar, including Weil numbers.
pub fn apply_primitive<S: Scalar>(primitive: Primitive, x: &S) -> Result<S, NumError> {
    Ok(primitive.taylor_coefficients(x, 1)?.remove(0))
}

fn generalized_binomial(top: &Rational, k: usize) -> Rational {
    let mut acc = Rational::one();
    for j in 0..k {
        acc *= top - int(j as i64);
        acc /= int(j as i64 + 1);
    }
    acc
}

fn int_power<S: Scalar>(x: &S, exponent: i64, primitive: &'static str) -> Result<S, NumError> {
    let base = if exponent < 0 {
        x.try_recip().ok_or_else(|| NumError::Domain {
            primitive,
            detail: "negative power of a non-unit".into(),
        })?
    } else {
        x.clone()
    };
    Ok(pow_unsigned(&base, exponent.unsigned_abs()))
}

pub(crate) fn pow_unsigned<S: Scalar>(x: &S, mut e: u64) -> S {
    let mut result = S::one_in(&x.ctx());
    let mut base = x.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = result * base.clone();
        }
        e >>= 1;
        if e > 0 {
            base = base.clone() * base;
        }
    }
    result
}

fn eval_poly<S: Scalar>(poly: &[Rational], t: &S, q: &impl Fn(&Rational) -> S) -> S {
    let mut acc = q(poly.last().unwrap_or(&Rational::zero()));
    for c in poly.iter().rev().skip(1) {
        acc = acc * t.clone() + q(c);
    }
    acc
}

fn poly_derivative(p: &[Rational]) -> Vec<Rational> {
    if p.len() <= 1 {
        return vec![Rational::zero()];
    }
    p.iter().enumerate().skip(1).map(|(i, c)| c * int(i as i64)).collect()
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
        .collect()
}

/// Element of `R ⊗ W`: a coefficient vector over the algebra's basis.
#[derive(Clone, Debug)]
pub struct WeilNumber<S: Scalar> {
    algebra: Arc<WeilAlgebra>,
    coeffs: Vec<S>,
}

/// Context needed to build constants over a given algebra.
#[derive(Clone, Debug)]
pub struct WeilCtx<C> {
    pub algebra: Arc<WeilAlgebra>,
    pub inner: C,
}

fn same(a: &Arc<WeilAlgebra>, b: &Arc<WeilAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl<S: Scalar> WeilNumber<S> {
    pub fn new(algebra: &Arc<WeilAlgebra>, coeffs: Vec<S>) -> Result<Self, NumError> {
        if coeffs.len() != algebra.dim() {
            return Err(NumError::Length { expected: algebra.dim(), found: coeffs.len() });
        }
        Ok(WeilNumber { algebra: algebra.clone(), coeffs })
    }

    pub fn constant(algebra: &Arc<WeilAlgebra>, value: S) -> Self {
        let ctx = value.ctx();
        let mut coeffs = vec![S::zero_in(&ctx); algebra.dim()];
        coeffs[0] = value;
        WeilNumber { algebra: algebra.clone(), coeffs }
    }

    pub fn zero_over(algebra: &Arc<WeilAlgebra>, inner: &S::Ctx) -> Self {
        WeilNumber { algebra: algebra.clone(), coeffs: vec![S::zero_in(inner); algebra.dim()] }
    }

    /// `value + x_g`: the seed used to differentiate along generator `g`.
    pub fn variable(algebra: &Arc<WeilAlgebra>, value: S, generator: usize) -> Self {
        let ctx = value.ctx();
        let mut n = Self::constant(algebra, value);
        for (i, c) in algebra.generator_vector(generator).iter().enumerate() {
            if !c.is_zero() {
                n.coeffs[i] = n.coeffs[i].clone() + S::from_rational(&ctx, c);
            }
        }
        n
    }

    pub fn from_rationals(algebra: &Arc<WeilAlgebra>, ctx: &S::Ctx, coeffs: &[Rational]) -> Result<Self, NumError> {
        Self::new(algebra, coeffs.iter().map(|c| S::from_rational(ctx, c)).collect())
    }

    pub fn algebra(&self) -> &Arc<WeilAlgebra> {
        &self.algebra
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    pub fn augmentation(&self) -> &S {
        &self.coeffs[0]
    }

    /// `x - aug(x) * 1`.
    pub fn nilpotent_part(&self) -> Self {
        let mut n = self.clone();
        n.coeffs[0] = S::zero_in(&self.coeffs[0].ctx());
        n
    }

    fn check_same(&self, other: &Self) -> Result<(), NumError> {
        if same(&self.algebra, &other.algebra) {
            Ok(())
        } else {
            Err(NumError::AlgebraMismatch {
                left: self.algebra.name().to_string(),
                right: other.algebra.name().to_string(),
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, NumError> {
        self.check_same(other)?;
        Ok(self.zip(other, |a, b| a.clone() + b.clone()))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, NumError> {
        self.check_same(other)?;
        Ok(self.zip(other, |a, b| a.clone() - b.clone()))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, NumError> {
        self.check_same(other)?;
        Ok(WeilNumber {
            algebra: self.algebra.clone(),
            coeffs: self.algebra.mul_vectors(&self.coeffs, &other.coeffs),
        })
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|c| c.clone() * s.clone())
    }

    fn zip(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        WeilNumber {
            algebra: self.algebra.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
        }
    }

    fn map(&self, f: impl Fn(&S) -> S) -> Self {
        WeilNumber { algebra: self.algebra.clone(), coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// Multiplicative inverse `a⁻¹ Σ_{i<r} (-n/a)^i`; fails when `aug(x) = 0`.
    pub fn invert(&self) -> Result<Self, NumError> {
        let a_inv = self.coeffs[0].try_recip().ok_or(NumError::NotAUnit)?;
        let step = self.nilpotent_part().scale(&-a_inv.clone());
        let one = WeilNumber::constant(&self.algebra, S::one_in(&a_inv.ctx()));
        let mut term = one.clone();
        let mut sum = one;
        for _ in 1..self.algebra.nilpotency_index() {
            term = term * step.clone();
            sum = sum + term.clone();
        }
        Ok(sum.scale(&a_inv))
    }

    /// `f(a + n) = Σ_{i<r} f^(i)(a)/i! n^i`, evaluated by Horner in `n`.
    pub fn apply(&self, primitive: Primitive) -> Result<Self, NumError> {
        let r = self.algebra.nilpotency_index();
        let coeffs = primitive.taylor_coefficients(&self.coeffs[0], r)?;
        let n = self.nilpotent_part();
        let mut acc = WeilNumber::constant(&self.algebra, coeffs[r - 1].clone());
        for c in coeffs[..r - 1].iter().rev() {
            acc = acc * n.clone();
            acc.coeffs[0] = acc.coeffs[0].clone() + c.clone();
        }
        Ok(acc)
    }

    /// Image under `R ⊗ φ`.
    pub fn push_along(&self, phi: &WeilMorphism) -> Result<Self, NumError> {
        if !same(&self.algebra, phi.source()) {
            return Err(NumError::AlgebraMismatch {
                left: self.algebra.name().to_string(),
                right: phi.source().name().to_string(),
            });
        }
        Ok(WeilNumber { algebra: phi.target().clone(), coeffs: phi.apply_vector(&self.coeffs) })
    }

    /// Coefficient of the basis monomial named `name` (e.g. `x^2`).
    pub fn coeff_named(&self, name: &str) -> Option<&S> {
        self.algebra.basis_names().iter().position(|n| n == name).map(|i| &self.coeffs[i])
    }
}

impl WeilNumber<Rational> {
    pub fn to_f64(&self) -> WeilNumber<f64> {
        WeilNumber {
            algebra: self.algebra.clone(),
            coeffs: self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect(),
        }
    }
}

/// Binary operations exposed through [`arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

pub enum Operand<'a, S: Scalar> {
    Number(&'a WeilNumber<S>),
    Scalar(&'a S),
}

/// Checked arithmetic entry point. `Neg` is available as the `-` operator and
/// scalar multiplication via [`WeilNumber::scale`]; a scalar operand to
/// `Add`/`Sub` is read as `s * 1`.
pub fn arith<S: Scalar>(op: ArithOp, x: &WeilNumber<S>, y: Operand<'_, S>) -> Result<WeilNumber<S>, NumError> {
    let y = match y {
        Operand::Number(n) => n.clone(),
        Operand::Scalar(s) => {
            if op == ArithOp::Mul {
                return Ok(x.scale(s));
            }
            WeilNumber::constant(&x.algebra, s.clone())
        }
    };
    match op {
        ArithOp::Add => x.try_add(&y),
        ArithOp::Sub => x.try_sub(&y),
        ArithOp::Mul => x.try_mul(&y),
    }
}

// Operator impls panic on mismatched algebras; the `try_*` methods report it.

impl<S: Scalar> Add for WeilNumber<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.try_add(&rhs).expect("algebra mismatch in +")
    }
}

impl<S: Scalar> Sub for WeilNumber<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.try_sub(&rhs).expect("algebra mismatch in -")
    }
}

impl<S: Scalar> Mul for WeilNumber<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(&rhs).expect("algebra mismatch in *")
    }
}

impl<S: Scalar> Neg for WeilNumber<S> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|c| -c.clone())
    }
}

impl<S: Scalar> PartialEq for WeilNumber<S> {
    fn eq(&self, other: &Self) -> bool {
        same(&self.algebra, &other.algebra) && self.coeffs == other.coeffs
    }
}

impl<S: Scalar> fmt::Display for WeilNumber<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.algebra.basis_names();
        let mut first = true;
        for (c, name) in self.coeffs.iter().zip(&names) {
            if !first && c.is_null() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            if name == "1" {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{name}")?;
            }
            first = false;
        }
        Ok(())
    }
}

impl<S: Scalar> Scalar for WeilNumber<S> {
    type Ctx = WeilCtx<S::Ctx>;

    fn ctx(&self) -> Self::Ctx {
        WeilCtx { algebra: self.algebra.clone(), inner: self.coeffs[0].ctx() }
    }

    fn from_rational(ctx: &Self::Ctx, q: &Rational) -> Self {
        WeilNumber::constant(&ctx.algebra, S::from_rational(&ctx.inner, q))
    }

    fn is_null(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_null)
    }

    fn mul_rational(&self, q: &Rational) -> Self {
        if q.is_one() {
            self.clone()
        } else {
            self.map(|c| c.mul_rational(q))
        }
    }

    fn try_recip(&self) -> Option<Self> {
        self.invert().ok()
    }

    fn eval_transcendental(&self, f: Transcendental) -> Result<Self, NumError> {
        let p = match f {
            Transcendental::Exp => Primitive::Exp,
            Transcendental::Log => Primitive::Log,
            Transcendental::Sin => Primitive::Sin,
            Transcendental::Cos => Primitive::Cos,
            Transcendental::Tan => Primitive::Tan,
            Transcendental::Tanh => Primitive::Tanh,
            Transcendental::Atan => Primitive::Atan,
            Transcendental::Sqrt => Primitive::Sqrt,
        };
        self.apply(p)
    }

    fn flatten_f64(&self, out: &mut Vec<f64>) {
        for c in &self.coeffs {
            c.flatten_f64(out);
        }
    }

    fn mode() -> ScalarMode {
        S::mode()
    }
}

/// Renders rational coefficients as exact fractions.
pub fn render_exact(x: &WeilNumber<Rational>) -> String {
    let names = x.algebra.basis_names();
    let parts: Vec<String> = x
        .coeffs
        .iter()
        .zip(&names)
        .enumerate()
        .filter(|(i, (c, _))| *i == 0 || !c.is_zero())
        .map(|(_, (c, n))| if n == "1" { format_rational(c) } else { format!("{}*{}", format_rational(c), n) })
        .collect();
    parts.join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tensor;
    use crate::scalar::ratio;
    use approx::assert_relative_eq;

    fn alg(a: WeilAlgebra) -> Arc<WeilAlgebra> {
        Arc::new(a)
    }

    fn q(n: i64) -> Rational {
        int(n)
    }

    #[test]
    fn dual_number_product() {
        let d = alg(WeilAlgebra::dual(1).unwrap());
        let (a, b, c, e) = (q(2), q(3), q(5), q(7));
        let x = WeilNumber::new(&d, vec![a.clone(), b.clone()]).unwrap();
        let y = WeilNumber::new(&d, vec![c.clone(), e.clone()]).unwrap();
        let p = x * y;
        assert_eq!(p.coeffs(), &[&a * &c, &a * &e + &b * &c]);
    }

    #[test]
    fn jet_inverse_series() {
        let j2 = alg(WeilAlgebra::jet(2).unwrap());
        let x = WeilNumber::new(&j2, vec![q(1), q(1), q(0)]).unwrap();
        let y = WeilNumber::new(&j2, vec![q(1), q(-1), q(1)]).unwrap();
        assert_eq!((x.clone() * y.clone()).coeffs(), &[q(1), q(0), q(0)]);
        assert_eq!(x.invert().unwrap(), y);
        let c = WeilNumber::constant(&j2, q(4));
        assert_eq!(c.invert().unwrap(), WeilNumber::constant(&j2, ratio(1, 4)));
        let d = alg(WeilAlgebra::dual(1).unwrap());
        let nil = WeilNumber::new(&d, vec![q(0), q(1)]).unwrap();
        assert_eq!(nil.invert(), Err(NumError::NotAUnit));
    }

    #[test]
    fn exp_and_sin_taylor() {
        let j3 = alg(WeilAlgebra::jet(3).unwrap());
        let x = WeilNumber::variable(&j3, 0.0, 0);
        let e = x.apply(Primitive::Exp).unwrap();
        for (got, want) in e.coeffs().iter().zip([1.0, 1.0, 0.5, 1.0 / 6.0]) {
            assert_relative_eq!(*got, want, epsilon = 1e-15);
        }
        let d = alg(WeilAlgebra::dual(1).unwrap());
        let s = WeilNumber::variable(&d, 0.0, 0).apply(Primitive::Sin).unwrap();
        assert_eq!(s.coeffs(), &[0.0, 1.0]);
        let c = WeilNumber::constant(&d, 0.7).apply(Primitive::Cos).unwrap();
        assert_eq!(c.coeffs(), &[0.7f64.cos(), 0.0]);
    }

    #[test]
    fn primitive_errors() {
        let d = alg(WeilAlgebra::dual(1).unwrap());
        let neg = WeilNumber::variable(&d, -1.0, 0);
        assert!(matches!(neg.apply(Primitive::Log), Err(NumError::Domain { primitive: "log", .. })));
        let zero = WeilNumber::variable(&d, q(0), 0);
        assert_eq!(zero.apply(Primitive::Recip), Err(NumError::NotAUnit));
        let one = WeilNumber::variable(&d, q(1), 0);
        assert_eq!(one.apply(Primitive::Exp), Err(NumError::UnsupportedInRationalMode("exp")));
        assert_eq!(one.apply(Primitive::PowInt(-2)).unwrap().coeffs(), &[q(1), q(-2)]);
    }

    #[test]
    fn push_along_examples() {
        let d = alg(WeilAlgebra::dual(1).unwrap());
        let x = WeilNumber::new(&d, vec![q(3), q(5)]).unwrap();
        let (aug, _) = WeilMorphism::canonical(&d);
        assert_eq!(x.push_along(&aug).unwrap().coeffs(), &[q(3)]);

        let j2 = alg(WeilAlgebra::jet(2).unwrap());
        let (dd, _, _) = tensor(&d, &d);
        let phi = WeilMorphism::from_generator_images(&j2, &dd, &[vec![q(0), q(1), q(1), q(0)]]).unwrap();
        let v = WeilNumber::new(&j2, vec![q(1), q(1), q(1)]).unwrap();
        assert_eq!(v.push_along(&phi).unwrap().coeffs(), &[q(1), q(1), q(1), q(2)]);
        assert!(matches!(x.push_along(&phi), Err(NumError::AlgebraMismatch { .. })));
    }

    #[test]
    fn atan_tan_tanh_sqrt_against_closed_forms() {
        let j3 = alg(WeilAlgebra::jet(3).unwrap());
        let a = 0.4_f64;
        let x = WeilNumber::variable(&j3, a, 0);
        // d/dx atan = 1/(1+x^2), second = -2x/(1+x^2)^2, third = (6x^2-2)/(1+x^2)^3
        let s = 1.0 + a * a;
        let at = x.apply(Primitive::Atan).unwrap();
        assert_relative_eq!(at.coeffs()[1], 1.0 / s, epsilon = 1e-14);
        assert_relative_eq!(at.coeffs()[2], -2.0 * a / (s * s) / 2.0, epsilon = 1e-14);
        assert_relative_eq!(at.coeffs()[3], (6.0 * a * a - 2.0) / (s * s * s) / 6.0, epsilon = 1e-14);
        let t = a.tan();
        let tn = x.apply(Primitive::Tan).unwrap();
        assert_relative_eq!(tn.coeffs()[1], 1.0 + t * t, epsilon = 1e-14);
        assert_relative_eq!(tn.coeffs()[2], t * (1.0 + t * t), epsilon = 1e-14);
        let h = a.tanh();
        let th = x.apply(Primitive::Tanh).unwrap();
        assert_relative_eq!(th.coeffs()[1], 1.0 - h * h, epsilon = 1e-14);
        let sq = x.apply(Primitive::Sqrt).unwrap();
        assert_relative_eq!(sq.coeffs()[1], 0.5 / a.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(sq.coeffs()[2], -0.25 * a.powf(-1.5) / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn arith_entry_point() {
        let d = alg(WeilAlgebra::dual(1).unwrap());
        let j = alg(WeilAlgebra::jet(2).unwrap());
        let x = WeilNumber::new(&d, vec![q(1), q(2)]).unwrap();
        let y = WeilNumber::new(&j, vec![q(1), q(2), q(0)]).unwrap();
        assert!(matches!(arith(ArithOp::Add, &x, Operand::Number(&y)), Err(NumError::AlgebraMismatch { .. })));
        assert_eq!(arith(ArithOp::Mul, &x, Operand::Scalar(&q(3))).unwrap().coeffs(), &[q(3), q(6)]);
        assert_eq!(arith(ArithOp::Sub, &x, Operand::Scalar(&q(1))).unwrap().coeffs(), &[q(0), q(2)]);
        assert_eq!((-x).coeffs(), &[q(-1), q(-2)]);
    }

    #[test]
    fn display_uses_basis_names() {
        let j2 = alg(WeilAlgebra::jet(2).unwrap());
        let x = WeilNumber::new(&j2, vec![q(1), q(0), ratio(1, 2)]).unwrap();
        assert_eq!(render_exact(&x), "1 + 1/2*x^2");
        assert_eq!(x.to_string(), "1 + 1/2*x^2");
    }
}
