//! Morphisms from generator images, composition, and pushing numbers along them.

use std::sync::Arc;

use weilad::algebra::compose;
use weilad::scalar::format_rational;
use weilad::{Primitive, Rational, WeilAlgebra, WeilMorphism, WeilNumber};

fn show(v: &[Rational]) -> String {
    v.iter().map(format_rational).collect::<Vec<_>>().join(" ")
}

fn rows(m: &[Vec<Rational>]) -> String {
    m.iter().map(|r| format!("[{}]", show(r))).collect::<Vec<_>>().join(" ")
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let j3 = Arc::new(WeilAlgebra::jet(3)?);
    let j2 = Arc::new(WeilAlgebra::jet(2)?);
    let d1 = Arc::new(WeilAlgebra::dual(1)?);

    let truncate = WeilMorphism::from_generator_images(&j3, &j2, &[j2.generator_vector(0)])?;
    let square = WeilMorphism::from_generator_images(&d1, &j2, &[j2.monomial_vector(&weilad::Monomial::power(0, 2))])?;
    println!("jet3 -> jet2 {}", rows(truncate.matrix()));
    println!("dual1 -> jet2 {}", rows(square.matrix()));

    let x = WeilNumber::variable(&j3, Rational::from_integer(2.into()), 0);
    let y = x.apply(Primitive::Recip)?;
    println!("1/(2+x) in jet3: {}", show(y.coeffs()));
    println!("pushed to jet2: {}", show(y.push_along(&truncate)?.coeffs()));
    assert_eq!(y.push_along(&truncate)?, x.push_along(&truncate)?.apply(Primitive::Recip)?);

    let not_multiplicative = WeilMorphism::from_generator_images(&d1, &j2, &[j2.generator_vector(0)]);
    println!("dual1 -> jet2 via e -> x rejected: {}", not_multiplicative.is_err());

    let aug = WeilMorphism::from_generator_images(&j2, &Arc::new(WeilAlgebra::base()), &[vec![Rational::default()]])?;
    let both = compose(&truncate, &aug)?;
    println!("jet3 -> base {}", rows(both.matrix()));
    Ok(())
}
