//! A tensor product read back as numbers with nested coefficients.

use std::sync::Arc;

use weilad::scalar::format_rational;
use weilad::{nest_iso, tensor, unnest_iso, Rational, WeilAlgebra, WeilNumber};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = Arc::new(WeilAlgebra::dual(1)?);
    let j = Arc::new(WeilAlgebra::jet(2)?);
    let (product, left, right) = tensor(&d, &j);
    println!("{product}: dim {}, nilpotency {}", product.dim(), product.nilpotency_index());
    for (name, phi) in [("left", &left), ("right", &right)] {
        let rows: Vec<String> = phi.matrix().iter().map(|r| r.iter().map(format_rational).collect::<Vec<_>>().join(" ")).collect();
        println!("{name} inclusion [{}]", rows.join("; "));
    }

    let coeffs: Vec<Rational> = (1..=product.dim() as i64).map(|k| Rational::from_integer(k.into())).collect();
    let x = WeilNumber::new(&product, coeffs)?;
    let nested = nest_iso(&d, &j, &x)?;
    for (k, c) in nested.coeffs().iter().enumerate() {
        println!("  {} -> {}", j.basis_name(k), c.coeffs().iter().map(format_rational).collect::<Vec<_>>().join(" "));
    }
    assert_eq!(unnest_iso(&d, &j, &nested)?, x);
    println!("round trip ok");
    Ok(())
}
