//! Taylor coefficients and mixed partials, exact and in floating point.

use weilad::functor::{fd_oracle, jet, partials, Normalization};
use weilad::{Rational, SmoothMap};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = SmoothMap::scalar("exp(x) * sin(x)", &["x"])?;
    let table = jet(&f, &0.5, 5, Normalization::Derivative)?;
    for (name, v) in table.rows() {
        println!("{name:>6}  {:+.12}", v[0]);
    }

    let g = SmoothMap::scalar("x^3 * y^2 + 1/(1 + x*y)", &["x", "y"])?;
    let point = [Rational::new(1.into(), 2.into()), Rational::from_integer(3.into())];
    let exact = partials(&g, &point, &[2, 2], Normalization::Derivative)?;
    let approx = [0.5, 3.0];
    for (name, v) in exact.rows() {
        println!("{name:>8}  {}", v[0]);
    }
    let fd = fd_oracle(&g, &approx, &[1, 1]);
    println!("finite differences for x*y: {:.6}", fd[0]);
    Ok(())
}
