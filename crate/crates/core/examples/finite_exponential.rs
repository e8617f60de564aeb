//! Exponentials of set-valued functors and the currying bijection.

use std::sync::Arc;

use weilad::fincat::bundled::{arrow, probes};
use weilad::fincat::{functors_up_to_iso, verify_ccc, Bound, Exponential};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cat = arrow();
    let bound = Bound::default();
    let fs: Vec<_> = functors_up_to_iso(&cat, 2, bound)?.into_iter().map(Arc::new).collect();
    println!("{} functors on {} up to iso", fs.len(), cat.name());
    let (ps, gammas) = probes(&cat, bound)?;
    let (m, n) = (&fs[fs.len() - 1], &fs[1]);
    let exp = Exponential::new(m, n, bound)?;
    println!("({m})^({n}) = {}", exp.functor());
    let report = verify_ccc(m, n, &ps, &gammas, bound)?;
    println!("currying over {} probes: {}", ps.len(), if report.passed() { "bijective and natural" } else { "FAILED" });
    Ok(())
}
