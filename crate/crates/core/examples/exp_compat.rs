//! Comparison maps between an endofunctor applied to an exponential and the
//! exponential of the images.

use std::sync::Arc;

use weilad::fincat::bundled::plain_endofunctors;
use weilad::fincat::{exp_compat_check, functors_up_to_iso, Bound};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bound = Bound::default();
    for p in plain_endofunctors() {
        let fs: Vec<_> = functors_up_to_iso(p.functor.cat(), 2, bound)?.into_iter().map(Arc::new).collect();
        let mut passed = 0;
        let mut total = 0;
        for m in &fs {
            for n in &fs {
                total += 1;
                passed += exp_compat_check(&p.functor, m, n, p.family.as_ref(), bound)?.passed() as usize;
            }
        }
        println!("{:<16} {passed}/{total} comparisons are isomorphisms", p.name);
    }
    Ok(())
}
