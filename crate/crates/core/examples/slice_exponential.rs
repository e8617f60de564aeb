//! Exponentials in a slice over a base functor.

use std::sync::Arc;

use weilad::fincat::bundled::{constant, sliced_family, z2};
use weilad::fincat::{slice_exponential, verify_slice_ccc, Bound};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cat = z2();
    let bound = Bound::default();
    let base = Arc::new(constant(&cat, 2));
    let fam = sliced_family(&base, bound)?;
    println!("{} sliced objects over {}", fam.objects.len(), fam.base);
    for a in fam.objects.iter().take(3) {
        for b in fam.objects.iter().take(3) {
            let e = slice_exponential(a, b, bound)?;
            let r = verify_slice_ccc(a, b, &fam.probes, &fam.probe_morphisms, bound)?;
            println!("{} ^ {} = {}  ccc {}", a.total, b.total, e.total, r.passed());
        }
    }
    Ok(())
}
