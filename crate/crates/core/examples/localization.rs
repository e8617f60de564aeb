//! Slices of slices flattened back to a single slice.

use std::sync::Arc;

use weilad::fincat::bundled::{arrow, constant, sliced_family};
use weilad::fincat::{flatten_slice, slice_morphisms, Bound, IteratedObject};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bound = Bound::default();
    let base = Arc::new(constant(&arrow(), 1));
    let fam = sliced_family(&base, bound)?;
    for a in &fam.objects {
        let flat = flatten_slice(a);
        let mut objects = Vec::new();
        for x in &fam.objects {
            for f in slice_morphisms(&x.structure, &a.structure, bound)? {
                objects.push(IteratedObject::new(a, x.clone(), f)?);
            }
        }
        let report = flat.check(&objects, bound)?;
        println!("over {}: {} iterated objects, all checks {}", a.total, objects.len(), report.all_passed());
    }
    Ok(())
}
