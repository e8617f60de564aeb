//! Runs every check declared in a JSON instance file.

use weilad::fincat::{load_instance, Bound, CheckKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/instances/arrow.json").to_string());
    let instance = load_instance(&path)?;
    for kind in [CheckKind::Ccc, CheckKind::SliceCcc, CheckKind::ExpCompat, CheckKind::Localization] {
        match instance.run_check(kind, Bound::default()) {
            Ok((ok, _)) => println!("{kind:?}: {}", if ok { "pass" } else { "FAIL" }),
            Err(e) => println!("{kind:?}: {e}"),
        }
    }
    Ok(())
}
