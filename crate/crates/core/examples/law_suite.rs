//! The full law suite in both scalar modes.

use weilad::fincat::Bound;
use weilad::laws::{enumerate_laws, run_all, SuiteConfig};
use weilad::ScalarMode;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for info in enumerate_laws() {
        println!("{}  {}", info.id, info.name);
    }
    for mode in [ScalarMode::Rational, ScalarMode::Float] {
        let config = SuiteConfig { mode, seed: 0, bound: Bound::default(), laws: Vec::new() };
        for r in run_all(&config)? {
            println!(
                "{:<4} {:<8} {:<9} {:>6} runs  {} failures  max rel {:.2e}",
                r.law_id.to_string(),
                r.model.to_string(),
                r.mode.to_string(),
                r.instances_run,
                r.failures,
                r.max_rel_error
            );
        }
    }
    Ok(())
}
