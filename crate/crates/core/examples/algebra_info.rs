//! Standard and presented algebras: basis, multiplication table, validation.

use weilad::WeilAlgebra;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for spec in ["jet:3", "dual:2", "mixed:2,1", concat!(env!("CARGO_MANIFEST_DIR"), "/data/algebras/hyperdual.txt")] {
        let w = WeilAlgebra::load(spec)?;
        println!("{w}  dim {}  nilpotency {}", w.dim(), w.nilpotency_index());
        let names = w.basis_names();
        for (i, row) in w.multiplication_table().iter().enumerate() {
            let cells: Vec<String> = row.iter().enumerate().map(|(j, e)| format!("{}*{}={e}", names[i], names[j])).collect();
            println!("  {}", cells.join("  "));
        }
        println!("  valid: {}", w.validate().all_passed());
    }
    Ok(())
}
