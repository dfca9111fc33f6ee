//! How a strip of triangles supports a bar between its two ends as the
//! strip gets longer. Prints the table as CSV followed by the log-log slope.

use truss_fretsaw::analysis::path_lemma_experiment;

fn main() -> truss_fretsaw::Result<()> {
    let table = path_lemma_experiment(&[4, 8, 16, 32, 64], 0.2, 5)?;
    print!("{}", table.to_csv());
    println!("# slope {:.3}, largest doubling ratio {:.3}", table.slope, table.max_ratio());
    Ok(())
}
