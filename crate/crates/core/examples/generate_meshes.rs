//! Generate a grid and a truss path, write them in the text format and read
//! them back.

use truss_fretsaw::generate::{gen_grid, gen_path};
use truss_fretsaw::io::{format_truss, parse_truss};
use truss_fretsaw::truss::{is_stiffly_connected, quality_bounds};

fn main() -> truss_fretsaw::Result<()> {
    let grid = gen_grid(3, 4, 0.25, 7)?;
    let path = gen_path(5)?;
    for (name, t) in [("grid", &grid), ("path", &path)] {
        let q = quality_bounds(t);
        println!(
            "{name}: {} vertices, {} faces, min angle {:.1} deg, stiffly connected {}",
            t.vertex_count(),
            t.faces().len(),
            q.theta_min.to_degrees(),
            is_stiffly_connected(t).0
        );
    }
    let text = format_truss(&path);
    print!("{text}");
    let back = parse_truss(&text)?;
    assert_eq!(back.elements(), path.elements());
    Ok(())
}
