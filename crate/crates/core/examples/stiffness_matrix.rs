//! Assemble the stiffness matrix of a small truss, inspect its rigid-motion
//! null space and dump it in coordinate format.

use truss_fretsaw::geometry::Vec2;
use truss_fretsaw::stiffness::{assemble, element_matrix, norm, rigid_null_basis};
use truss_fretsaw::{Element, Truss};

fn main() -> truss_fretsaw::Result<()> {
    let positions = vec![
        Vec2::new(0.0, 0.0),
        Vec2::new(1.0, 0.0),
        Vec2::new(0.0, 1.0),
        Vec2::new(1.0, 1.0),
    ];
    let elements = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]
        .iter()
        .map(|&(i, j)| Element::new(i, j, 2.0))
        .collect();
    let truss = Truss::new(positions, elements, None)?;
    println!("faces: {:?}", truss.faces());

    let diag = element_matrix(&truss, 2)?;
    println!("element (1,2): gamma/l = {:.4}, u = {:?}", diag.coefficient, diag.direction);

    let a = assemble(&truss)?;
    for (name, v) in ["tx", "ty", "rotation"].iter().zip(rigid_null_basis(&truss)) {
        println!("|A {name}| = {:.2e}", norm(&a.matvec(&v)?));
    }
    a.write_coordinate(std::io::stdout().lock())?;
    Ok(())
}
