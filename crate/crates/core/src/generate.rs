//! Mesh generators: triangulated grids and straight truss paths.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{angle_at, signed_area, Vec2};
use crate::truss::{Element, Face, Truss};

/// Smallest face angle kept by grid jitter.
pub const GRID_MIN_ANGLE: f64 = 20.0 * std::f64::consts::PI / 180.0;
/// Smallest face angle kept by path jitter.
pub const PATH_MIN_ANGLE: f64 = 30.0 * std::f64::consts::PI / 180.0;
const MAX_JITTER: f64 = 0.3;
const RESAMPLE_TRIES: usize = 64;

fn face_ok(p: &[Vec2], f: &[usize; 3], min_angle: f64) -> bool {
    let [a, b, c] = f.map(|v| p[v]);
    signed_area(a, b, c) > 0.0
        && angle_at(a, b, c) >= min_angle
        && angle_at(b, c, a) >= min_angle
        && angle_at(c, a, b) >= min_angle
}

/// Moves each vertex by up to `jitter` in each coordinate, resampling until
/// every incident face keeps counterclockwise orientation and `min_angle`.
/// A vertex that fails every attempt stays put.
fn jitter_positions(pos: &mut [Vec2], faces: &[[usize; 3]], jitter: f64, seed: u64, min_angle: f64) {
    if jitter == 0.0 {
        return;
    }
    let mut incident = vec![Vec::new(); pos.len()];
    for (fi, f) in faces.iter().enumerate() {
        for &v in f {
            incident[v].push(fi);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for v in 0..pos.len() {
        let home = pos[v];
        for _ in 0..RESAMPLE_TRIES {
            let d = Vec2::new(rng.gen_range(-jitter..=jitter), rng.gen_range(-jitter..=jitter));
            pos[v] = home + d;
            if incident[v].iter().all(|&f| face_ok(pos, &faces[f], min_angle)) {
                break;
            }
            pos[v] = home;
        }
    }
}

fn check_jitter(jitter: f64) -> Result<()> {
    if !(0.0..=MAX_JITTER).contains(&jitter) {
        return Err(Error::InvalidTruss(format!(
            "jitter {jitter} outside [0, {MAX_JITTER}]"
        )));
    }
    Ok(())
}

/// `rows x cols` vertices on a unit lattice, each cell split along the same
/// diagonal. All weights are 1.
pub fn gen_grid(rows: usize, cols: usize, jitter: f64, seed: u64) -> Result<Truss> {
    if rows < 2 || cols < 2 {
        return Err(Error::InvalidTruss(format!(
            "grid needs at least 2x2 vertices, got {rows}x{cols}"
        )));
    }
    check_jitter(jitter)?;
    let id = |r: usize, c: usize| r * cols + c;
    let mut pos = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            pos.push(Vec2::new(c as f64, r as f64));
        }
    }
    let mut elements = Vec::new();
    let mut oriented = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                elements.push(Element::new(id(r, c), id(r, c + 1), 1.0));
            }
            if r + 1 < rows {
                elements.push(Element::new(id(r, c), id(r + 1, c), 1.0));
            }
            if r + 1 < rows && c + 1 < cols {
                elements.push(Element::new(id(r, c), id(r + 1, c + 1), 1.0));
                oriented.push([id(r, c), id(r, c + 1), id(r + 1, c + 1)]);
                oriented.push([id(r, c), id(r + 1, c + 1), id(r + 1, c)]);
            }
        }
    }
    jitter_positions(&mut pos, &oriented, jitter, seed, GRID_MIN_ANGLE);
    let faces: Vec<Face> = oriented;
    Truss::new(pos, elements, Some(faces))
}

/// Straight strip of `k` equilateral faces: bottom vertices at even indices,
/// top vertices at odd, face `t` is `{t, t+1, t+2}`.
pub fn gen_path(k: usize) -> Result<Truss> {
    gen_path_jittered(k, 0.0, 0)
}

/// Truss path with each vertex moved by up to `jitter` while every face
/// angle stays at least 30 degrees.
pub fn gen_path_jittered(k: usize, jitter: f64, seed: u64) -> Result<Truss> {
    if k < 1 {
        return Err(Error::InvalidTruss("a truss path needs at least one face".into()));
    }
    check_jitter(jitter)?;
    let h = 3f64.sqrt() / 2.0;
    let mut pos: Vec<Vec2> = (0..k + 2)
        .map(|v| {
            if v % 2 == 0 {
                Vec2::new((v / 2) as f64, 0.0)
            } else {
                Vec2::new((v / 2) as f64 + 0.5, h)
            }
        })
        .collect();
    let mut elements = Vec::with_capacity(2 * k + 1);
    for v in 0..k + 1 {
        elements.push(Element::new(v, v + 1, 1.0));
    }
    for v in 0..k {
        elements.push(Element::new(v, v + 2, 1.0));
    }
    // bottom-top-bottom faces wind counterclockwise, the others clockwise
    let oriented: Vec<[usize; 3]> = (0..k)
        .map(|t| if t % 2 == 0 { [t, t + 2, t + 1] } else { [t, t + 1, t + 2] })
        .collect();
    jitter_positions(&mut pos, &oriented, jitter, seed, PATH_MIN_ANGLE);
    Truss::new(pos, elements, Some(oriented))
}
