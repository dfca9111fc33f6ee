//! Planar vector helpers.

pub type Vec2 = nalgebra::Vector2<f64>;

/// Counterclockwise perpendicular: `(x, y) -> (-y, x)`.
#[inline]
pub fn perp(v: Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

/// Signed area of the triangle `(a, b, c)`; positive when counterclockwise.
#[inline]
pub fn signed_area(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    0.5 * perp(b - a).dot(&(c - a))
}

/// Barycentric coordinates of `p` with respect to triangle `(a, b, c)`.
/// Returns `None` for a degenerate triangle.
pub fn barycentric(p: Vec2, a: Vec2, b: Vec2, c: Vec2) -> Option<[f64; 3]> {
    let det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    if det == 0.0 {
        return None;
    }
    let l1 = ((b.x - p.x) * (c.y - p.y) - (c.x - p.x) * (b.y - p.y)) / det;
    let l2 = ((c.x - p.x) * (a.y - p.y) - (a.x - p.x) * (c.y - p.y)) / det;
    Some([l1, l2, 1.0 - l1 - l2])
}

/// Interior angle at `a` of the triangle `(a, b, c)`, in radians.
pub fn angle_at(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    let u = b - a;
    let v = c - a;
    let cross = u.x * v.y - u.y * v.x;
    cross.abs().atan2(u.dot(&v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perp_examples() {
        assert_eq!(perp(Vec2::new(1.0, 0.0)), Vec2::new(0.0, 1.0));
        assert_eq!(perp(Vec2::new(0.0, 0.0)), Vec2::new(0.0, 0.0));
        assert_eq!(perp(Vec2::new(3.0, -2.0)), Vec2::new(2.0, 3.0));
    }

    #[test]
    fn perp_is_linear() {
        let x = Vec2::new(0.3, -1.7);
        let y = Vec2::new(2.5, 0.25);
        assert_eq!(perp(-x), -perp(x));
        assert_eq!(perp(x + y), perp(x) + perp(y));
    }

    #[test]
    fn area_sign_follows_orientation() {
        let a = Vec2::new(0.0, 0.0);
        let b = Vec2::new(1.0, 0.0);
        let c = Vec2::new(0.0, 1.0);
        assert!((signed_area(a, b, c) - 0.5).abs() < 1e-15);
        assert!((signed_area(a, c, b) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn barycentric_of_centroid() {
        let a = Vec2::new(0.0, 0.0);
        let b = Vec2::new(3.0, 0.0);
        let c = Vec2::new(0.0, 3.0);
        let l = barycentric(Vec2::new(1.0, 1.0), a, b, c).unwrap();
        for v in l {
            assert!((v - 1.0 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn right_angle() {
        let a = Vec2::new(0.0, 0.0);
        let t = angle_at(a, Vec2::new(1.0, 0.0), Vec2::new(0.0, 2.0));
        assert!((t - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }
}
