//! Intrinsic simplex geometry computed from edge lengths alone.

/// Area of a triangle with side lengths `a, b, c`, or `None` when the
/// triangle inequality fails. Uses Kahan's cancellation-safe Heron formula.
pub fn triangle_area(a: f64, b: f64, c: f64) -> Option<f64> {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    let [a, b, c] = s;
    if !(c > 0.0) || !a.is_finite() {
        return None;
    }
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    if p <= 0.0 {
        return None;
    }
    Some(0.25 * p.sqrt())
}

/// Interior angle opposite side `opp` in a triangle with adjacent sides `s1, s2`.
pub fn angle_from_lengths(s1: f64, s2: f64, opp: f64) -> f64 {
    let cos = (s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2);
    cos.clamp(-1.0, 1.0).acos()
}

/// Triangle data derived from lengths `[l01, l12, l20]`.
#[derive(Clone, Copy, Debug)]
pub struct TriangleGeometry {
    pub area: f64,
    /// Angle at local vertex 0, 1, 2.
    pub angles: [f64; 3],
    /// Cotangent of the angle opposite each edge `[01, 12, 20]`.
    pub cot_opposite: [f64; 3],
}

pub fn triangle_geometry(l: [f64; 3]) -> Option<TriangleGeometry> {
    let [l01, l12, l20] = l;
    let area = triangle_area(l01, l12, l20)?;
    let a0 = angle_from_lengths(l01, l20, l12);
    let a1 = angle_from_lengths(l01, l12, l20);
    let a2 = angle_from_lengths(l12, l20, l01);
    let cot = |adj1: f64, adj2: f64, opp: f64| (adj1 * adj1 + adj2 * adj2 - opp * opp) / (4.0 * area);
    Some(TriangleGeometry {
        area,
        angles: [a0, a1, a2],
        cot_opposite: [cot(l12, l20, l01), cot(l20, l01, l12), cot(l01, l12, l20)],
    })
}

/// Local P1 stiffness of a triangle: `K[i][j] = ∫ ∇λ_i·∇λ_j`.
pub fn triangle_stiffness(g: &TriangleGeometry) -> [[f64; 3]; 3] {
    let mut k = [[0.0; 3]; 3];
    let pairs = [(0, 1), (1, 2), (2, 0)];
    for (e, &(i, j)) in pairs.iter().enumerate() {
        let w = -0.5 * g.cot_opposite[e];
        k[i][j] = w;
        k[j][i] = w;
        k[i][i] -= w;
        k[j][j] -= w;
    }
    k
}

/// Edge order used for tetrahedra: `01, 02, 03, 12, 13, 23`.
pub const TET_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Tetrahedron data derived from its six edge lengths.
#[derive(Clone, Copy, Debug)]
pub struct TetGeometry {
    pub volume: f64,
    pub stiffness: [[f64; 4]; 4],
}

/// Embeds a tetrahedron isometrically from its edge lengths (ordered as
/// [`TET_EDGES`]) and returns its volume and P1 stiffness.
pub fn tet_geometry(l: [f64; 6]) -> Option<TetGeometry> {
    let [d01, d02, d03, d12, d13, d23] = l;
    if l.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return None;
    }
    for (a, b, c) in [(d01, d02, d12), (d01, d03, d13), (d02, d03, d23), (d12, d13, d23)] {
        triangle_area(a, b, c)?;
    }
    let x2 = (d01 * d01 + d02 * d02 - d12 * d12) / (2.0 * d01);
    let y2sq = d02 * d02 - x2 * x2;
    if y2sq <= 0.0 {
        return None;
    }
    let y2 = y2sq.sqrt();
    let x3 = (d01 * d01 + d03 * d03 - d13 * d13) / (2.0 * d01);
    let y3 = (x2 * x2 + y2 * y2 - 2.0 * x3 * x2 + d03 * d03 - d23 * d23) / (2.0 * y2);
    let z3sq = d03 * d03 - x3 * x3 - y3 * y3;
    let scale = d01.max(d02).max(d03).max(d12).max(d13).max(d23);
    if z3sq <= 1e-24 * scale * scale {
        return None;
    }
    let z3 = z3sq.sqrt();
    // Columns p1, p2, p3 (p0 at the origin) form an upper-triangular matrix.
    let e = [[d01, x2, x3], [0.0, y2, y3], [0.0, 0.0, z3]];
    let det = e[0][0] * e[1][1] * e[2][2];
    let volume = det / 6.0;
    let inv = upper_inverse(e);
    let mut grads = [[0.0; 3]; 4];
    for k in 0..3 {
        grads[k + 1] = inv[k];
        for d in 0..3 {
            grads[0][d] -= inv[k][d];
        }
    }
    let mut stiffness = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            stiffness[i][j] = volume * dot3(grads[i], grads[j]);
        }
    }
    Some(TetGeometry { volume, stiffness })
}

/// Rows of the inverse of the upper-triangular matrix `e` (rows of E⁻¹ are
/// the barycentric gradients of vertices 1..3).
fn upper_inverse(e: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let [[a, b, c], [_, d, f], [_, _, g]] = e;
    [
        [1.0 / a, -b / (a * d), (b * f - c * d) / (a * d * g)],
        [0.0, 1.0 / d, -f / (d * g)],
        [0.0, 0.0, 1.0 / g],
    ]
}

pub fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_triangle() {
        let g = triangle_geometry([3.0, 5.0, 4.0]).unwrap();
        assert!((g.area - 6.0).abs() < 1e-14);
        assert!((g.angles.iter().sum::<f64>() - std::f64::consts::PI).abs() < 1e-14);
        assert!((g.angles[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        assert!(g.cot_opposite[1].abs() < 1e-14);
    }

    #[test]
    fn triangle_inequality_rejected() {
        assert!(triangle_area(1.0, 1.0, 2.5).is_none());
        assert!(triangle_area(1.0, 1.0, 2.0).is_none());
    }

    #[test]
    fn unit_corner_tet() {
        let s = 2f64.sqrt();
        let g = tet_geometry([1.0, 1.0, 1.0, s, s, s]).unwrap();
        assert!((g.volume - 1.0 / 6.0).abs() < 1e-14);
        for row in g.stiffness {
            assert!(row.iter().sum::<f64>().abs() < 1e-14);
        }
        // Gradients of λ1 = x, so K11 = vol · 1.
        assert!((g.stiffness[1][1] - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn flat_tet_rejected() {
        // Four coplanar points: unit square.
        let s = 2f64.sqrt();
        assert!(tet_geometry([1.0, s, 1.0, 1.0, s, 1.0]).is_none());
    }
}
