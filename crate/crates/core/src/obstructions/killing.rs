use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::simplex::{dot3, sub3};
use crate::mesh::{BoundaryTag, Mesh, ScalarField, Shape, Support};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KillingKind {
    /// `X(x) = a × x`; in the plane only the `z` component of `a` matters.
    Rotation,
    /// `X(x) = d − ⟨d, x⟩ x`, the tangential part of a constant field.
    ConformalTranslation,
}

/// A conformal Killing field of the boundary sphere (or circle), sampled on
/// the D0 vertices. Positions are taken relative to the center and divided
/// by the radius. The parameter is not normalized, so fields are linear in
/// it.
#[derive(Clone, Debug)]
pub struct KillingField {
    pub kind: KillingKind,
    pub parameter: [f64; 3],
    /// One vector per D0 vertex, in the order of the boundary support.
    pub vectors: Vec<[f64; 3]>,
}

fn round(mesh: &Mesh) -> Result<([f64; 3], f64)> {
    match mesh.shape() {
        Shape::RoundBall { center, radius } if mesh.dim() == 3 => Ok((center, radius)),
        Shape::RoundDisk { center, radius } if mesh.dim() == 2 => Ok((center, radius)),
        _ => Err(Error::NotRoundBall),
    }
}

fn unit_position(p: [f64; 3], center: [f64; 3], radius: f64) -> [f64; 3] {
    sub3(p, center).map(|c| c / radius)
}

impl KillingField {
    fn build(mesh: &Mesh, kind: KillingKind, parameter: [f64; 3], f: impl Fn([f64; 3]) -> [f64; 3]) -> Result<Self> {
        let (center, radius) = round(mesh)?;
        let vectors = mesh
            .support_vertices(Support::Boundary)
            .into_iter()
            .map(|i| f(unit_position(mesh.vertex(i), center, radius)))
            .collect();
        Ok(Self { kind, parameter, vectors })
    }

    pub fn rotation(mesh: &Mesh, axis: [f64; 3]) -> Result<Self> {
        let axis = if mesh.dim() == 2 { [0.0, 0.0, axis[2]] } else { axis };
        Self::build(mesh, KillingKind::Rotation, axis, |x| crate::mesh::simplex::cross3(axis, x))
    }

    pub fn conformal_translation(mesh: &Mesh, direction: [f64; 3]) -> Result<Self> {
        let d = if mesh.dim() == 2 { [direction[0], direction[1], 0.0] } else { direction };
        Self::build(mesh, KillingKind::ConformalTranslation, d, |x| {
            let s = dot3(d, x);
            [d[0] - s * x[0], d[1] - s * x[1], d[2] - s * x[2]]
        })
    }

    /// Largest `|⟨X, x⟩|` over the sampled vertices.
    pub fn normal_component(&self, mesh: &Mesh) -> Result<f64> {
        let (center, radius) = round(mesh)?;
        Ok(mesh
            .support_vertices(Support::Boundary)
            .into_iter()
            .zip(&self.vectors)
            .map(|(i, x)| dot3(*x, unit_position(mesh.vertex(i), center, radius)).abs())
            .fold(0.0, f64::max))
    }
}

/// Gradient of the linear interpolant of `h` on a boundary facet, within
/// the facet's affine hull.
fn facet_gradient(p: &[[f64; 3]], h: &[f64]) -> [f64; 3] {
    let e: Vec<[f64; 3]> = p[1..].iter().map(|q| sub3(*q, p[0])).collect();
    let dh: Vec<f64> = h[1..].iter().map(|x| x - h[0]).collect();
    let coef = if e.len() == 1 {
        vec![dh[0] / dot3(e[0], e[0])]
    } else {
        let (a, b, c) = (dot3(e[0], e[0]), dot3(e[0], e[1]), dot3(e[1], e[1]));
        let det = a * c - b * b;
        vec![(c * dh[0] - b * dh[1]) / det, (a * dh[1] - b * dh[0]) / det]
    };
    let mut g = [0.0; 3];
    for (ek, ck) in e.iter().zip(&coef) {
        for d in 0..3 {
            g[d] += ck * ek[d];
        }
    }
    g
}

/// Discrete `∫_{∂B} ⟨X, ∇H⟩ da`: facet area times the facet gradient of
/// `H` against the facet average of `X`. Bilinear in `H` and `X`.
pub fn kazdan_warner_escobar(mesh: &Mesh, h: &ScalarField, x: &KillingField) -> Result<f64> {
    round(mesh)?;
    if h.support() != Support::Boundary {
        return Err(Error::Field("H must live on D0 vertices".into()));
    }
    let nv = mesh.num_vertices();
    let hd = h.to_dense(nv);
    let mut xd = vec![[0.0; 3]; nv];
    for (i, v) in h.vertices().iter().zip(&x.vectors) {
        xd[*i] = *v;
    }
    if x.vectors.len() != h.len() {
        return Err(Error::Field("Killing field and H sample different vertices".into()));
    }
    let mut total = 0.0;
    for f in 0..mesh.num_facets() {
        if mesh.tags()[f] != BoundaryTag::D0 {
            continue;
        }
        let vs = mesh.facet(f);
        let p: Vec<[f64; 3]> = vs.iter().map(|&v| mesh.vertex(v)).collect();
        let hv: Vec<f64> = vs.iter().map(|&v| hd[v]).collect();
        let g = facet_gradient(&p, &hv);
        let k = vs.len() as f64;
        let mut xa = [0.0; 3];
        for &v in vs {
            for d in 0..3 {
                xa[d] += xd[v][d] / k;
            }
        }
        total += mesh.facet_measure(f) * dot3(xa, g);
    }
    Ok(total)
}

/// Least-squares fit `H ≈ A·x + B` over the D0 vertices. Returns `(A, B,
/// max residual)`.
pub fn affine_fit(mesh: &Mesh, h: &ScalarField) -> Result<([f64; 3], f64, f64)> {
    if h.support() != Support::Boundary || h.is_empty() {
        return Err(Error::Field("affine fit needs nonempty D0 data".into()));
    }
    let dims = mesh.coord_dim();
    let k = dims + 1;
    let row = |i: usize| {
        let p = mesh.vertex(i);
        let mut r = vec![1.0];
        r.extend_from_slice(&p[..dims]);
        r
    };
    let mut ata = vec![vec![0.0; k]; k];
    let mut atb = vec![0.0; k];
    for (i, v) in h.iter() {
        let r = row(i);
        for a in 0..k {
            atb[a] += r[a] * v;
            for b in 0..k {
                ata[a][b] += r[a] * r[b];
            }
        }
    }
    let coef = solve_small(ata, atb).ok_or_else(|| Error::LinearSolve("degenerate affine fit".into()))?;
    let mut a = [0.0; 3];
    a[..dims].copy_from_slice(&coef[1..]);
    let resid = h
        .iter()
        .map(|(i, v)| {
            let r = row(i);
            (r.iter().zip(&coef).map(|(x, c)| x * c).sum::<f64>() - v).abs()
        })
        .fold(0.0, f64::max);
    Ok((a, coef[0], resid))
}

fn solve_small(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generators;

    #[test]
    fn fields_are_tangent() {
        let m = generators::ball(4);
        for f in [
            KillingField::rotation(&m, [0.3, -1.0, 2.0]).unwrap(),
            KillingField::conformal_translation(&m, [1.0, 0.5, 0.0]).unwrap(),
        ] {
            assert!(f.normal_component(&m).unwrap() < 1e-10);
        }
    }

    #[test]
    fn constant_h_gives_zero() {
        let m = generators::ball(4);
        let h = ScalarField::constant(&m, Support::Boundary, 3.0).unwrap();
        let x = KillingField::conformal_translation(&m, [1.0, 0.0, 0.0]).unwrap();
        assert!(kazdan_warner_escobar(&m, &h, &x).unwrap().abs() < 1e-10);
    }

    #[test]
    fn unit_circle_conformal_field() {
        // On the unit circle ⟨X, ∇x⟩ = sin²θ, whose integral is π.
        let m = generators::disk(24);
        let h = ScalarField::from_fn(&m, Support::Boundary, |_, p| p[0]).unwrap();
        let x = KillingField::conformal_translation(&m, [1.0, 0.0, 0.0]).unwrap();
        let v = kazdan_warner_escobar(&m, &h, &x).unwrap();
        assert!((v - std::f64::consts::PI).abs() < 0.01 * std::f64::consts::PI, "{v}");
    }

    #[test]
    fn non_round_mesh_rejected() {
        let m = generators::cube(2);
        assert!(matches!(KillingField::rotation(&m, [1.0, 0.0, 0.0]), Err(Error::NotRoundBall)));
    }

    #[test]
    fn affine_fit_recovers_coefficients() {
        let m = generators::ball(3);
        let h = ScalarField::from_fn(&m, Support::Boundary, |_, p| 2.0 * p[0] - p[2] + 0.5).unwrap();
        let (a, b, r) = affine_fit(&m, &h).unwrap();
        assert!((a[0] - 2.0).abs() < 1e-10 && a[1].abs() < 1e-10 && (a[2] + 1.0).abs() < 1e-10);
        assert!((b - 0.5).abs() < 1e-10 && r < 1e-10);
    }
}
