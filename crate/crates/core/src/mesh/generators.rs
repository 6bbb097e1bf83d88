//! Structured meshes for the built-in test domains.

use std::collections::HashMap;
use std::f64::consts::PI;

use super::{BoundaryTag, Mesh, Shape};

fn mesh_ok(r: crate::Result<Mesh>) -> Mesh {
    r.expect("generator produced an invalid mesh")
}

/// Triangulates the band between two closed rings whose angular positions
/// both start at 0 and increase.
fn stitch(inner: &[usize], inner_angles: &[f64], outer: &[usize], outer_angles: &[f64], tris: &mut Vec<[usize; 3]>) {
    if inner.len() == 1 {
        for j in 0..outer.len() {
            tris.push([inner[0], outer[j], outer[(j + 1) % outer.len()]]);
        }
        return;
    }
    let (na, nb) = (inner.len(), outer.len());
    let next = |angles: &[f64], k: usize| if k + 1 < angles.len() { angles[k + 1] } else { angles[0] + 2.0 * PI };
    let (mut i, mut j) = (0usize, 0usize);
    while i < na || j < nb {
        let advance_inner = j >= nb || (i < na && next(inner_angles, i) < next(outer_angles, j) - 1e-12);
        if advance_inner {
            tris.push([inner[i % na], inner[(i + 1) % na], outer[j % nb]]);
            i += 1;
        } else {
            tris.push([inner[i % na], outer[(j + 1) % nb], outer[j % nb]]);
            j += 1;
        }
    }
}

fn ring_angles(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

/// Unit disk with `rings` concentric rings of 6k vertices each.
pub fn disk(rings: usize) -> Mesh {
    let rings = rings.max(1);
    let mut verts = vec![[0.0, 0.0, 0.0]];
    let mut prev = vec![0usize];
    let mut prev_angles = vec![0.0];
    let mut tris = Vec::new();
    for k in 1..=rings {
        let r = k as f64 / rings as f64;
        let angles = ring_angles(6 * k);
        let idx: Vec<usize> = (0..angles.len()).map(|m| verts.len() + m).collect();
        verts.extend(angles.iter().map(|t| [r * t.cos(), r * t.sin(), 0.0]));
        stitch(&prev, &prev_angles, &idx, &angles, &mut tris);
        prev = idx;
        prev_angles = angles;
    }
    mesh_ok(Mesh::triangles(verts, 2, &tris)).with_shape(Shape::RoundDisk { center: [0.0; 3], radius: 1.0 })
}

/// Flat annulus `r_in ≤ |x| ≤ r_out` with `n_theta` vertices per ring.
pub fn annulus(r_in: f64, r_out: f64, n_theta: usize, n_r: usize) -> Mesh {
    let n_r = n_r.max(1);
    let angles = ring_angles(n_theta);
    // Alternate rings are staggered by half a step for better-shaped triangles.
    let shift = |k: usize| if k % 2 == 1 { PI / n_theta as f64 } else { 0.0 };
    let mut verts = Vec::new();
    let mut tris = Vec::new();
    let mut prev: Vec<usize> = Vec::new();
    for k in 0..=n_r {
        let r = r_in + (r_out - r_in) * k as f64 / n_r as f64;
        let here = shifted(&angles, shift(k));
        let idx: Vec<usize> = (0..n_theta).map(|m| verts.len() + m).collect();
        verts.extend(here.iter().map(|t| [r * t.cos(), r * t.sin(), 0.0]));
        if k > 0 {
            stitch_offset(&prev, &shifted(&angles, shift(k - 1)), &idx, &here, &mut tris);
        }
        prev = idx;
    }
    mesh_ok(Mesh::triangles(verts, 2, &tris))
}

fn shifted(angles: &[f64], s: f64) -> Vec<f64> {
    angles.iter().map(|a| a + s).collect()
}

/// Like [`stitch`] but tolerates rings whose first angle is not 0 by
/// rotating both so the smaller start becomes the origin.
fn stitch_offset(inner: &[usize], ia: &[f64], outer: &[usize], oa: &[f64], tris: &mut Vec<[usize; 3]>) {
    let base = ia[0].min(oa[0]);
    let ia: Vec<f64> = ia.iter().map(|a| a - base).collect();
    let oa: Vec<f64> = oa.iter().map(|a| a - base).collect();
    stitch(inner, &ia, outer, &oa, tris);
}

/// Planar grid on `[0, lx] × [0, ly]` with `nx × ny` squares split into
/// triangles along alternating diagonals.
pub fn rectangle(nx: usize, ny: usize, lx: f64, ly: f64) -> Mesh {
    let id = |i: usize, j: usize| i + (nx + 1) * j;
    let mut verts = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            verts.push([lx * i as f64 / nx as f64, ly * j as f64 / ny as f64, 0.0]);
        }
    }
    let mut tris = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                tris.push([a, b, c]);
                tris.push([a, c, d]);
            } else {
                tris.push([a, b, d]);
                tris.push([b, c, d]);
            }
        }
    }
    mesh_ok(Mesh::triangles(verts, 2, &tris))
}

/// Flat cylinder of circumference exactly 2π and the given height, embedded
/// in R³ as a polygonal prism so every quad is a planar rectangle.
/// Boundary circles sit at `z = 0` and `z = height`.
pub fn cylinder(n_theta: usize, n_z: usize, height: f64) -> Mesh {
    let radius = (PI / n_theta as f64) / (PI / n_theta as f64).sin();
    let mut verts = Vec::new();
    for k in 0..=n_z {
        let z = height * k as f64 / n_z as f64;
        for m in 0..n_theta {
            let t = 2.0 * PI * m as f64 / n_theta as f64;
            verts.push([radius * t.cos(), radius * t.sin(), z]);
        }
    }
    let id = |m: usize, k: usize| (m % n_theta) + n_theta * k;
    let mut tris = Vec::new();
    for k in 0..n_z {
        for m in 0..n_theta {
            let (a, b, c, d) = (id(m, k), id(m + 1, k), id(m + 1, k + 1), id(m, k + 1));
            if (m + k) % 2 == 0 {
                tris.push([a, b, c]);
                tris.push([a, c, d]);
            } else {
                tris.push([a, b, d]);
                tris.push([b, c, d]);
            }
        }
    }
    mesh_ok(Mesh::triangles(verts, 3, &tris))
}

/// Angular coordinate of a cylinder vertex, in `[0, 2π)`.
pub fn cylinder_angle(p: [f64; 3]) -> f64 {
    p[1].atan2(p[0]).rem_euclid(2.0 * PI)
}

/// [`cylinder`] whose `z = 0` circle is D0 and whose top circle is a DM cut.
pub fn half_cylinder(n_theta: usize, n_z: usize, height: f64) -> Mesh {
    cylinder(n_theta, n_z, height).tag_by(|c| if c[2] < 0.5 * height { BoundaryTag::D0 } else { BoundaryTag::DM })
}

/// Upper unit hemisphere with boundary on the equator.
pub fn hemisphere(rings: usize) -> Mesh {
    let rings = rings.max(1);
    let mut verts = vec![[0.0, 0.0, 1.0]];
    let mut prev = vec![0usize];
    let mut prev_angles = vec![0.0];
    let mut tris = Vec::new();
    for k in 1..=rings {
        let phi = 0.5 * PI * k as f64 / rings as f64;
        let angles = ring_angles(6 * k);
        let idx: Vec<usize> = (0..angles.len()).map(|m| verts.len() + m).collect();
        verts.extend(angles.iter().map(|t| [phi.sin() * t.cos(), phi.sin() * t.sin(), phi.cos()]));
        stitch(&prev, &prev_angles, &idx, &angles, &mut tris);
        prev = idx;
        prev_angles = angles;
    }
    mesh_ok(Mesh::triangles(verts, 3, &tris))
}

fn icosphere(subdivisions: usize) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut v: Vec<[f64; 3]> = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let normalize = |p: [f64; 3]| {
        let n = super::simplex::norm3(p);
        p.map(|x| x / n)
    };
    v = v.into_iter().map(normalize).collect();
    let mut f: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut nf = Vec::with_capacity(f.len() * 4);
        let mut midpoint = |a: usize, b: usize, v: &mut Vec<[f64; 3]>| {
            let k = if a < b { (a, b) } else { (b, a) };
            *mid.entry(k).or_insert_with(|| {
                let p = [(v[a][0] + v[b][0]) / 2.0, (v[a][1] + v[b][1]) / 2.0, (v[a][2] + v[b][2]) / 2.0];
                v.push(normalize(p));
                v.len() - 1
            })
        };
        for [a, b, c] in f {
            let ab = midpoint(a, b, &mut v);
            let bc = midpoint(b, c, &mut v);
            let ca = midpoint(c, a, &mut v);
            nf.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        f = nf;
    }
    (v, f)
}

/// Unit sphere with the faces inside geodesic caps of radius `cap_angle`
/// around each of `centers` removed. χ = 2 − (number of caps).
pub fn sphere_minus_disks(subdivisions: usize, centers: &[[f64; 3]], cap_angle: f64) -> Mesh {
    let (v, f) = icosphere(subdivisions);
    let centers: Vec<[f64; 3]> = centers
        .iter()
        .map(|c| {
            let n = super::simplex::norm3(*c);
            c.map(|x| x / n)
        })
        .collect();
    let keep: Vec<[usize; 3]> = f
        .into_iter()
        .filter(|t| {
            let c = super::centroid(t.iter().map(|&i| v[i]));
            let n = super::simplex::norm3(c);
            centers.iter().all(|z| (super::simplex::dot3(c, *z) / n).clamp(-1.0, 1.0).acos() > cap_angle)
        })
        .collect();
    let mut remap = vec![usize::MAX; v.len()];
    let mut verts = Vec::new();
    let mut tris = Vec::with_capacity(keep.len());
    for t in keep {
        tris.push(t.map(|i| {
            if remap[i] == usize::MAX {
                remap[i] = verts.len();
                verts.push(v[i]);
            }
            remap[i]
        }));
    }
    mesh_ok(Mesh::triangles(verts, 3, &tris))
}

/// Sphere with three equatorial holes: a pair of pants, χ = −1.
pub fn pair_of_pants(subdivisions: usize) -> Mesh {
    let centers: Vec<[f64; 3]> =
        (0..3).map(|k| 2.0 * PI * k as f64 / 3.0 + 0.1).map(|a| [a.cos(), a.sin(), 0.2]).collect();
    sphere_minus_disks(subdivisions, &centers, 0.5)
}

/// Tetrahedral grid of `[lo, hi]³` with `k` cells per axis. Each cube is
/// split into six tetrahedra along a diagonal mirrored about the centre,
/// so the mesh is symmetric under each coordinate reflection.
fn box_grid(k: usize, lo: f64, hi: f64) -> (Vec<[f64; 3]>, Vec<[usize; 4]>) {
    let k = k.max(1);
    let n = k + 1;
    let id = |i: usize, j: usize, l: usize| i + n * (j + n * l);
    let mut verts = Vec::with_capacity(n * n * n);
    for l in 0..n {
        for j in 0..n {
            for i in 0..n {
                let c = |t: usize| lo + (hi - lo) * t as f64 / k as f64;
                verts.push([c(i), c(j), c(l)]);
            }
        }
    }
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut tets = Vec::with_capacity(6 * k * k * k);
    for l in 0..k {
        for j in 0..k {
            for i in 0..k {
                let base = [i, j, l];
                // Reflect the local pattern in every axis on the low side of the centre.
                let flip: [bool; 3] = base.map(|b| 2 * b + 1 < k);
                let corner = |bits: [usize; 3]| {
                    let b: Vec<usize> = (0..3).map(|d| if flip[d] { 1 - bits[d] } else { bits[d] }).collect();
                    id(base[0] + b[0], base[1] + b[1], base[2] + b[2])
                };
                for p in PERMS {
                    let mut bits = [0usize; 3];
                    let mut tet = [corner(bits); 4];
                    for (s, &d) in p.iter().enumerate() {
                        bits[d] = 1;
                        tet[s + 1] = corner(bits);
                    }
                    tets.push(tet);
                }
            }
        }
    }
    (verts, tets)
}

/// Unit cube `[0,1]³` with `k` cells per axis.
pub fn cube(k: usize) -> Mesh {
    let (v, t) = box_grid(k, 0.0, 1.0);
    mesh_ok(Mesh::tetrahedra(v, &t))
}

/// Unit ball obtained by mapping a `k³` cube grid of `[-1,1]³` onto the ball
/// with a smooth reflection-symmetric map; boundary vertices lie exactly on
/// the unit sphere.
pub fn ball(k: usize) -> Mesh {
    let (v, t) = box_grid(k, -1.0, 1.0);
    let v = v
        .into_iter()
        .map(|[x, y, z]| {
            let (x2, y2, z2) = (x * x, y * y, z * z);
            let mut p = [
                x * (1.0 - y2 / 2.0 - z2 / 2.0 + y2 * z2 / 3.0).sqrt(),
                y * (1.0 - z2 / 2.0 - x2 / 2.0 + z2 * x2 / 3.0).sqrt(),
                z * (1.0 - x2 / 2.0 - y2 / 2.0 + x2 * y2 / 3.0).sqrt(),
            ];
            if x.abs().max(y.abs()).max(z.abs()) == 1.0 {
                let n = super::simplex::norm3(p);
                p = p.map(|c| c / n);
            }
            p
        })
        .collect();
    mesh_ok(Mesh::tetrahedra(v, &t)).with_shape(Shape::RoundBall { center: [0.0; 3], radius: 1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn topologies() {
        assert_eq!(disk(4).euler_characteristic().unwrap(), 1);
        assert_eq!(disk(4).boundary_loops().unwrap(), 1);
        assert_eq!(annulus(0.5, 1.0, 24, 4).euler_characteristic().unwrap(), 0);
        assert_eq!(annulus(0.5, 1.0, 24, 4).boundary_loops().unwrap(), 2);
        assert_eq!(cylinder(16, 4, 1.0).euler_characteristic().unwrap(), 0);
        assert_eq!(hemisphere(5).euler_characteristic().unwrap(), 1);
        assert_eq!(rectangle(3, 2, 1.0, 1.0).euler_characteristic().unwrap(), 1);
        let p = pair_of_pants(3);
        assert_eq!(p.euler_characteristic().unwrap(), -1);
        assert_eq!(p.boundary_loops().unwrap(), 3);
    }

    #[test]
    fn cube_volume_and_boundary() {
        let m = cube(3);
        assert!((m.total_measure() - 1.0).abs() < 1e-12);
        assert_eq!(m.num_facets(), 6 * 9 * 2);
    }

    #[test]
    fn ball_boundary_on_sphere() {
        let m = ball(4);
        for f in 0..m.num_facets() {
            for &v in m.facet(f) {
                assert!((super::super::simplex::norm3(m.vertex(v)) - 1.0).abs() < 1e-14);
            }
        }
        let vol = m.total_measure();
        assert!((vol - 4.0 * PI / 3.0).abs() < 0.4, "{vol}");
    }

    #[test]
    fn cylinder_circumference_is_two_pi() {
        let m = cylinder(12, 2, 1.0);
        let len: f64 = m.boundary_measures(BoundaryTag::D0).iter().sum();
        assert!((len - 4.0 * PI).abs() < 1e-12);
        let h = half_cylinder(12, 2, 1.0);
        let d0: f64 = h.boundary_measures(BoundaryTag::D0).iter().sum();
        assert!((d0 - 2.0 * PI).abs() < 1e-12);
    }
}
