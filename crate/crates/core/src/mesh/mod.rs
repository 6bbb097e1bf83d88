//! Simplicial meshes with boundary, edge-length metrics and discrete curvature.

mod field;
pub mod generators;
pub mod io;
pub mod simplex;

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use field::{ScalarField, Support};
use simplex::{tet_geometry, triangle_area, triangle_geometry, TetGeometry, TriangleGeometry, TET_EDGES};

use crate::error::{Error, Result};

/// Label of a boundary facet: part of ∂M (`D0`) or a cut interior to M (`DM`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryTag {
    D0,
    DM,
}

/// Extra knowledge about where a mesh came from, used by tests that need the
/// exact continuous domain (e.g. the ball obstruction integral).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Generic,
    RoundDisk { center: [f64; 3], radius: f64 },
    RoundBall { center: [f64; 3], radius: f64 },
}

/// A triangle or tetrahedral complex whose metric lives on its edge lengths.
#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<[f64; 3]>,
    coord_dim: usize,
    simplex: usize,
    cells: Vec<usize>,
    edges: Vec<[usize; 2]>,
    edge_lookup: HashMap<(usize, usize), usize>,
    cell_edges: Vec<usize>,
    edge_lengths: Vec<f64>,
    facets: Vec<usize>,
    facet_cells: Vec<usize>,
    tags: Vec<BoundaryTag>,
    on_boundary: Vec<bool>,
    on_d0: Vec<bool>,
    shape: Shape,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Mesh {
    /// Builds a triangle mesh. `coord_dim` is 2 for planar and 3 for
    /// embedded surfaces (the unused third coordinate of planar meshes is 0).
    pub fn triangles(vertices: Vec<[f64; 3]>, coord_dim: usize, cells: &[[usize; 3]]) -> Result<Self> {
        Self::build(vertices, coord_dim, 3, cells.iter().flatten().copied().collect())
    }

    pub fn tetrahedra(vertices: Vec<[f64; 3]>, cells: &[[usize; 4]]) -> Result<Self> {
        Self::build(vertices, 3, 4, cells.iter().flatten().copied().collect())
    }

    fn build(vertices: Vec<[f64; 3]>, coord_dim: usize, simplex: usize, cells: Vec<usize>) -> Result<Self> {
        let nv = vertices.len();
        if let Some(&bad) = cells.iter().find(|&&i| i >= nv) {
            return Err(Error::Parse { line: 0, msg: format!("vertex index {bad} out of range (have {nv})") });
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Parse { line: 0, msg: "non-finite vertex coordinate".into() });
        }
        let ncell = cells.len() / simplex;
        let mut edges = Vec::new();
        let mut edge_lookup = HashMap::new();
        let local_edges: &[(usize, usize)] = if simplex == 3 { &[(0, 1), (1, 2), (2, 0)] } else { &TET_EDGES };
        let mut cell_edges = Vec::with_capacity(ncell * local_edges.len());
        for c in 0..ncell {
            let cell = &cells[c * simplex..(c + 1) * simplex];
            for i in 0..simplex {
                for j in i + 1..simplex {
                    if cell[i] == cell[j] {
                        return Err(Error::DegenerateCell { cell: c });
                    }
                }
            }
            for &(a, b) in local_edges {
                let k = key(cell[a], cell[b]);
                let id = *edge_lookup.entry(k).or_insert_with(|| {
                    edges.push([k.0, k.1]);
                    edges.len() - 1
                });
                cell_edges.push(id);
            }
        }
        let edge_lengths = edges.iter().map(|&[a, b]| simplex::norm3(simplex::sub3(vertices[a], vertices[b]))).collect();

        let mut facet_count: HashMap<[usize; 3], (usize, usize, usize)> = HashMap::new();
        let mut order = 0usize;
        for c in 0..ncell {
            let cell = &cells[c * simplex..(c + 1) * simplex];
            for skip in 0..simplex {
                let mut f = [usize::MAX; 3];
                let mut k = 0;
                for (i, &v) in cell.iter().enumerate() {
                    if i != skip {
                        f[k] = v;
                        k += 1;
                    }
                }
                f[..simplex - 1].sort_unstable();
                let e = facet_count.entry(f).or_insert((0, order, c));
                e.0 += 1;
                order += 1;
            }
        }
        let mut boundary: Vec<([usize; 3], usize, usize)> =
            facet_count.into_iter().filter(|(_, (n, _, _))| *n == 1).map(|(f, (_, o, c))| (f, o, c)).collect();
        boundary.sort_by_key(|&(_, o, _)| o);
        let mut facets = Vec::with_capacity(boundary.len() * (simplex - 1));
        let mut facet_cells = Vec::with_capacity(boundary.len());
        for (f, _, c) in &boundary {
            // Keep the facet's vertices in the cell's cyclic order so 2D loops
            // are consistently oriented.
            let cell = &cells[c * simplex..(c + 1) * simplex];
            if simplex == 3 {
                let missing = cell.iter().position(|v| !f[..2].contains(v)).unwrap_or(0);
                facets.extend((1..3).map(|k| cell[(missing + k) % 3]));
            } else {
                facets.extend(cell.iter().copied().filter(|v| f[..3].contains(v)));
            }
            facet_cells.push(*c);
        }
        let tags = vec![BoundaryTag::D0; facet_cells.len()];
        let mut mesh = Self {
            vertices,
            coord_dim,
            simplex,
            cells,
            edges,
            edge_lookup,
            cell_edges,
            edge_lengths,
            facets,
            facet_cells,
            tags,
            on_boundary: Vec::new(),
            on_d0: Vec::new(),
            shape: Shape::Generic,
        };
        mesh.refresh_masks();
        mesh.validate_cells()?;
        Ok(mesh)
    }

    fn refresh_masks(&mut self) {
        let nv = self.vertices.len();
        let mut on_boundary = vec![false; nv];
        let mut on_d0 = vec![false; nv];
        for f in 0..self.num_facets() {
            for &v in self.facet(f) {
                on_boundary[v] = true;
                if self.tags[f] == BoundaryTag::D0 {
                    on_d0[v] = true;
                }
            }
        }
        self.on_boundary = on_boundary;
        self.on_d0 = on_d0;
    }

    fn validate_cells(&self) -> Result<()> {
        for c in 0..self.num_cells() {
            self.cell_measure_checked(c)?;
        }
        Ok(())
    }

    /// Intrinsic dimension: 2 for triangles, 3 for tetrahedra.
    pub fn dim(&self) -> usize {
        self.simplex - 1
    }

    pub fn coord_dim(&self) -> usize {
        self.coord_dim
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len() / self.simplex
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_facets(&self) -> usize {
        self.facet_cells.len()
    }

    pub fn vertex(&self, i: usize) -> [f64; 3] {
        self.vertices[i]
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        &self.cells[c * self.simplex..(c + 1) * self.simplex]
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge_lengths(&self) -> &[f64] {
        &self.edge_lengths
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_lookup.get(&key(a, b)).copied()
    }

    pub fn edge_length(&self, a: usize, b: usize) -> Option<f64> {
        self.edge_index(a, b).map(|e| self.edge_lengths[e])
    }

    pub fn facet(&self, f: usize) -> &[usize] {
        let k = self.simplex - 1;
        &self.facets[f * k..(f + 1) * k]
    }

    pub fn facet_cell(&self, f: usize) -> usize {
        self.facet_cells[f]
    }

    pub fn tags(&self) -> &[BoundaryTag] {
        &self.tags
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn with_shape(mut self, shape: Shape) -> Self {
        self.shape = shape;
        self
    }

    /// Replaces the boundary partition; one tag per boundary facet.
    pub fn with_tags(mut self, tags: Vec<BoundaryTag>) -> Result<Self> {
        if tags.len() != self.num_facets() {
            return Err(Error::Field(format!("{} tags for {} boundary facets", tags.len(), self.num_facets())));
        }
        self.tags = tags;
        self.refresh_masks();
        Ok(self)
    }

    /// Tags each boundary facet by a predicate on its centroid.
    pub fn tag_by(self, f: impl Fn([f64; 3]) -> BoundaryTag) -> Self {
        let tags = (0..self.num_facets()).map(|k| f(self.facet_centroid(k))).collect();
        self.with_tags(tags).expect("one tag per facet")
    }

    pub fn facet_centroid(&self, f: usize) -> [f64; 3] {
        centroid(self.facet(f).iter().map(|&v| self.vertices[v]))
    }

    pub fn cell_centroid(&self, c: usize) -> [f64; 3] {
        centroid(self.cell(c).iter().map(|&v| self.vertices[v]))
    }

    /// Replaces the metric. Every cell must stay non-degenerate.
    pub fn with_edge_lengths(&self, lengths: Vec<f64>) -> Result<Self> {
        if lengths.len() != self.num_edges() {
            return Err(Error::Field(format!("{} lengths for {} edges", lengths.len(), self.num_edges())));
        }
        let mut m = self.clone();
        m.edge_lengths = lengths;
        for c in 0..m.num_cells() {
            if m.cell_measure_checked(c).is_err() {
                return Err(Error::SimplexInequality { cell: c });
            }
        }
        Ok(m)
    }

    pub fn is_boundary_vertex(&self, i: usize) -> bool {
        self.on_boundary[i]
    }

    /// True for vertices of D0 facets; these carry boundary-equation rows.
    pub fn is_d0_vertex(&self, i: usize) -> bool {
        self.on_d0[i]
    }

    pub fn d0_mask(&self) -> &[bool] {
        &self.on_d0
    }

    pub fn support_vertices(&self, support: Support) -> Vec<usize> {
        (0..self.num_vertices())
            .filter(|&i| match support {
                Support::All => true,
                Support::Interior => !self.on_d0[i],
                Support::Boundary => self.on_d0[i],
            })
            .collect()
    }

    /// Longest edge length, the mesh size `h`.
    pub fn mesh_size(&self) -> f64 {
        self.edge_lengths.iter().copied().fold(0.0, f64::max)
    }

    fn local_lengths(&self, c: usize) -> Vec<f64> {
        let ne = if self.simplex == 3 { 3 } else { 6 };
        self.cell_edges[c * ne..(c + 1) * ne].iter().map(|&e| self.edge_lengths[e]).collect()
    }

    pub fn triangle(&self, c: usize) -> Result<TriangleGeometry> {
        let l = self.local_lengths(c);
        triangle_geometry([l[0], l[1], l[2]]).ok_or(Error::SimplexInequality { cell: c })
    }

    pub fn tetrahedron(&self, c: usize) -> Result<TetGeometry> {
        let l = self.local_lengths(c);
        tet_geometry([l[0], l[1], l[2], l[3], l[4], l[5]]).ok_or(Error::DegenerateCell { cell: c })
    }

    fn cell_measure_checked(&self, c: usize) -> Result<f64> {
        let m = match self.simplex {
            3 => self.triangle(c).map_err(|_| Error::DegenerateCell { cell: c })?.area,
            _ => self.tetrahedron(c)?.volume,
        };
        let h = self.local_lengths(c).into_iter().fold(0.0, f64::max);
        if !(m > 1e-14 * h.powi(self.dim() as i32)) {
            return Err(Error::DegenerateCell { cell: c });
        }
        Ok(m)
    }

    /// Area (n=2) or volume (n=3) of a cell.
    pub fn cell_measure(&self, c: usize) -> f64 {
        match self.simplex {
            3 => self.triangle(c).map(|g| g.area).unwrap_or(0.0),
            _ => self.tetrahedron(c).map(|g| g.volume).unwrap_or(0.0),
        }
    }

    /// Length (n=2) or area (n=3) of a boundary facet.
    pub fn facet_measure(&self, f: usize) -> f64 {
        let v = self.facet(f);
        let len = |a: usize, b: usize| self.edge_length(a, b).expect("facet edge");
        match self.simplex {
            3 => len(v[0], v[1]),
            _ => triangle_area(len(v[0], v[1]), len(v[1], v[2]), len(v[2], v[0])).unwrap_or(0.0),
        }
    }

    /// Barycentric lumped measure of each vertex's star.
    pub fn vertex_measures(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.num_vertices()];
        for c in 0..self.num_cells() {
            let share = self.cell_measure(c) / self.simplex as f64;
            for &v in self.cell(c) {
                m[v] += share;
            }
        }
        m
    }

    /// Lumped boundary measure of each vertex over facets carrying `tag`.
    pub fn boundary_measures(&self, tag: BoundaryTag) -> Vec<f64> {
        let mut m = vec![0.0; self.num_vertices()];
        let k = (self.simplex - 1) as f64;
        for f in 0..self.num_facets() {
            if self.tags[f] != tag {
                continue;
            }
            let share = self.facet_measure(f) / k;
            for &v in self.facet(f) {
                m[v] += share;
            }
        }
        m
    }

    pub fn total_measure(&self) -> f64 {
        (0..self.num_cells()).map(|c| self.cell_measure(c)).sum()
    }

    fn require_surface(&self, what: &str) -> Result<()> {
        if self.simplex != 3 {
            return Err(Error::Dimension(format!("{what} needs a triangle mesh")));
        }
        Ok(())
    }

    /// V − E + F of a triangle mesh.
    pub fn euler_characteristic(&self) -> Result<i64> {
        self.require_surface("euler characteristic")?;
        Ok(self.num_vertices() as i64 - self.num_edges() as i64 + self.num_cells() as i64)
    }

    /// Number of closed boundary curves of a triangle mesh.
    pub fn boundary_loops(&self) -> Result<usize> {
        self.require_surface("boundary loops")?;
        let mut parent: Vec<usize> = (0..self.num_vertices()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for f in 0..self.num_facets() {
            let v = self.facet(f);
            let (a, b) = (find(&mut parent, v[0]), find(&mut parent, v[1]));
            parent[a] = b;
        }
        let mut roots: Vec<usize> =
            (0..self.num_vertices()).filter(|&i| self.on_boundary[i]).map(|i| find(&mut parent, i)).collect();
        roots.sort_unstable();
        roots.dedup();
        Ok(roots.len())
    }

    /// Sum of incident corner angles at each vertex.
    pub fn angle_sums(&self) -> Result<Vec<f64>> {
        self.require_surface("angle sums")?;
        let mut sums = vec![0.0; self.num_vertices()];
        for c in 0..self.num_cells() {
            let g = self.triangle(c)?;
            for (k, &v) in self.cell(c).iter().enumerate() {
                sums[v] += g.angles[k];
            }
        }
        Ok(sums)
    }

    /// Integrated curvatures: `2π − Σangles` at interior vertices and
    /// `π − Σangles` at boundary vertices.
    ///
    /// The first field lives on [`Support::Interior`], the second on
    /// [`Support::Boundary`]; a DM-only boundary vertex reports its
    /// boundary defect in the first field.
    pub fn angle_defect_curvatures(&self) -> Result<(ScalarField, ScalarField)> {
        let defects = self.angle_defects()?;
        Ok((
            ScalarField::from_dense(self, Support::Interior, &defects)?,
            ScalarField::from_dense(self, Support::Boundary, &defects)?,
        ))
    }

    /// Per-vertex angle defect on all vertices.
    pub fn angle_defects(&self) -> Result<Vec<f64>> {
        let sums = self.angle_sums()?;
        Ok(sums
            .iter()
            .enumerate()
            .map(|(i, s)| if self.on_boundary[i] { PI - s } else { 2.0 * PI - s })
            .collect())
    }

    /// Σ defects − 2πχ; zero up to rounding on every valid surface mesh.
    pub fn gauss_bonnet_residual(&self) -> Result<f64> {
        let chi = self.euler_characteristic()?;
        let total: f64 = self.angle_defects()?.iter().sum();
        Ok(total - 2.0 * PI * chi as f64)
    }

    /// Discrete conformal change `ℓ′_ij = e^{(u_i+u_j)/2} ℓ_ij`.
    pub fn conformal_rescale_lengths(&self, u: &ScalarField) -> Result<Self> {
        self.require_surface("conformal rescaling")?;
        if u.support() != Support::All {
            return Err(Error::Field("conformal factor must live on all vertices".into()));
        }
        let u = u.values();
        let lengths =
            self.edges.iter().zip(&self.edge_lengths).map(|(&[a, b], &l)| ((u[a] + u[b]) / 2.0).exp() * l).collect();
        self.with_edge_lengths(lengths)
    }
}

fn centroid(points: impl Iterator<Item = [f64; 3]>) -> [f64; 3] {
    let mut s = [0.0; 3];
    let mut n = 0.0;
    for p in points {
        for d in 0..3 {
            s[d] += p[d];
        }
        n += 1.0;
    }
    s.map(|x| x / n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_triangle() -> Mesh {
        Mesh::triangles(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], 2, &[[0, 1, 2]]).unwrap()
    }

    #[test]
    fn one_triangle_has_three_boundary_edges() {
        let m = single_triangle();
        assert_eq!(m.num_facets(), 3);
        assert_eq!(m.euler_characteristic().unwrap(), 1);
        assert_eq!(m.boundary_loops().unwrap(), 1);
        assert!(m.gauss_bonnet_residual().unwrap().abs() < 1e-14);
    }

    #[test]
    fn repeated_vertex_is_degenerate() {
        let r = Mesh::triangles(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]], 2, &[[0, 1, 1]]);
        assert!(matches!(r, Err(Error::DegenerateCell { cell: 0 })));
    }

    #[test]
    fn collinear_triangle_is_degenerate() {
        let r = Mesh::triangles(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]], 2, &[[0, 1, 2]]);
        assert!(matches!(r, Err(Error::DegenerateCell { cell: 0 })));
    }

    #[test]
    fn cone_vertex_defect() {
        // Three right-isoceles triangles around a vertex: total angle 3π/2.
        let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, -1.0, 0.0]];
        let flat = Mesh::triangles(v, 2, &[[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 1]]).unwrap();
        // Corner of a cube: three right angles meet at the apex.
        let cone = Mesh::triangles(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            3,
            &[[0, 1, 2], [0, 2, 3], [0, 3, 1]],
        )
        .unwrap();
        let d = cone.angle_defects().unwrap();
        assert!((d[0] - PI / 2.0).abs() < 1e-14);
        assert!(flat.angle_defects().unwrap()[0].abs() < 1e-14);
    }

    #[test]
    fn straight_boundary_vertex_has_zero_defect() {
        let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        let m = Mesh::triangles(v, 2, &[[0, 1, 3], [0, 3, 2]]).unwrap();
        assert!(m.angle_defects().unwrap()[0].abs() < 1e-14);
    }

    #[test]
    fn rescale_breaking_triangle_inequality_names_cell() {
        let m = single_triangle();
        let u = ScalarField::new(&m, Support::All, vec![0.0, 6.0, -6.0]).unwrap();
        match m.conformal_rescale_lengths(&u) {
            Err(Error::SimplexInequality { cell }) => assert_eq!(cell, 0),
            other => panic!("expected simplex error, got {other:?}"),
        }
    }

    #[test]
    fn tetrahedral_mesh_has_no_euler_characteristic() {
        let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let m = Mesh::tetrahedra(v, &[[0, 1, 2, 3]]).unwrap();
        assert_eq!(m.num_facets(), 4);
        assert!(matches!(m.euler_characteristic(), Err(Error::Dimension(_))));
        assert!((m.total_measure() - 1.0 / 6.0).abs() < 1e-15);
    }
}
