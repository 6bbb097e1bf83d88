//! OFF geometry files and the boundary-tag sidecar.
//!
//! Cells with three indices are triangles; cells with four indices are read
//! as tetrahedra (quads are not supported). Mixed cell sizes are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BoundaryTag, Mesh, Shape};
use crate::error::{Error, Result};

pub fn load_mesh(path: impl AsRef<Path>) -> Result<Mesh> {
    let text = std::fs::read_to_string(path)?;
    parse_off(&text)
}

pub fn parse_off(text: &str) -> Result<Mesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let err = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };

    let (line, header) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    let mut counts_src = if let Some(rest) = header.strip_prefix("OFF") {
        rest.trim().to_string()
    } else {
        return Err(err(line, "missing OFF header"));
    };
    let mut counts_line = line;
    if counts_src.is_empty() {
        let (l, c) = lines.next().ok_or_else(|| err(line, "missing counts"))?;
        counts_src = c.to_string();
        counts_line = l;
    }
    let counts: Vec<usize> = counts_src
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| err(counts_line, "bad count")))
        .collect::<Result<_>>()?;
    if counts.len() < 2 {
        return Err(err(counts_line, "expected vertex and face counts"));
    }
    let (nv, nf) = (counts[0], counts[1]);

    let mut verts = Vec::with_capacity(nv);
    let mut planar = true;
    for _ in 0..nv {
        let (l, src) = lines.next().ok_or_else(|| err(counts_line, "unexpected end of vertices"))?;
        let xs: Vec<f64> =
            src.split_whitespace().map(|t| t.parse().map_err(|_| err(l, "bad coordinate"))).collect::<Result<_>>()?;
        if xs.len() < 2 || xs.len() > 3 {
            return Err(err(l, "vertex needs 2 or 3 coordinates"));
        }
        let z = xs.get(2).copied().unwrap_or(0.0);
        planar &= z == 0.0;
        verts.push([xs[0], xs[1], z]);
    }
    let mut cells: Vec<Vec<usize>> = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (l, src) = lines.next().ok_or_else(|| err(counts_line, "unexpected end of faces"))?;
        let ids: Vec<usize> =
            src.split_whitespace().map(|t| t.parse().map_err(|_| err(l, "bad index"))).collect::<Result<_>>()?;
        let k = *ids.first().ok_or_else(|| err(l, "empty face"))?;
        if ids.len() < k + 1 || !(k == 3 || k == 4) {
            return Err(err(l, "faces must list 3 (triangle) or 4 (tetrahedron) indices"));
        }
        if let Some(&bad) = ids[1..=k].iter().find(|&&i| i >= nv) {
            return Err(err(l, &format!("index {bad} out of range")));
        }
        if let Some(first) = cells.first() {
            if first.len() != k {
                return Err(err(l, "mixed cell sizes"));
            }
        }
        cells.push(ids[1..=k].to_vec());
    }
    match cells.first().map(|c| c.len()) {
        Some(4) => {
            let tets: Vec<[usize; 4]> = cells.iter().map(|c| [c[0], c[1], c[2], c[3]]).collect();
            Mesh::tetrahedra(verts, &tets)
        }
        Some(_) => {
            let tris: Vec<[usize; 3]> = cells.iter().map(|c| [c[0], c[1], c[2]]).collect();
            Mesh::triangles(verts, if planar { 2 } else { 3 }, &tris)
        }
        None => Err(err(counts_line, "no cells")),
    }
}

pub fn to_off(mesh: &Mesh) -> String {
    let mut s = format!("OFF\n{} {} 0\n", mesh.num_vertices(), mesh.num_cells());
    for p in mesh.vertices() {
        s.push_str(&format!("{} {} {}\n", p[0], p[1], p[2]));
    }
    for c in 0..mesh.num_cells() {
        let cell = mesh.cell(c);
        s.push_str(&cell.len().to_string());
        for v in cell {
            s.push_str(&format!(" {v}"));
        }
        s.push('\n');
    }
    s
}

pub fn save_mesh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_off(mesh))?;
    Ok(())
}

/// Contents of a tag sidecar file (TOML):
///
/// ```toml
/// default = "D0"
/// dm = [4, 5, 6]          # boundary facet indices tagged DM
/// d0 = []                 # overrides when default = "DM"
/// shape = { kind = "round_disk", center = [0.0, 0.0, 0.0], radius = 1.0 }
/// ```
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TagFile {
    #[serde(default = "default_tag")]
    pub default: BoundaryTag,
    #[serde(default)]
    pub dm: Vec<usize>,
    #[serde(default)]
    pub d0: Vec<usize>,
    #[serde(default)]
    pub shape: Option<Shape>,
}

fn default_tag() -> BoundaryTag {
    BoundaryTag::D0
}

impl TagFile {
    pub fn from_mesh(mesh: &Mesh) -> Self {
        let dm = (0..mesh.num_facets()).filter(|&f| mesh.tags()[f] == BoundaryTag::DM).collect();
        let shape = match mesh.shape() {
            Shape::Generic => None,
            s => Some(s),
        };
        Self { default: BoundaryTag::D0, dm, d0: Vec::new(), shape }
    }

    pub fn apply(&self, mesh: Mesh) -> Result<Mesh> {
        let nf = mesh.num_facets();
        let mut tags = vec![self.default; nf];
        for (list, tag) in [(&self.dm, BoundaryTag::DM), (&self.d0, BoundaryTag::D0)] {
            for &f in list {
                if f >= nf {
                    return Err(Error::Field(format!("tag for facet {f}, mesh has {nf} boundary facets")));
                }
                tags[f] = tag;
            }
        }
        let mesh = mesh.with_tags(tags)?;
        Ok(match self.shape {
            Some(s) => mesh.with_shape(s),
            None => mesh,
        })
    }
}

pub fn parse_tags(text: &str) -> Result<TagFile> {
    toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map(|s| text[..s.start].lines().count().max(1)).unwrap_or(0),
        msg: e.message().to_string(),
    })
}

pub fn load_tags(path: impl AsRef<Path>) -> Result<TagFile> {
    parse_tags(&std::fs::read_to_string(path)?)
}

pub fn tags_to_toml(tags: &TagFile) -> String {
    toml::to_string(tags).expect("tag file serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generators;

    #[test]
    fn single_triangle() {
        let m = parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n").unwrap();
        assert_eq!(m.num_facets(), 3);
        assert_eq!(m.coord_dim(), 2);
    }

    #[test]
    fn out_of_range_index() {
        let r = parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n");
        assert!(matches!(r, Err(Error::Parse { line: 6, .. })));
    }

    #[test]
    fn malformed_header() {
        assert!(matches!(parse_off("PLY\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_off("OFF\n3 1\n0 0\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn disk_round_trip() {
        let m = generators::disk(5);
        let back = parse_off(&to_off(&m)).unwrap();
        assert_eq!(back.num_vertices(), m.num_vertices());
        assert_eq!(back.num_cells(), m.num_cells());
        assert_eq!(back.boundary_loops().unwrap(), 1);
        for (a, b) in back.edge_lengths().iter().zip(m.edge_lengths()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn tetrahedral_round_trip() {
        let m = generators::cube(2);
        let back = parse_off(&to_off(&m)).unwrap();
        assert_eq!(back.dim(), 3);
        assert_eq!(back.num_facets(), m.num_facets());
    }

    #[test]
    fn tag_sidecar_round_trip() {
        let m = generators::half_cylinder(8, 2, 1.0);
        let tags = TagFile::from_mesh(&m);
        let text = tags_to_toml(&tags);
        let fresh = generators::cylinder(8, 2, 1.0);
        let tagged = parse_tags(&text).unwrap().apply(fresh).unwrap();
        assert_eq!(tagged.tags(), m.tags());
    }

    #[test]
    fn tag_out_of_range() {
        let m = generators::disk(2);
        let t = parse_tags("dm = [100000]").unwrap();
        assert!(t.apply(m).is_err());
    }
}
