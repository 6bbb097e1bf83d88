//! Background metric data: dimension and nodal curvature densities.

use crate::error::{Error, Result};
use crate::mesh::{BoundaryTag, Mesh, ScalarField, Support};

/// Background curvatures as pointwise densities.
///
/// For `n = 2` the interior field is `K_g` and the boundary field `κ_g`; for
/// `n ≥ 3` they are `R_g` and `H_g`. The interior field lives on
/// [`Support::Interior`], the boundary field on [`Support::Boundary`].
#[derive(Clone, Debug)]
pub struct BackgroundGeometry {
    n: usize,
    interior: ScalarField,
    boundary: ScalarField,
    euler_characteristic: Option<i64>,
}

impl BackgroundGeometry {
    pub fn new(mesh: &Mesh, n: usize, interior: ScalarField, boundary: ScalarField) -> Result<Self> {
        if n < 2 || n > 3 {
            return Err(Error::Dimension(format!("dimension {n} is not supported (2 or 3)")));
        }
        if mesh.dim() != n {
            return Err(Error::Dimension(format!("n = {n} background on a {}-dimensional mesh", mesh.dim())));
        }
        if interior.support() != Support::Interior || boundary.support() != Support::Boundary {
            return Err(Error::Field("background fields must live on interior and boundary vertices".into()));
        }
        if interior.len() != mesh.support_vertices(Support::Interior).len()
            || boundary.len() != mesh.support_vertices(Support::Boundary).len()
        {
            return Err(Error::Field("background field does not match the mesh".into()));
        }
        let euler_characteristic = if n == 2 { Some(mesh.euler_characteristic()?) } else { None };
        Ok(Self { n, interior, boundary, euler_characteristic })
    }

    /// Constant densities.
    pub fn constant(mesh: &Mesh, interior: f64, boundary: f64) -> Result<Self> {
        Self::new(
            mesh,
            mesh.dim(),
            ScalarField::constant(mesh, Support::Interior, interior)?,
            ScalarField::constant(mesh, Support::Boundary, boundary)?,
        )
    }

    /// Zero curvature everywhere.
    pub fn flat(mesh: &Mesh) -> Result<Self> {
        Self::constant(mesh, 0.0, 0.0)
    }

    pub fn from_fns(
        mesh: &Mesh,
        interior: impl FnMut(usize, [f64; 3]) -> f64,
        boundary: impl FnMut(usize, [f64; 3]) -> f64,
    ) -> Result<Self> {
        Self::new(
            mesh,
            mesh.dim(),
            ScalarField::from_fn(mesh, Support::Interior, interior)?,
            ScalarField::from_fn(mesh, Support::Boundary, boundary)?,
        )
    }

    /// The metric carried by the mesh edge lengths itself (n = 2): angle
    /// defects divided by lumped area or D0 boundary length.
    pub fn intrinsic(mesh: &Mesh) -> Result<Self> {
        if mesh.dim() != 2 {
            return Err(Error::Dimension("intrinsic curvatures need a triangle mesh".into()));
        }
        let defects = mesh.angle_defects()?;
        let area = mesh.vertex_measures();
        let length = mesh.boundary_measures(BoundaryTag::D0);
        Self::from_fns(mesh, |i, _| defects[i] / area[i], |i, _| defects[i] / length[i])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn interior(&self) -> &ScalarField {
        &self.interior
    }

    pub fn boundary(&self) -> &ScalarField {
        &self.boundary
    }

    pub fn euler_characteristic(&self) -> Option<i64> {
        self.euler_characteristic
    }

    /// `max(‖interior‖∞, ‖boundary‖∞)`.
    pub fn sup_norm(&self) -> f64 {
        self.interior.max_abs().max(self.boundary.max_abs())
    }

    /// Both fields merged into one full-length nodal vector.
    pub fn dense(&self, num_vertices: usize) -> Vec<f64> {
        let mut out = self.interior.to_dense(num_vertices);
        for (i, v) in self.boundary.iter() {
            out[i] = v;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generators;

    #[test]
    fn intrinsic_disk_is_flat_with_unit_boundary_curvature() {
        let m = generators::disk(8);
        let bg = BackgroundGeometry::intrinsic(&m).unwrap();
        assert!(bg.interior().max_abs() < 1e-10);
        assert!((bg.boundary().min() - 1.0).abs() < 1e-2);
        assert_eq!(bg.euler_characteristic(), Some(1));
    }

    #[test]
    fn dimension_mismatch() {
        let m = generators::cube(2);
        assert!(BackgroundGeometry::new(
            &m,
            2,
            ScalarField::constant(&m, Support::Interior, 0.0).unwrap(),
            ScalarField::constant(&m, Support::Boundary, 0.0).unwrap()
        )
        .is_err());
    }
}
