use serde::Serialize;

use super::SolverConfig;
use crate::background::BackgroundGeometry;
use crate::error::{Error, Result};
use crate::fem::assemble_operators;
use crate::mesh::{Mesh, ScalarField, Support};

#[derive(Clone, Debug, Serialize)]
pub struct TransformReport {
    #[serde(skip)]
    pub w: ScalarField,
    /// Largest admissible `c` on the halving schedule.
    pub c: f64,
    /// `1 − e^{−cα}`; `w` lies in `[lower_bound, 1)`.
    pub lower_bound: f64,
    /// Largest nodal `Δw` (must be ≤ 0).
    pub max_laplacian: f64,
    /// Smallest nodal `∂w/∂η + h w` on D0 (must be > 0).
    pub min_robin: f64,
}

/// `w = 1 − e^{−c(v + α)}` for a positive `v`, with `c` halved from
/// `c0` until `Δw ≤ 0` in the interior and `∂w/∂η + h w > 0` on D0 hold
/// nodally.
pub fn bound_solution_transform(
    mesh: &Mesh,
    v: &ScalarField,
    h: &ScalarField,
    alpha: f64,
    cfg: &SolverConfig,
) -> Result<TransformReport> {
    if v.support() != Support::All || h.support() != Support::Boundary {
        return Err(Error::Field("v must live on all vertices and h on D0".into()));
    }
    if alpha < 0.0 {
        return Err(Error::Precondition("alpha must be non-negative".into()));
    }
    if let Some((i, x)) = v.iter().find(|&(_, x)| x + alpha <= 0.0) {
        return Err(Error::Precondition(format!("v + alpha must be positive, got {x} at vertex {i}")));
    }
    if cfg.c0 <= 0.0 || cfg.c_min <= 0.0 {
        return Err(Error::Precondition("c0 and c_min must be positive".into()));
    }
    let ops = assemble_operators(mesh, &BackgroundGeometry::flat(mesh)?)?;
    let nv = mesh.num_vertices();
    let hd = h.to_dense(nv);
    let d0 = mesh.d0_mask();
    let mut c = cfg.c0;
    let mut last = (f64::NAN, f64::NAN);
    while c >= cfg.c_min {
        let w: Vec<f64> = v.values().iter().map(|x| 1.0 - (-c * (x + alpha)).exp()).collect();
        let sw = ops.stiffness.mul_vec(&w);
        let scale = w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut max_lap = f64::NEG_INFINITY;
        let mut min_robin = f64::INFINITY;
        for i in 0..nv {
            if d0[i] {
                min_robin = min_robin.min(sw[i] / ops.mass_boundary[i] + hd[i] * w[i]);
            } else {
                max_lap = max_lap.max(-sw[i] / ops.vertex_mass[i]);
            }
        }
        last = (max_lap, min_robin);
        if max_lap <= 1e-10 * scale && min_robin > 0.0 {
            return Ok(TransformReport {
                w: ScalarField::new(mesh, Support::All, w)?,
                c,
                lower_bound: 1.0 - (-c * alpha).exp(),
                max_laplacian: max_lap,
                min_robin,
            });
        }
        c *= 0.5;
    }
    Err(Error::Infeasible(format!(
        "no admissible c down to {:.3e} (max Laplacian {:.3e}, min Robin {:.3e})",
        cfg.c_min, last.0, last.1
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generators;

    #[test]
    fn nonpositive_shift_rejected() {
        let m = generators::half_cylinder(16, 3, 1.0);
        let v = ScalarField::constant(&m, Support::All, -1.0).unwrap();
        let h = ScalarField::constant(&m, Support::Boundary, 1.0).unwrap();
        assert!(matches!(
            bound_solution_transform(&m, &v, &h, 0.5, &SolverConfig::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn constant_positive_robin() {
        let m = generators::half_cylinder(16, 3, 1.0);
        let v = ScalarField::constant(&m, Support::All, 1.0).unwrap();
        let h = ScalarField::constant(&m, Support::Boundary, 0.5).unwrap();
        let r = bound_solution_transform(&m, &v, &h, 0.0, &SolverConfig::default()).unwrap();
        assert_eq!(r.c, 4.0);
        assert!(r.w.values().iter().all(|&x| x < 1.0 && x >= r.lower_bound));
    }
}
