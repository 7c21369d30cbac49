use std::collections::HashMap;

use super::TriMesh4;
use crate::error::{Error, Result};
use crate::grassmann::Plane;

pub const MIN_RESOLUTION: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Shadow {
    /// Covered cells × cell area.
    pub area: f64,
    /// `2 L / resolution`, `L` the projected length of the silhouette edges.
    pub tolerance: f64,
    pub cells: u64,
}

/// Area of the image of the mesh under orthogonal projection to `plane`,
/// points covered several times counted once.
///
/// Projected triangles are rasterized on the lattice of spacing
/// `1/resolution` in the plane's coordinates; a cell is covered when its
/// center lies in some closed triangle.
pub fn shadow_area(mesh: &TriMesh4, plane: &Plane, resolution: usize) -> Result<Shadow> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::param(format!(
            "shadow resolution {resolution} below {MIN_RESOLUTION}"
        )));
    }
    if mesh.faces().is_empty() {
        return Ok(Shadow {
            area: 0.0,
            tolerance: 0.0,
            cells: 0,
        });
    }
    let res = resolution as f64;
    let pts: Vec<[f64; 2]> = mesh
        .vertices()
        .iter()
        .map(|v| {
            let c = plane.coords(v);
            [c[0] * res, c[1] * res]
        })
        .collect();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for f in mesh.faces() {
        for &i in f {
            for k in 0..2 {
                lo[k] = lo[k].min(pts[i][k]);
                hi[k] = hi[k].max(pts[i][k]);
            }
        }
    }
    // cell (a, b) covers [a, a+1) × [b, b+1) in scaled units
    let x0 = lo[0].floor() as i64;
    let y0 = lo[1].floor() as i64;
    let width = (hi[0].floor() as i64 - x0 + 1) as usize;
    let height = (hi[1].floor() as i64 - y0 + 1) as usize;
    let mut bits = vec![0u64; (width * height).div_ceil(64)];

    let signed: Vec<f64> = mesh
        .faces()
        .iter()
        .map(|&[a, b, c]| orient(&pts[a], &pts[b], &pts[c]))
        .collect();
    for (f, &s) in mesh.faces().iter().zip(&signed) {
        if s == 0.0 {
            continue;
        }
        let [a, b, c] = if s > 0.0 { *f } else { [f[0], f[2], f[1]] };
        let (pa, pb, pc) = (pts[a], pts[b], pts[c]);
        let eps = 1e-12 * s.abs();
        let ix0 = (pa[0].min(pb[0]).min(pc[0]) - 0.5).ceil() as i64;
        let ix1 = (pa[0].max(pb[0]).max(pc[0]) - 0.5).floor() as i64;
        let iy0 = (pa[1].min(pb[1]).min(pc[1]) - 0.5).ceil() as i64;
        let iy1 = (pa[1].max(pb[1]).max(pc[1]) - 0.5).floor() as i64;
        for iy in iy0..=iy1 {
            let cy = iy as f64 + 0.5;
            for ix in ix0..=ix1 {
                let p = [ix as f64 + 0.5, cy];
                if orient(&pa, &pb, &p) >= -eps
                    && orient(&pb, &pc, &p) >= -eps
                    && orient(&pc, &pa, &p) >= -eps
                {
                    let k = (iy - y0) as usize * width + (ix - x0) as usize;
                    bits[k / 64] |= 1u64 << (k % 64);
                }
            }
        }
    }
    let cells: u64 = bits.iter().map(|w| w.count_ones() as u64).sum();
    let silhouette = silhouette_length(mesh, &pts, &signed) / res;
    Ok(Shadow {
        area: cells as f64 / (res * res),
        tolerance: 2.0 * silhouette / res,
        cells,
    })
}

fn orient(a: &[f64; 2], b: &[f64; 2], p: &[f64; 2]) -> f64 {
    (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
}

/// Projected length of edges that can bound the shadow: mesh boundary edges,
/// non-manifold edges and folds (adjacent faces projecting with opposite or
/// zero orientation).
fn silhouette_length(mesh: &TriMesh4, pts: &[[f64; 2]], signed: &[f64]) -> f64 {
    let mut sides: HashMap<[usize; 2], Vec<f64>> = HashMap::new();
    for (f, &s) in mesh.faces().iter().zip(signed) {
        for k in 0..3 {
            let (i, j) = (f[k], f[(k + 1) % 3]);
            // orientation seen from the edge stored as (min, max)
            let sign = if i < j { s } else { -s };
            sides.entry([i.min(j), i.max(j)]).or_default().push(sign);
        }
    }
    let mut edges: Vec<([usize; 2], bool)> = sides
        .into_iter()
        .map(|(e, s)| {
            let interior_smooth = s.len() == 2 && s[0] * s[1] < 0.0;
            (e, !interior_smooth)
        })
        .collect();
    edges.sort_unstable_by_key(|e| e.0);
    edges
        .iter()
        .filter(|e| e.1)
        .map(|([i, j], _)| (pts[*i][0] - pts[*j][0]).hypot(pts[*i][1] - pts[*j][1]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior_algebra::Vector4;
    use crate::grassmann::PlanePair;
    use crate::surfaces::{disk_mesh, projected_area_with_multiplicity};

    #[test]
    fn single_triangle() {
        let v = vec![
            Vector4::ZERO,
            Vector4::new(0.7, 0.1, 0.3, 0.0),
            Vector4::new(0.2, 0.8, -0.4, 0.5),
        ];
        let mesh = TriMesh4::new(v, vec![[0, 1, 2]], vec![false; 3]).unwrap();
        let plane = crate::grassmann::Plane::coordinate(0, 1);
        let exact = projected_area_with_multiplicity(&mesh, &plane);
        for res in [64, 256, 1024] {
            let s = shadow_area(&mesh, &plane, res).unwrap();
            assert!((s.area - exact).abs() <= s.tolerance, "{res}: {s:?} vs {exact}");
        }
    }

    #[test]
    fn duplicate_disks_count_once() {
        let plane = crate::grassmann::Plane::coordinate(0, 1);
        let disk = disk_mesh(&plane, Vector4::ZERO, 1.0, 128, 16).unwrap();
        let one = shadow_area(&disk, &plane, 256).unwrap();
        let two = shadow_area(&disk.union(&disk), &plane, 256).unwrap();
        assert_eq!(one.cells, two.cells);
        assert!((one.area - std::f64::consts::PI).abs() < one.tolerance + 1e-3);
    }

    #[test]
    fn orthogonal_disk_has_no_shadow() {
        let pair = PlanePair::orthogonal();
        let disk = disk_mesh(&pair.second, Vector4::ZERO, 1.0, 64, 8).unwrap();
        let s = shadow_area(&disk, &pair.first, 256).unwrap();
        assert_eq!(s.cells, 0);
    }

    #[test]
    fn rejects_low_resolution() {
        let plane = crate::grassmann::Plane::coordinate(0, 1);
        let disk = disk_mesh(&plane, Vector4::ZERO, 1.0, 64, 8).unwrap();
        assert!(shadow_area(&disk, &plane, 32).is_err());
    }
}
