//! Boundaries of two nested bi-cylinders: relative distance goes to zero as
//! they close in, while the Hausdorff distance of the clipped sets stays
//! infinite because the outer boundary has no point inside the clip.

use std::f64::consts::TAU;

use planes4::exterior_algebra::Vector4;
use planes4::grassmann::PlanePair;
use planes4::multiscale_scanner::{clipped_hausdorff, relative_distance, SetSample};

fn bicylinder_boundary(pair: &PlanePair, rho: f64, h: f64) -> SetSample {
    let mut pts = Vec::new();
    let steps = (TAU * rho / h).ceil() as usize;
    let k = (rho / h).floor() as i64;
    for (a, b) in [(&pair.first, &pair.second), (&pair.second, &pair.first)] {
        for s in 0..steps {
            let t = TAU * s as f64 / steps as f64;
            let rim = a.point([rho * t.cos(), rho * t.sin()]);
            for i in -k..=k {
                for j in -k..=k {
                    let (u, w) = (i as f64 * h, j as f64 * h);
                    if u * u + w * w <= rho * rho {
                        pts.push(rim + b.point([u, w]));
                    }
                }
            }
        }
    }
    SetSample::new(pts, h).unwrap()
}

#[test]
fn relative_distance_vanishes_while_clipped_hausdorff_diverges() {
    let pair = PlanePair::orthogonal();
    let (r, h) = (0.5, 0.05);
    let mut last = f64::INFINITY;
    for delta in [0.2, 0.1, 0.05] {
        let outer = bicylinder_boundary(&pair, r + delta, h);
        let inner = bicylinder_boundary(&pair, r - delta, h);
        let d = relative_distance(&outer, &inner, &pair, &Vector4::ZERO, r).unwrap();
        assert!(d <= (2.0 * delta + 2.0 * h) / r, "delta {delta}: {d}");
        assert!(d < last, "delta {delta}: {d} not below {last}");
        last = d;
        let hd = clipped_hausdorff(&outer, &inner, &pair, &Vector4::ZERO, r).unwrap();
        assert!(hd.is_infinite());
    }
    assert!(last < 0.25);
}
