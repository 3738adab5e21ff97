//! Piecewise-linear slab volumes of a trapezoidal cross-section against the
//! closed-form volume as the slab count grows.

use vertalign::geometry::{build_slabs, trapezoid_volume, SideSlopes, TrapezoidGeometry};

fn main() -> vertalign::Result<()> {
    let geom = TrapezoidGeometry {
        width: 8.0,
        length: 20.0,
        cut: SideSlopes {
            alpha: 0.6,
            beta: 0.9,
        },
        fill: SideSlopes {
            alpha: 0.5,
            beta: 0.5,
        },
    };
    let depth = 3.0;
    for u in [-2.2, 1.7] {
        let exact = trapezoid_volume(&geom, u)?;
        println!("offset {u}: exact volume {exact:.6}");
        for k in [1, 2, 5, 10, 20, 50, 100, 1000] {
            let slabs = build_slabs(&geom, geom.length, (depth, depth), (k, k))?;
            let v = slabs.volume(u);
            println!("  {k:>5} slabs  {v:>14.6}  relative error {:.3e}", (v - exact).abs() / exact);
        }
    }
    Ok(())
}
