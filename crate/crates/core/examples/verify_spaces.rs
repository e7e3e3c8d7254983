//! Runs the geometry samplers on every shipped space and on the circle,
//! which is positively curved and should be caught.

use hadamard_ergodic::metric::{geometry_suite, tol};
use hadamard_ergodic::spaces::CircleArc;
use hadamard_ergodic::SpaceHandle;

fn main() -> hadamard_ergodic::Result<()> {
    let spaces = [
        SpaceHandle::euclidean(3),
        SpaceHandle::river(),
        SpaceHandle::disk(0.05)?,
    ];
    for space in &spaces {
        println!("{space}");
        for r in geometry_suite(space, 7, 10_000, tol::CONTRACT)? {
            println!("  {r}");
        }
    }

    println!("circle (negative control)");
    for r in geometry_suite(&CircleArc, 7, 10_000, tol::CONTRACT)? {
        println!("  {r}");
        if let Some(w) = r.witness {
            let pts: Vec<String> = w.points.iter().map(ToString::to_string).collect();
            println!("    e.g. {} at {:?}", pts.join(" "), w.params);
        }
    }
    Ok(())
}
