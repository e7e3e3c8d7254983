//! Karcher means of the same kind of anchor set in each space, with their
//! certificates.

use hadamard_ergodic::frechet::{karcher_mean, FrechetProblem};
use hadamard_ergodic::{GeodesicSpace, SpaceHandle};

fn show(space: SpaceHandle, anchors: &[[f64; 2]]) -> hadamard_ergodic::Result<()> {
    let pts = anchors
        .iter()
        .map(|a| space.point(a.to_vec()))
        .collect::<hadamard_ergodic::Result<Vec<_>>>()?;
    let problem = FrechetProblem::uniform(space, pts)?;
    let (mean, cert) = karcher_mean(&problem, 1e-12)?;
    println!(
        "{space:<14} mean {mean}  F = {:.6}  gap {:+.2e}  slack {:+.2e}",
        cert.functional_value, cert.worst_gap, cert.worst_slack
    );
    Ok(())
}

fn main() -> hadamard_ergodic::Result<()> {
    // In the river plane the three anchors meet at the origin on the axis.
    show(SpaceHandle::river(), &[[-2.0, 1.0], [2.0, 1.0], [0.0, 2.0]])?;
    show(
        SpaceHandle::euclidean(2),
        &[[-2.0, 1.0], [2.0, 1.0], [0.0, 2.0]],
    )?;
    show(
        SpaceHandle::disk(0.05)?,
        &[[-0.6, 0.3], [0.6, 0.3], [0.0, 0.6]],
    )?;

    let weighted = FrechetProblem::parse_points(SpaceHandle::euclidean(2), "0, 0 ; 1\n4, 0 ; 3\n")?;
    let (mean, _) = karcher_mean(&weighted, 1e-12)?;
    println!("weighted       mean {mean}");
    Ok(())
}
