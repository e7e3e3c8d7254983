//! Time averages of the skew rotation flow and of the disk rotation, plus
//! the quadrature order check.

use hadamard_ergodic::semigroup::{
    check_semigroup_axioms, flow, quadrature_drifts, semigroup_diagnostics, semigroup_verdict,
    SemigroupSpec,
};
use hadamard_ergodic::{GeodesicSpace, SpaceHandle};

fn main() -> hadamard_ergodic::Result<()> {
    let space = SpaceHandle::euclidean(2);
    let spec = SemigroupSpec::parse(space, "skew2d", 1e-2)?;
    let start = space.point(vec![1.0, 0.0])?;
    let curve = flow(&spec, &start, 1008.0)?;
    let diag = semigroup_diagnostics(&spec, &curve, &[10.0, 100.0, 1000.0], &[1.0, 8.0], 1.0)?;
    for r in &diag.records {
        println!(
            "T = {:>6}  mean {}  d(mean, 0) = {:.2e}  2/T = {:.2e}",
            r.t,
            r.mean,
            r.limit_dist,
            2.0 / r.t
        );
    }
    println!("{}", semigroup_verdict(&diag, 1e-2).status.as_str());

    for r in check_semigroup_axioms(&spec, 3, 20)?.all() {
        println!("  {r}");
    }
    let (d1, d2) = quadrature_drifts(&spec, &start, 10.0)?;
    println!(
        "drift h -> h/2: {d1:.3e}, h/2 -> h/4: {d2:.3e}, ratio {:.2}",
        d1 / d2
    );

    let disk = SpaceHandle::disk(0.05)?;
    let spec = SemigroupSpec::parse(disk, "disk-rotation:1", 1e-2)?;
    let curve = flow(&spec, &disk.point(vec![0.4, 0.0])?, 108.0)?;
    let diag = semigroup_diagnostics(&spec, &curve, &[10.0, 100.0], &[1.0], 1.0)?;
    for r in &diag.records {
        println!(
            "disk T = {:>4}  mean {}  d(mean, 0) = {:.2e}",
            r.t, r.mean, r.limit_dist
        );
    }
    Ok(())
}
