//! Means of a rotation orbit decay like 1/n even though the orbit itself
//! never settles.

use hadamard_ergodic::ergodic::{
    default_schedule, generate_orbit, mean_sequence, projection_trace, verdict,
};
use hadamard_ergodic::nonexpansive::MappingSpec;
use hadamard_ergodic::{GeodesicSpace, SpaceHandle};

fn main() -> hadamard_ergodic::Result<()> {
    let space = SpaceHandle::euclidean(2);
    let map = MappingSpec::rotation(space, 1.0)?;
    let orbit = generate_orbit(&map, &space.point(vec![1.0, 0.0])?, 10_000)?;

    let k_list = [1, 8];
    let schedule = default_schedule(orbit.horizon(), &k_list);
    let (means, diag) = mean_sequence(&orbit, &schedule, &k_list, 1e-10)?;
    let bound = 1.0 / (0.5f64).sin();
    println!(
        "{:>6}  {:>12}  {:>12}  {:>12}",
        "n", "|sigma_n|", "bound/n", "residual"
    );
    for (e, r) in means.entries.iter().zip(&diag.records) {
        let norm = e.mean.coords().iter().map(|c| c * c).sum::<f64>().sqrt();
        println!(
            "{:>6}  {norm:>12.3e}  {:>12.3e}  {:>12.3e}",
            e.n,
            bound / e.n as f64,
            r.residual
        );
    }

    let proj = projection_trace(&orbit)?;
    let v = verdict(&means, &diag, Some(&proj), 1e-2)?;
    println!(
        "{} to {} (agreement {:.2e})",
        v.status.as_str(),
        v.limit_candidate,
        v.agreement
    );
    Ok(())
}
