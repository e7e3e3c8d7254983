//! Halving maps in the river plane: the orbit, its projections onto the
//! fixed set and the shift gaps of the means.

use hadamard_ergodic::ergodic::{
    default_schedule, generate_orbit, mean_sequence, projection_trace, verdict,
};
use hadamard_ergodic::nonexpansive::{MappingSpec, PiecewiseLinear};
use hadamard_ergodic::{GeodesicSpace, SpaceHandle};

fn main() -> hadamard_ergodic::Result<()> {
    let half = PiecewiseLinear::new(vec![(-5.0, -2.5), (5.0, 2.5)])?;
    let map = MappingSpec::river_product(half.clone(), half)?;
    println!("map {map}, fixed set {:?}", map.fixed_set());

    let space = SpaceHandle::river();
    let orbit = generate_orbit(&map, &space.point(vec![2.0, 2.0])?, 4096)?;
    for x in orbit.points.iter().take(5) {
        println!("  {x}");
    }

    let k_list = [1, 8];
    let schedule = default_schedule(orbit.horizon(), &k_list);
    let (means, diag) = mean_sequence(&orbit, &schedule, &k_list, 1e-10)?;
    for (e, r) in means.entries.iter().zip(&diag.records) {
        println!(
            "n = {:>4}  sigma {}  residual {:.2e}  gaps {:?}",
            e.n,
            e.mean,
            r.residual,
            r.shift_gaps
                .iter()
                .map(|g| format!("{g:.1e}"))
                .collect::<Vec<_>>()
        );
    }

    let proj = projection_trace(&orbit)?;
    println!(
        "projection distances nonincreasing: {}",
        proj.monotone.passed()
    );
    let v = verdict(&means, &diag, Some(&proj), 1e-2)?;
    println!("{} to {}", v.status.as_str(), v.limit_candidate);
    Ok(())
}
