mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hadamard_ergodic::frechet::{karcher_mean, FrechetProblem};
use hadamard_ergodic::{GeodesicSpace, SpaceHandle};

use common::{oracle, random_anchors};

const PROBLEMS: usize = 50;

fn check_space(space: SpaceHandle, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for case in 0..PROBLEMS {
        let anchors = random_anchors(&space, &mut rng, case);
        let problem = FrechetProblem::uniform(
            space,
            anchors
                .iter()
                .map(|a| space.point(a.clone()).unwrap())
                .collect(),
        )
        .unwrap();
        let (mean, cert) = karcher_mean(&problem, 1e-10).unwrap();
        assert!(cert.passes(), "{space} case {case}: {cert:?}");
        let expected = oracle(&space, &anchors);
        let err = space.dist_coords(mean.coords(), &expected);
        assert!(
            err <= 1e-3,
            "{space} case {case}: solver {mean}, oracle {expected:?}, anchors {anchors:?}"
        );
        worst = worst.max(err);
    }
    println!("{space}: worst distance to the oracle {worst:.2e}");
}

#[test]
fn euclidean_means_match_the_oracle() {
    check_space(SpaceHandle::euclidean(2), 11);
}

#[test]
fn river_means_match_the_oracle() {
    check_space(SpaceHandle::river(), 12);
}

#[test]
fn disk_means_match_the_oracle() {
    check_space(SpaceHandle::disk(0.05).unwrap(), 13);
}
