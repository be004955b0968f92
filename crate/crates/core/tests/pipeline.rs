//! End-to-end runs through the public API: generate, write, read, solve, verify.

use convex_alloc::generator::{gen_inclusion_free, gen_planted, ValueRange};
use convex_alloc::io::{
    assignment_from_names, read_instance, result_record, result_to_json, write_instance,
    ResultRecord,
};
use convex_alloc::oracle::optimum;
use convex_alloc::solver::{default_delta, guarantee, solve, verify};
use convex_alloc::value::{self, ratio};
use convex_alloc::{Error, Mode};

#[test]
fn planted_instances_beyond_the_oracle() {
    // the planted assignment certifies OPT >= t (Max-Min) or OPT <= t (Min-Max)
    for seed in 0..6u64 {
        for mode in [Mode::MaxMin, Mode::MinMax] {
            let t = ratio(3, 2);
            let (inst, _) = gen_planted(seed, 6, 26, mode, &t).unwrap();
            let k = 4;
            let delta = default_delta(k);
            let r = solve(&inst, k, &delta).unwrap();
            let g = guarantee(mode, k, &delta);
            match mode {
                Mode::MaxMin => assert!(r.objective >= &g * &t, "seed {seed}"),
                Mode::MinMax => assert!(r.objective <= &g * &t, "seed {seed}"),
            }
            assert_eq!(verify(&inst, &r.assignment).objective, Some(r.objective));
        }
    }
}

#[test]
fn files_round_trip_through_the_solver() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.json");
    let inst = gen_inclusion_free(11, 4, 9, Mode::MinMax, &ValueRange::unit()).unwrap();
    write_instance(&path, &inst).unwrap();
    let back = read_instance(&path).unwrap();
    assert_eq!(back, inst);

    let r = solve(&back, 8, &ratio(1, 32)).unwrap();
    let text = result_to_json(&back, &r);
    let parsed: ResultRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed, result_record(&back, &r));
    let a = assignment_from_names(&back, &parsed.assignment).unwrap();
    assert_eq!(verify(&back, &a).objective, Some(parsed.objective));
}

#[test]
fn solver_tracks_the_oracle_on_random_instances() {
    for seed in 0..20u64 {
        for mode in [Mode::MaxMin, Mode::MinMax] {
            let inst = gen_inclusion_free(seed, 3, 8, mode, &ValueRange::unit()).unwrap();
            let opt = optimum(&inst).unwrap().value;
            let k = 8;
            let delta = default_delta(k);
            match solve(&inst, k, &delta) {
                Ok(r) => {
                    let g = guarantee(mode, k, &delta);
                    match mode {
                        Mode::MaxMin => assert!(r.objective >= g * &opt && r.objective <= opt),
                        Mode::MinMax => assert!(r.objective <= g * &opt && r.objective >= opt),
                    }
                }
                Err(e) => {
                    assert_eq!(e, Error::NoSolution);
                    assert_eq!(opt, value::zero(), "seed {seed} {mode}");
                }
            }
        }
    }
}
