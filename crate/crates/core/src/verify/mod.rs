//! Randomized self-checks. Each check draws its own inputs from a seeded
//! stream and compares two independent computations of the same quantity.

mod checks;
mod sample;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::flags::GenOptions;

pub use checks::*;
pub use sample::{
    nonnegative, points_near, scalar, separating_pairs, tnn_matrix, tuple, valuation_matrix, Fault,
};

/// Groups of checks selectable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Field,
    Symmetry,
    Snakes,
    Tnn,
    Intersection,
    Main,
    Shearing,
    Monotonicity,
}

impl Suite {
    pub fn all() -> [Suite; 8] {
        use Suite::*;
        [Field, Symmetry, Snakes, Tnn, Intersection, Main, Shearing, Monotonicity]
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Field => "field",
            Suite::Symmetry => "symmetry",
            Suite::Snakes => "snakes",
            Suite::Tnn => "tnn",
            Suite::Intersection => "intersection",
            Suite::Main => "main",
            Suite::Shearing => "shearing",
            Suite::Monotonicity => "monotonicity",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Suite::all()
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub trials: usize,
    pub seed: u64,
    pub gen: GenOptions,
    pub fault: Option<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            trials: 100,
            seed: 0,
            gen: GenOptions::default(),
            fault: None,
        }
    }
}

/// State handed to a single trial.
pub struct Trial<'a> {
    rng: ChaCha8Rng,
    opts: &'a VerifyOptions,
}

impl<'a> Trial<'a> {
    /// The trial's generator is stream `stream` of the seed, so trials are
    /// independent of each other and of thread scheduling.
    pub fn new(opts: &'a VerifyOptions, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(stream);
        Trial { rng, opts }
    }
}

pub type CheckFn = fn(&mut Trial) -> TrialResult;

#[derive(Clone, Copy)]
pub struct Check {
    pub suite: Suite,
    pub name: &'static str,
    pub run: CheckFn,
    /// Deterministic checks run once regardless of the trial count.
    pub fixed: bool,
}

macro_rules! check {
    ($suite:ident, $f:ident) => {
        Check { suite: Suite::$suite, name: stringify!($f), run: checks::$f, fixed: false }
    };
    ($suite:ident, $f:ident, fixed) => {
        Check { suite: Suite::$suite, name: stringify!($f), run: checks::$f, fixed: true }
    };
}

/// Every check, in a fixed order.
pub fn all_checks() -> Vec<Check> {
    vec![
        check!(Field, valuation_axioms),
        check!(Field, positive_valuation),
        check!(Field, well_behaved),
        check!(Symmetry, triple_symmetry),
        check!(Symmetry, double_symmetry),
        check!(Symmetry, projective_invariance),
        check!(Snakes, snake_frames),
        check!(Snakes, snake_lines),
        check!(Snakes, round_trip),
        check!(Snakes, flip_positivity),
        check!(Shearing, shearing_tnn),
        check!(Tnn, tnn_shortcut),
        check!(Tnn, non_tnn_example, fixed),
        check!(Intersection, assignment),
        check!(Intersection, pointwise_oracle),
        check!(Intersection, intersection_symmetry),
        check!(Intersection, snake_apartments_meet),
        check!(Main, main_cones),
        check!(Main, triple_point),
        check!(Shearing, shearing),
        check!(Monotonicity, monotonicity),
    ]
}

pub fn find_check(name: &str) -> Option<Check> {
    all_checks().into_iter().find(|c| c.name == name)
}

const MAX_REPORTED: usize = 5;

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub trial: usize,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub suite: Suite,
    pub check: &'static str,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub comparisons: u64,
    pub failures: Vec<Failure>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}/{}: {}/{} trials passed, {} comparisons",
            if self.ok() { "PASS" } else { "FAIL" },
            self.suite,
            self.check,
            self.passed,
            self.trials,
            self.comparisons
        )?;
        for fail in &self.failures {
            write!(f, "\n    trial {}: {}", fail.trial, fail.message)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<CheckReport>,
    pub passed: bool,
}

/// Streams are spaced so every check has room for 2^32 trials.
fn stream(check_index: usize, trial: usize) -> u64 {
    ((check_index as u64) << 32) | trial as u64
}

fn check_index(check: &Check) -> usize {
    all_checks()
        .iter()
        .position(|c| c.name == check.name)
        .expect("registered check")
}

/// Runs `trials` independent trials of one check in parallel.
pub fn run_check(check: &Check, trials: usize, opts: &VerifyOptions) -> CheckReport {
    let trials = if check.fixed { 1 } else { trials };
    let index = check_index(check);
    let results: Vec<TrialResult> = (0..trials)
        .into_par_iter()
        .map(|k| (check.run)(&mut Trial::new(opts, stream(index, k))))
        .collect();
    let mut report = CheckReport {
        suite: check.suite,
        check: check.name,
        trials,
        passed: 0,
        failed: 0,
        comparisons: 0,
        failures: Vec::new(),
    };
    for (trial, r) in results.into_iter().enumerate() {
        match r {
            Ok(n) => {
                report.passed += 1;
                report.comparisons += n;
            }
            Err(message) => {
                report.failed += 1;
                if report.failures.len() < MAX_REPORTED {
                    report.failures.push(Failure { trial, message });
                }
            }
        }
    }
    report
}

/// Runs every check of the selected suites with `opts.trials` trials each.
pub fn run_suites(suites: &[Suite], opts: &VerifyOptions) -> VerifyReport {
    let checks: Vec<CheckReport> = all_checks()
        .iter()
        .filter(|c| suites.contains(&c.suite))
        .map(|c| run_check(c, opts.trials, opts))
        .collect();
    let passed = checks.iter().all(CheckReport::ok);
    VerifyReport {
        seed: opts.seed,
        checks,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(trials: usize, fault: Option<Fault>) -> VerifyOptions {
        VerifyOptions {
            trials,
            seed: 3,
            fault,
            ..VerifyOptions::default()
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::all() {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn every_suite_has_checks() {
        for s in Suite::all() {
            assert!(all_checks().iter().any(|c| c.suite == s), "{s}");
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let check = find_check("round_trip").unwrap();
        let a = run_check(&check, 4, &opts(4, None));
        let b = run_check(&check, 4, &opts(4, None));
        assert!(a.ok());
        assert_eq!(a.comparisons, b.comparisons);
    }

    #[test]
    fn negated_double_ratio_is_caught() {
        let check = find_check("round_trip").unwrap();
        let report = run_check(&check, 6, &opts(6, Some(Fault::NegateDoubleRatio)));
        // Tuples with t = 3 have no diagonal to corrupt.
        assert!(report.failed > 0);
        assert!(report.failures[0].message.contains("not positive"));
    }
}
