//! Randomized property suites behind `wittkit verify`.
//!
//! Trial `k` draws from its own ChaCha stream of the given seed, so trials
//! run in parallel and the report is identical on every run.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use wittkit::category::{
    compose_bispans, exponential_diagram, mult_pullback, verify_law, CategoryError, LawDiagram,
    LawOptions, LawReport,
};
use wittkit::io::{parse_poset, poset_to_json, vector_to_json, Workspace};
use wittkit::maps::{inclusion, mult, MultVariant};
use wittkit::poset::from_set;
use wittkit::random;
use wittkit::witt::{dwork_check, ghost, unghost};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Rt,
    Nr,
    Tn,
    Bispan,
    Dwork,
    Roundtrip,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Rt => "rt",
            Suite::Nr => "nr",
            Suite::Tn => "tn",
            Suite::Bispan => "bispan",
            Suite::Dwork => "dwork",
            Suite::Roundtrip => "roundtrip",
        }
    }
}

enum Outcome {
    Pass,
    Skip,
    Fail(Value),
}

#[derive(Debug, Serialize)]
pub struct Expected {
    pub case: String,
    pub outcome: String,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub seed: u64,
    pub size: usize,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub expected: Vec<Expected>,
    pub first_counterexample: Option<Value>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    pub fn text(&self) -> String {
        let mut out = format!(
            "suite {} seed {} size {} trials {}\npassed {} failed {} skipped {}\n",
            self.suite, self.seed, self.size, self.trials, self.passed, self.failed, self.skipped
        );
        for e in &self.expected {
            out.push_str(&format!("expected: {}: {}\n", e.case, e.outcome));
        }
        if let Some(c) = &self.first_counterexample {
            out.push_str(&format!("first counterexample: {c}\n"));
        }
        out
    }
}

fn law(diagram: LawDiagram, trial: u64) -> Outcome {
    let report: LawReport = verify_law(
        &diagram,
        &LawOptions {
            random_vectors: 3,
            range: 5,
            seed: trial,
            witt_symbolic: false,
        },
    );
    if report.holds {
        Outcome::Pass
    } else {
        Outcome::Fail(serde_json::to_value(&report).expect("reports serialize"))
    }
}

fn error(e: impl std::fmt::Display) -> Outcome {
    Outcome::Fail(json!({ "error": e.to_string() }))
}

fn trial(suite: Suite, size: usize, rng: &mut ChaCha8Rng, k: u64) -> Outcome {
    match suite {
        Suite::Rt => {
            let (f, g) = random::rt_pair(rng, size);
            law(LawDiagram::RT { f, g }, k)
        }
        Suite::Nr => {
            let (f, g) = random::nr_pair(rng, size);
            law(LawDiagram::NR { f, g }, k)
        }
        Suite::Tn => {
            let (f, g) = random::tn_pair(rng, size, 6);
            match exponential_diagram(&f, &g) {
                Err(CategoryError::CapExceeded(_)) => Outcome::Skip,
                Err(e) => error(e),
                Ok(x) if !x.orbit_cardinality_holds() => {
                    Outcome::Fail(json!({ "error": "orbit sizes do not sum to the fiber size" }))
                }
                Ok(_) => law(LawDiagram::TN { f, g }, k),
            }
        }
        Suite::Bispan => {
            let max_norm = size.clamp(1, 4) as u64;
            let s = Arc::new(random::join_poset(rng, size, max_norm));
            let b1 = random::bispan_from(rng, &s, max_norm);
            let b2 = random::bispan_from(rng, b1.target(), max_norm);
            let c = match compose_bispans(&b1, &b2) {
                Ok(c) => c,
                Err(CategoryError::CapExceeded(_)) => return Outcome::Skip,
                Err(e) => return error(e),
            };
            for _ in 0..3 {
                let v = random::witt_vector(rng, &s, 4);
                let stepwise = b1.evaluate(&v).and_then(|w| b2.evaluate(&w));
                match (c.evaluate(&v), stepwise) {
                    (Ok(l), Ok(r)) if l == r => {}
                    (Ok(l), Ok(r)) => {
                        return Outcome::Fail(json!({
                            "input": vector_to_json(&v),
                            "composite": vector_to_json(&l),
                            "stepwise": vector_to_json(&r),
                        }))
                    }
                    (Err(e), _) | (_, Err(e)) => return error(e),
                }
            }
            Outcome::Pass
        }
        Suite::Dwork => {
            let p = Arc::new(random::poset(rng, size, 12));
            for _ in 0..20 {
                let g = random::ghost_vector(rng, &p, 20);
                let congruent = match dwork_check(&g) {
                    Ok(r) => r.holds(),
                    Err(e) => return error(e),
                };
                if congruent != unghost(&g).is_ok() {
                    return Outcome::Fail(json!({
                        "poset": poset_to_json(&p),
                        "ghost": g.by_id().iter().map(|(id, x)| json!([id, x.to_string()])).collect::<Vec<_>>(),
                        "congruences": congruent,
                    }));
                }
            }
            Outcome::Pass
        }
        Suite::Roundtrip => {
            let p = Arc::new(random::poset(rng, size, 12));
            if parse_poset(&poset_to_json(&p)).ok().as_ref() != Some(&*p) {
                return Outcome::Fail(json!({ "poset": poset_to_json(&p) }));
            }
            let v = random::witt_vector(rng, &p, 6);
            let back = Workspace::default().vector(&vector_to_json(&v));
            if back.ok().as_ref() != Some(&v) {
                return Outcome::Fail(json!({ "json": vector_to_json(&v) }));
            }
            match unghost(&ghost(&v)) {
                Ok(w) if w == v => Outcome::Pass,
                Ok(w) => Outcome::Fail(json!({
                    "vector": vector_to_json(&v),
                    "unghosted": vector_to_json(&w),
                })),
                Err(e) => error(e),
            }
        }
    }
}

/// Restriction past the doubling norm on `{1, 3}` needs a pullback that
/// cannot exist.
fn expected_cases(suite: Suite) -> Vec<Expected> {
    if suite != Suite::Nr {
        return Vec::new();
    }
    let f = mult(
        &Arc::new(from_set([1, 3]).expect("truncation set")),
        2,
        MultVariant::Into,
    )
    .expect("valid map");
    let g = inclusion(
        Arc::new(from_set([1, 2, 3]).expect("truncation set")),
        f.target().clone(),
    )
    .expect("subset");
    let outcome = match mult_pullback(&f, &g) {
        Err(e @ CategoryError::DoesNotExist { .. }) => e.to_string(),
        Err(e) => format!("unexpected error: {e}"),
        Ok(_) => "unexpectedly exists".into(),
    };
    vec![Expected {
        case: "norm along doubling {1,3} -> {1,2,3,6}, restricted to {1,2,3}".into(),
        outcome,
    }]
}

pub fn run(suite: Suite, seed: u64, size: usize, trials: usize) -> SuiteReport {
    let outcomes: Vec<Outcome> = (0..trials as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            trial(suite, size, &mut rng, k)
        })
        .collect();
    let expected = expected_cases(suite);
    let mut report = SuiteReport {
        suite: suite.name(),
        seed,
        size,
        trials,
        passed: 0,
        failed: expected
            .iter()
            .filter(|e| !e.outcome.contains("does not exist"))
            .count(),
        skipped: 0,
        expected,
        first_counterexample: None,
    };
    for (k, o) in outcomes.into_iter().enumerate() {
        match o {
            Outcome::Pass => report.passed += 1,
            Outcome::Skip => report.skipped += 1,
            Outcome::Fail(detail) => {
                report.failed += 1;
                report
                    .first_counterexample
                    .get_or_insert(json!({ "trial": k, "detail": detail }));
            }
        }
    }
    report
}
