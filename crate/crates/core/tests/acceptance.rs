//! Acceptance checks over a full default sweep. Prints one PASS/FAIL line
//! per criterion; criteria listed in `KNOWN_UNMET` are reported but only
//! fail the run under `--strict`.

mod common;

use std::collections::HashMap;
use std::path::Path;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use avtest_core::behaviours::BehaviourKind;
use avtest_core::gridworld::{compute_valid_spawn_mask, Heading};
use avtest_core::harness::{combined_score, BatchSummary, Experiment, ExperimentConfig, Spawn, DEFAULT_RUNS};
use avtest_core::reporting::cli::{cli_main, EXIT_OK};
use avtest_core::verdict::Outcome;
use avtest_core::{GridConfig, Position};

use BehaviourKind::{ConstrainedRandom, Election, Proximity, Random};

const RATIO_MIN: f64 = 1.8;
const ORDER_GAP_PP: f64 = 3.0;
const CONVERGENCE_PP: f64 = 15.0;
const TG_LEAD_TICKS: f64 = 1.0;
const MAX_SCORE: i64 = 94;
const IDENTITY_TOL: f64 = 1e-9;
const RATIO_BUDGET: Duration = Duration::from_secs(30);
const SWEEP_BUDGET: Duration = Duration::from_secs(600);

const DIRECTED: [BehaviourKind; 2] = [Proximity, Election];
const RANDOMS: [BehaviourKind; 2] = [Random, ConstrainedRandom];

/// Criteria this implementation does not meet; the analysis lives with the
/// project notes.
const KNOWN_UNMET: [u32; 2] = [3, 12];

struct Sweep {
    summaries: HashMap<(BehaviourKind, usize), BatchSummary>,
    max_agent_score: i64,
    spawns_shared: bool,
    elapsed: Duration,
}

impl Sweep {
    fn get(&self, kind: BehaviourKind, n: usize) -> &BatchSummary {
        &self.summaries[&(kind, n)]
    }

    fn acc_pp(&self, kind: BehaviourKind, n: usize) -> f64 {
        self.get(kind, n).accuracy_percent()
    }
}

fn sweep() -> &'static Sweep {
    static SWEEP: OnceLock<Sweep> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let started = Instant::now();
        let mut summaries = HashMap::new();
        let mut max_agent_score = i64::MIN;
        let mut spawns_shared = true;
        let mut reference: HashMap<(usize, u64), Vec<Spawn>> = HashMap::new();
        for kind in BehaviourKind::ALL {
            for n in 1..=20 {
                let exp = Experiment::new(ExperimentConfig::new(kind, n)).unwrap();
                let results = exp.run_all();
                for r in &results {
                    max_agent_score = max_agent_score.max(*r.ledger.totals.iter().max().unwrap());
                    match reference.get(&(n, r.run_index)) {
                        Some(s) => spawns_shared &= *s == r.spawns,
                        None => {
                            reference.insert((n, r.run_index), r.spawns.clone());
                        }
                    }
                }
                summaries.insert((kind, n), BatchSummary::from_results(exp.config(), &results));
            }
        }
        Sweep { summaries, max_agent_score, spawns_shared, elapsed: started.elapsed() }
    })
}

struct Verdict {
    id: u32,
    pass: bool,
    detail: String,
}

fn criterion_1() -> Verdict {
    let started = Instant::now();
    let acc = |k| Experiment::new(ExperimentConfig::new(k, 1)).unwrap().run_batch().accuracy_percent();
    let (r, p, e) = (acc(Random), acc(Proximity), acc(Election));
    let elapsed = started.elapsed();
    Verdict {
        id: 1,
        pass: p >= RATIO_MIN * r && e >= RATIO_MIN * r && elapsed < RATIO_BUDGET,
        detail: format!(
            "nA=1 accuracy proximity {p:.1}%, election {e:.1}%, random {r:.1}% (ratios {:.2}, {:.2}; need >= {RATIO_MIN}) in {elapsed:.2?}",
            p / r,
            e / r
        ),
    }
}

fn criterion_2(s: &Sweep) -> Verdict {
    let order = [Proximity, Election, ConstrainedRandom, Random];
    let acc: Vec<f64> = order.iter().map(|&k| s.acc_pp(k, 3)).collect();
    let gaps: Vec<f64> = acc.windows(2).map(|w| w[0] - w[1]).collect();
    Verdict {
        id: 2,
        pass: gaps.iter().all(|&g| g >= ORDER_GAP_PP),
        detail: format!(
            "nA=3 accuracy P {:.1} > E {:.1} > CR {:.1} > R {:.1}, gaps {:.1}/{:.1}/{:.1} pp (need >= {ORDER_GAP_PP})",
            acc[0], acc[1], acc[2], acc[3], gaps[0], gaps[1], gaps[2]
        ),
    }
}

fn criterion_3(s: &Sweep) -> Verdict {
    let acc: Vec<f64> = BehaviourKind::ALL.iter().map(|&k| s.acc_pp(k, 20)).collect();
    let spread = acc.iter().cloned().fold(f64::MIN, f64::max) - acc.iter().cloned().fold(f64::MAX, f64::min);
    Verdict {
        id: 3,
        pass: spread <= CONVERGENCE_PP,
        detail: format!(
            "nA=20 accuracy R {:.1}, CR {:.1}, P {:.1}, E {:.1}; spread {spread:.1} pp (need <= {CONVERGENCE_PP})",
            acc[0], acc[1], acc[2], acc[3]
        ),
    }
}

fn criterion_4(s: &Sweep) -> Verdict {
    let tg = |k, n| s.get(k, n).mean_t_g.unwrap_or(f64::INFINITY);
    let mut pass = true;
    let mut worst = f64::INFINITY;
    for n in [1, 3, 20] {
        for d in DIRECTED {
            for r in RANDOMS {
                worst = worst.min(tg(r, n) - tg(d, n));
                pass &= tg(d, n) < tg(r, n);
            }
        }
    }
    let best_directed = DIRECTED.iter().map(|&k| tg(k, 20)).fold(f64::INFINITY, f64::min);
    let best_random = RANDOMS.iter().map(|&k| tg(k, 20)).fold(f64::INFINITY, f64::min);
    let lead = best_random - best_directed;
    Verdict {
        id: 4,
        pass: pass && lead >= TG_LEAD_TICKS,
        detail: format!(
            "directed t_g below random at nA 1/3/20 (smallest margin {worst:.2} ticks); nA=20 lead {lead:.2} ticks (need >= {TG_LEAD_TICKS})"
        ),
    }
}

fn criterion_5(s: &Sweep) -> Verdict {
    let score = |k, n| s.get(k, n).mean_score.unwrap_or(f64::NEG_INFINITY);
    let mut margin = f64::INFINITY;
    for n in 5..=20 {
        for d in DIRECTED {
            for r in RANDOMS {
                margin = margin.min(score(d, n) - score(r, n));
            }
        }
    }
    let var = |n| s.get(Random, n).score_variance.unwrap_or(0.0);
    Verdict {
        id: 5,
        pass: margin > 0.0 && var(20) > var(1),
        detail: format!(
            "smallest directed-minus-random mean score over nA 5..20 {margin:.2}; random score variance nA=1 {:.1}, nA=20 {:.1}",
            var(1),
            var(20)
        ),
    }
}

fn criterion_6(s: &Sweep) -> Verdict {
    let exp = Experiment::new(ExperimentConfig::new(Proximity, 1)).unwrap();
    let adjacent = Spawn { position: Position::new(2, 20), heading: Heading::North };
    let r = exp.run_test_with_spawns(0, vec![adjacent]);
    let constructed = r.ledger.totals[0];
    Verdict {
        id: 6,
        pass: s.max_agent_score <= MAX_SCORE && constructed == MAX_SCORE && r.outcome == Outcome::Successful,
        detail: format!("highest agent score in sweep {}; adjacent-spawn test scores {constructed}", s.max_agent_score),
    }
}

fn criterion_7(s: &Sweep) -> Verdict {
    let worst = s
        .summaries
        .values()
        .map(|b| (b.combined_score * 1000.0 - b.mean_score.unwrap_or(0.0) * b.accuracy_percent()).abs())
        .fold(0.0, f64::max);
    let spot = combined_score(Some(20.5), 0.717);
    Verdict {
        id: 7,
        pass: worst <= IDENTITY_TOL && format!("{spot:.3}") == "1.470",
        detail: format!("largest identity residual {worst:.1e} over {} rows; 20.5 at 71.7% gives {spot:.3}", s.summaries.len()),
    }
}

fn criterion_8(s: &Sweep) -> Verdict {
    let bad = s.summaries.values().filter(|b| b.successful + b.unavoidable + b.expired != b.runs).count();
    let runs_ok = s.summaries.values().all(|b| b.runs == DEFAULT_RUNS);
    Verdict {
        id: 8,
        pass: bad == 0 && runs_ok,
        detail: format!("{bad} of {} batches break successful + unavoidable + expired = runs", s.summaries.len()),
    }
}

/// Summary file with the CPU-time column blanked out.
fn summary_without_cpu(path: &Path) -> String {
    let text = std::fs::read_to_string(path).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let cpu = header.iter().position(|&h| h == "mean_t_c_seconds").unwrap();
    text.lines()
        .map(|line| {
            let mut cells: Vec<&str> = line.split(',').collect();
            cells[cpu] = "";
            cells.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn sweep_files(dir: &Path) -> Vec<(String, String)> {
    let mut files = Vec::new();
    for name in ["summary.csv", "accuracy.csv", "score.csv", "combined.csv", "tg.csv", "metadata.json"] {
        let path = dir.join(name);
        let text = if name == "summary.csv" { summary_without_cpu(&path) } else { std::fs::read_to_string(&path).unwrap() };
        files.push((name.to_string(), text));
    }
    let mut traces: Vec<_> = std::fs::read_dir(dir.join("traces")).unwrap().map(|e| e.unwrap().path()).collect();
    traces.sort();
    for path in traces {
        files.push((path.file_name().unwrap().to_string_lossy().into(), std::fs::read_to_string(&path).unwrap()));
    }
    files
}

fn criterion_9(s: &Sweep) -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let dir = tmp.path().join(name);
        let args = ["avtest", "sweep", "--runs", "100", "--trace", "--out-dir", dir.to_str().unwrap()];
        let code = cli_main(args, &mut std::io::sink(), &mut std::io::sink());
        assert_eq!(code, EXIT_OK);
        outputs.push(sweep_files(&dir));
    }
    let identical = outputs[0] == outputs[1];
    Verdict {
        id: 9,
        pass: identical && s.spawns_shared,
        detail: format!(
            "{} output files byte-identical across repeated sweeps: {identical}; spawns shared across behaviours: {}",
            outputs[0].len(),
            s.spawns_shared
        ),
    }
}

fn criterion_10() -> Verdict {
    let mask = compute_valid_spawn_mask(&GridConfig::default());
    let mut mismatches = 0;
    let mut checked = 0;
    for column in common::PAVEMENT_COLUMNS {
        for row in 0..common::LENGTH {
            checked += 1;
            if mask.is_valid(Position::new(column, row)) != common::reachable((column, row)) {
                mismatches += 1;
            }
        }
    }
    Verdict {
        id: 10,
        pass: mismatches == 0 && checked == 264,
        detail: format!("{mismatches} mismatches against brute-force search on {checked} pavement cells ({} valid)", mask.count()),
    }
}

fn criterion_11(s: &Sweep) -> Verdict {
    Verdict {
        id: 11,
        pass: s.elapsed < SWEEP_BUDGET,
        detail: format!("4 behaviours x nA 1..20 x {DEFAULT_RUNS} runs in {:.2?} (budget {SWEEP_BUDGET:?})", s.elapsed),
    }
}

fn criterion_12(s: &Sweep) -> Verdict {
    let tc = |k, n| s.get(k, n).mean_t_c.unwrap_or(0.0);
    let holds: Vec<usize> = (1..=20)
        .filter(|&n| DIRECTED.iter().all(|&d| RANDOMS.iter().all(|&r| tc(d, n) > tc(r, n))))
        .collect();
    Verdict {
        id: 12,
        pass: holds.len() == 20,
        detail: format!(
            "directed t_c above random at {} of 20 agent counts; nA=3 t_c P {:.2e} E {:.2e} CR {:.2e} R {:.2e} s",
            holds.len(),
            tc(Proximity, 3),
            tc(Election, 3),
            tc(ConstrainedRandom, 3),
            tc(Random, 3)
        ),
    }
}

fn all_verdicts() -> Vec<Verdict> {
    let s = sweep();
    vec![
        criterion_1(),
        criterion_2(s),
        criterion_3(s),
        criterion_4(s),
        criterion_5(s),
        criterion_6(s),
        criterion_7(s),
        criterion_8(s),
        criterion_9(s),
        criterion_10(),
        criterion_11(s),
        criterion_12(s),
    ]
}

/// With `--strict`, criteria in `KNOWN_UNMET` fail the run as well.
fn main() {
    let strict = std::env::args().any(|a| a == "--strict");
    let verdicts = all_verdicts();
    for v in &verdicts {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        let note = if !v.pass && KNOWN_UNMET.contains(&v.id) { " (known unmet)" } else { "" };
        println!("criterion {:>2}: {tag}{note} {}", v.id, v.detail);
    }
    let failing: Vec<u32> = verdicts
        .iter()
        .filter(|v| !v.pass && (strict || !KNOWN_UNMET.contains(&v.id)))
        .map(|v| v.id)
        .collect();
    let passed = verdicts.iter().filter(|v| v.pass).count();
    println!("acceptance: {passed} of {} criteria met", verdicts.len());
    if !failing.is_empty() {
        eprintln!("acceptance: criteria failed: {failing:?}");
        std::process::exit(1);
    }
}
