//! Exit criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use prospect_arena::engine::{
    run_experiment, run_experiment_sequential, summarize_experiment, ExperimentConfig, Matchup,
};
use prospect_arena::equilibria::{nash_2x2, pt_eb_candidates};
use prospect_arena::games::{
    decode_history, decode_state_id, encode_history, state_id, EquilibriumPoint,
};
use prospect_arena::grid::{run_grid, GridSpec, MANIFEST_FILE};
use prospect_arena::output::{sha256_hex, step_log_bytes, LogScope};
use prospect_arena::{AgentKind, CptParams, GameId, Prospect, ReferenceKind, ReferenceModel};

const CASES: usize = 10_000;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn cell(game: GameId, matchup: Matchup, kind: ReferenceKind, history_len: usize) -> ExperimentConfig {
    ExperimentConfig {
        game,
        matchup,
        reference: ReferenceModel::new(kind),
        history_len,
        ..Default::default()
    }
}

fn matchup(s: &str) -> Matchup {
    s.parse().unwrap()
}

fn chebyshev(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

/// Runs within `tol` of `target` for each cell; every cell needs `need`.
fn convergence(cells: &[ExperimentConfig], target: (f64, f64), tol: f64, need: usize) -> Verdict {
    let mut worst = usize::MAX;
    let mut notes = Vec::new();
    for c in cells {
        let s = summarize_experiment(c).unwrap();
        let hits = s
            .runs
            .iter()
            .filter(|d| chebyshev(d.summary.policy, target) <= tol)
            .count();
        worst = worst.min(hits);
        if hits < need {
            notes.push(format!(
                "{}/{}/{}/n{} {hits}/{}",
                c.game, c.matchup, c.reference.kind, c.history_len, c.runs
            ));
        }
    }
    let pass = notes.is_empty();
    let detail = if pass {
        format!("{} cells, worst cell {worst}/30 runs within {tol} of {target:?}", cells.len())
    } else {
        format!("short cells: {}", notes.join(", "))
    };
    verdict(pass, detail)
}

fn pd_convergence() -> Verdict {
    let cells: Vec<_> = ["AI-AI", "AH-AH", "AI-AH"]
        .into_iter()
        .flat_map(|m| {
            ReferenceKind::ADAPTIVE
                .into_iter()
                .map(move |k| cell(GameId::PrisonersDilemma, matchup(m), k, 0))
        })
        .collect();
    convergence(&cells, (0.0, 0.0), 0.05, 27)
}

fn mp_baseline() -> Verdict {
    let mut notes = Vec::new();
    let mut pass = true;
    for kind in ReferenceKind::ALL {
        let s = summarize_experiment(&cell(GameId::MatchingPennies, matchup("AH-AH"), kind, 0)).unwrap();
        let bad = s
            .runs
            .iter()
            .filter(|d| chebyshev(d.summary.policy, (0.5, 0.5)) > 0.05)
            .count();
        pass &= bad == 0;
        notes.push(format!(
            "{kind}: mean ({:.3}, {:.3}), {bad} runs outside",
            s.aggregate.mean_policy.0, s.aggregate.mean_policy.1
        ));
    }
    verdict(pass, notes.join("; "))
}

fn stag_hunt_baseline() -> Verdict {
    let ah = summarize_experiment(&cell(GameId::StagHunt, matchup("AH-AH"), ReferenceKind::Ema, 0)).unwrap();
    let ah_bad = ah
        .runs
        .iter()
        .filter(|d| chebyshev(d.summary.policy, (1.0, 1.0)) > 0.05)
        .count();
    let ai = summarize_experiment(&cell(GameId::StagHunt, matchup("AI-AI"), ReferenceKind::Ema, 0)).unwrap();
    let anomalous = ai
        .runs
        .iter()
        .filter(|d| !d.summary.classification.is_documented())
        .count();
    let hare = ai
        .runs
        .iter()
        .filter(|d| chebyshev(d.summary.policy, (0.0, 0.0)) <= 0.05)
        .count();
    verdict(
        ah_bad == 0 && anomalous == 0,
        format!(
            "AH-AH {ah_bad} runs away from (1,1); AI-AI {anomalous} anomalous runs ({hare} at Hare)"
        ),
    )
}

fn crawford_pure() -> Verdict {
    let mut matchups = Vec::new();
    for m in Matchup::TABLE {
        matchups.push(m);
        if m.is_heterogeneous() {
            matchups.push(m.mirrored());
        }
    }
    let mut short = Vec::new();
    let mut worst = usize::MAX;
    let mut cells = 0;
    for m in matchups {
        for kind in ReferenceKind::ADAPTIVE {
            for n in [0, 2] {
                let s = summarize_experiment(&cell(GameId::Crawford, m, kind, n)).unwrap();
                let near_pure = |x: f64| x <= 0.1 || x >= 0.9;
                let hits = s
                    .runs
                    .iter()
                    .filter(|d| near_pure(d.summary.policy.0) && near_pure(d.summary.policy.1))
                    .count();
                worst = worst.min(hits);
                cells += 1;
                if hits < 25 {
                    short.push(format!("{m}/{kind}/n{n} {hits}/30"));
                }
            }
        }
    }
    let pass = short.is_empty();
    verdict(
        pass,
        if pass {
            format!("{cells} cells, worst cell {worst}/30 runs pure")
        } else {
            format!("short cells: {}", short.join(", "))
        },
    )
}

fn ochs_oracle() -> Verdict {
    let game = GameId::Ochs.game();
    let candidates = pt_eb_candidates(&game, (0.0, 0.0), &CptParams::default(), 201).unwrap();
    let nearest = candidates
        .iter()
        .map(|&c| (chebyshev(c, (0.5, 0.05)), c))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    let pt_eb_ok = nearest.is_some_and(|(d, _)| d <= 0.05);
    let nash = nash_2x2(&game).unwrap().points;
    let nash_ok = nash == vec![EquilibriumPoint::new(0.2, 0.5, prospect_arena::games::Concept::Nash)];
    let nash_pts: Vec<_> = nash.iter().map(|e| (e.p, e.q)).collect();
    verdict(
        pt_eb_ok && nash_ok,
        format!(
            "PT-EB nearest to (0.5, 0.05): {:?} [{}]; NE {nash_pts:?} vs expected [(0.2, 0.5)] [{}]",
            nearest,
            if pt_eb_ok { "ok" } else { "off" },
            if nash_ok { "ok" } else { "off" },
        ),
    )
}

fn random_params(rng: &mut ChaCha8Rng) -> CptParams {
    CptParams::new(
        rng.gen_range(0.2..=1.0),
        rng.gen_range(0.2..=1.0),
        rng.gen_range(1.0..4.0),
        rng.gen_range(0.3..=1.0),
        rng.gen_range(0.3..=1.0),
    )
    .unwrap()
}

fn random_probs(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

fn cpt_properties() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut violations = [0usize; 5];

    // dominance: shift mass upward on a shared outcome grid
    for _ in 0..CASES {
        let params = random_params(&mut rng);
        let k = rng.gen_range(2..=4);
        let mut outcomes: Vec<f64> = (0..k).map(|_| rng.gen_range(-10.0..10.0)).collect();
        outcomes.sort_by(f64::total_cmp);
        let worse = random_probs(&mut rng, k);
        let mut better = worse.clone();
        for _ in 0..rng.gen_range(1..=3) {
            let from = rng.gen_range(0..k - 1);
            let to = rng.gen_range(from + 1..k);
            let moved = better[from] * rng.gen_range(0.0..=1.0);
            better[from] -= moved;
            better[to] += moved;
        }
        let r = rng.gen_range(-10.0..10.0);
        let a = Prospect::new(outcomes.iter().copied().zip(better)).unwrap();
        let b = Prospect::new(outcomes.iter().copied().zip(worse)).unwrap();
        if params.cpt_value(&a, r) < params.cpt_value(&b, r) - 1e-12 {
            violations[0] += 1;
        }
    }

    // inverse-S: one sign change of w(p) - p on a 1e-3 grid, increasing w
    for _ in 0..CASES {
        let gamma = rng.gen_range(0.3..0.99);
        let params = CptParams {
            gamma,
            delta: gamma,
            ..CptParams::default()
        };
        let weights: [fn(&CptParams, f64) -> f64; 2] = [CptParams::weight_gain, CptParams::weight_loss];
        let ok = weights.iter().all(|w| {
            let vals: Vec<f64> = (0..=1000).map(|i| w(&params, i as f64 / 1000.0)).collect();
            let increasing = vals.windows(2).all(|p| p[1] > p[0]);
            let signs: Vec<bool> = (1..1000).map(|i| vals[i] > i as f64 / 1000.0).collect();
            let changes = signs.windows(2).filter(|s| s[0] != s[1]).count();
            increasing && signs[0] && !signs[998] && changes == 1
        });
        if !ok {
            violations[1] += 1;
        }
    }

    // loss aversion with equal curvature on both sides
    for _ in 0..CASES {
        let curvature = rng.gen_range(0.2..=1.0);
        let params = CptParams {
            alpha: curvature,
            beta: curvature,
            lambda: rng.gen_range(1.0001..4.0),
            ..CptParams::default()
        };
        let r = rng.gen_range(-10.0..10.0);
        let x = rng.gen_range(1e-6..20.0);
        if !(params.value(r + x, r) < -params.value(r - x, r)) {
            violations[2] += 1;
        }
    }

    // degenerate lottery
    for _ in 0..CASES {
        let params = random_params(&mut rng);
        let o = rng.gen_range(-20.0..20.0);
        let r = rng.gen_range(-20.0..20.0);
        if params.cpt_value(&Prospect::degenerate(o), r) != params.value(o, r) {
            violations[3] += 1;
        }
    }

    // expected-utility degeneracy
    let eu = CptParams::expected_utility();
    for _ in 0..CASES {
        let k = rng.gen_range(1..=6);
        let outcomes: Vec<f64> = (0..k).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let p = Prospect::new(outcomes.into_iter().zip(random_probs(&mut rng, k))).unwrap();
        let scale = p.entries().iter().map(|e| e.0.abs()).fold(1.0, f64::max);
        if (eu.cpt_value(&p, 0.0) - p.eu_value()).abs() > 1e-12 * scale {
            violations[4] += 1;
        }
    }

    verdict(
        violations.iter().all(|&v| v == 0),
        format!(
            "violations over {CASES} cases each: dominance {}, inverse-S {}, loss aversion {}, degenerate {}, EU {}",
            violations[0], violations[1], violations[2], violations[3], violations[4]
        ),
    )
}

fn determinism() -> Verdict {
    let cells = [
        cell(GameId::PrisonersDilemma, matchup("AI-AI"), ReferenceKind::Ema, 0),
        cell(GameId::Ochs, matchup("LH-AI"), ReferenceKind::VBased, 2),
        cell(GameId::Chicken, matchup("AH-LH"), ReferenceKind::Emaor, 2),
        cell(GameId::MatchingPennies, matchup("LH-LH"), ReferenceKind::Ema, 0),
    ];
    let mut mismatches = Vec::new();
    for base in cells {
        let c = ExperimentConfig { runs: 2, ..base };
        let hash = |out: &prospect_arena::engine::ExperimentOutput| -> Vec<String> {
            out.runs
                .iter()
                .map(|r| sha256_hex(&step_log_bytes(&r.records).unwrap()))
                .collect()
        };
        let a = hash(&run_experiment(&c).unwrap());
        let b = hash(&run_experiment(&c).unwrap());
        let s = hash(&run_experiment_sequential(&c).unwrap());
        if a != b || a != s {
            mismatches.push(format!("{}/{}", c.game, c.matchup));
        }
    }

    let dir = tempfile::tempdir().unwrap();
    let spec = GridSpec {
        games: vec![GameId::StagHunt],
        matchups: vec![Matchup::new(AgentKind::LearningHuman, AgentKind::Ai)],
        references: vec![ReferenceKind::VBased],
        histories: vec![2],
        base: ExperimentConfig {
            runs: 2,
            ..Default::default()
        },
        log_scope: LogScope::Full,
        ..GridSpec::standard(dir.path())
    };
    let manifest_hash = || {
        run_grid(&spec).unwrap();
        sha256_hex(&std::fs::read(dir.path().join(MANIFEST_FILE)).unwrap())
    };
    if manifest_hash() != manifest_hash() {
        mismatches.push("grid manifest".into());
    }

    verdict(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "4 cells x 2 runs hashed three ways, grid rerun manifest identical".to_string()
        } else {
            format!("differing: {}", mismatches.join(", "))
        },
    )
}

fn encoding_bijections() -> Verdict {
    let mut errors = Vec::new();
    for n in 0..=2u32 {
        let count = 4usize.pow(n);
        let mut seen = vec![false; count];
        for code in 0..count {
            let h = decode_history(code, 2, n as usize).unwrap();
            let back = encode_history(&h, 2).unwrap();
            if back != code || seen[back] {
                errors.push(format!("n={n} code {code}"));
            }
            seen[back] = true;
        }
        if !seen.iter().all(|&s| s) {
            errors.push(format!("n={n} not onto"));
        }
        let mut ids = vec![false; count * 5];
        for code in 0..count {
            for bin in 0..5 {
                let id = state_id(code, bin, 5).unwrap();
                if decode_state_id(id, 5) != (code, bin) || ids[id] {
                    errors.push(format!("n={n} state ({code}, {bin})"));
                }
                ids[id] = true;
            }
        }
        if !ids.iter().all(|&s| s) {
            errors.push(format!("n={n} state ids not onto"));
        }
    }
    if encode_history(&[(0, 1), (1, 1)], 2).unwrap() != 13 {
        errors.push("worked history value".into());
    }
    let worked: Vec<usize> = (0..5).map(|b| state_id(13, b, 5).unwrap()).collect();
    if worked != vec![65, 66, 67, 68, 69] {
        errors.push(format!("worked state ids {worked:?}"));
    }
    verdict(
        errors.is_empty(),
        if errors.is_empty() {
            "n in {0,1,2}, 5 bins: bijective; 13 -> 65..=69".to_string()
        } else {
            errors.join(", ")
        },
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("prisoners-dilemma convergence", pd_convergence),
        ("matching-pennies baseline", mp_baseline),
        ("stag-hunt baseline", stag_hunt_baseline),
        ("crawford pure strategies", crawford_pure),
        ("ochs equilibrium oracle", ochs_oracle),
        ("prospect kernel properties", cpt_properties),
        ("determinism", determinism),
        ("encoding bijections", encoding_bijections),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let v = check();
        failed += usize::from(!v.pass);
        println!(
            "{} {name} ({:.1}s): {}",
            if v.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
