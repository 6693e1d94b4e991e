//! Acceptance suite: one PASS/FAIL line per criterion; exits non-zero when
//! any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use esec::parallel;
use esec::suite::generate_suite_streams;
use esec_core::chaining::{human_timings, schedule_means, MonteCarloConfig, PredictionMode};
use esec_core::event_chain::{project_sec, Esec, EsecColumn, EsecConfig, RoleMap, ROWS};
use esec_core::generator::Action;
use esec_core::geometry::{Aabb, Vec3};
use esec_core::predict::PredictorConfig;
use esec_core::relations::{
    dsr_track, main_ssr_boxes, touching_boxes, DsrRelation, DynamicConfig, SsrRelation,
    StaticConfig, TnRelation,
};
use esec_core::scene::{FrameRecord, ObjectState, SceneStream};
use esec_core::similarity::{esec_similarity, SimilarityConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SUITE_SEED: u64 = 0;
const SEQ1: [&str; 5] = ["take_down", "hide", "shake", "push", "put_on_top"];
const SEQ2: [&str; 5] = ["push", "put_on_top", "shake", "hide", "take_down"];
const SEQ3: [&str; 5] = ["put_on_top", "shake", "take_down", "hide", "push"];
const FIG4: [&str; 5] = ["hide", "shake", "take_down", "push", "put_on_top"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

/// The generated 10 x 30 suite with its ESECs.
struct Suite {
    esecs: Vec<(String, Esec)>,
    build_time: Duration,
}

fn build_suite() -> Suite {
    let t0 = Instant::now();
    let items = generate_suite_streams(&Action::ALL, 30, SUITE_SEED, 0).expect("suite");
    let streams: Vec<SceneStream> = items.iter().map(|(_, s)| s.clone()).collect();
    let esecs = parallel::extract_all(&streams, &EsecConfig::default(), 0).expect("extract");
    Suite {
        esecs: items
            .iter()
            .map(|(e, _)| e.file.trim_end_matches(".jsonl").to_string())
            .zip(esecs)
            .collect(),
        build_time: t0.elapsed(),
    }
}

fn uniform_esec(columns: usize, tn: TnRelation, ssr: SsrRelation, dsr: DsrRelation) -> Esec {
    Esec {
        columns: (0..columns)
            .map(|k| EsecColumn {
                t: k as f64,
                frame: k as u64,
                tn: [tn; ROWS],
                ssr: [ssr; ROWS],
                dsr: [dsr; ROWS],
            })
            .collect(),
        roles: RoleMap::default(),
        label: None,
        t_start: 0.0,
        t_end: columns as f64,
    }
}

fn criterion_1(suite: &Suite) -> Outcome {
    let cfg = SimilarityConfig::default();
    let sample: Vec<&Esec> = suite
        .esecs
        .iter()
        .filter(|(id, _)| {
            id.ends_with("_00")
                || id.ends_with("_01")
                || id.ends_with("_02")
                || id.ends_with("_03")
                || id.ends_with("_04")
        })
        .map(|(_, e)| e)
        .collect();
    let mut reflexive = true;
    let mut symmetric = true;
    for (i, a) in sample.iter().enumerate() {
        reflexive &= esec_similarity(*a, *a, &cfg).unwrap() == 100.0;
        for b in &sample[i + 1..] {
            symmetric &=
                esec_similarity(*a, *b, &cfg).unwrap() == esec_similarity(*b, *a, &cfg).unwrap();
        }
    }
    use DsrRelation as D;
    use SsrRelation as S;
    use TnRelation as T;
    let x = uniform_esec(3, T::Touching, S::Above, D::MovingTogether);
    let y = uniform_esec(3, T::NonTouching, S::Below, D::GettingClose);
    let equal = esec_similarity(&x, &x.clone(), &cfg).unwrap();
    let different = esec_similarity(&x, &y, &cfg).unwrap();
    let p7 = uniform_esec(7, T::Touching, S::Above, D::MovingTogether);
    let mut p7b = p7.clone();
    p7b.columns[3].tn[5] = T::NonTouching;
    let single = esec_similarity(&p7, &p7b, &cfg).unwrap();
    let analytic = within(equal, 100.0, 1e-9)
        && within(different, (1.0 - 3f64.sqrt()) * 100.0, 1e-9)
        && within(single, 100.0 * (1.0 - 1.0 / 70.0), 1e-9);
    outcome(
        sample.len() == 50 && reflexive && symmetric && analytic,
        format!(
            "{} ESECs, reflexive={reflexive}, symmetric={symmetric}; all-equal {equal}, all-different {different:.9}, single-cell {single:.9}",
            sample.len()
        ),
    )
}

struct Bench {
    esec: parallel::BenchReport,
    sec: parallel::BenchReport,
    esec_m5: parallel::BenchReport,
    sec_m5: parallel::BenchReport,
    esec_time: Duration,
}

fn run_benches(suite: &Suite) -> Bench {
    let cfg = PredictorConfig::default();
    let t0 = Instant::now();
    let esec = parallel::bench_predict(&suite.esecs, &cfg, 0).unwrap();
    let esec_time = t0.elapsed();
    let secs: Vec<_> = suite
        .esecs
        .iter()
        .map(|(id, e)| (id.clone(), project_sec(e)))
        .collect();
    let sec = parallel::bench_predict(&secs, &cfg, 0).unwrap();
    let m5 = PredictorConfig { margin: 5.0, ..cfg };
    Bench {
        esec,
        sec,
        esec_m5: parallel::bench_predict(&suite.esecs, &m5, 0).unwrap(),
        sec_m5: parallel::bench_predict(&secs, &m5, 0).unwrap(),
        esec_time,
    }
}

fn criterion_2(suite: &Suite, bench: &Bench) -> Outcome {
    let acc = bench.esec.accuracy();
    let secs = (suite.build_time + bench.esec_time).as_secs_f64();
    outcome(
        acc >= 0.95 && secs < 60.0,
        format!(
            "leave-self-out accuracy {:.1}% over {} scenes (need >= 95%), runtime {secs:.1} s (need < 60 s)",
            acc * 100.0,
            bench.esec.results.len()
        ),
    )
}

fn criterion_3(bench: &Bench) -> Outcome {
    let hides: Vec<_> = bench
        .esec
        .results
        .iter()
        .filter(|r| r.label == "hide")
        .collect();
    let at4 = hides
        .iter()
        .filter(|r| r.correct() && r.prediction.column == Some(4))
        .count();
    let share = at4 as f64 / hides.len() as f64;
    outcome(
        share >= 0.8,
        format!(
            "Hide predicted at column 4 in {at4}/{} variants (need >= 80%)",
            hides.len()
        ),
    )
}

fn earliness(esec: &parallel::BenchReport, sec: &parallel::BenchReport) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for class in ["put_on_top", "shake", "push", "hide"] {
        let (e, s) = (
            esec.class(class).unwrap().mean_p,
            sec.class(class).unwrap().mean_p,
        );
        ok &= e > s;
        parts.push(format!("{class} {e:.1}>{s:.1}"));
    }
    let (e, s) = (
        esec.class("take_down").unwrap().mean_p,
        sec.class("take_down").unwrap().mean_p,
    );
    ok &= e >= s - 1.0;
    parts.push(format!("take_down {e:.1}>={s:.1}-1"));
    (ok, parts.join(", "))
}

fn criterion_4(bench: &Bench) -> Outcome {
    let (ok20, d20) = earliness(&bench.esec, &bench.sec);
    let (ok5, d5) = earliness(&bench.esec_m5, &bench.sec_m5);
    outcome(
        ok20 && ok5,
        format!("ESEC vs SEC mean P at margin 20: {d20}; at margin 5: {d5}"),
    )
}

fn criterion_5() -> Outcome {
    let table = human_timings();
    let t0 = Instant::now();
    let c = |order: &[&str], mode| schedule_means(&table, order, mode).unwrap().completion;
    let s1 = c(&SEQ1, PredictionMode::Esec);
    let s2 = c(&SEQ2, PredictionMode::Esec);
    let s3 = c(&SEQ3, PredictionMode::Esec);
    let sec1 = c(&SEQ1, PredictionMode::Sec);
    let none = c(&SEQ1, PredictionMode::None);
    let fast = t0.elapsed() < Duration::from_secs(1);
    let ok = within(s1, 37.8, 2.0)
        && within(s2, 40.5, 2.0)
        && within(s3, 42.1, 2.0)
        && within(sec1, 47.0, 2.0)
        && within(none, 62.7, 1e-9)
        && within(none, 62.6, 2.0)
        && fast;
    outcome(
        ok,
        format!("ESEC {s1:.1}/{s2:.1}/{s3:.1} (vs 37.8/40.5/42.1), SEC {sec1:.1} (vs 47.0), none {none:.1} (vs 62.6), all within 2.0 s"),
    )
}

fn criterion_6() -> Outcome {
    let t0 = Instant::now();
    let cfg = |mode| MonteCarloConfig {
        base_samples: 10_000,
        seed: 2024,
        mode,
        bin_width: 1.0,
    };
    let (none, _) = parallel::monte_carlo(&human_timings(), &cfg(PredictionMode::None), 0).unwrap();
    let (esec, _) = parallel::monte_carlo(&human_timings(), &cfg(PredictionMode::Esec), 0).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let ok = none.cases == 1_200_000
        && esec.cases == 1_200_000
        && within(none.mean, 62.6, 0.5)
        && within(none.sd, 5.2, 0.5)
        && within(esec.mean_p_chain, 35.9, 4.0)
        && secs < 120.0;
    outcome(
        ok,
        format!(
            "{} cases; none: mean {:.2} s, sd {:.2} s (vs 62.6 +- 0.5, 5.2 +- 0.5); ESEC mean P_chain {:.2} (vs 35.9 +- 4); runtime {secs:.1} s",
            none.cases, none.mean, none.sd, esec.mean_p_chain
        ),
    )
}

fn criterion_7() -> Outcome {
    let tl = schedule_means(&human_timings(), &FIG4, PredictionMode::Esec).unwrap();
    let ok = within(tl.total_unchained, 62.7, 1e-9)
        && within(tl.savings, 24.2, 2.0)
        && within(tl.p_chain, 39.7, 3.0);
    outcome(
        ok,
        format!(
            "total {:.1} s (vs 62.7), completion {:.1} s, savings {:.1} s (vs 24.2 +- 2), P {:.1} (vs 39.7 +- 3)",
            tl.total_unchained, tl.completion, tl.savings, tl.p_chain
        ),
    )
}

fn esec_cmd(args: &[&str], dir: &Path) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_esec"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run esec");
    assert!(
        out.status.success(),
        "esec {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

/// Every file below `dir`, keyed by relative path.
fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.push((rel, std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

type Outputs = (Vec<Vec<u8>>, Vec<(String, Vec<u8>)>);

fn run_seeded_commands(jobs: &str) -> Outputs {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let j = ["--jobs", jobs];
    let mut stdouts = Vec::new();
    let mut run = |args: &[&str]| {
        let mut all: Vec<&str> = j.to_vec();
        all.extend_from_slice(args);
        stdouts.push(esec_cmd(&all, d));
    };
    run(&[
        "gen",
        "--suite",
        "--variants",
        "3",
        "--seed",
        "11",
        "--out",
        "suite",
    ]);
    run(&[
        "gen",
        "--action",
        "stir",
        "--seed",
        "3",
        "--distractors",
        "2",
    ]);
    run(&["extract", "suite", "--out", "esec"]);
    run(&["extract", "suite", "--sec", "--out", "sec"]);
    run(&["simmatrix", "suite", "--out", "matrix.csv"]);
    run(&["cluster", "--matrix", "matrix.csv", "--out", "tree.json"]);
    run(&[
        "predict",
        "--library",
        "suite",
        "--seed",
        "4",
        "suite/hide_01.jsonl",
    ]);
    run(&[
        "bench-predict",
        "suite",
        "--refs-per-class",
        "2",
        "--seed",
        "9",
        "--out",
        "bench",
    ]);
    run(&[
        "chain-mc",
        "--samples",
        "1500",
        "--seed",
        "5",
        "--out",
        "mc",
    ]);
    run(&[
        "chain",
        "--order",
        "take,hide,shake,push,put",
        "--mode",
        "sec",
    ]);
    (stdouts, tree(d))
}

fn criterion_8() -> Outcome {
    let (out1, files1) = run_seeded_commands("1");
    let (out4, files4) = run_seeded_commands("4");
    let (again, files_again) = run_seeded_commands("1");
    let differing: Vec<&str> = files1
        .iter()
        .zip(&files4)
        .filter(|(a, b)| a != b)
        .map(|(a, _)| a.0.as_str())
        .collect();
    let ok = out1 == out4
        && files1 == files4
        && out1 == again
        && files1 == files_again
        && files1.len() > 60;
    outcome(
        ok,
        format!(
            "10 seeded commands, {} output files and {} stdout streams byte-identical for --jobs 1 vs 4 and across reruns{}",
            files1.len(),
            out1.len(),
            if differing.is_empty() { String::new() } else { format!("; differing: {differing:?}") }
        ),
    )
}

fn random_box(rng: &mut ChaCha8Rng) -> Aabb {
    let mut c: Vec3 = [0.0; 3];
    let mut s: Vec3 = [0.0; 3];
    let snap = rng.random_bool(0.3);
    for k in 0..3 {
        c[k] = rng.random_range(-0.3..0.3);
        s[k] = rng.random_range(0.01..0.3);
        if snap {
            c[k] = (c[k] / 0.05).round() * 0.05;
            s[k] = ((s[k] / 0.05).round() * 0.05).max(0.05);
        }
    }
    Aabb::from_center(c, s)
}

fn mirror(r: SsrRelation) -> Option<SsrRelation> {
    use SsrRelation::*;
    Some(match r {
        Above => Below,
        Below => Above,
        Top => Bottom,
        Bottom => Top,
        Inside => Surround,
        Surround => Inside,
        _ => return None,
    })
}

fn geometry_pairs(rng: &mut ChaCha8Rng) -> (usize, Vec<String>) {
    let cfg = StaticConfig::default();
    let vocabulary = &SsrRelation::ALL[..14];
    let mut failures = Vec::new();
    let n = 100_000;
    for i in 0..n {
        let a = random_box(rng);
        let b = if i % 10 == 0 {
            // Nested pair.
            let c = a.center();
            let s = a.size();
            Aabb::from_center(c, [s[0] * 0.5, s[1] * 0.5, s[2] * 0.5])
        } else {
            random_box(rng)
        };
        let tab = touching_boxes(&a, &b, cfg.eps_touch);
        let tba = touching_boxes(&b, &a, cfg.eps_touch);
        let rab = main_ssr_boxes(&a, &b, tab, &cfg);
        let rba = main_ssr_boxes(&b, &a, tba, &cfg);
        if tab != tba {
            failures.push(format!("touching asymmetric: {a:?} {b:?}"));
        }
        if !vocabulary.contains(&rab) || !vocabulary.contains(&rba) {
            failures.push(format!("not a main relation: {rab} {rba}"));
        }
        for (x, y) in [(rab, rba), (rba, rab)] {
            if let Some(m) = mirror(x) {
                if y != m {
                    failures.push(format!("{x} not mirrored by {y}: {a:?} {b:?}"));
                }
            }
        }
        if (a.contains(&b) || b.contains(&a)) && !tab {
            failures.push(format!("enclosure without touching: {a:?} {b:?}"));
        }
    }
    (n, failures)
}

fn trajectory(rng: &mut ChaCha8Rng) -> SceneStream {
    let n = rng.random_range(25..90);
    let sa = [
        rng.random_range(0.03..0.15),
        rng.random_range(0.03..0.15),
        rng.random_range(0.03..0.15),
    ];
    let sb = [
        rng.random_range(0.03..0.15),
        rng.random_range(0.03..0.15),
        rng.random_range(0.03..0.15),
    ];
    let mut pa: Vec3 = [0.0, 0.0, 0.0];
    let mut pb: Vec3 = [
        rng.random_range(-0.4..0.4),
        rng.random_range(-0.4..0.4),
        rng.random_range(-0.4..0.4),
    ];
    let mut va: Vec3 = [0.0; 3];
    let mut vb: Vec3 = [0.0; 3];
    let mut attached = false;
    let mut left = 0;
    let mut frames = Vec::with_capacity(n);
    for i in 0..n {
        if left == 0 {
            left = rng.random_range(5..20);
            attached = rng.random_bool(0.3);
            let speed = if rng.random_bool(0.2) {
                0.0
            } else {
                rng.random_range(0.0..0.6)
            };
            for k in 0..3 {
                va[k] = rng.random_range(-1.0..1.0) * speed;
                vb[k] = if rng.random_bool(0.5) {
                    0.0
                } else {
                    rng.random_range(-0.5..0.5)
                };
            }
            if attached {
                pb = [pa[0] + (sa[0] + sb[0]) / 2.0, pa[1], pa[2]];
            }
        }
        left -= 1;
        for k in 0..3 {
            pa[k] += va[k] / 30.0;
            pb[k] = if attached {
                pb[k] + va[k] / 30.0
            } else {
                pb[k] + vb[k] / 30.0
            };
        }
        frames.push(FrameRecord {
            index: i as u64,
            t: i as f64 / 30.0,
            objects: vec![
                ObjectState::new("a", Aabb::from_center(pa, sa)),
                ObjectState::new("b", Aabb::from_center(pb, sb)),
            ],
        });
    }
    SceneStream {
        frames,
        fps: 30.0,
        label: None,
        y_down: true,
    }
}

fn reversed(s: &SceneStream) -> SceneStream {
    let n = s.frames.len();
    let mut out = s.clone();
    out.frames = s
        .frames
        .iter()
        .rev()
        .enumerate()
        .map(|(i, f)| FrameRecord {
            index: i as u64,
            t: i as f64 / s.fps,
            objects: f.objects.clone(),
        })
        .collect();
    debug_assert_eq!(out.frames.len(), n);
    out
}

fn dsr_trajectories(rng: &mut ChaCha8Rng) -> (usize, usize, Vec<String>) {
    use DsrRelation::*;
    let scfg = StaticConfig::default();
    let dcfg = DynamicConfig::default();
    let w = dcfg.window;
    let mut failures = Vec::new();
    let mut checked = 0;
    let n_traj = 1000;
    for t in 0..n_traj {
        let s = trajectory(rng);
        let fwd = dsr_track(&s, "a", "b", &scfg, &dcfg);
        let bwd = dsr_track(&reversed(&s), "a", "b", &scfg, &dcfg);
        let n = s.frames.len();
        let dist = |f: usize| {
            let (a, b) = (&s.frames[f].objects[0].aabb, &s.frames[f].objects[1].aabb);
            let (ca, cb) = (a.center(), b.center());
            ((ca[0] - cb[0]).powi(2) + (ca[1] - cb[1]).powi(2) + (ca[2] - cb[2]).powi(2)).sqrt()
        };
        let touch = |f: usize| {
            touching_boxes(
                &s.frames[f].objects[0].aabb,
                &s.frames[f].objects[1].aabb,
                scfg.eps_touch,
            )
        };
        for g in 0..n - w {
            checked += 1;
            let label = fwd[g];
            let ok = match (touch(g), touch(g + w)) {
                (true, true) => matches!(
                    label,
                    MovingTogether | HaltingTogether | FixedMovingTogether
                ),
                (false, false) => {
                    let delta = dist(g + w) - dist(g);
                    match label {
                        GettingClose => delta < -dcfg.xi,
                        MovingApart => delta > dcfg.xi,
                        Stable | VeryFar => delta.abs() <= dcfg.xi,
                        _ => false,
                    }
                }
                _ => label == VeryFar,
            };
            if !ok {
                failures.push(format!(
                    "trajectory {t} frame {g}: label {label} outside its partition cell"
                ));
            }
            let back = bwd[n - 1 - g - w];
            let dual = match label {
                GettingClose => back == MovingApart,
                MovingApart => back == GettingClose,
                MovingTogether | HaltingTogether | FixedMovingTogether => back == label,
                _ => !matches!(back, GettingClose | MovingApart),
            };
            if !dual {
                failures.push(format!(
                    "trajectory {t} frame {g}: {label} reversed is {back}"
                ));
            }
        }
    }
    (n_traj, checked, failures)
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (pairs, geo) = geometry_pairs(&mut rng);
    let (trajs, windows, dyn_fail) = dsr_trajectories(&mut rng);
    let first = geo
        .first()
        .or(dyn_fail.first())
        .cloned()
        .unwrap_or_default();
    outcome(
        geo.is_empty() && dyn_fail.is_empty(),
        format!(
            "{pairs} box pairs ({} violations), {trajs} trajectories / {windows} windows ({} violations){}",
            geo.len(),
            dyn_fail.len(),
            if first.is_empty() { String::new() } else { format!("; first: {first}") }
        ),
    )
}

fn main() {
    let suite = build_suite();
    let bench = run_benches(&suite);
    let results = [
        ("similarity identities", criterion_1(&suite)),
        ("class separability", criterion_2(&suite, &bench)),
        ("hide prediction column", criterion_3(&bench)),
        ("ESEC earliness", criterion_4(&bench)),
        ("scheduler validation", criterion_5()),
        ("Monte-Carlo statistics", criterion_6()),
        ("chain timing example", criterion_7()),
        ("determinism and parallel independence", criterion_8()),
        ("geometry properties", criterion_9()),
    ];
    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} ({name}): {verdict}: {}", i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {}/{} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
