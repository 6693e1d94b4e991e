//! Generator-to-prediction pipeline checks.

use esec_core::event_chain::{build_esec, project_sec, Esec, EsecConfig, PAIR_LABELS};
use esec_core::generator::{generate_scene, suite_params, Action, GenParams};
use esec_core::predict::{predict, PredictorConfig, ReferenceLibrary};
use esec_core::relations::TnRelation;
use esec_core::similarity::{esec_similarity, SimilarityConfig};

fn row(label: &str) -> usize {
    PAIR_LABELS.iter().position(|&p| p == label).unwrap()
}

/// First column at which `pair` holds `rel`.
fn first(e: &Esec, pair: &str, rel: TnRelation) -> Option<usize> {
    e.columns.iter().position(|c| c.tn[row(pair)] == rel)
}

#[test]
fn hide_touching_rows_follow_the_reference_chain() {
    use TnRelation::*;
    for seed in 0..12 {
        let p = GenParams {
            distractors: (seed % 4) as usize,
            ..GenParams::new(Action::Hide, seed)
        };
        let e = build_esec(&generate_scene(&p).unwrap(), &EsecConfig::default());
        assert_eq!(first(&e, "H,1", Touching), Some(2), "seed {seed}");
        assert_eq!(first(&e, "1,G", NonTouching), Some(3), "seed {seed}");
        assert_eq!(first(&e, "1,2", Touching), Some(4), "seed {seed}");
        assert_eq!(first(&e, "2,G", Absent), Some(5), "seed {seed}");
        assert_eq!(first(&e, "H,1", NonTouching), Some(6), "seed {seed}");
        assert!(e.columns[0].tn.iter().all(|&t| t != Touching));
    }
}

#[test]
fn destruction_marks_the_cut_object() {
    for action in [Action::Cut, Action::Chop] {
        let e = build_esec(
            &generate_scene(&GenParams::new(action, 4)).unwrap(),
            &EsecConfig::default(),
        );
        let last = e.columns.last().unwrap();
        assert!(last.tn.contains(&TnRelation::Destroyed), "{action}");
    }
}

#[test]
fn within_class_similarity_exceeds_cross_class() {
    let params = suite_params(&Action::ALL, 6, 3);
    let esecs: Vec<Esec> = params
        .iter()
        .map(|p| build_esec(&generate_scene(p).unwrap(), &EsecConfig::default()))
        .collect();
    let cfg = SimilarityConfig::default();
    for a in Action::ALL {
        let (mut within, mut nw, mut cross, mut nc) = (0.0, 0, 0.0, 0);
        for (i, p) in params.iter().enumerate().filter(|(_, p)| p.action == a) {
            for (j, q) in params.iter().enumerate() {
                if i == j {
                    continue;
                }
                let s = esec_similarity(&esecs[i], &esecs[j], &cfg).unwrap();
                if q.action == p.action {
                    within += s;
                    nw += 1;
                } else {
                    cross += s;
                    nc += 1;
                }
            }
        }
        assert!(within / nw as f64 > cross / nc as f64, "{a}");
    }
}

#[test]
fn leave_self_out_prediction_returns_the_true_class() {
    let params = suite_params(&Action::ALL, 5, 11);
    let mut lib = ReferenceLibrary::new();
    let mut queries = Vec::new();
    for (k, p) in params.iter().enumerate() {
        let e = build_esec(&generate_scene(p).unwrap(), &EsecConfig::default());
        let id = format!("{}_{k}", p.action);
        lib.insert(p.action.name(), id.clone(), e.clone());
        queries.push((id, p.action, e));
    }
    let cfg = PredictorConfig::default();
    for (id, action, e) in &queries {
        let pred = predict(e, Some(id), &lib, &cfg).unwrap();
        assert_eq!(pred.class.as_deref(), Some(action.name()), "{id}");
        assert!(pred.p > 0.0 && pred.p < 100.0);
    }
}

#[test]
fn sec_projection_never_adds_columns() {
    for a in Action::ALL {
        let e = build_esec(
            &generate_scene(&GenParams::new(a, 2)).unwrap(),
            &EsecConfig::default(),
        );
        let s = project_sec(&e);
        assert!(s.columns.len() <= e.columns.len());
        assert!(s.columns.windows(2).all(|w| w[0].tn != w[1].tn));
    }
}
