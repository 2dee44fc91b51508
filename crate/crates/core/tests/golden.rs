//! Frozen score vectors for the ten-paper regression fixture. The values
//! were produced by the dense reference in `common` and are checked here
//! against both the library and the reference itself.

mod common;

use common::*;
use scirank::metrics::{compute_metric, MetricConfig};
use scirank::MetricKind;

/// Reference against frozen values: exact solves agree to rounding.
const TOL: f64 = 1e-12;
/// Library against frozen values: power iteration stops at an L1 step of
/// 1e-10, which bounds the distance to the fixed point well inside this.
const ITER_TOL: f64 = 1e-8;

const FULL_AUTHORS: [&str; 7] = ["a0", "a1", "a2", "a3", "a4", "a5", "a6"];
const FULL_VENUES: [&str; 3] = ["v0", "v1", "v2"];

const FULL: [(MetricKind, &[f64]); 7] = [
    (MetricKind::Cc, &[8.0, 6.0, 4.0, 6.0, 2.0, 2.0, 0.0]),
    (MetricKind::Bcc, &[4.0, 4.0, 1.5, 4.0, 2.0, 1.5, 0.0]),
    (
        MetricKind::Cv,
        &[
            0.21718738872922413,
            0.2391858898806625,
            0.06758625535093243,
            0.20800913609153893,
            0.13782469080773624,
            0.06684265046506871,
            0.0,
        ],
    ),
    (
        MetricKind::Influence,
        &[
            0.19606178739994387,
            0.31617498492222973,
            0.06422152618220323,
            0.20033906455387526,
            0.09473771500179622,
            0.10407467803751047,
            0.024390243902438973,
        ],
    ),
    (
        MetricKind::Followers,
        &[
            0.2072617484588894,
            0.1958219766283663,
            0.13741893096727456,
            0.19781543161151022,
            0.11046914466739893,
            0.12682252376412062,
            0.024390243902439004,
        ],
    ),
    (
        MetricKind::Connections,
        &[
            0.22909400821157422,
            0.17226132322941892,
            0.23167829462774425,
            0.15494239637357918,
            0.09760130627494212,
            0.09003242738029986,
            0.024390243902438966,
        ],
    ),
    (
        MetricKind::Exposure,
        &[
            0.0836004620510014,
            0.15317160667044838,
            0.050231487670969695,
            0.09321414331804564,
            0.05995179454867883,
            0.07448055099685988,
            0.01639344262295087,
            0.2150394730607066,
            0.14980601975112368,
            0.10411101930921773,
        ],
    ),
];
const FULL_CV_DROPPED: f64 = 0.06336398867483947;

const D1_AUTHORS: [&str; 6] = ["a0", "a1", "a2", "a3", "a4", "a5"];

const D1: [(MetricKind, &[f64]); 7] = [
    (MetricKind::Cc, &[2.0, 0.0, 2.0, 4.0, 1.0, 1.0]),
    (
        MetricKind::Bcc,
        &[
            0.6666666666666666,
            0.0,
            0.6666666666666666,
            2.6666666666666665,
            1.0,
            1.0,
        ],
    ),
    (
        MetricKind::Cv,
        &[
            0.09115529791237953,
            0.038952233204199736,
            0.09115529791237953,
            0.35134503568863873,
            0.2274373381675093,
            0.09997739855744597,
        ],
    ),
    (
        MetricKind::Influence,
        &[
            0.14730154184255959,
            0.0667354368553919,
            0.14730154184255959,
            0.31089198251444117,
            0.19886452942402938,
            0.12890496752101846,
        ],
    ),
    (
        MetricKind::Followers,
        &[
            0.1913638889503431,
            0.0792197685359305,
            0.1913638889503431,
            0.2224584956267006,
            0.14224967563016241,
            0.1733442823065199,
        ],
    ),
    (
        MetricKind::Connections,
        &[
            0.1941747572815535,
            0.1941747572815535,
            0.1941747572815535,
            0.1941747572815535,
            0.19417475728155345,
            0.029126213592233104,
        ],
    ),
    (
        MetricKind::Exposure,
        &[
            0.06138896737140871,
            0.028856007708126345,
            0.06138896737140871,
            0.15274095744660612,
            0.08152547658178283,
            0.0893129935468427,
            0.40589242164292455,
            0.11889420833089857,
        ],
    ),
];
const D1_CV_DROPPED: f64 = 0.09997739855744597;

fn flat(mv: &scirank::MetricVector) -> Vec<f64> {
    let mut v = mv.author_scores.values().to_vec();
    if let Some(venues) = &mv.venue_scores {
        v.extend_from_slice(venues.values());
    }
    v
}

#[test]
fn full_view_matches_goldens() {
    let c = regression_fixture();
    let view = c.full_view();
    assert_eq!(view.author_ids(), FULL_AUTHORS);
    assert_eq!(view.venue_ids(), FULL_VENUES);
    let cfg = MetricConfig::default();
    for (kind, want) in FULL {
        let mv = compute_metric(&view, kind, &cfg).unwrap();
        assert!(l1(&flat(&mv), want) < ITER_TOL, "{kind}: {:?}", flat(&mv));
        if kind == MetricKind::Cv {
            assert!((mv.dropped_mass - FULL_CV_DROPPED).abs() < ITER_TOL);
        }
    }
}

#[test]
fn domain_view_matches_goldens() {
    let c = regression_fixture();
    let view = c.domain_view("d1").unwrap();
    assert_eq!(view.author_ids(), D1_AUTHORS);
    let cfg = MetricConfig::default();
    for (kind, want) in D1 {
        let mv = compute_metric(&view, kind, &cfg).unwrap();
        assert!(l1(&flat(&mv), want) < ITER_TOL, "{kind}: {:?}", flat(&mv));
        if kind == MetricKind::Cv {
            assert!((mv.dropped_mass - D1_CV_DROPPED).abs() < ITER_TOL);
        }
    }
}

#[test]
fn goldens_still_match_dense_reference() {
    let c = regression_fixture();
    let cfg = MetricConfig::default();
    for (view, table) in [(c.full_view(), &FULL), (c.domain_view("d1").unwrap(), &D1)] {
        let d = Dense::from_view(&view);
        for (kind, want) in table.iter() {
            assert!(l1(&d.metric(*kind, &cfg, Solver::Exact), want) < TOL, "{kind}");
        }
    }
}
