use proptest::prelude::*;
use rydberg_reversal::couplings::InteractionParams;
use rydberg_reversal::ensemble::{CloudParams, Ensemble};
use rydberg_reversal::protocols::floquet::{eq2_form, ideal_delay_ratio, mirrored_cycle, sequential_cycle};
use rydberg_reversal::protocols::{
    anisotropy_scan, average_hamiltonian, build_floquet_schedule, build_reversal_timeline, execute_timeline,
    CouplingForm, CycleKind, Engineering, EventTimeline, FloquetMode, FloquetParams, ReversalParams, RevivalRule,
    Solver, TransferModel,
};
use rydberg_reversal::quantum::EvolutionConfig;

fn ensemble(n: usize, seed: u64) -> Ensemble {
    Ensemble::sample(&CloudParams::new(n, 8.1, 14.0, 11e-6, seed)).unwrap()
}

fn exact() -> Solver {
    Solver::Exact(EvolutionConfig::dense())
}

fn reversed(e: &Ensemble, p: &ReversalParams) -> f64 {
    let t = build_reversal_timeline(p, &[]).unwrap();
    execute_timeline(e, &InteractionParams::default(), &t, &exact())
        .unwrap()
        .magnetization(0.0)[0]
}

#[test]
fn sign_flip_reverses_xx_and_xxz() {
    let e = ensemble(8, 11);
    for form in [CouplingForm::XX, eq2_form(0.02, 0.01), eq2_form(0.0, 0.01)] {
        for k in [1.0, 1.1, 1.03] {
            let p = ReversalParams {
                t1: 0.7,
                k,
                engineering: Engineering::Ideal { form },
                ..ReversalParams::default()
            };
            assert!((reversed(&e, &p) - 0.5).abs() < 1e-8, "form {form:?} k {k}");
        }
    }
}

#[test]
fn additive_rule_misses_the_echo() {
    let e = ensemble(8, 12);
    let p = ReversalParams {
        t1: 0.7,
        revival: RevivalRule::Additive,
        ..ReversalParams::default()
    };
    assert!(reversed(&e, &p) < 0.5 - 1e-3);
}

#[test]
fn zero_first_period_keeps_the_state() {
    let e = ensemble(7, 13);
    let p = ReversalParams {
        t1: 0.0,
        ..ReversalParams::default()
    };
    assert!((reversed(&e, &p) - 0.5).abs() < 1e-12);
}

#[test]
fn instantaneous_two_pi_equals_sign_flip() {
    let e = ensemble(7, 14);
    let grid: Vec<f64> = (0..=16).map(|i| i as f64 * 0.05).collect();
    let run = |transfer| {
        let p = ReversalParams {
            transfer,
            ..ReversalParams::default()
        };
        let t = build_reversal_timeline(&p, &grid).unwrap();
        execute_timeline(&e, &InteractionParams::default(), &t, &exact()).unwrap()
    };
    let a = run(TransferModel::IdealSignFlip);
    let b = run(TransferModel::Instantaneous2Pi);
    assert!(a.max_trace_difference(&b).unwrap() < 1e-10);
}

#[test]
fn revival_peak_sits_at_t1_plus_t1_over_k() {
    let e = ensemble(8, 15);
    let step = 0.013;
    let grid: Vec<f64> = (0..=90).map(|i| i as f64 * step).collect();
    for k in [1.1, 1.03, 1.5] {
        let p = ReversalParams {
            t1: 0.5,
            k,
            ..ReversalParams::default()
        };
        let t = build_reversal_timeline(&p, &grid).unwrap();
        let r = execute_timeline(&e, &InteractionParams::default(), &t, &exact()).unwrap();
        let m = r.magnetization(0.0);
        let after: Vec<usize> = (0..m.len()).filter(|&i| r.x[i] > p.t1).collect();
        let best = *after.iter().max_by(|&&a, &&b| m[a].total_cmp(&m[b])).unwrap();
        assert!(
            (r.x[best] - (0.5 + 0.5 / k)).abs() <= step,
            "k {k}: peak at {}",
            r.x[best]
        );
    }
}

#[test]
fn scan_matches_individual_timelines() {
    use rydberg_reversal::protocols::reversal_scan;
    let e = ensemble(7, 16);
    let ip = InteractionParams::default();
    let p = ReversalParams {
        transfer: TransferModel::experimental(),
        prep: Some(0.05),
        motion_enabled: true,
        ..ReversalParams::default()
    };
    let t1s = [0.0, 0.13, 0.4, 0.9];
    let scan = reversal_scan(&e, &ip, &t1s, &p, &exact()).unwrap();
    for (i, &t1) in t1s.iter().enumerate() {
        let q = p.with_t1(t1);
        assert!((scan.x[i] - q.revival_time()).abs() < 1e-15);
        let t = build_reversal_timeline(&q, &[]).unwrap();
        let single = execute_timeline(&e, &ip, &t, &exact()).unwrap();
        for c in 0..7 {
            for a in 0..3 {
                let d = (scan.traces[c][i][a] - single.traces[c][0][a]).abs();
                assert!(d < 1e-9, "t1 {t1} center {c}: {d:e}");
            }
        }
        assert!((scan.diagnostics[i].delta_j - single.diagnostics[0].delta_j).abs() < 1e-12);
    }
}

#[test]
fn refresh_interval_converges() {
    // a hot cloud so that motion matters over a few microseconds
    let mut params = CloudParams::new(6, 6.0, 9.0, 200e-6, 17);
    params.cloud_sigma = [9.0, 9.0, 9.0];
    let e = Ensemble::sample(&params).unwrap();
    let run = |refresh: f64| {
        let p = ReversalParams {
            t1: 2.0,
            motion_enabled: true,
            coupling_refresh_interval: refresh,
            ..ReversalParams::default()
        };
        reversed(&e, &p)
    };
    let values: Vec<f64> = [0.4, 0.2, 0.1, 0.05, 0.025].iter().map(|&r| run(r)).collect();
    let steps: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    assert!(steps[0] > 1e-6, "motion has no effect: {values:?}");
    assert!(steps[3] < steps[0] / 3.0, "{values:?}");
    let reference = values[4];
    assert!((values[3] - reference).abs() < (values[0] - reference).abs());
}

#[test]
fn ideal_anisotropy_scan_properties() {
    let e = ensemble(8, 18);
    let base = FloquetParams {
        tau1: 0.0,
        tau: 0.01,
        cycles: 1,
        mode: FloquetMode::IdealXxz,
    };
    let p = ReversalParams {
        t1: 0.5,
        prep: Some(0.1),
        ..ReversalParams::default()
    };
    let anis = [0.14, 0.33, 0.6, 1.0];
    let s = anisotropy_scan(&e, &InteractionParams::default(), &anis, &base, &p, &exact()).unwrap();
    let pre = s.post_prep.magnetization(0.0);
    let fwd = s.forward.magnetization(0.0);
    let rev = s.reversed.magnetization(0.0);
    for i in 0..4 {
        assert!((rev[i] - pre[i]).abs() < 1e-6);
        assert!((pre[i] - pre[0]).abs() < 1e-12);
    }
    assert!((fwd[3] - pre[3]).abs() < 1e-6);
    assert!(fwd[0] < pre[0]);
}

#[test]
fn delay_ratio_hits_the_anisotropy_endpoints() {
    assert!((eq2_form(0.0, 0.01).anisotropy() - 1.0).abs() < 1e-12);
    let r = ideal_delay_ratio(0.14).unwrap();
    assert!((r - 0.86 / 0.14).abs() < 1e-12);
    assert!((eq2_form(r * 0.01, 0.01).anisotropy() - 0.14).abs() < 1e-12);
}

#[test]
fn ideal_schedule_is_one_xxz_segment() {
    let p = FloquetParams {
        tau1: 0.03,
        tau: 0.01,
        cycles: 5,
        mode: FloquetMode::IdealXxz,
    };
    let t = build_floquet_schedule(&p).unwrap();
    assert_eq!(t.events.len(), 1);
    assert!((t.total_duration() - p.duration()).abs() < 1e-15);
    let pulsed = build_floquet_schedule(&FloquetParams {
        mode: FloquetMode::Pulsed {
            schedule: CycleKind::Mirrored,
        },
        ..p
    })
    .unwrap();
    assert!((pulsed.total_duration() - p.duration()).abs() < 1e-12);
}

#[test]
fn timelines_round_trip() {
    let p = ReversalParams {
        transfer: TransferModel::experimental(),
        prep: Some(0.1),
        engineering: Engineering::Pulsed {
            tau1: 0.02,
            tau: 0.01,
            schedule: CycleKind::Mirrored,
        },
        motion_enabled: true,
        ..ReversalParams::default()
    };
    let t = build_reversal_timeline(&p, &[0.0, 0.3, 0.7]).unwrap();
    let json = t.to_json().unwrap();
    let back: EventTimeline = serde_json::from_str(&json).unwrap();
    assert_eq!(back, t);
    #[derive(serde::Serialize, serde::Deserialize)]
    struct Wrap {
        timeline: EventTimeline,
    }
    let text = toml::to_string(&Wrap { timeline: t.clone() }).unwrap();
    assert_eq!(toml::from_str::<Wrap>(&text).unwrap().timeline, t);
}

#[test]
fn invalid_timelines_are_rejected() {
    let t: EventTimeline = serde_json::from_str(
        r#"{"events":[{"kind":"free_evolution","duration":-1.0}],"motion_enabled":false,"coupling_refresh_interval":0.2}"#,
    )
    .unwrap();
    assert!(execute_timeline(&ensemble(3, 1), &InteractionParams::default(), &t, &exact()).is_err());
}

proptest! {
    #[test]
    fn schedule_coefficients(tau1 in 0.0f64..0.1, tau in 1e-4f64..0.1) {
        for cycle in [mirrored_cycle(tau1, tau), sequential_cycle(tau1, tau)] {
            let h = average_hamiltonian(&cycle).unwrap();
            prop_assert!((h.sum() - 2.0).abs() < 1e-12);
            prop_assert!((h.c_xx - h.c_yy).abs() < 1e-12);
            for c in [h.c_xx, h.c_yy, h.c_zz] {
                prop_assert!((-1e-12..=2.0 + 1e-12).contains(&c));
            }
            prop_assert!(h.closes);
            let tc = h.cycle_time;
            prop_assert!((h.c_xx - 2.0 * (tau1 + tau) / tc).abs() < 1e-12);
            prop_assert!((h.c_zz - 4.0 * tau / tc).abs() < 1e-12);
        }
    }

    #[test]
    fn ideal_ratio_inverts(a in 0.01f64..1.0) {
        let r = ideal_delay_ratio(a).unwrap();
        prop_assert!((eq2_form(r * 0.01, 0.01).anisotropy() - a).abs() < 1e-10);
    }
}
