mod common;

use common::{subject, toy_subjects, words};
use thuetape::crossing::{
    equal_pairs, full_verification, local_summary, pump_cut, record_trace, trace_from_json,
    trace_to_json, triples_all_compatible, CrossingError,
};
use thuetape::machine::MachineState;

/// Heights from an independent move log: replay with `step` and count the
/// point crossed by each move.
fn heights_by_move_log(
    prog: &thuetape::machine::MachineProgram,
    x: &[thuetape::rewrite::Symbol],
) -> Vec<usize> {
    let mut cfg = prog.initial_config(x);
    let mut h = vec![0; cfg.len() + 1];
    while !cfg.state.is_halting() {
        let before = cfg.head;
        prog.step(&mut cfg).unwrap();
        h[before.min(cfg.head)] += 1;
    }
    h
}

#[test]
fn heights_match_move_log_and_total_time() {
    for s in toy_subjects() {
        for x in words(&s.inputs, 6) {
            let t = record_trace(&s.prog, &x, None).unwrap();
            let h: Vec<usize> = t.sequences.iter().map(|c| c.height()).collect();
            assert_eq!(h, heights_by_move_log(&s.prog, &x));
            assert_eq!(t.total_height() as u64, t.time);
            assert!(t.sequences[0].is_empty() && t.sequences[t.n()].is_empty());
        }
    }
}

#[test]
fn recorded_traces_verify_and_end_at_head() {
    for s in toy_subjects() {
        for x in words(&s.inputs, 5) {
            let t = record_trace(&s.prog, &x, None).unwrap();
            for stop in [0, t.time / 3, t.time / 2, t.time] {
                let snap = record_trace(&s.prog, &x, Some(stop)).unwrap();
                let full = full_verification(&s.prog, &snap);
                assert!(full.consistent, "{:?}", full.reason);
                assert_eq!(full.end_square, Some(snap.head));
                assert_eq!(full.final_cells, snap.final_cells);
                let local = local_summary(&s.prog, &snap);
                assert!(local.compatible);
                assert_eq!(local.end_squares, vec![snap.head]);
                assert_eq!(local.final_cells, snap.final_cells);
            }
        }
    }
}

#[test]
fn mutated_traces_agree_between_procedures() {
    let s = subject("DYCK");
    let x = s
        .prog
        .system()
        .alphabet()
        .parse_word("a b b a a b")
        .unwrap();
    let t = record_trace(&s.prog, &x, None).unwrap();
    let states: Vec<MachineState> = s.prog.states().take(40).collect();
    let mut checked = 0;
    for p in 0..=t.n() {
        for k in 0..t.sequences[p].height() {
            for &q in &states {
                let mut m = t.clone();
                m.sequences[p].states[k] = q;
                assert_eq!(
                    triples_all_compatible(&s.prog, &m),
                    full_verification(&s.prog, &m).consistent
                );
                checked += 1;
            }
        }
        let mut m = t.clone();
        m.sequences[p].lead = !m.sequences[p].lead;
        assert!(!triples_all_compatible(&s.prog, &m));
        assert!(!full_verification(&s.prog, &m).consistent);
    }
    assert!(checked > 200);
}

#[test]
fn json_roundtrip() {
    let s = subject("MIDBIT5");
    let x = s.prog.system().alphabet().parse_word("1 0 1 1 0").unwrap();
    let t = record_trace(&s.prog, &x, Some(20)).unwrap();
    let back = trace_from_json(&s.prog, &trace_to_json(&s.prog, &t)).unwrap();
    assert_eq!(back, t);
}

#[test]
fn pump_cuts_shorten_consistently() {
    let s = subject("AA");
    let x = s
        .prog
        .system()
        .alphabet()
        .parse_word("a a a a a a")
        .unwrap();
    let t = record_trace(&s.prog, &x, None).unwrap();
    let pairs = equal_pairs(&s.prog, &t);
    assert!(!pairs.is_empty());
    for (i, j) in pairs {
        let cut = pump_cut(&s.prog, &t, i, j).unwrap();
        assert_eq!(cut.n(), t.n() - (j - i));
        assert_eq!(cut.final_cells[..i], t.final_cells[..i]);
        assert_eq!(cut.final_cells[i..], t.final_cells[j..]);
    }
    assert!(matches!(
        pump_cut(&s.prog, &t, 3, 3),
        Err(CrossingError::EmptyCut { .. })
    ));
}

#[test]
fn snapshot_after_halt_is_an_error() {
    let s = subject("AA");
    let x = s.inputs[..1].to_vec();
    assert!(matches!(
        record_trace(&s.prog, &x, Some(1_000_000)),
        Err(CrossingError::TimeBeyondHalt { .. })
    ));
}
