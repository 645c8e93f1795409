mod common;

use common::{context, naive_normal_form, subject, toy_subjects, words};
use thuetape::machine::{MachineError, MachineState, RunOptions};

#[test]
fn machine_agrees_with_brute_force_rewriting() {
    for s in toy_subjects() {
        let sys = s.prog.system();
        for x in words(&s.inputs, 8) {
            let r = s.prog.run(&x, RunOptions::default()).unwrap();
            let nf = naive_normal_form(sys, &context(sys, &x));
            assert_eq!(r.h_image, nf, "{} on {}", s.name, sys.alphabet().render(&x));
            assert_eq!(r.accepted, nf == sys.t3(), "{}", s.name);
        }
    }
}

#[test]
fn audit_mode_finds_nothing_on_valid_runs() {
    for s in toy_subjects() {
        for x in words(&s.inputs, 6) {
            s.prog.run(&x, RunOptions::audited()).unwrap();
        }
    }
}

#[test]
fn reduce_count_is_derivation_length() {
    let s = subject("DYCK");
    let sys = s.prog.system();
    for x in words(&s.inputs, 7) {
        let r = s.prog.run(&x, RunOptions::default()).unwrap();
        let steps = sys.leftmost_derivation(&context(sys, &x)).len() - 1;
        assert_eq!(r.reduce_count, steps);
    }
}

#[test]
fn steps_stay_within_quadratic_fuel() {
    let s = subject("PAIRS");
    for x in words(&s.inputs, 9) {
        let r = s.prog.run(&x, RunOptions::default()).unwrap();
        let n = s.prog.tape_len(x.len());
        assert!(r.steps <= 8 * (n * n) as u64 + 8 * n as u64);
    }
}

#[test]
fn fuel_exhaustion_is_reported() {
    let s = subject("DYCK");
    let x = s.inputs.repeat(4);
    let err = s
        .prog
        .run(
            &x,
            RunOptions {
                fuel: Some(5),
                audit: false,
            },
        )
        .unwrap_err();
    assert!(matches!(err, MachineError::FuelExhausted { fuel: 5 }));
}

#[test]
fn state_names_roundtrip() {
    let s = subject("MIDBIT5");
    let mut seen = 0;
    for (idx, q) in s.prog.states().enumerate() {
        assert_eq!(s.prog.state_index(q), Some(idx as u32));
        assert_eq!(s.prog.state_at(idx as u32), Some(q));
        assert_eq!(s.prog.parse_state(&q.to_string()).unwrap(), q);
        seen += 1;
    }
    assert_eq!(seen, s.prog.state_count());
    assert!(s.prog.state_count() < 1 << s.prog.state_bits());
    assert!(s.prog.parse_state("Shift:999999").is_err());
    assert_eq!(s.prog.initial_state(), MachineState::InitRight(0));
}

#[test]
fn insert_blanks_only_in_shift() {
    let s = subject("DYCK");
    let x = s.inputs.repeat(2);
    let cfg = s.prog.initial_config(&x);
    assert!(matches!(
        s.prog.insert_blanks(&cfg, 3, 1),
        Err(MachineError::BadInsertion(_))
    ));
}
