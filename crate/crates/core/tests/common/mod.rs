//! Oracles and corpus shared by the integration tests. Nothing here calls
//! the library's own rewriting or scanning code.
#![allow(dead_code)]

use thuetape::langs::builtin_system;
use thuetape::machine::MachineProgram;
use thuetape::rewrite::{Symbol, ThueSystem, Word};

/// Leftmost redex by brute force: smallest end position, then longest lhs,
/// then lowest rule index. Positions are 1-based and inclusive.
pub fn naive_leftmost(sys: &ThueSystem, s: &[Symbol]) -> Option<(usize, usize, usize)> {
    for end in 1..=s.len() {
        let mut best: Option<(usize, usize)> = None;
        for (idx, rule) in sys.rules().iter().enumerate() {
            let l = rule.lhs.len();
            if l <= end && s[end - l..end] == rule.lhs[..] {
                let better = match best {
                    None => true,
                    Some((bl, _)) => l > bl,
                };
                if better {
                    best = Some((l, idx));
                }
            }
        }
        if let Some((l, idx)) = best {
            return Some((end - l + 1, end, idx));
        }
    }
    None
}

pub fn naive_normal_form(sys: &ThueSystem, s: &[Symbol]) -> Word {
    let mut cur = s.to_vec();
    while let Some((start, end, idx)) = naive_leftmost(sys, &cur) {
        let rhs = &sys.rules()[idx].rhs;
        cur.splice(start - 1..end, rhs.iter().copied());
    }
    cur
}

pub fn context(sys: &ThueSystem, x: &[Symbol]) -> Word {
    [sys.t1(), x, sys.t2()].concat()
}

/// All words of length `0..=max` over the given symbols, shortest first.
pub fn words(symbols: &[Symbol], max: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &layer {
            for &s in symbols {
                let mut v: Word = w.clone();
                v.push(s);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn syms(sys: &ThueSystem, tokens: &[&str]) -> Vec<Symbol> {
    tokens
        .iter()
        .map(|t| sys.alphabet().symbol(t).expect("token"))
        .collect()
}

/// A built-in system, its machine, and its two input symbols.
pub struct Subject {
    pub name: &'static str,
    pub prog: MachineProgram,
    pub inputs: Vec<Symbol>,
}

pub fn subject(name: &'static str) -> Subject {
    let sys = builtin_system(name).expect("builtin");
    let tokens: &[&str] = match name {
        "DYCK" | "AA" => &["a", "b"],
        _ => &["0", "1"],
    };
    let inputs = syms(&sys, tokens);
    Subject {
        name,
        prog: MachineProgram::from_system(&sys),
        inputs,
    }
}

/// Small systems whose machines the corpus runs on.
pub fn toy_subjects() -> Vec<Subject> {
    ["DYCK", "AA", "BITDYCK", "PAIRS", "MIDBIT5"]
        .into_iter()
        .map(subject)
        .collect()
}

/// Exhaustive short inputs plus a few longer structured ones.
pub fn corpus_inputs(s: &Subject, max: usize) -> Vec<Word> {
    let mut out = words(&s.inputs, max);
    let (a, b) = (s.inputs[0], s.inputs[1]);
    for k in [8, 12, 16] {
        out.push([vec![a; k], vec![b; k]].concat());
        out.push([a, b].repeat(k));
        out.push([b, a].repeat(k));
        out.push([vec![a; k], vec![b; k], vec![b; k], vec![a; k]].concat());
    }
    out
}
