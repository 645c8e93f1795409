//! Desk-scale experiments on block-structured inputs: `(w w^R)^{2i+1}`
//! (palpower) and `w^4` (fourthpower).
//!
//! The impossibility arguments these mirror only bite for astronomically
//! large `i` and `m`, so the harness measures and reports: which block
//! depletes first, what the middle-block record looks like and how long its
//! encoding is, and whether equal crossing sequences can be pumped out.

use std::collections::BTreeSet;

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::codec::{
    ceil_log2, compute_constants, encode_residue_record, is_depleted, BitString, CodecError,
    DepletionParams, ResidueRecord,
};
use crate::crossing::{input_of, pump_cut, record_trace, CrossingError, TraceData};
use crate::langs::bits_to_word;
use crate::machine::{h_image, MachineError, MachineProgram, MachineState};
use crate::rewrite::Word;

/// The middle-block tuple `m, i, j, j1, c1, j2, c2, h(y′), ℓ, q`.
pub type MiddleBlockRecord = ResidueRecord;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("w must be nonempty")]
    EmptyWord,
    #[error("system alphabet lacks the bit symbols 0 and 1")]
    NoBits,
    #[error("m = {0} is too large for exhaustive search (limit 12)")]
    TooLarge(usize),
    #[error("precondition not met: {0}")]
    Precondition(String),
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Crossing(#[from] CrossingError),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Palpower,
    Fourthpower,
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "palpower" => Ok(Family::Palpower),
            "fourthpower" => Ok(Family::Fourthpower),
            other => Err(format!("unknown family {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockLayout {
    pub family: Family,
    pub m: usize,
    pub i: usize,
    pub block_count: usize,
    /// Crossing point of every block edge; block `b` spans points
    /// `boundaries[b] ..= boundaries[b + 1]`.
    pub boundaries: Vec<usize>,
    pub middle_index: Option<usize>,
}

impl BlockLayout {
    pub fn inner_blocks(&self) -> std::ops::Range<usize> {
        1..self.block_count - 1
    }

    pub fn block_width(&self, b: usize) -> usize {
        self.boundaries[b + 1] - self.boundaries[b]
    }

    /// Pumping period: `4m = 2|w w^R|` for palpower, `m` for fourthpower.
    pub fn period(&self) -> usize {
        match self.family {
            Family::Palpower => 4 * self.m,
            Family::Fourthpower => self.m,
        }
    }
}

pub fn reverse_bits(w: &[u8]) -> Vec<u8> {
    w.iter().rev().copied().collect()
}

/// The input bits of the family member for `w` and `i`.
pub fn family_bits(family: Family, w: &[u8], i: usize) -> Vec<u8> {
    match family {
        Family::Palpower => {
            let block = [w, &reverse_bits(w)[..]].concat();
            block.repeat(2 * i + 1)
        }
        Family::Fourthpower => w.repeat(4),
    }
}

pub fn build_input(
    prog: &MachineProgram,
    family: Family,
    w: &[u8],
    i: usize,
) -> Result<(Word, BlockLayout), ExperimentError> {
    if w.is_empty() {
        return Err(ExperimentError::EmptyWord);
    }
    let sys = prog.system();
    if sys.alphabet().symbol("0").is_none() || sys.alphabet().symbol("1").is_none() {
        return Err(ExperimentError::NoBits);
    }
    let m = w.len();
    let bits = family_bits(family, w, i);
    let (inner, width) = match family {
        Family::Palpower => (2 * i + 1, 2 * m),
        Family::Fourthpower => (4, m),
    };
    let head = 1 + sys.t1().len();
    let mut boundaries = vec![0, head];
    for b in 1..=inner {
        boundaries.push(head + b * width);
    }
    boundaries.push(prog.tape_len(bits.len()));
    let layout = BlockLayout {
        family,
        m,
        i,
        block_count: inner + 2,
        boundaries,
        middle_index: (family == Family::Palpower).then_some(i + 1),
    };
    Ok((bits_to_word(sys, &bits), layout))
}

/// `β = α / ⌈log2 A⌉` for the program's alphabet.
pub fn beta_for(prog: &MachineProgram, alpha: Rational64) -> Result<Rational64, ExperimentError> {
    let bits = ceil_log2(prog.system().alphabet().len() as u64);
    if bits == 0 {
        return Err(CodecError::AlphabetTooSmall.into());
    }
    Ok(alpha / Rational64::from_integer(i64::from(bits)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockSnapshot {
    pub time: u64,
    pub nonblank: Vec<usize>,
    pub depleted: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FirstDepletion {
    pub time: u64,
    /// Inner blocks depleted at that snapshot.
    pub blocks: Vec<usize>,
    /// More than one inner block crossed the threshold at once.
    pub simultaneous: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DepletionReport {
    pub snapshots: Vec<BlockSnapshot>,
    pub first_depleted: Option<FirstDepletion>,
    pub accepted: bool,
    pub steps: u64,
}

fn snapshot(
    cells: &[crate::machine::Cell],
    layout: &BlockLayout,
    beta: Rational64,
    time: u64,
) -> BlockSnapshot {
    let mut s = BlockSnapshot {
        time,
        nonblank: Vec::with_capacity(layout.block_count),
        depleted: Vec::with_capacity(layout.block_count),
    };
    for b in 0..layout.block_count {
        let (lo, hi) = (layout.boundaries[b], layout.boundaries[b + 1]);
        s.nonblank.push(h_image(&cells[lo..hi]).len());
        s.depleted.push(is_depleted(cells, lo, hi, beta));
    }
    s
}

/// Evaluates every block after initialization, after every REDUCE phase
/// and at halting.
pub fn depletion_monitor(
    prog: &MachineProgram,
    input: &[crate::rewrite::Symbol],
    layout: &BlockLayout,
    alpha: Rational64,
) -> Result<DepletionReport, ExperimentError> {
    let beta = beta_for(prog, alpha)?;
    let mut cfg = prog.initial_config(input);
    let fuel = MachineProgram::default_fuel(cfg.len());
    let mut report = DepletionReport {
        snapshots: Vec::new(),
        first_depleted: None,
        accepted: false,
        steps: 0,
    };
    while !cfg.state.is_halting() {
        if cfg.time >= fuel {
            return Err(MachineError::FuelExhausted { fuel }.into());
        }
        let rec = prog.step(&mut cfg)?;
        let boundary = matches!(
            (rec.before, rec.after),
            (MachineState::InitLeft(_), MachineState::Shift(_))
                | (MachineState::ReduceReturn(_), MachineState::Shift(_))
        ) || rec.after.is_halting();
        if !boundary {
            continue;
        }
        let s = snapshot(&cfg.tape, layout, beta, cfg.time);
        if report.first_depleted.is_none() {
            let blocks: Vec<usize> = layout.inner_blocks().filter(|&b| s.depleted[b]).collect();
            if !blocks.is_empty() {
                report.first_depleted = Some(FirstDepletion {
                    time: cfg.time,
                    simultaneous: blocks.len() > 1,
                    blocks,
                });
            }
        }
        report.snapshots.push(s);
    }
    report.accepted = cfg.state == MachineState::Accept;
    report.steps = cfg.time;
    Ok(report)
}

/// Two input-region points with equal crossing sequences of height `≤ h`
/// whose distance is a multiple of the layout's period. Requires a point of
/// height `≤ h` in every inner block left of the middle (every inner block
/// of the left half for fourthpower).
pub fn find_pump_pair(trace: &TraceData, layout: &BlockLayout, h: usize) -> Option<(usize, usize)> {
    let left_blocks = match layout.family {
        Family::Palpower => 1..=layout.i,
        Family::Fourthpower => 1..=2,
    };
    let low = |p: usize| trace.sequences[p].height() <= h;
    for b in left_blocks {
        if !(layout.boundaries[b]..=layout.boundaries[b + 1]).any(low) {
            return None;
        }
    }
    let lo = layout.boundaries[1];
    let hi = layout.boundaries[layout.block_count - 1];
    let period = layout.period();
    for k1 in (lo..=hi).filter(|&p| low(p)) {
        let mut k2 = k1 + period;
        while k2 <= hi {
            if low(k2) && trace.sequences[k1] == trace.sequences[k2] {
                return Some((k1, k2));
            }
            k2 += period;
        }
    }
    None
}

/// Result of pumping a found pair out of a palpower or fourthpower trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PumpOutcome {
    pub k1: usize,
    pub k2: usize,
    pub verified: bool,
    pub same_family: bool,
    pub shorter_i: Option<usize>,
}

/// Cuts `k1..k2` out and checks that the remainder verifies and is again
/// a member of the family.
pub fn pump_round_trip(
    prog: &MachineProgram,
    trace: &TraceData,
    layout: &BlockLayout,
    w: &[u8],
    k1: usize,
    k2: usize,
) -> Result<PumpOutcome, ExperimentError> {
    let cut = pump_cut(prog, trace, k1, k2)?;
    let verified = crate::crossing::triples_all_compatible(prog, &cut);
    let input = input_of(&cut.cells);
    let sys = prog.system();
    let mut outcome = PumpOutcome {
        k1,
        k2,
        verified,
        same_family: false,
        shorter_i: None,
    };
    match layout.family {
        Family::Palpower => {
            let block = 2 * w.len();
            if input.len().is_multiple_of(block) && (input.len() / block) % 2 == 1 {
                let i2 = (input.len() / block - 1) / 2;
                if input == bits_to_word(sys, &family_bits(Family::Palpower, w, i2)) {
                    outcome.same_family = true;
                    outcome.shorter_i = Some(i2);
                }
            }
        }
        Family::Fourthpower => {
            let reps = input.len() / w.len();
            outcome.same_family =
                input.len().is_multiple_of(w.len()) && input == bits_to_word(sys, &w.repeat(reps));
        }
    }
    Ok(outcome)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedRecord {
    pub record: MiddleBlockRecord,
    pub bits: BitString,
    /// Bits spent on `h(y′)`.
    pub hy_bits: usize,
    /// `α (j2 − j1)`, the depletion budget for `h(y′)`.
    pub hy_budget: Rational64,
}

/// Assembles the record for depleted block `j` from a snapshot trace.
pub fn emit_middle_block_record(
    prog: &MachineProgram,
    trace: &TraceData,
    layout: &BlockLayout,
    params: &DepletionParams,
    j: usize,
) -> Result<EncodedRecord, ExperimentError> {
    if j == 0 || j + 1 >= layout.block_count {
        return Err(ExperimentError::Precondition(format!(
            "block {j} has no neighbours on both sides"
        )));
    }
    let (bj, bj1) = (layout.boundaries[j], layout.boundaries[j + 1]);
    if !is_depleted(&trace.final_cells, bj, bj1, params.beta) {
        return Err(ExperimentError::Precondition(format!(
            "block {j} is not depleted"
        )));
    }
    let low = |p: &usize| trace.sequences[*p].height() <= params.h;
    let j1 = (layout.boundaries[j - 1]..=bj)
        .rev()
        .find(low)
        .ok_or_else(|| {
            ExperimentError::Precondition(format!("no low crossing sequence in block {}", j - 1))
        })?;
    let j2 = (bj1..=layout.boundaries[j + 2]).find(low).ok_or_else(|| {
        ExperimentError::Precondition(format!("no low crossing sequence in block {}", j + 1))
    })?;
    let h_y = h_image(&trace.final_cells[j1..j2]);
    let ell = if trace.head > j1 && trace.head <= j2 {
        h_image(&trace.final_cells[j1..trace.head - 1]).len() + 1
    } else {
        0
    };
    let record = MiddleBlockRecord {
        m: layout.m as u64,
        i: layout.i as u64,
        j: j as u64,
        j1: j1 as u64,
        c1: trace.sequences[j1].clone(),
        j2: j2 as u64,
        c2: trace.sequences[j2].clone(),
        h_y,
        ell: ell as u64,
        q: trace.state,
    };
    let bits = encode_residue_record(prog, &record, params.h)?;
    let hy_bits = record.h_y.len() * crate::codec::symbol_bits(prog) as usize;
    Ok(EncodedRecord {
        hy_budget: params.alpha * Rational64::from_integer((j2 - j1) as i64),
        record,
        bits,
        hy_bits,
    })
}

/// The record of the first depleted inner block, when exactly one block
/// depletes first and the record's preconditions hold.
pub fn first_block_record(
    prog: &MachineProgram,
    input: &[crate::rewrite::Symbol],
    layout: &BlockLayout,
    params: &DepletionParams,
) -> Result<Option<EncodedRecord>, ExperimentError> {
    let report = depletion_monitor(prog, input, layout, params.alpha)?;
    let Some(first) = report.first_depleted else {
        return Ok(None);
    };
    if first.simultaneous {
        return Ok(None);
    }
    let trace = record_trace(prog, input, Some(first.time))?;
    match emit_middle_block_record(prog, &trace, layout, params, first.blocks[0]) {
        Ok(rec) => Ok(Some(rec)),
        Err(ExperimentError::Precondition(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Every `w′` of length `m` whose input (built by `build`) reproduces the
/// target record.
pub fn residue_preimage_search<F>(
    prog: &MachineProgram,
    build: F,
    m: usize,
    params: &DepletionParams,
    target: &MiddleBlockRecord,
) -> Result<BTreeSet<Vec<u8>>, ExperimentError>
where
    F: Fn(&[u8]) -> Result<(Word, BlockLayout), ExperimentError> + Sync,
{
    if m > 12 {
        return Err(ExperimentError::TooLarge(m));
    }
    let found: Result<Vec<Option<Vec<u8>>>, ExperimentError> = crate::langs::all_bitstrings(m)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|w| {
            let (input, layout) = build(&w)?;
            let rec = first_block_record(prog, &input, &layout, params)?;
            Ok(rec.filter(|r| r.record == *target).map(|_| w))
        })
        .collect();
    Ok(found?.into_iter().flatten().collect())
}

/// A fixed pseudo-random bitstring standing in for an incompressible one.
/// Generated by ChaCha8 seeded from `(m, seed)`; it is not claimed hard.
pub fn pseudo_hard_string(m: usize, seed: u64) -> Vec<u8> {
    let mixed = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (m as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(mixed);
    (0..m).map(|_| u8::from(rng.gen::<bool>())).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct RecordJson {
    pub m: u64,
    pub i: u64,
    pub j: u64,
    pub j1: u64,
    pub c1: Vec<String>,
    pub c1_lead: u8,
    pub j2: u64,
    pub c2: Vec<String>,
    pub c2_lead: u8,
    pub h_y: String,
    pub ell: u64,
    pub q: String,
    pub bits: String,
    pub bit_length: usize,
    pub hy_bits: usize,
    pub hy_budget: String,
    pub six_m_sevenths: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub family: Family,
    pub w: String,
    pub i: usize,
    pub m: usize,
    pub n: usize,
    pub alpha: String,
    pub beta: String,
    pub h: usize,
    pub k: usize,
    pub d: usize,
    pub state_bits: u32,
    pub layout: BlockLayout,
    pub depletion: DepletionReport,
    pub record: Option<RecordJson>,
    pub record_note: Option<String>,
    pub pump: Option<PumpOutcome>,
}

fn record_json(prog: &MachineProgram, enc: &EncodedRecord) -> RecordJson {
    let r = &enc.record;
    let names =
        |c: &crate::crossing::CrossingSequence| c.states.iter().map(|s| s.to_string()).collect();
    RecordJson {
        m: r.m,
        i: r.i,
        j: r.j,
        j1: r.j1,
        c1: names(&r.c1),
        c1_lead: u8::from(r.c1.lead),
        j2: r.j2,
        c2: names(&r.c2),
        c2_lead: u8::from(r.c2.lead),
        h_y: prog.system().alphabet().render(&r.h_y),
        ell: r.ell,
        q: r.q.to_string(),
        bits: enc.bits.to_string(),
        bit_length: enc.bits.len(),
        hy_bits: enc.hy_bits,
        hy_budget: enc.hy_budget.to_string(),
        six_m_sevenths: Rational64::new(6 * r.m as i64, 7).to_string(),
    }
}

/// Runs the full pipeline for one family member and collects a report.
pub fn run_experiment(
    prog: &MachineProgram,
    family: Family,
    w: &[u8],
    i: usize,
    alpha: Rational64,
) -> Result<ExperimentReport, ExperimentError> {
    let sys = prog.system();
    let params = compute_constants(alpha, sys.alphabet().len(), sys.max_redex_len())?;
    let (input, layout) = build_input(prog, family, w, i)?;
    let depletion = depletion_monitor(prog, &input, &layout, alpha)?;
    let mut record = None;
    let mut record_note = None;
    let mut pump = None;
    match &depletion.first_depleted {
        None => record_note = Some("no inner block depleted".into()),
        Some(first) if first.simultaneous => {
            record_note = Some(format!("blocks {:?} depleted simultaneously", first.blocks));
        }
        Some(first) => {
            let trace = record_trace(prog, &input, Some(first.time))?;
            match emit_middle_block_record(prog, &trace, &layout, &params, first.blocks[0]) {
                Ok(enc) => record = Some(record_json(prog, &enc)),
                Err(ExperimentError::Precondition(msg)) => record_note = Some(msg),
                Err(e) => return Err(e),
            }
            if let Some((k1, k2)) = find_pump_pair(&trace, &layout, params.h) {
                pump = Some(pump_round_trip(prog, &trace, &layout, w, k1, k2)?);
            }
        }
    }
    Ok(ExperimentReport {
        family,
        w: crate::langs::render_bits(w),
        i,
        m: w.len(),
        n: prog.tape_len(input.len()),
        alpha: alpha.to_string(),
        beta: params.beta.to_string(),
        h: params.h,
        k: params.k,
        d: params.d,
        state_bits: prog.state_bits(),
        layout,
        depletion,
        record,
        record_note,
        pump,
    })
}
