//! Crossing sequences and the cut-and-paste machinery built on them.
//!
//! Squares are numbered `1..=n` over the initial redex, starting with `¢`.
//! Crossing point `i` sits between squares `i` and `i + 1`, so points run
//! `0..=n`; the head never leaves `1..=n`, hence points `0` and `n` are
//! never crossed. A point left of the initial square (index `≤ |¢ t1|`) has
//! leading bit 0, every other point leading bit 1.
//!
//! [`TraceData::cells`] holds the tape at time 0, before the machine has
//! written `¢ t1` and `t2 $`. The initialization sweeps are recorded in the
//! crossing sequences, so replaying from the time-0 tape reproduces them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::{
    h_image, Cell, Configuration, MachineError, MachineProgram, MachineState, Move, RunOptions,
};
use crate::rewrite::{Symbol, Word};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CrossingSequence {
    /// The leading bit: `true` for 1 (first crossing is rightward).
    pub lead: bool,
    pub states: Vec<MachineState>,
}

impl CrossingSequence {
    pub fn empty(lead: bool) -> Self {
        CrossingSequence {
            lead,
            states: Vec::new(),
        }
    }

    pub fn height(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Crossing data of a partial computation: `c_0, a_1, c_1, …, a_n, c_n`
/// plus where the computation stood when the snapshot was taken.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceData {
    /// Time-0 contents of squares `1..=n`.
    pub cells: Vec<Cell>,
    /// `sequences[i]` is the crossing sequence at point `i`, `0 ≤ i ≤ n`.
    pub sequences: Vec<CrossingSequence>,
    pub head: usize,
    pub state: MachineState,
    pub time: u64,
    pub final_cells: Vec<Cell>,
}

impl TraceData {
    pub fn n(&self) -> usize {
        self.cells.len()
    }

    /// Sum of all heights; equals `time` for a recorded trace.
    pub fn total_height(&self) -> usize {
        self.sequences.iter().map(|c| c.height()).sum()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CrossingError {
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error("requested time {requested} but the run halts at {halted}")]
    TimeBeyondHalt { requested: u64, halted: u64 },
    #[error("split |u|={u}, |v|={v} does not fit a redex of length {n}")]
    SplitOutOfRange { u: usize, v: usize, n: usize },
    #[error("cut points must satisfy i < j (got {i}, {j})")]
    EmptyCut { i: usize, j: usize },
    #[error("crossing sequences at points {i} and {j} differ")]
    UnequalSequences { i: usize, j: usize },
    #[error("cut {i}..{j} leaves the input region")]
    CutOutsideInput { i: usize, j: usize },
    #[error("residues differ in {0}")]
    ResiduesDiffer(&'static str),
    #[error("spliced redex is not of the form ¢ t1 x t2 $")]
    IllFormedSplice,
    #[error("inconsistent crossing data: {0}")]
    Inconsistent(String),
    #[error("bad trace file: {0}")]
    BadTrace(String),
}

/// Leading bit of crossing point `i` given the initial square `s0`.
pub fn lead_bit(point: usize, s0: usize) -> bool {
    point >= s0
}

/// Runs the machine on `x` up to `stop` steps (or to halting) and records
/// every crossing.
pub fn record_trace(
    prog: &MachineProgram,
    x: &[Symbol],
    stop: Option<u64>,
) -> Result<TraceData, CrossingError> {
    let cfg = prog.initial_config(x);
    record_from(prog, cfg, stop)
}

fn record_from(
    prog: &MachineProgram,
    mut cfg: Configuration,
    stop: Option<u64>,
) -> Result<TraceData, CrossingError> {
    let n = cfg.len();
    let s0 = prog.initial_square();
    let cells = cfg.tape.clone();
    let mut sequences: Vec<CrossingSequence> = (0..=n)
        .map(|i| CrossingSequence::empty(lead_bit(i, s0)))
        .collect();
    let fuel = MachineProgram::default_fuel(n);
    while !cfg.state.is_halting() && stop.is_none_or(|t| cfg.time < t) {
        if cfg.time >= fuel {
            return Err(MachineError::FuelExhausted { fuel }.into());
        }
        let rec = prog.step(&mut cfg)?;
        sequences[rec.point()].states.push(rec.after);
    }
    if let Some(t) = stop {
        if cfg.time < t {
            return Err(CrossingError::TimeBeyondHalt {
                requested: t,
                halted: cfg.time,
            });
        }
    }
    Ok(TraceData {
        cells,
        sequences,
        head: cfg.head,
        state: cfg.state,
        time: cfg.time,
        final_cells: cfg.tape,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub consistent: bool,
    /// Tape contents when the replay stopped.
    pub final_cells: Vec<Cell>,
    /// `I_i`: states cancelled from each `c_i`.
    pub cancelled: Vec<usize>,
    /// Square scanned when the replay stopped (only if consistent).
    pub end_square: Option<usize>,
    pub end_state: MachineState,
    pub steps: u64,
    pub reason: Option<String>,
}

fn structure_problem(prog: &MachineProgram, trace: &TraceData) -> Option<String> {
    let n = trace.n();
    if n < 2 {
        return Some("tape shorter than two squares".into());
    }
    if trace.sequences.len() != n + 1 {
        return Some(format!(
            "{} crossing sequences for {n} squares",
            trace.sequences.len()
        ));
    }
    let s0 = prog.initial_square();
    if s0 > n {
        return Some("initial square outside the tape".into());
    }
    for (i, c) in trace.sequences.iter().enumerate() {
        if c.lead != lead_bit(i, s0) {
            return Some(format!("wrong leading bit at point {i}"));
        }
    }
    if !trace.sequences[0].is_empty() || !trace.sequences[n].is_empty() {
        return Some("outermost crossing sequences are not empty".into());
    }
    None
}

/// Replays the computation from the time-0 cells and cancels each new state
/// against the crossing sequence of the point it crosses.
pub fn full_verification(prog: &MachineProgram, trace: &TraceData) -> VerificationReport {
    let n = trace.n();
    let mut report = VerificationReport {
        consistent: false,
        final_cells: trace.cells.clone(),
        cancelled: vec![0; trace.sequences.len()],
        end_square: None,
        end_state: prog.initial_state(),
        steps: 0,
        reason: None,
    };
    if let Some(problem) = structure_problem(prog, trace) {
        report.reason = Some(problem);
        return report;
    }
    let mut head = prog.initial_square();
    let mut state = prog.initial_state();
    loop {
        if state.is_halting() {
            break;
        }
        let cell = report.final_cells[head - 1];
        let Some(ins) = prog.instruction(state, cell) else {
            break;
        };
        let point = match ins.mv {
            Move::Left => head - 1,
            Move::Right => head,
        };
        let seq = &trace.sequences[point].states;
        let used = report.cancelled[point];
        if used == seq.len() {
            break;
        }
        if seq[used] != ins.next {
            report.end_state = state;
            report.reason = Some(format!(
                "state {} at point {point} does not match {}",
                ins.next, seq[used]
            ));
            return report;
        }
        report.cancelled[point] += 1;
        report.final_cells[head - 1] = ins.write;
        head = if point == head { head + 1 } else { head - 1 };
        state = ins.next;
        report.steps += 1;
        debug_assert!(head >= 1 && head <= n);
    }
    report.end_state = state;
    let leftover = trace
        .sequences
        .iter()
        .zip(&report.cancelled)
        .position(|(c, &used)| used != c.height());
    match leftover {
        None => {
            report.consistent = true;
            report.end_square = Some(head);
        }
        Some(i) => report.reason = Some(format!("states left uncancelled at point {i}")),
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalReport {
    pub consistent: bool,
    pub final_cell: Cell,
    pub ends_here: bool,
}

/// Simulates only the visits to square `k`, taking entry states from the
/// neighbouring crossing sequences and cancelling exit states against them.
pub fn local_verification(
    prog: &MachineProgram,
    k: usize,
    c_left: &CrossingSequence,
    a_k: Cell,
    c_right: &CrossingSequence,
) -> LocalReport {
    let s0 = prog.initial_square();
    let mut cell = a_k;
    let (mut il, mut ir) = (0usize, 0usize);
    let inconsistent = |cell| LocalReport {
        consistent: false,
        final_cell: cell,
        ends_here: false,
    };
    if c_left.lead != lead_bit(k.wrapping_sub(1), s0) || c_right.lead != lead_bit(k, s0) {
        return inconsistent(cell);
    }
    // Where the head is when not on square k; k > s0 means it starts left.
    let mut side = if k > s0 { Move::Left } else { Move::Right };
    let mut state = None;
    if k == s0 {
        state = Some(prog.initial_state());
    }
    let inside = loop {
        match state {
            None => {
                let (seq, idx) = match side {
                    Move::Left => (&c_left.states, &mut il),
                    Move::Right => (&c_right.states, &mut ir),
                };
                if *idx == seq.len() {
                    break false;
                }
                state = Some(seq[*idx]);
                *idx += 1;
            }
            Some(q) => {
                if q.is_halting() {
                    break true;
                }
                let Some(ins) = prog.instruction(q, cell) else {
                    break true;
                };
                let (seq, idx) = match ins.mv {
                    Move::Left => (&c_left.states, &mut il),
                    Move::Right => (&c_right.states, &mut ir),
                };
                if *idx == seq.len() {
                    break true;
                }
                if seq[*idx] != ins.next {
                    return inconsistent(cell);
                }
                *idx += 1;
                cell = ins.write;
                side = ins.mv;
                state = None;
            }
        }
    };
    let consistent = il == c_left.height() && ir == c_right.height();
    LocalReport {
        consistent,
        final_cell: cell,
        ends_here: consistent && inside,
    }
}

/// Local verification at every square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalSummary {
    pub compatible: bool,
    pub final_cells: Vec<Cell>,
    pub end_squares: Vec<usize>,
}

pub fn local_summary(prog: &MachineProgram, trace: &TraceData) -> LocalSummary {
    let structural = structure_problem(prog, trace).is_none();
    let mut summary = LocalSummary {
        compatible: structural,
        final_cells: Vec::with_capacity(trace.n()),
        end_squares: Vec::new(),
    };
    if !structural {
        summary.final_cells = trace.cells.clone();
        return summary;
    }
    for k in 1..=trace.n() {
        let r = local_verification(
            prog,
            k,
            &trace.sequences[k - 1],
            trace.cells[k - 1],
            &trace.sequences[k],
        );
        summary.compatible &= r.consistent;
        summary.final_cells.push(r.final_cell);
        if r.ends_here {
            summary.end_squares.push(k);
        }
    }
    summary
}

pub fn triples_all_compatible(prog: &MachineProgram, trace: &TraceData) -> bool {
    if structure_problem(prog, trace).is_some() {
        return false;
    }
    (1..=trace.n()).all(|k| {
        local_verification(
            prog,
            k,
            &trace.sequences[k - 1],
            trace.cells[k - 1],
            &trace.sequences[k],
        )
        .consistent
    })
}

/// Crossing points `i..=j` whose squares `i+1..=j` all hold input symbols.
fn input_points(prog: &MachineProgram, n: usize) -> (usize, usize) {
    let s0 = prog.initial_square();
    let sys = prog.system();
    let x_len = n - sys.t1().len() - sys.t2().len() - 2;
    (s0 - 1, s0 - 1 + x_len)
}

/// Pairs `i < j` of input-region points with identical crossing sequences.
pub fn equal_pairs(prog: &MachineProgram, trace: &TraceData) -> Vec<(usize, usize)> {
    let (lo, hi) = input_points(prog, trace.n());
    let mut pairs = Vec::new();
    for i in lo..=hi {
        for j in i + 1..=hi {
            if trace.sequences[i] == trace.sequences[j] {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Removes squares `i+1..=j` and crossing points `i+1..=j` from a trace
/// with `c_i = c_j`. Head, state, time and final cells of the result come
/// from replaying the cut data.
pub fn pump_cut(
    prog: &MachineProgram,
    trace: &TraceData,
    i: usize,
    j: usize,
) -> Result<TraceData, CrossingError> {
    if i >= j {
        return Err(CrossingError::EmptyCut { i, j });
    }
    let (lo, hi) = input_points(prog, trace.n());
    if i < lo || j > hi {
        return Err(CrossingError::CutOutsideInput { i, j });
    }
    if trace.sequences[i] != trace.sequences[j] {
        return Err(CrossingError::UnequalSequences { i, j });
    }
    let cells: Vec<Cell> = trace.cells[..i]
        .iter()
        .chain(&trace.cells[j..])
        .copied()
        .collect();
    let sequences: Vec<CrossingSequence> = trace.sequences[..=i]
        .iter()
        .chain(&trace.sequences[j + 1..])
        .cloned()
        .collect();
    let mut cut = TraceData {
        cells,
        sequences,
        head: 0,
        state: prog.initial_state(),
        time: 0,
        final_cells: Vec::new(),
    };
    let report = full_verification(prog, &cut);
    if !report.consistent {
        return Err(CrossingError::Inconsistent(
            report.reason.unwrap_or_default(),
        ));
    }
    cut.head = report.end_square.unwrap_or(prog.initial_square());
    cut.state = report.end_state;
    cut.time = report.steps;
    cut.final_cells = report.final_cells;
    Ok(cut)
}

/// The input encoded by a time-0 tape: its non-blank symbols.
pub fn input_of(cells: &[Cell]) -> Word {
    h_image(cells)
}

/// `|v|, c1, h(z), c2, ℓ, q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Residue {
    pub len_v: usize,
    pub c1: CrossingSequence,
    pub h_z: Word,
    pub c2: CrossingSequence,
    pub ell: usize,
    pub q: MachineState,
}

impl Residue {
    /// Residue of the footprint `|u|+1 ..= |u|+|v|` in a recorded trace.
    pub fn from_trace(
        trace: &TraceData,
        u_len: usize,
        v_len: usize,
    ) -> Result<Residue, CrossingError> {
        let n = trace.n();
        if u_len + v_len > n {
            return Err(CrossingError::SplitOutOfRange {
                u: u_len,
                v: v_len,
                n,
            });
        }
        let z = &trace.final_cells[u_len..u_len + v_len];
        let inside = trace.head > u_len && trace.head <= u_len + v_len;
        let ell = if inside {
            h_image(&trace.final_cells[u_len..trace.head - 1]).len() + 1
        } else {
            0
        };
        Ok(Residue {
            len_v: v_len,
            c1: trace.sequences[u_len].clone(),
            h_z: h_image(z),
            c2: trace.sequences[u_len + v_len].clone(),
            ell,
            q: trace.state,
        })
    }

    /// Name of the first component in which two residues differ.
    pub fn first_difference(&self, other: &Residue) -> Option<&'static str> {
        if self.len_v != other.len_v {
            Some("|v|")
        } else if self.c1 != other.c1 {
            Some("c1")
        } else if self.h_z != other.h_z {
            Some("h(z)")
        } else if self.c2 != other.c2 {
            Some("c2")
        } else if self.ell != other.ell {
            Some("ell")
        } else if self.q != other.q {
            Some("q")
        } else {
            None
        }
    }
}

/// An input with a split `u v w` of its initial redex and a snapshot time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub input: Word,
    pub u_len: usize,
    pub v_len: usize,
    pub time: u64,
}

pub fn extract_residue(prog: &MachineProgram, split: &Split) -> Result<Residue, CrossingError> {
    let n = prog.tape_len(split.input.len());
    if split.u_len + split.v_len > n {
        return Err(CrossingError::SplitOutOfRange {
            u: split.u_len,
            v: split.v_len,
            n,
        });
    }
    let trace = record_trace(prog, &split.input, Some(split.time))?;
    Residue::from_trace(&trace, split.u_len, split.v_len)
}

/// `¢ t1 x t2 $` as cells.
pub fn initial_redex(prog: &MachineProgram, x: &[Symbol]) -> Vec<Cell> {
    let sys = prog.system();
    std::iter::once(Cell::Cent)
        .chain(
            sys.t1()
                .iter()
                .chain(x)
                .chain(sys.t2())
                .map(|&s| Cell::plain(s)),
        )
        .chain(std::iter::once(Cell::Dollar))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpliceOutcome {
    pub input: Word,
    pub residue: Residue,
    pub original_normal_form: Word,
    pub spliced_normal_form: Word,
    pub original_accepted: bool,
    pub spliced_accepted: bool,
}

impl SpliceOutcome {
    pub fn same_reduct(&self) -> bool {
        self.original_normal_form == self.spliced_normal_form
    }
}

/// Replaces `v` in the first split by `v′` of the second, provided their
/// residues agree, and runs the machine on both `u v w` and `u v′ w`.
pub fn splice(
    prog: &MachineProgram,
    first: &Split,
    second: &Split,
) -> Result<SpliceOutcome, CrossingError> {
    let r1 = extract_residue(prog, first)?;
    let r2 = extract_residue(prog, second)?;
    if let Some(component) = r1.first_difference(&r2) {
        return Err(CrossingError::ResiduesDiffer(component));
    }
    let redex1 = initial_redex(prog, &first.input);
    let redex2 = initial_redex(prog, &second.input);
    let (u, rest) = redex1.split_at(first.u_len);
    let w = &rest[first.v_len..];
    let v2 = &redex2[second.u_len..second.u_len + second.v_len];
    let spliced: Vec<Cell> = u.iter().chain(v2).chain(w).copied().collect();
    let input = strip_context(prog, &spliced).ok_or(CrossingError::IllFormedSplice)?;
    let a = prog.run(&first.input, RunOptions::default())?;
    let b = prog.run(&input, RunOptions::default())?;
    Ok(SpliceOutcome {
        input,
        residue: r1,
        original_normal_form: a.h_image,
        spliced_normal_form: b.h_image,
        original_accepted: a.accepted,
        spliced_accepted: b.accepted,
    })
}

fn strip_context(prog: &MachineProgram, redex: &[Cell]) -> Option<Word> {
    let sys = prog.system();
    let inner = redex
        .strip_prefix(&[Cell::Cent])?
        .strip_suffix(&[Cell::Dollar])?;
    let mut word = Vec::with_capacity(inner.len());
    for c in inner {
        match c {
            Cell::Plain(_) => word.push(c.image()?),
            _ => return None,
        }
    }
    let word = word.strip_prefix(sys.t1())?.strip_suffix(sys.t2())?;
    Some(word.to_vec())
}

#[derive(Serialize, Deserialize)]
struct SequenceFile {
    point: usize,
    lead: u8,
    states: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct TraceFile {
    n: usize,
    cells: Vec<String>,
    sequences: Vec<SequenceFile>,
    head: usize,
    state: String,
    time: u64,
    #[serde(default, rename = "final", skip_serializing_if = "Option::is_none")]
    final_cells: Option<Vec<String>>,
}

/// Serializes a trace; empty sequences are omitted.
pub fn trace_to_json(prog: &MachineProgram, trace: &TraceData) -> String {
    let file = TraceFile {
        n: trace.n(),
        cells: trace.cells.iter().map(|&c| prog.render_cell(c)).collect(),
        sequences: trace
            .sequences
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_empty())
            .map(|(point, c)| SequenceFile {
                point,
                lead: u8::from(c.lead),
                states: c.states.iter().map(|s| s.to_string()).collect(),
            })
            .collect(),
        head: trace.head,
        state: trace.state.to_string(),
        time: trace.time,
        final_cells: Some(
            trace
                .final_cells
                .iter()
                .map(|&c| prog.render_cell(c))
                .collect(),
        ),
    };
    serde_json::to_string_pretty(&file).expect("trace serializes")
}

pub fn trace_from_json(prog: &MachineProgram, text: &str) -> Result<TraceData, CrossingError> {
    let bad = |m: String| CrossingError::BadTrace(m);
    let file: TraceFile = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let parse_cells = |tokens: &[String]| -> Result<Vec<Cell>, CrossingError> {
        tokens
            .iter()
            .map(|t| {
                prog.parse_cell(t)
                    .ok_or_else(|| bad(format!("unknown cell {t:?}")))
            })
            .collect()
    };
    let cells = parse_cells(&file.cells)?;
    if cells.len() != file.n {
        return Err(bad(format!("n = {} but {} cells", file.n, cells.len())));
    }
    let s0 = prog.initial_square();
    let mut sequences: Vec<CrossingSequence> = (0..=file.n)
        .map(|i| CrossingSequence::empty(lead_bit(i, s0)))
        .collect();
    for seq in file.sequences {
        let slot = sequences
            .get_mut(seq.point)
            .ok_or_else(|| bad(format!("point {} out of range", seq.point)))?;
        slot.lead = match seq.lead {
            0 => false,
            1 => true,
            other => return Err(bad(format!("leading bit {other}"))),
        };
        slot.states = seq
            .states
            .iter()
            .map(|s| prog.parse_state(s).map_err(|e| bad(e.to_string())))
            .collect::<Result<_, _>>()?;
    }
    let state = prog
        .parse_state(&file.state)
        .map_err(|e| bad(e.to_string()))?;
    let final_cells = match file.final_cells {
        Some(tokens) => parse_cells(&tokens)?,
        None => cells.clone(),
    };
    if final_cells.len() != file.n {
        return Err(bad("final cells have the wrong length".into()));
    }
    Ok(TraceData {
        cells,
        sequences,
        head: file.head,
        state,
        time: file.time,
        final_cells,
    })
}
