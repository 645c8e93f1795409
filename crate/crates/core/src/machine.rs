//! The 1-tape reduction machine compiled from a Thue system and its redex
//! automaton.
//!
//! The machine first builds the initial redex `¢ t1 x t2 $` in place
//! (`InitRight` appends `t2 $`, `InitLeft` prefixes `¢ t1`), then alternates
//! SHIFT and REDUCE phases until the head reaches `$`, and finally compares
//! the surviving symbols with `t3` in a single leftward sweep.
//!
//! Between phases the tape has the shape `α q β`: the cells left of the
//! head are `¢` followed by compound cells whose automaton states are
//! historical, the head cell and everything right of it are plain cells
//! ending in `$`. Every instruction moves the head, and the head never
//! leaves squares `1..=n`.
//!
//! The transition table is total over the states and cells the machine can
//! meet; [`MachineProgram::instruction`] returns `None` for combinations
//! that no run reaches, which the simulator treats as a halt.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dfa::{DfaState, Letter, RedexDfa};
use crate::rewrite::{RuleId, Symbol, ThueSystem, Word};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cell {
    Cent,
    Dollar,
    Plain(Letter),
    Compound(Letter, DfaState),
}

impl Cell {
    pub const BLANK: Cell = Cell::Plain(Letter::Blank);

    pub fn is_blank(self) -> bool {
        matches!(
            self,
            Cell::Plain(Letter::Blank) | Cell::Compound(Letter::Blank, _)
        )
    }

    /// The homomorphic image `h` of a single cell.
    pub fn image(self) -> Option<Symbol> {
        match self {
            Cell::Plain(Letter::Sym(s)) | Cell::Compound(Letter::Sym(s), _) => Some(s),
            _ => None,
        }
    }

    pub fn plain(s: Symbol) -> Cell {
        Cell::Plain(Letter::Sym(s))
    }
}

/// `h`: projects compound cells to their symbol and erases blanks and
/// sentinels.
pub fn h_image(cells: &[Cell]) -> Word {
    cells.iter().filter_map(|c| c.image()).collect()
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    Left,
    Right,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MachineState {
    /// Walking right over `x`, then writing `t2` and `$`; the payload is the
    /// number of `t2` symbols written so far.
    InitRight(u32),
    /// Walking left, then writing `t1` reversed and `¢`.
    InitLeft(u32),
    /// Shifting with the automaton state of the rightmost compound cell.
    Shift(DfaState),
    /// Rewriting the redex footprint right to left.
    ReduceWrite {
        rule: RuleId,
        v_left: u32,
        u_left: u32,
    },
    /// One square left of the footprint, reading the automaton state.
    ReducePeek(RuleId),
    /// Back on the first footprint cell, about to resume shifting.
    ReduceReturn(DfaState),
    /// Comparing with `t3` right to left; the payload counts matched symbols.
    Final(u32),
    Accept,
    Reject,
}

impl MachineState {
    pub fn is_halting(self) -> bool {
        matches!(self, MachineState::Accept | MachineState::Reject)
    }

    pub fn is_reduce(self) -> bool {
        matches!(
            self,
            MachineState::ReduceWrite { .. }
                | MachineState::ReducePeek(_)
                | MachineState::ReduceReturn(_)
        )
    }

    pub fn is_init(self) -> bool {
        matches!(self, MachineState::InitRight(_) | MachineState::InitLeft(_))
    }
}

impl fmt::Display for MachineState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MachineState::InitRight(p) => write!(f, "InitRight:{p}"),
            MachineState::InitLeft(p) => write!(f, "InitLeft:{p}"),
            MachineState::Shift(k) => write!(f, "Shift:{}", k.0),
            MachineState::ReduceWrite {
                rule,
                v_left,
                u_left,
            } => write!(f, "ReduceWrite:{rule}:{v_left}:{u_left}"),
            MachineState::ReducePeek(r) => write!(f, "ReducePeek:{r}"),
            MachineState::ReduceReturn(k) => write!(f, "ReduceReturn:{}", k.0),
            MachineState::Final(p) => write!(f, "Final:{p}"),
            MachineState::Accept => write!(f, "Accept"),
            MachineState::Reject => write!(f, "Reject"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed state name {0:?}")]
pub struct StateParseError(pub String);

impl FromStr for MachineState {
    type Err = StateParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || StateParseError(s.to_string());
        let mut parts = s.split(':');
        let tag = parts.next().ok_or_else(err)?;
        let nums: Vec<u32> = parts
            .map(|p| p.parse::<u32>().map_err(|_| err()))
            .collect::<Result<_, _>>()?;
        let state = match (tag, nums.as_slice()) {
            ("InitRight", [p]) => MachineState::InitRight(*p),
            ("InitLeft", [p]) => MachineState::InitLeft(*p),
            ("Shift", [k]) => MachineState::Shift(DfaState(*k)),
            ("ReduceWrite", [r, v, u]) => MachineState::ReduceWrite {
                rule: *r as RuleId,
                v_left: *v,
                u_left: *u,
            },
            ("ReducePeek", [r]) => MachineState::ReducePeek(*r as RuleId),
            ("ReduceReturn", [k]) => MachineState::ReduceReturn(DfaState(*k)),
            ("Final", [p]) => MachineState::Final(*p),
            ("Accept", []) => MachineState::Accept,
            ("Reject", []) => MachineState::Reject,
            _ => return Err(err()),
        };
        Ok(state)
    }
}

/// One quintuple: what to write, where to move, which state to enter.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Instruction {
    pub write: Cell,
    pub mv: Move,
    pub next: MachineState,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("the machine has already halted")]
    Halted,
    #[error("no instruction for state {state} on {cell:?} at time {time}")]
    NoInstruction {
        state: MachineState,
        cell: Cell,
        time: u64,
    },
    #[error("fuel of {fuel} steps exhausted")]
    FuelExhausted { fuel: u64 },
    #[error("audit failure at time {time}: {message}")]
    Audit { time: u64, message: String },
    #[error("illegal blank insertion: {0}")]
    BadInsertion(String),
}

/// The compiled machine. Holds the system and automaton it was built from;
/// states are numbered densely for the crossing-sequence codecs.
#[derive(Clone, Debug)]
pub struct MachineProgram {
    sys: ThueSystem,
    dfa: RedexDfa,
    shift_base: u32,
    write_base: u32,
    write_offsets: Vec<u32>,
    peek_base: u32,
    return_base: u32,
    final_base: u32,
    accept_index: u32,
    state_count: u32,
}

impl MachineProgram {
    pub fn compile(sys: &ThueSystem, dfa: &RedexDfa) -> MachineProgram {
        let t1 = sys.t1().len() as u32;
        let t2 = sys.t2().len() as u32;
        let t3 = sys.t3().len() as u32;
        let k = dfa.state_count() as u32;
        let shift_base = (t2 + 1) + (t1 + 1);
        let write_base = shift_base + k;
        let mut write_offsets = Vec::with_capacity(sys.rules().len() + 1);
        let mut acc = 0u32;
        for rule in sys.rules() {
            write_offsets.push(acc);
            acc += Self::write_block(rule.lhs.len(), rule.rhs.len());
        }
        write_offsets.push(acc);
        let peek_base = write_base + acc;
        let return_base = peek_base + sys.rules().len() as u32;
        let final_base = return_base + k;
        let accept_index = final_base + t3 + 1;
        MachineProgram {
            sys: sys.clone(),
            dfa: dfa.clone(),
            shift_base,
            write_base,
            write_offsets,
            peek_base,
            return_base,
            final_base,
            accept_index,
            state_count: accept_index + 2,
        }
    }

    /// Convenience: build the automaton and compile in one go.
    pub fn from_system(sys: &ThueSystem) -> MachineProgram {
        MachineProgram::compile(sys, &RedexDfa::build(sys))
    }

    // ReduceWrite payloads: v_left in 0..=|v|, u_left in 1..|u|.
    fn write_block(u: usize, v: usize) -> u32 {
        ((v + 1) * u.saturating_sub(1)) as u32
    }

    pub fn system(&self) -> &ThueSystem {
        &self.sys
    }

    pub fn dfa(&self) -> &RedexDfa {
        &self.dfa
    }

    pub fn initial_state(&self) -> MachineState {
        MachineState::InitRight(0)
    }

    /// Square of the initial head position, `|¢ t1| + 1`.
    pub fn initial_square(&self) -> usize {
        self.sys.t1().len() + 2
    }

    /// Tape length `n = |¢ t1 x t2 $|` for an input of the given length.
    pub fn tape_len(&self, input_len: usize) -> usize {
        self.sys.t1().len() + input_len + self.sys.t2().len() + 2
    }

    pub fn state_count(&self) -> usize {
        self.state_count as usize
    }

    /// `Q`: the smallest integer with `state_count < 2^Q`.
    pub fn state_bits(&self) -> u32 {
        let mut q = 0;
        while (1u64 << q) <= self.state_count as u64 {
            q += 1;
        }
        q
    }

    pub fn state_index(&self, state: MachineState) -> Option<u32> {
        let t1 = self.sys.t1().len() as u32;
        let t2 = self.sys.t2().len() as u32;
        let t3 = self.sys.t3().len() as u32;
        let k = self.dfa.state_count() as u32;
        let idx = match state {
            MachineState::InitRight(p) if p <= t2 => p,
            MachineState::InitLeft(p) if p <= t1 => t2 + 1 + p,
            MachineState::Shift(d) if d.0 < k => self.shift_base + d.0,
            MachineState::ReduceWrite {
                rule,
                v_left,
                u_left,
            } if rule < self.sys.rules().len() => {
                let r = self.sys.rule(rule);
                let (u, v) = (r.lhs.len() as u32, r.rhs.len() as u32);
                if v_left > v || u_left == 0 || u_left >= u {
                    return None;
                }
                self.write_base + self.write_offsets[rule] + (u_left - 1) * (v + 1) + v_left
            }
            MachineState::ReducePeek(rule) if rule < self.sys.rules().len() => {
                self.peek_base + rule as u32
            }
            MachineState::ReduceReturn(d) if d.0 < k => self.return_base + d.0,
            MachineState::Final(p) if p <= t3 => self.final_base + p,
            MachineState::Accept => self.accept_index,
            MachineState::Reject => self.accept_index + 1,
            _ => return None,
        };
        Some(idx)
    }

    pub fn state_at(&self, index: u32) -> Option<MachineState> {
        let t2 = self.sys.t2().len() as u32;
        let state = if index < t2 + 1 {
            MachineState::InitRight(index)
        } else if index < self.shift_base {
            MachineState::InitLeft(index - t2 - 1)
        } else if index < self.write_base {
            MachineState::Shift(DfaState(index - self.shift_base))
        } else if index < self.peek_base {
            let off = index - self.write_base;
            // last rule whose block starts at or before `off`
            let rule = self.write_offsets.partition_point(|&o| o <= off) - 1;
            let v = self.sys.rule(rule).rhs.len() as u32;
            let local = off - self.write_offsets[rule];
            MachineState::ReduceWrite {
                rule,
                v_left: local % (v + 1),
                u_left: local / (v + 1) + 1,
            }
        } else if index < self.return_base {
            MachineState::ReducePeek((index - self.peek_base) as RuleId)
        } else if index < self.final_base {
            MachineState::ReduceReturn(DfaState(index - self.return_base))
        } else if index < self.accept_index {
            MachineState::Final(index - self.final_base)
        } else if index == self.accept_index {
            MachineState::Accept
        } else if index == self.accept_index + 1 {
            MachineState::Reject
        } else {
            return None;
        };
        Some(state)
    }

    pub fn states(&self) -> impl Iterator<Item = MachineState> + '_ {
        (0..self.state_count).map(|i| self.state_at(i).unwrap())
    }

    /// Parses a state name and checks it belongs to this program.
    pub fn parse_state(&self, name: &str) -> Result<MachineState, StateParseError> {
        let state: MachineState = name.parse()?;
        match self.state_index(state) {
            Some(_) => Ok(state),
            None => Err(StateParseError(name.to_string())),
        }
    }

    pub fn instruction(&self, state: MachineState, cell: Cell) -> Option<Instruction> {
        use MachineState::*;
        let go = |write, mv, next| Some(Instruction { write, mv, next });
        let k0 = self.dfa.initial();
        match (state, cell) {
            (InitRight(0), Cell::Plain(Letter::Sym(_))) => go(cell, Move::Right, InitRight(0)),
            (InitRight(p), Cell::Plain(Letter::Blank)) => {
                let t2 = self.sys.t2();
                match t2.get(p as usize) {
                    Some(&s) => go(Cell::plain(s), Move::Right, InitRight(p + 1)),
                    None if p as usize == t2.len() => go(Cell::Dollar, Move::Left, InitLeft(0)),
                    None => None,
                }
            }
            (InitLeft(0), Cell::Plain(Letter::Sym(_))) => go(cell, Move::Left, InitLeft(0)),
            (InitLeft(p), Cell::Plain(Letter::Blank)) => {
                let t1 = self.sys.t1();
                let p = p as usize;
                if p < t1.len() {
                    go(
                        Cell::plain(t1[t1.len() - 1 - p]),
                        Move::Left,
                        InitLeft(p as u32 + 1),
                    )
                } else if p == t1.len() {
                    go(Cell::Cent, Move::Right, Shift(k0))
                } else {
                    None
                }
            }
            (Shift(_), Cell::Cent) => go(Cell::Cent, Move::Right, Shift(k0)),
            (Shift(k), Cell::Plain(Letter::Blank)) => {
                go(Cell::Compound(Letter::Blank, k), Move::Right, Shift(k))
            }
            (Shift(k), Cell::Plain(Letter::Sym(a))) => {
                let next = self.dfa.next(k, Letter::Sym(a));
                match self.dfa.accepting(next) {
                    None => go(
                        Cell::Compound(Letter::Sym(a), next),
                        Move::Right,
                        Shift(next),
                    ),
                    Some(rule) => {
                        let r = self.sys.rule(rule);
                        let v = r.rhs.len() as u32;
                        let write = match r.rhs.last() {
                            Some(&s) => Cell::plain(s),
                            None => Cell::BLANK,
                        };
                        let u_left = r.lhs.len() as u32 - 1;
                        let next = if u_left == 0 {
                            ReducePeek(rule)
                        } else {
                            ReduceWrite {
                                rule,
                                v_left: v.saturating_sub(1),
                                u_left,
                            }
                        };
                        go(write, Move::Left, next)
                    }
                }
            }
            (Shift(_), Cell::Dollar) => go(Cell::Dollar, Move::Left, Final(0)),
            (
                ReduceWrite {
                    rule,
                    v_left,
                    u_left,
                },
                Cell::Compound(letter, _),
            ) => {
                let r = self.sys.rule(rule);
                let u_left = u_left - u32::from(!letter.is_blank());
                let write = if v_left > 0 {
                    Cell::plain(r.rhs[v_left as usize - 1])
                } else {
                    Cell::BLANK
                };
                let v_left = v_left.saturating_sub(1);
                let next = if u_left == 0 {
                    ReducePeek(rule)
                } else {
                    ReduceWrite {
                        rule,
                        v_left,
                        u_left,
                    }
                };
                go(write, Move::Left, next)
            }
            (ReducePeek(_), Cell::Compound(_, k)) => go(cell, Move::Right, ReduceReturn(k)),
            (ReducePeek(_), Cell::Cent) => go(Cell::Cent, Move::Right, ReduceReturn(k0)),
            (ReduceReturn(k), Cell::Plain(Letter::Blank)) => {
                go(Cell::Compound(Letter::Blank, k), Move::Right, Shift(k))
            }
            (Final(p), Cell::Compound(Letter::Blank, _)) => go(cell, Move::Left, Final(p)),
            (Final(p), Cell::Compound(Letter::Sym(a), _)) => {
                let t3 = self.sys.t3();
                let p = p as usize;
                if p < t3.len() && t3[t3.len() - 1 - p] == a {
                    go(cell, Move::Left, Final(p as u32 + 1))
                } else {
                    go(cell, Move::Left, Reject)
                }
            }
            (Final(p), Cell::Cent) => {
                let next = if p as usize == self.sys.t3().len() {
                    Accept
                } else {
                    Reject
                };
                go(Cell::Cent, Move::Right, next)
            }
            _ => None,
        }
    }

    pub fn initial_config(&self, x: &[Symbol]) -> Configuration {
        let n = self.tape_len(x.len());
        let start = self.initial_square();
        let mut tape = vec![Cell::BLANK; n];
        for (i, &s) in x.iter().enumerate() {
            tape[start - 1 + i] = Cell::plain(s);
        }
        let blanks = n - x.len();
        Configuration {
            tape,
            head: start,
            state: self.initial_state(),
            time: 0,
            blanks,
        }
    }

    /// Applies one quintuple in place.
    pub fn step(&self, cfg: &mut Configuration) -> Result<StepRecord, MachineError> {
        if cfg.state.is_halting() {
            return Err(MachineError::Halted);
        }
        let cell = cfg.tape[cfg.head - 1];
        let ins = self
            .instruction(cfg.state, cell)
            .ok_or(MachineError::NoInstruction {
                state: cfg.state,
                cell,
                time: cfg.time,
            })?;
        let from = cfg.head;
        let to = match ins.mv {
            Move::Left => from - 1,
            Move::Right => from + 1,
        };
        debug_assert!(to >= 1 && to <= cfg.tape.len());
        cfg.blanks = cfg.blanks + usize::from(ins.write.is_blank()) - usize::from(cell.is_blank());
        cfg.tape[from - 1] = ins.write;
        cfg.head = to;
        let before = cfg.state;
        cfg.state = ins.next;
        cfg.time += 1;
        Ok(StepRecord {
            from,
            to,
            before,
            after: ins.next,
            read: cell,
        })
    }

    pub fn default_fuel(n: usize) -> u64 {
        let n = n as u64;
        8 * n * n + 8 * n
    }

    pub fn run(&self, x: &[Symbol], opts: RunOptions) -> Result<RunResult, MachineError> {
        let cfg = self.initial_config(x);
        self.run_from(cfg, x, opts)
    }

    /// Continues a (possibly perturbed) configuration to halting. `x` is the
    /// original input, used only by audit mode.
    pub fn run_from(
        &self,
        mut cfg: Configuration,
        x: &[Symbol],
        opts: RunOptions,
    ) -> Result<RunResult, MachineError> {
        let fuel = opts
            .fuel
            .unwrap_or_else(|| Self::default_fuel(cfg.tape.len()));
        let mut auditor = opts.audit.then(|| Auditor::new(self, x, &cfg));
        let mut reduce_count = 0;
        while !cfg.state.is_halting() {
            if cfg.time >= fuel {
                return Err(MachineError::FuelExhausted { fuel });
            }
            let rec = self.step(&mut cfg)?;
            if matches!(rec.before, MachineState::Shift(_)) && rec.after.is_reduce() {
                reduce_count += 1;
            }
            if let Some(a) = auditor.as_mut() {
                a.after_step(self, &cfg, &rec)?;
            }
        }
        Ok(RunResult {
            accepted: cfg.state == MachineState::Accept,
            h_image: h_image(&cfg.tape),
            steps: cfg.time,
            reduce_count,
            final_tape: cfg.tape,
        })
    }

    /// Widens the tape by `count` blank cells inserted before `square`.
    /// Cells left of the head become `[B,k]` with `k` copied from the
    /// nearest compound cell on their left (`k0` if none), cells right of the
    /// head become `B`. Only legal between phases, i.e. in a SHIFT state.
    pub fn insert_blanks(
        &self,
        cfg: &Configuration,
        square: usize,
        count: usize,
    ) -> Result<Configuration, MachineError> {
        if !matches!(cfg.state, MachineState::Shift(_)) {
            return Err(MachineError::BadInsertion(format!(
                "state {} is not a SHIFT state",
                cfg.state
            )));
        }
        if square < 2 || square > cfg.tape.len() {
            return Err(MachineError::BadInsertion(format!(
                "square {square} outside 2..={}",
                cfg.tape.len()
            )));
        }
        let mut out = cfg.clone();
        if count == 0 {
            return Ok(out);
        }
        let cell = if square > cfg.head {
            Cell::BLANK
        } else {
            let k = cfg.tape[..square - 1]
                .iter()
                .rev()
                .find_map(|c| match c {
                    Cell::Compound(_, k) => Some(*k),
                    _ => None,
                })
                .unwrap_or(self.dfa.initial());
            out.head += count;
            Cell::Compound(Letter::Blank, k)
        };
        out.tape
            .splice(square - 1..square - 1, std::iter::repeat_n(cell, count));
        out.blanks += count;
        Ok(out)
    }

    pub fn render_cell(&self, cell: Cell) -> String {
        let tok = |l: Letter| match l {
            Letter::Blank => "B".to_string(),
            Letter::Sym(s) => self.sys.alphabet().token(s).to_string(),
        };
        match cell {
            Cell::Cent => "CENT".into(),
            Cell::Dollar => "DOLLAR".into(),
            Cell::Plain(l) => tok(l),
            Cell::Compound(l, k) => format!("[{},{}]", tok(l), k.0),
        }
    }

    pub fn parse_cell(&self, token: &str) -> Option<Cell> {
        let letter = |t: &str| match t {
            "B" => Some(Letter::Blank),
            _ => self.sys.alphabet().symbol(t).map(Letter::Sym),
        };
        match token {
            "CENT" => Some(Cell::Cent),
            "DOLLAR" => Some(Cell::Dollar),
            _ => {
                if let Some(l) = letter(token) {
                    return Some(Cell::Plain(l));
                }
                let inner = token.strip_prefix('[')?.strip_suffix(']')?;
                let (a, k) = inner.rsplit_once(',')?;
                let k: u32 = k.parse().ok()?;
                if k as usize >= self.dfa.state_count() {
                    return None;
                }
                Some(Cell::Compound(letter(a)?, DfaState(k)))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    /// Cells of squares `1..=n`; square `i` is `tape[i - 1]`.
    pub tape: Vec<Cell>,
    /// 1-based square under the head.
    pub head: usize,
    pub state: MachineState,
    pub time: u64,
    pub blanks: usize,
}

impl Configuration {
    pub fn cell(&self, square: usize) -> Cell {
        self.tape[square - 1]
    }

    pub fn len(&self) -> usize {
        self.tape.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tape.is_empty()
    }
}

/// A single applied quintuple.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub from: usize,
    pub to: usize,
    pub before: MachineState,
    pub after: MachineState,
    pub read: Cell,
}

impl StepRecord {
    /// The crossing point passed by this move.
    pub fn point(&self) -> usize {
        self.from.min(self.to)
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub fuel: Option<u64>,
    pub audit: bool,
}

impl RunOptions {
    pub fn audited() -> Self {
        RunOptions {
            fuel: None,
            audit: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub accepted: bool,
    pub final_tape: Vec<Cell>,
    pub steps: u64,
    pub reduce_count: usize,
    pub h_image: Word,
}

/// Invariant checks for audit mode. Costs O(n) per step.
struct Auditor {
    derivation: Vec<Word>,
    reductions: usize,
    init_done: bool,
    blanks_floor: usize,
    phase_start_blanks: usize,
    reduce_nonblank_seen: usize,
}

impl Auditor {
    fn new(prog: &MachineProgram, x: &[Symbol], cfg: &Configuration) -> Auditor {
        let init_done = !cfg.state.is_init();
        Auditor {
            derivation: prog.sys.leftmost_derivation(&prog.sys.wrap(x)),
            // a resumed run starts from the reduct its h-image shows
            reductions: 0,
            init_done,
            blanks_floor: cfg.blanks,
            phase_start_blanks: cfg.blanks,
            reduce_nonblank_seen: 0,
        }
    }

    fn fail(cfg: &Configuration, message: String) -> MachineError {
        MachineError::Audit {
            time: cfg.time,
            message,
        }
    }

    fn after_step(
        &mut self,
        prog: &MachineProgram,
        cfg: &Configuration,
        rec: &StepRecord,
    ) -> Result<(), MachineError> {
        use MachineState::*;
        if !self.init_done {
            if matches!(rec.after, Shift(_)) {
                self.init_done = true;
                self.blanks_floor = cfg.blanks;
                self.check_boundary(prog, cfg)?;
            }
            return Ok(());
        }
        if cfg.blanks < self.blanks_floor {
            return Err(Self::fail(cfg, "blank count decreased".into()));
        }
        self.blanks_floor = cfg.blanks;

        if rec.to < rec.from && matches!(rec.before, Shift(_) | ReduceReturn(_)) {
            let ok = rec.after.is_reduce() || matches!(rec.after, Final(_));
            if !ok {
                return Err(Self::fail(cfg, "left move outside REDUCE/final".into()));
            }
        }

        if matches!(rec.before, Shift(_)) && rec.after.is_reduce() {
            self.phase_start_blanks = cfg.blanks - usize::from(rec.read.is_blank());
            self.reduce_nonblank_seen = 0;
        }
        if rec.after.is_reduce() && rec.read.image().is_some() {
            self.reduce_nonblank_seen += 1;
            if self.reduce_nonblank_seen > prog.sys.max_redex_len() + 1 {
                return Err(Self::fail(
                    cfg,
                    "REDUCE scanned more than L+1 symbols".into(),
                ));
            }
        }

        match rec.after {
            Shift(k) => {
                if matches!(rec.before, ReduceReturn(_)) {
                    self.reductions += 1;
                    if cfg.blanks <= self.phase_start_blanks {
                        return Err(Self::fail(cfg, "REDUCE added no blank".into()));
                    }
                    self.check_boundary(prog, cfg)?;
                }
                self.check_shift_shape(prog, cfg, k)?;
            }
            Final(0) if matches!(rec.before, Shift(_)) => self.check_boundary(prog, cfg)?,
            _ => {}
        }
        Ok(())
    }

    fn check_shift_shape(
        &self,
        prog: &MachineProgram,
        cfg: &Configuration,
        k: DfaState,
    ) -> Result<(), MachineError> {
        let head = cfg.head;
        if cfg.tape[0] != Cell::Cent || *cfg.tape.last().unwrap() != Cell::Dollar {
            return Err(Self::fail(cfg, "sentinels missing".into()));
        }
        let mut compounds = Vec::with_capacity(head);
        for c in &cfg.tape[1..head - 1] {
            match c {
                Cell::Compound(a, k) => compounds.push((*a, *k)),
                _ => return Err(Self::fail(cfg, "α holds a non-compound cell".into())),
            }
        }
        if !prog.dfa.is_historical(&compounds) {
            return Err(Self::fail(cfg, "α is not historical".into()));
        }
        let expected = compounds.last().map_or(prog.dfa.initial(), |c| c.1);
        if expected != k {
            return Err(Self::fail(cfg, "SHIFT state disagrees with α".into()));
        }
        let n = cfg.tape.len();
        if cfg.tape[head - 1..n - 1]
            .iter()
            .any(|c| !matches!(c, Cell::Plain(_)))
        {
            return Err(Self::fail(cfg, "β holds a non-plain cell".into()));
        }
        Ok(())
    }

    fn check_boundary(
        &self,
        prog: &MachineProgram,
        cfg: &Configuration,
    ) -> Result<(), MachineError> {
        let alpha = h_image(&cfg.tape[..cfg.head - 1]);
        if !prog.sys.is_irreducible(&alpha) {
            return Err(Self::fail(cfg, "h(α) is reducible".into()));
        }
        let whole = h_image(&cfg.tape);
        match self.derivation.get(self.reductions) {
            Some(expected) if *expected == whole => Ok(()),
            _ if self.reductions == 0 && self.derivation.contains(&whole) => Ok(()),
            _ => Err(Self::fail(
                cfg,
                "h(αβ) is not the expected reduct of t1 x t2".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::parse_system;

    const DYCK: &str = "alphabet a b c d\nt1 c\nt2 d\nt3 c d\nrule a b ->\n";

    fn setup(text: &str) -> (ThueSystem, MachineProgram) {
        let sys = parse_system(text).unwrap();
        let prog = MachineProgram::from_system(&sys);
        (sys, prog)
    }

    #[test]
    fn h_image_examples() {
        let a = Symbol(0);
        let b = Symbol(1);
        let cells = [
            Cell::Compound(Letter::Sym(a), DfaState(5)),
            Cell::BLANK,
            Cell::plain(b),
        ];
        assert_eq!(h_image(&cells), vec![a, b]);
        assert!(h_image(&[Cell::BLANK, Cell::BLANK]).is_empty());
        assert!(h_image(&[
            Cell::Cent,
            Cell::Compound(Letter::Blank, DfaState(2)),
            Cell::Dollar
        ])
        .is_empty());
    }

    #[test]
    fn initial_config_layout() {
        let (sys, prog) = setup(DYCK);
        let x = sys.alphabet().parse_word("a b").unwrap();
        let cfg = prog.initial_config(&x);
        assert_eq!(cfg.len(), 6);
        assert_eq!(cfg.head, 3);
        assert_eq!(cfg.state, MachineState::InitRight(0));
        let empty = prog.initial_config(&[]);
        assert_eq!(empty.len(), 4);
        assert_eq!(empty.head, 3);
        assert_eq!(empty.cell(3), Cell::BLANK);
    }

    #[test]
    fn shift_quintuples() {
        let (sys, prog) = setup(DYCK);
        let k0 = DfaState(0);
        let ins = prog
            .instruction(MachineState::Shift(k0), Cell::Cent)
            .unwrap();
        assert_eq!((ins.mv, ins.next), (Move::Right, MachineState::Shift(k0)));
        let k = DfaState(1);
        let ins = prog
            .instruction(MachineState::Shift(k), Cell::BLANK)
            .unwrap();
        assert_eq!(ins.write, Cell::Compound(Letter::Blank, k));
        assert_eq!(ins.mv, Move::Right);
        let ins = prog
            .instruction(MachineState::Shift(k), Cell::Dollar)
            .unwrap();
        assert_eq!(ins.next, MachineState::Final(0));
        let b = sys.alphabet().symbol("b").unwrap();
        let ins = prog
            .instruction(MachineState::Shift(k), Cell::plain(b))
            .unwrap();
        assert_eq!(ins.mv, Move::Left);
        assert!(ins.next.is_reduce());
        assert!(prog.instruction(MachineState::Accept, Cell::Cent).is_none());
    }

    #[test]
    fn dyck_runs() {
        let (sys, prog) = setup(DYCK);
        let x = sys.alphabet().parse_word("a b").unwrap();
        let res = prog.run(&x, RunOptions::audited()).unwrap();
        assert!(res.accepted);
        assert_eq!(res.reduce_count, 1);
        assert_eq!(res.h_image, sys.alphabet().parse_word("c d").unwrap());

        let x = sys.alphabet().parse_word("b").unwrap();
        let res = prog.run(&x, RunOptions::audited()).unwrap();
        assert!(!res.accepted);
        assert_eq!(res.reduce_count, 0);

        let x = sys.alphabet().parse_word("a a b b").unwrap();
        let res = prog.run(&x, RunOptions::audited()).unwrap();
        assert!(res.accepted);
        assert_eq!(res.h_image, sys.alphabet().parse_word("c d").unwrap());

        let x = sys.alphabet().parse_word("a").unwrap();
        let res = prog.run(&x, RunOptions::audited()).unwrap();
        assert!(!res.accepted);
        assert_eq!(res.h_image, sys.alphabet().parse_word("c a d").unwrap());
    }

    #[test]
    fn step_in_halt_state_is_an_error() {
        let (_, prog) = setup(DYCK);
        let mut cfg = prog.initial_config(&[]);
        cfg.state = MachineState::Accept;
        assert_eq!(prog.step(&mut cfg), Err(MachineError::Halted));
    }

    #[test]
    fn fuel_exhaustion_is_reported() {
        let (sys, prog) = setup(DYCK);
        let x = sys.alphabet().parse_word("a b").unwrap();
        let opts = RunOptions {
            fuel: Some(3),
            audit: false,
        };
        assert_eq!(
            prog.run(&x, opts),
            Err(MachineError::FuelExhausted { fuel: 3 })
        );
    }

    #[test]
    fn state_numbering_is_dense_and_invertible() {
        let (_, prog) = setup("alphabet a b c\nt1 c\nt2 c c\nt3 c\nrule a a b -> a\nrule b a ->\n");
        for i in 0..prog.state_count() as u32 {
            let s = prog.state_at(i).unwrap();
            assert_eq!(prog.state_index(s), Some(i), "{s}");
            assert_eq!(prog.parse_state(&s.to_string()).unwrap(), s);
        }
        assert!(prog.state_at(prog.state_count() as u32).is_none());
        assert!(prog.parse_state("Shift:999").is_err());
        assert!(prog.parse_state("Bogus").is_err());
        assert!((prog.state_count() as u64) < 1 << prog.state_bits());
        assert!((prog.state_count() as u64) >= 1 << (prog.state_bits() - 1));
    }

    #[test]
    fn insert_blanks_rules() {
        let (sys, prog) = setup(DYCK);
        let x = sys.alphabet().parse_word("b a b").unwrap();
        let mut cfg = prog.initial_config(&x);
        while !matches!(cfg.state, MachineState::Shift(_)) || cfg.head < 4 {
            prog.step(&mut cfg).unwrap();
        }
        assert_eq!(prog.insert_blanks(&cfg, cfg.head, 0).unwrap(), cfg);
        let left = prog.insert_blanks(&cfg, 3, 2).unwrap();
        assert_eq!(left.head, cfg.head + 2);
        assert_eq!(left.len(), cfg.len() + 2);
        let alpha: Vec<(Letter, DfaState)> = left.tape[1..left.head - 1]
            .iter()
            .map(|c| match c {
                Cell::Compound(a, k) => (*a, *k),
                other => panic!("unexpected {other:?}"),
            })
            .collect();
        assert!(prog.dfa().is_historical(&alpha));
        let right = prog.insert_blanks(&cfg, cfg.head + 1, 3).unwrap();
        assert_eq!(right.head, cfg.head);
        assert_eq!(right.cell(cfg.head + 1), Cell::BLANK);
        assert!(prog.insert_blanks(&cfg, 1, 1).is_err());

        let mut reducing = cfg.clone();
        reducing.state = MachineState::ReducePeek(0);
        assert!(prog.insert_blanks(&reducing, 3, 1).is_err());
    }

    #[test]
    fn cell_tokens_roundtrip() {
        let (_, prog) = setup(DYCK);
        for cell in [
            Cell::Cent,
            Cell::Dollar,
            Cell::BLANK,
            Cell::plain(Symbol(2)),
            Cell::Compound(Letter::Blank, DfaState(1)),
            Cell::Compound(Letter::Sym(Symbol(0)), DfaState(2)),
        ] {
            assert_eq!(prog.parse_cell(&prog.render_cell(cell)), Some(cell));
        }
        assert_eq!(prog.parse_cell("[a,9]"), None);
        assert_eq!(prog.parse_cell("zz"), None);
    }
}
