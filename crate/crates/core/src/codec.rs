//! Depletion constants and checks, and the bit encodings used to describe
//! depleted blocks: prefix-free numbers, fixed-width crossing sequences and
//! residue records.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use thiserror::Error;

use crate::crossing::CrossingSequence;
use crate::machine::{h_image, Cell, MachineError, MachineProgram, MachineState};
use crate::rewrite::{Symbol, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("alpha must lie strictly between 0 and 1")]
    BadAlpha,
    #[error("alphabet must have at least 2 symbols")]
    AlphabetTooSmall,
    #[error("maximum redex length must be at least 2")]
    RedexTooShort,
    #[error("bit string ends before a complete code")]
    Truncated,
    #[error("invalid code at bit {0}")]
    InvalidCode(usize),
    #[error("crossing sequence of height {height} exceeds H = {limit}")]
    TooHigh { height: usize, limit: usize },
    #[error("state index {0} collides with the padding pattern")]
    StateOutOfRange(u32),
    #[error("state does not belong to the machine")]
    UnknownState,
    #[error("symbol index {0} outside the alphabet")]
    BadSymbol(u32),
    #[error("number {0} does not fit the platform word")]
    Overflow(u64),
    #[error("invalid bit character {0:?}")]
    BadBit(char),
    #[error(transparent)]
    Machine(#[from] MachineError),
}

/// `⌈log2 a⌉`.
pub fn ceil_log2(a: u64) -> u32 {
    if a <= 1 {
        0
    } else {
        64 - (a - 1).leading_zeros()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepletionParams {
    pub alpha: Rational64,
    pub a: usize,
    pub beta: Rational64,
    pub l: usize,
    pub h: usize,
    pub k: usize,
    pub d: usize,
}

fn section_len(h: usize, l: usize) -> usize {
    // ⌊H/2 − 2⌋ + L − 1, for H ≥ 4
    (h - 4) / 2 + l - 1
}

pub fn compute_constants(
    alpha: Rational64,
    a: usize,
    l: usize,
) -> Result<DepletionParams, CodecError> {
    let zero = Rational64::from_integer(0);
    let one = Rational64::from_integer(1);
    if alpha <= zero || alpha >= one {
        return Err(CodecError::BadAlpha);
    }
    if a < 2 {
        return Err(CodecError::AlphabetTooSmall);
    }
    if l < 2 {
        return Err(CodecError::RedexTooShort);
    }
    let beta = alpha / Rational64::from_integer(i64::from(ceil_log2(a as u64)));
    let lm1 = Rational64::from_integer(l as i64 - 1);
    let bound = lm1 / beta;
    let mut h = 6;
    while Rational64::from_integer(section_len(h, l) as i64) <= bound {
        h += 1;
    }
    let k = section_len(h, l);
    let slack = beta * Rational64::from_integer(k as i64) / lm1 - one;
    let d = slack.recip().ceil().to_integer() as usize;
    Ok(DepletionParams {
        alpha,
        a,
        beta,
        l,
        h,
        k,
        d,
    })
}

/// `|h(y′)| ≤ β (j2 − j1)` for the cells between crossing points `j1` and
/// `j2` (squares `j1+1 ..= j2`).
pub fn is_depleted(cells: &[Cell], j1: usize, j2: usize, beta: Rational64) -> bool {
    let count = h_image(&cells[j1..j2]).len() as i64;
    Rational64::from_integer(count) <= beta * Rational64::from_integer((j2 - j1) as i64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepletionViolation {
    pub time: u64,
    pub j1: usize,
    pub j2: usize,
    pub nonblank: usize,
}

/// Checks one snapshot: `heights[i]` is the height at point `i`. Among all
/// pairs `j1 < j2` with `j2 − j1 ≥ d` and every height in `j1..=j2` at least
/// `H`, returns the pair that most exceeds the depletion bound, if any does.
pub fn check_depletion_snapshot(
    cells: &[Cell],
    heights: &[usize],
    params: &DepletionParams,
    time: u64,
) -> Option<DepletionViolation> {
    let (p, q) = (*params.beta.numer(), *params.beta.denom());
    // f(j) = q·P(j) − p·j; a pair violates iff f(j2) > f(j1).
    let mut prefix = 0i64;
    let mut f = Vec::with_capacity(heights.len());
    f.push(0i64);
    for (j, c) in cells.iter().enumerate() {
        prefix += i64::from(c.image().is_some());
        f.push(q * prefix - p * (j as i64 + 1));
    }
    let mut worst: Option<(i64, usize, usize)> = None;
    let mut run_start = 0usize;
    // minimum of f over admissible j1 in the current run: (value, index)
    let mut best_left: Option<(i64, usize)> = None;
    for j2 in 0..heights.len() {
        if heights[j2] < params.h {
            run_start = j2 + 1;
            best_left = None;
            continue;
        }
        if j2 >= run_start + params.d {
            let j1 = j2 - params.d;
            if best_left.is_none_or(|(v, _)| f[j1] < v) {
                best_left = Some((f[j1], j1));
            }
        }
        if let Some((v, j1)) = best_left {
            let excess = f[j2] - v;
            if excess > 0 && worst.is_none_or(|(e, _, _)| excess > e) {
                worst = Some((excess, j1, j2));
            }
        }
    }
    worst.map(|(_, j1, j2)| DepletionViolation {
        time,
        j1,
        j2,
        nonblank: h_image(&cells[j1..j2]).len(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepletionReport {
    pub steps: u64,
    pub snapshots_with_tall_pairs: usize,
    pub max_height: usize,
    pub violations: Vec<DepletionViolation>,
}

/// Runs the machine on `x` and checks the depletion property at every step
/// boundary.
pub fn check_depletion_lemma(
    prog: &MachineProgram,
    x: &[Symbol],
    params: &DepletionParams,
) -> Result<DepletionReport, CodecError> {
    let mut cfg = prog.initial_config(x);
    let n = cfg.len();
    let fuel = MachineProgram::default_fuel(n);
    let mut heights = vec![0usize; n + 1];
    let mut report = DepletionReport {
        steps: 0,
        snapshots_with_tall_pairs: 0,
        max_height: 0,
        violations: Vec::new(),
    };
    loop {
        if report.max_height >= params.h {
            let tall = heights.iter().filter(|&&h| h >= params.h).count();
            if tall > params.d {
                report.snapshots_with_tall_pairs += 1;
                if let Some(v) = check_depletion_snapshot(&cfg.tape, &heights, params, cfg.time) {
                    report.violations.push(v);
                }
            }
        }
        if cfg.state.is_halting() {
            break;
        }
        if cfg.time >= fuel {
            return Err(MachineError::FuelExhausted { fuel }.into());
        }
        let rec = prog.step(&mut cfg)?;
        let p = rec.point();
        heights[p] += 1;
        report.max_height = report.max_height.max(heights[p]);
    }
    report.steps = cfg.time;
    Ok(report)
}

/// Convenience wrapper: constants from the program's system at level
/// `alpha`.
pub fn constants_for(
    prog: &MachineProgram,
    alpha: Rational64,
) -> Result<DepletionParams, CodecError> {
    let sys = prog.system();
    compute_constants(alpha, sys.alphabet().len(), sys.max_redex_len())
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    pub bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> Self {
        BitString::default()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn extend(&mut self, other: &BitString) {
        self.bits.extend_from_slice(&other.bits);
    }

    /// Appends `value` as exactly `width` bits, most significant first.
    pub fn push_fixed(&mut self, value: u64, width: u32) {
        for i in (0..width).rev() {
            self.bits.push((value >> i) & 1 == 1);
        }
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.bits.starts_with(&self.bits)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = CodecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(CodecError::BadBit(other)),
            })
            .collect::<Result<_, _>>()?;
        Ok(BitString { bits })
    }
}

/// A read cursor over a bit string.
pub struct BitReader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a BitString) -> Self {
        BitReader {
            bits: &bits.bits,
            pos: 0,
        }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> &'a [bool] {
        &self.bits[self.pos..]
    }

    fn bit(&mut self) -> Result<bool, CodecError> {
        let b = *self.bits.get(self.pos).ok_or(CodecError::Truncated)?;
        self.pos += 1;
        Ok(b)
    }

    pub fn fixed(&mut self, width: u32) -> Result<u64, CodecError> {
        let mut v = 0u64;
        for _ in 0..width {
            v = (v << 1) | u64::from(self.bit()?);
        }
        Ok(v)
    }

    /// Reads one `q(s)11` number.
    pub fn number(&mut self) -> Result<u64, CodecError> {
        let start = self.pos;
        let mut value = 0u64;
        let mut digits = 0u32;
        loop {
            let pair = (self.bit()?, self.bit()?);
            match pair {
                (true, true) => return Ok(value),
                (false, b) => {
                    // no leading zero digits: 0 is the empty binary string
                    if digits == 0 && !b {
                        return Err(CodecError::InvalidCode(start));
                    }
                    if digits == 64 {
                        return Err(CodecError::InvalidCode(start));
                    }
                    value = (value << 1) | u64::from(b);
                    digits += 1;
                }
                (true, false) => return Err(CodecError::InvalidCode(self.pos - 2)),
            }
        }
    }
}

/// `q(s)11` where `s` is the binary numeral of `r` without leading zeros
/// (empty for 0) and `q` maps `0 ↦ 00`, `1 ↦ 01`.
pub fn encode_number(r: u64) -> BitString {
    let mut out = BitString::new();
    push_number(&mut out, r);
    out
}

fn push_number(out: &mut BitString, r: u64) {
    let width = 64 - r.leading_zeros();
    for i in (0..width).rev() {
        out.push(false);
        out.push((r >> i) & 1 == 1);
    }
    out.push(true);
    out.push(true);
}

/// Decodes one number and returns it with the unread remainder.
pub fn decode_number(bits: &BitString) -> Result<(u64, BitString), CodecError> {
    let mut reader = BitReader::new(bits);
    let r = reader.number()?;
    Ok((
        r,
        BitString {
            bits: reader.remaining().to_vec(),
        },
    ))
}

/// Leading bit, then `h` fields of `q` bits holding the given state
/// indices, padded with the all-ones pattern.
pub fn pack_sequence(
    lead: bool,
    indices: &[u32],
    q: u32,
    h: usize,
) -> Result<BitString, CodecError> {
    if indices.len() > h {
        return Err(CodecError::TooHigh {
            height: indices.len(),
            limit: h,
        });
    }
    let pad = (1u64 << q) - 1;
    let mut out = BitString::new();
    out.push(lead);
    for &i in indices {
        if u64::from(i) >= pad {
            return Err(CodecError::StateOutOfRange(i));
        }
        out.push_fixed(u64::from(i), q);
    }
    for _ in indices.len()..h {
        out.push_fixed(pad, q);
    }
    Ok(out)
}

pub fn unpack_sequence(
    reader: &mut BitReader<'_>,
    q: u32,
    h: usize,
) -> Result<(bool, Vec<u32>), CodecError> {
    let pad = (1u64 << q) - 1;
    let start = reader.position();
    let lead = reader.fixed(1)? == 1;
    let mut indices = Vec::new();
    let mut padding = false;
    for _ in 0..h {
        let v = reader.fixed(q)?;
        if v == pad {
            padding = true;
        } else if padding {
            // a state after padding has no preimage
            return Err(CodecError::InvalidCode(start));
        } else {
            indices.push(v as u32);
        }
    }
    Ok((lead, indices))
}

/// Exactly `Q·H + 1` bits with `Q` the program's state bits.
pub fn encode_crossing_sequence(
    prog: &MachineProgram,
    c: &CrossingSequence,
    h: usize,
) -> Result<BitString, CodecError> {
    let indices = c
        .states
        .iter()
        .map(|&s| prog.state_index(s).ok_or(CodecError::UnknownState))
        .collect::<Result<Vec<_>, _>>()?;
    pack_sequence(c.lead, &indices, prog.state_bits(), h)
}

pub fn read_crossing_sequence(
    prog: &MachineProgram,
    reader: &mut BitReader<'_>,
    h: usize,
) -> Result<CrossingSequence, CodecError> {
    let (lead, indices) = unpack_sequence(reader, prog.state_bits(), h)?;
    let states = indices
        .into_iter()
        .map(|i| prog.state_at(i).ok_or(CodecError::UnknownState))
        .collect::<Result<_, _>>()?;
    Ok(CrossingSequence { lead, states })
}

pub fn decode_crossing_sequence(
    prog: &MachineProgram,
    bits: &BitString,
    h: usize,
) -> Result<CrossingSequence, CodecError> {
    read_crossing_sequence(prog, &mut BitReader::new(bits), h)
}

/// `m, i, j, j1, c1, j2, c2, h(y′), ℓ, q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueRecord {
    pub m: u64,
    pub i: u64,
    pub j: u64,
    pub j1: u64,
    pub c1: CrossingSequence,
    pub j2: u64,
    pub c2: CrossingSequence,
    pub h_y: Word,
    pub ell: u64,
    pub q: MachineState,
}

/// Bits per packed symbol of `h(y′)`.
pub fn symbol_bits(prog: &MachineProgram) -> u32 {
    ceil_log2(prog.system().alphabet().len() as u64)
}

pub fn encode_residue_record(
    prog: &MachineProgram,
    rec: &ResidueRecord,
    h: usize,
) -> Result<BitString, CodecError> {
    let q_index = prog.state_index(rec.q).ok_or(CodecError::UnknownState)?;
    let mut out = BitString::new();
    for v in [
        rec.m,
        rec.i,
        rec.j,
        rec.j1,
        rec.j2,
        rec.ell,
        u64::from(q_index),
        rec.h_y.len() as u64,
    ] {
        push_number(&mut out, v);
    }
    out.extend(&encode_crossing_sequence(prog, &rec.c1, h)?);
    out.extend(&encode_crossing_sequence(prog, &rec.c2, h)?);
    let width = symbol_bits(prog);
    for s in &rec.h_y {
        out.push_fixed(u64::from(s.0), width);
    }
    Ok(out)
}

/// Decodes a record and returns it with the number of bits consumed.
pub fn decode_residue_record(
    prog: &MachineProgram,
    bits: &BitString,
    h: usize,
) -> Result<(ResidueRecord, usize), CodecError> {
    let mut reader = BitReader::new(bits);
    let mut nums = [0u64; 8];
    for slot in nums.iter_mut() {
        *slot = reader.number()?;
    }
    let [m, i, j, j1, j2, ell, q_index, hy_len] = nums;
    let q_index = u32::try_from(q_index).map_err(|_| CodecError::Overflow(q_index))?;
    let q = prog.state_at(q_index).ok_or(CodecError::UnknownState)?;
    let c1 = read_crossing_sequence(prog, &mut reader, h)?;
    let c2 = read_crossing_sequence(prog, &mut reader, h)?;
    let width = symbol_bits(prog);
    let a = prog.system().alphabet().len() as u64;
    let hy_len = usize::try_from(hy_len).map_err(|_| CodecError::Overflow(hy_len))?;
    if hy_len > reader.remaining().len() && width > 0 {
        return Err(CodecError::Truncated);
    }
    let mut h_y = Vec::with_capacity(hy_len);
    for _ in 0..hy_len {
        let v = reader.fixed(width)?;
        if v >= a {
            return Err(CodecError::BadSymbol(v as u32));
        }
        h_y.push(Symbol(v as u16));
    }
    let rec = ResidueRecord {
        m,
        i,
        j,
        j1,
        c1,
        j2,
        c2,
        h_y,
        ell,
        q,
    };
    Ok((rec, reader.position()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfa::{DfaState, Letter};
    use crate::rewrite::parse_system;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn worked_constants() {
        let p = compute_constants(r(1, 7), 4, 2).unwrap();
        assert_eq!(p.beta, r(1, 14));
        assert_eq!((p.h, p.k, p.d), (32, 15, 14));
        let p = compute_constants(r(1, 7), 2, 2).unwrap();
        assert_eq!(p.beta, r(1, 7));
        assert_eq!(
            compute_constants(r(1, 7), 4, 1),
            Err(CodecError::RedexTooShort)
        );
        assert_eq!(compute_constants(r(7, 7), 4, 2), Err(CodecError::BadAlpha));
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!([1, 2, 3, 4, 5, 8, 9].map(ceil_log2), [0, 1, 2, 2, 3, 3, 4]);
    }

    #[test]
    fn depleted_examples() {
        let beta = r(1, 14);
        let blank = Cell::BLANK;
        let full = Cell::plain(Symbol(0));
        assert!(is_depleted(&[blank; 5], 0, 5, beta));
        assert!(!is_depleted(&[full; 5], 0, 5, r(1, 2)));
        let mut cells = vec![blank; 14];
        cells[3] = full;
        assert!(is_depleted(&cells, 0, 14, beta));
        cells[9] = full;
        assert!(!is_depleted(&cells, 0, 14, beta));
    }

    #[test]
    fn snapshot_checker_flags_synthetic_violation() {
        let params = compute_constants(r(1, 7), 4, 2).unwrap();
        let n = 40;
        let cells = vec![Cell::Compound(Letter::Sym(Symbol(0)), DfaState(0)); n];
        let heights = vec![params.h; n + 1];
        let v = check_depletion_snapshot(&cells, &heights, &params, 7).unwrap();
        assert_eq!(v.time, 7);
        assert!(v.j2 - v.j1 >= params.d);
        let blanks = vec![Cell::BLANK; n];
        assert!(check_depletion_snapshot(&blanks, &heights, &params, 7).is_none());
        let short = vec![params.h - 1; n + 1];
        assert!(check_depletion_snapshot(&cells, &short, &params, 7).is_none());
    }

    #[test]
    fn short_runs_have_no_qualifying_pairs() {
        let sys = parse_system("alphabet a b c d\nt1 c\nt2 d\nt3 c d\nrule a b ->\n").unwrap();
        let prog = MachineProgram::from_system(&sys);
        let params = constants_for(&prog, r(1, 7)).unwrap();
        let x = sys.alphabet().parse_word("a b").unwrap();
        let report = check_depletion_lemma(&prog, &x, &params).unwrap();
        assert!(report.violations.is_empty());
        assert_eq!(report.snapshots_with_tall_pairs, 0);
    }

    #[test]
    fn number_examples() {
        assert_eq!(encode_number(0).to_string(), "11");
        assert_eq!(encode_number(1).to_string(), "0111");
        assert_eq!(encode_number(5).to_string(), "01000111");
        let bits: BitString = "0100011101".parse().unwrap();
        let (v, rest) = decode_number(&bits).unwrap();
        assert_eq!(v, 5);
        assert_eq!(rest.to_string(), "01");
        assert!(decode_number(&"0011".parse().unwrap()).is_err());
        assert!(decode_number(&"10".parse().unwrap()).is_err());
        assert_eq!(
            decode_number(&"01".parse().unwrap()),
            Err(CodecError::Truncated)
        );
        assert_eq!(decode_number(&encode_number(u64::MAX)).unwrap().0, u64::MAX);
    }

    #[test]
    fn packed_sequence_examples() {
        assert_eq!(
            pack_sequence(true, &[], 3, 2).unwrap().to_string(),
            "1111111"
        );
        assert_eq!(
            pack_sequence(false, &[2], 3, 2).unwrap().to_string(),
            "0010111"
        );
        assert!(pack_sequence(false, &[7], 3, 2).is_err());
        assert!(pack_sequence(false, &[1, 1, 1], 3, 2).is_err());
        let bits: BitString = "0111010".parse().unwrap();
        assert!(unpack_sequence(&mut BitReader::new(&bits), 3, 2).is_err());
    }
}
