//! Built-in systems and language oracles.
//!
//! The MIDBIT system isolates the middle bit of an odd-length bitstring:
//! `$̄ x $ ->* $̄ b $` exactly when `|x|` is odd and `b` is its middle bit.
//! Barred symbols carry a combining macron (`$̄`, `[01]̄`, `P̄`, `Q̄`, `R̄`).
//! Right sweeps (`P̄`, `Q̄`, `R̄`) pack bits or one side of each double
//! symbol into barred doubles; left sweeps (`Q`, `R`) are the mirror images
//! of the `Q̄`/`R̄` rules.

use thiserror::Error;

use crate::rewrite::{parse_system, Alphabet, Symbol, SystemError, ThueSystem, Word};

const BAR: char = '\u{304}';

/// Published rule count for the whole MIDBIT system.
pub const PUBLISHED_MIDBIT_TOTAL: usize = 20_720;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LangError {
    #[error("x and y must differ")]
    SameStrings,
    #[error("constructed context fails the palindrome check")]
    Unverified,
    #[error(transparent)]
    System(#[from] SystemError),
}

/// Toggles the bar of a MIDBIT token; `None` for bits and for `P̄`, which
/// has no unbarred partner.
pub fn toggle_bar(token: &str) -> Option<String> {
    if token == "0" || token == "1" || token == "P\u{304}" {
        return None;
    }
    Some(match token.strip_suffix(BAR) {
        Some(plain) => plain.to_string(),
        None => format!("{token}{BAR}"),
    })
}

fn barred(token: &str) -> String {
    format!("{token}{BAR}")
}

fn double(b1: u8, b2: u8) -> String {
    format!("[{b1}{b2}]")
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Side {
    Odd,
    Even,
}

impl Side {
    fn pick(self, (b1, b2): (u8, u8)) -> u8 {
        match self {
            Side::Odd => b1,
            Side::Even => b2,
        }
    }
}

/// Rule counts per schema group, in generation order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleGroups {
    pub groups: Vec<(&'static str, usize)>,
}

impl RuleGroups {
    pub fn count(&self, name: &str) -> Option<usize> {
        self.groups.iter().find(|g| g.0 == name).map(|g| g.1)
    }

    /// The short/initiate/continue/terminate groups.
    pub fn bitstring_rules(&self) -> usize {
        ["short", "initiate", "continue", "terminate"]
            .iter()
            .filter_map(|g| self.count(g))
            .sum()
    }

    pub fn total(&self) -> usize {
        self.groups.iter().map(|g| g.1).sum()
    }

    /// Our total minus the published total.
    pub fn delta_from_published(&self) -> i64 {
        self.total() as i64 - PUBLISHED_MIDBIT_TOTAL as i64
    }
}

#[derive(Clone, Debug)]
pub struct GeneratedSystem {
    pub system: ThueSystem,
    pub groups: RuleGroups,
}

type TokenRule = (Vec<String>, Vec<String>);

struct Builder {
    groups: Vec<(&'static str, usize)>,
    rules: Vec<TokenRule>,
}

impl Builder {
    fn group(&mut self, name: &'static str, rules: Vec<TokenRule>) {
        self.groups.push((name, rules.len()));
        self.rules.extend(rules);
    }
}

fn bits(n: usize) -> impl Iterator<Item = Vec<u8>> {
    (0..1u32 << n).map(move |v| (0..n).rev().map(|i| ((v >> i) & 1) as u8).collect())
}

fn doubles(n: usize) -> impl Iterator<Item = Vec<(u8, u8)>> {
    bits(2 * n).map(|b| b.chunks(2).map(|p| (p[0], p[1])).collect())
}

fn toks(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn bit_tokens(b: &[u8]) -> Vec<String> {
    b.iter().map(|b| b.to_string()).collect()
}

/// Barred doubles packing an even-length bitstring.
fn packed_bar(y: &[u8]) -> Vec<String> {
    y.chunks(2).map(|p| barred(&double(p[0], p[1]))).collect()
}

fn plain_doubles(ds: &[(u8, u8)]) -> Vec<String> {
    ds.iter().map(|&(a, b)| double(a, b)).collect()
}

fn midbit_alphabet() -> Vec<String> {
    let mut tokens = toks(&["$\u{304}", "$", "0", "1"]);
    for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        tokens.push(double(a, b));
    }
    for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        tokens.push(barred(&double(a, b)));
    }
    tokens.extend(toks(&["P\u{304}", "Q", "R", "Q\u{304}", "R\u{304}"]));
    tokens
}

fn bitstring_groups(b: &mut Builder) {
    let lbar = "$\u{304}";
    let pbar = "P\u{304}";
    let mut short = Vec::new();
    for x in bits(3) {
        let lhs = [vec![lbar.to_string()], bit_tokens(&x), toks(&["$"])].concat();
        short.push((lhs, toks(&[lbar, &x[1].to_string(), "$"])));
    }
    for x in bits(5) {
        let lhs = [vec![lbar.to_string()], bit_tokens(&x), toks(&["$"])].concat();
        short.push((lhs, toks(&[lbar, &x[2].to_string(), "$"])));
    }
    b.group("short", short);

    // The left sentinel is kept on the right-hand side.
    let initiate = bits(6)
        .map(|x| {
            let lhs = [vec![lbar.to_string()], bit_tokens(&x)].concat();
            let rhs = [
                vec![lbar.to_string()],
                packed_bar(&x[..4]),
                vec![pbar.to_string()],
                bit_tokens(&x[4..]),
            ]
            .concat();
            (lhs, rhs)
        })
        .collect();
    b.group("initiate", initiate);

    let cont = bits(6)
        .map(|x| {
            let lhs = [vec![pbar.to_string()], bit_tokens(&x)].concat();
            let rhs = [
                packed_bar(&x[..4]),
                vec![pbar.to_string()],
                bit_tokens(&x[4..]),
            ]
            .concat();
            (lhs, rhs)
        })
        .collect();
    b.group("continue", cont);

    let mut term = Vec::new();
    for x in bits(5) {
        let lhs = [vec![pbar.to_string()], bit_tokens(&x), toks(&["$"])].concat();
        let y = [&x[..], &[0]].concat();
        let rhs = [packed_bar(&y), toks(&["Q", "$"])].concat();
        term.push((lhs, rhs));
    }
    for x in bits(3) {
        let lhs = [vec![pbar.to_string()], bit_tokens(&x), toks(&["$"])].concat();
        let rhs = [packed_bar(&x[..2]), toks(&["R", "$"])].concat();
        term.push((lhs, rhs));
    }
    b.group("terminate", term);
}

/// The `Q̄` (odd side) or `R̄` (even side) right-sweep family.
fn sweep_family(sweep: &str, side: Side) -> Vec<TokenRule> {
    let lbar = "$\u{304}";
    let mut rules = Vec::new();
    for alpha in doubles(6) {
        let lhs = [vec![sweep.to_string()], plain_doubles(&alpha)].concat();
        let y: Vec<u8> = alpha[..4].iter().map(|&d| side.pick(d)).collect();
        let rhs = [
            packed_bar(&y),
            vec![sweep.to_string()],
            plain_doubles(&alpha[4..]),
        ]
        .concat();
        rules.push((lhs, rhs));
    }
    for beta in doubles(5) {
        let lhs = [vec![sweep.to_string()], plain_doubles(&beta), toks(&["$"])].concat();
        let mut y: Vec<u8> = beta.iter().map(|&d| side.pick(d)).collect();
        y.push(0);
        rules.push((lhs, [packed_bar(&y), toks(&["Q", "$"])].concat()));
    }
    // gamma is unbarred: a right sweep only ever meets unbarred doubles.
    for gamma in doubles(3) {
        let lhs = [vec![sweep.to_string()], plain_doubles(&gamma), toks(&["$"])].concat();
        let y: Vec<u8> = gamma.iter().map(|&d| side.pick(d)).collect();
        rules.push((lhs, [packed_bar(&y[..2]), toks(&["R", "$"])].concat()));
    }
    for d in doubles(1) {
        let lhs = [toks(&[lbar, sweep]), plain_doubles(&d), toks(&["$"])].concat();
        let rhs = toks(&[lbar, &side.pick(d[0]).to_string(), "$"]);
        rules.push((lhs, rhs));
    }
    rules
}

/// Reverses both sides and toggles every bar.
pub fn mirror_rule(lhs: &[String], rhs: &[String]) -> Option<TokenRule> {
    let flip = |w: &[String]| -> Option<Vec<String>> {
        w.iter()
            .rev()
            .map(|t| toggle_bar(t).or_else(|| (t == "0" || t == "1").then(|| t.clone())))
            .collect()
    };
    Some((flip(lhs)?, flip(rhs)?))
}

fn assemble(
    builder: Builder,
    tokens: Vec<String>,
    t3: &[&str],
) -> Result<GeneratedSystem, SystemError> {
    let alphabet = Alphabet::new(tokens)?;
    let word = |w: &[String]| -> Word {
        w.iter()
            .map(|t| alphabet.symbol(t).expect("generated token"))
            .collect()
    };
    let rules: Vec<(Word, Word)> = builder
        .rules
        .iter()
        .map(|(l, r)| (word(l), word(r)))
        .collect();
    let t1 = vec![alphabet.symbol("$\u{304}").expect("sentinel")];
    let t2 = vec![alphabet.symbol("$").expect("sentinel")];
    let t3: Word = t3
        .iter()
        .map(|t| alphabet.symbol(t).expect("t3 token"))
        .collect();
    let system = ThueSystem::new(alphabet, rules, t1, t2, t3)?;
    Ok(GeneratedSystem {
        system,
        groups: RuleGroups {
            groups: builder.groups,
        },
    })
}

/// The full MIDBIT system with `t1 = $̄`, `t2 = $`, `t3 = $̄ 0 $`.
pub fn generate_midbit_system() -> GeneratedSystem {
    let mut b = Builder {
        groups: Vec::new(),
        rules: Vec::new(),
    };
    bitstring_groups(&mut b);
    let qbar = sweep_family("Q\u{304}", Side::Odd);
    let rbar = sweep_family("R\u{304}", Side::Even);
    let mirror = |family: &[TokenRule]| -> Vec<TokenRule> {
        family
            .iter()
            .map(|(l, r)| mirror_rule(l, r).expect("sweep rules avoid P̄"))
            .collect()
    };
    let q = mirror(&qbar);
    let r = mirror(&rbar);
    b.group("sweep Q\u{304}", qbar);
    b.group("sweep R\u{304}", rbar);
    b.group("sweep Q", q);
    b.group("sweep R", r);
    assemble(b, midbit_alphabet(), &["$\u{304}", "0", "$"]).expect("MIDBIT is well formed")
}

/// Only the 40 short-string rules, over `{$̄, $, 0, 1}`.
pub fn midbit_short_system() -> ThueSystem {
    let mut b = Builder {
        groups: Vec::new(),
        rules: Vec::new(),
    };
    bitstring_groups(&mut b);
    b.rules.truncate(40);
    b.groups.truncate(1);
    let tokens = toks(&["$\u{304}", "$", "0", "1"]);
    assemble(b, tokens, &["$\u{304}", "0", "$"])
        .expect("well formed")
        .system
}

/// The 208 bitstring-redex rules alone, over the full alphabet.
pub fn midbit_bitstring_subsystem() -> ThueSystem {
    let mut b = Builder {
        groups: Vec::new(),
        rules: Vec::new(),
    };
    bitstring_groups(&mut b);
    assemble(b, midbit_alphabet(), &["$\u{304}", "0", "$"])
        .expect("well formed")
        .system
}

/// The input word for a bitstring over a system whose alphabet has
/// tokens `0` and `1`.
pub fn bits_to_word(sys: &ThueSystem, bits: &[u8]) -> Word {
    let zero = sys.alphabet().symbol("0").expect("alphabet has 0");
    let one = sys.alphabet().symbol("1").expect("alphabet has 1");
    bits.iter()
        .map(|&b| if b == 0 { zero } else { one })
        .collect()
}

pub fn parse_bits(text: &str) -> Option<Vec<u8>> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Some(0),
            '1' => Some(1),
            _ => None,
        })
        .collect()
}

pub fn render_bits(bits: &[u8]) -> String {
    bits.iter().map(|b| char::from(b'0' + b)).collect()
}

/// All bitstrings of length `n`, in lexicographic order.
pub fn all_bitstrings(n: usize) -> impl Iterator<Item = Vec<u8>> {
    bits(n)
}

pub fn midbit_oracle(x: &[u8]) -> Option<u8> {
    (x.len() % 2 == 1).then(|| x[x.len() / 2])
}

pub fn is_palindrome(x: &[u8]) -> bool {
    x.iter().eq(x.iter().rev())
}

pub fn is_square(x: &[u8]) -> bool {
    x.len().is_multiple_of(2) && x[..x.len() / 2] == x[x.len() / 2..]
}

/// A context `(u, v)` such that exactly one of `u x v`, `u y v` is a
/// palindrome.
pub fn separating_context(x: &[u8], y: &[u8]) -> Result<(Vec<u8>, Vec<u8>), LangError> {
    if x == y {
        return Err(LangError::SameStrings);
    }
    let longer = if (y.len(), y) >= (x.len(), x) { y } else { x };
    let last = *longer.last().expect("the longer string is nonempty");
    let mut v = vec![1 - last; longer.len()];
    v.extend(longer.iter().rev());
    let u = Vec::new();
    let wrap = |s: &[u8]| [&u[..], s, &v[..]].concat();
    if is_palindrome(&wrap(x)) == is_palindrome(&wrap(y)) {
        return Err(LangError::Unverified);
    }
    Ok((u, v))
}

pub const DYCK_TEXT: &str = "\
# a and b cancel; accepts the balanced strings
alphabet a b c d
t1 c
t2 d
t3 c d
rule a b ->
";

pub const AA_TEXT: &str = "\
# accepts a+
alphabet a b
t3 a
rule a a -> a
";

/// Cancels adjacent `1 0`; accepts strings of the form `0^k 1^k`.
pub const BITDYCK_TEXT: &str = "\
alphabet 0 1 $\u{304} $
t1 $\u{304}
t2 $
t3 $\u{304} $
rule 0 1 ->
";

/// Cancels equal adjacent bits; every `w w^R` reduces to the empty string.
pub const PAIRS_TEXT: &str = "\
alphabet 0 1 $\u{304} $
t1 $\u{304}
t2 $
t3 $\u{304} $
rule 0 0 ->
rule 1 1 ->
";

/// Named built-in systems: DYCK, AA, BITDYCK, PAIRS, MIDBIT5 (the
/// short-string rules) and the full MIDBIT.
pub fn builtin_systems() -> Vec<(&'static str, ThueSystem)> {
    vec![
        ("DYCK", parse_system(DYCK_TEXT).expect("builtin")),
        ("AA", parse_system(AA_TEXT).expect("builtin")),
        ("BITDYCK", parse_system(BITDYCK_TEXT).expect("builtin")),
        ("PAIRS", parse_system(PAIRS_TEXT).expect("builtin")),
        ("MIDBIT5", midbit_short_system()),
        ("MIDBIT", generate_midbit_system().system),
    ]
}

pub fn builtin_system(name: &str) -> Option<ThueSystem> {
    match name {
        "DYCK" => Some(parse_system(DYCK_TEXT).expect("builtin")),
        "AA" => Some(parse_system(AA_TEXT).expect("builtin")),
        "BITDYCK" => Some(parse_system(BITDYCK_TEXT).expect("builtin")),
        "PAIRS" => Some(parse_system(PAIRS_TEXT).expect("builtin")),
        "MIDBIT5" => Some(midbit_short_system()),
        "MIDBIT" => Some(generate_midbit_system().system),
        _ => None,
    }
}

/// Symbols of the word spelled by space-separated tokens, for tests and
/// examples.
pub fn word(sys: &ThueSystem, text: &str) -> Word {
    sys.alphabet().parse_word(text).expect("tokens in alphabet")
}

/// Convenience for checking the sweep invariants: the barred packing of an
/// even-length bitstring as symbols.
pub fn packed_bar_word(sys: &ThueSystem, y: &[u8]) -> Vec<Symbol> {
    packed_bar(y)
        .iter()
        .map(|t| sys.alphabet().symbol(t).expect("double symbol"))
        .collect()
}
