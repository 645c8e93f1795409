//! Length-reducing Thue systems: the data model, leftmost reduction,
//! exhaustive normal forms and the critical-pair confluence test.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

/// Tokens reserved for the reduction machine's sentinels and blank.
pub const RESERVED_TOKENS: [&str; 3] = ["CENT", "DOLLAR", "B"];

/// An alphabet symbol, stored as its index in the owning [`Alphabet`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub u16);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

pub type Word = Vec<Symbol>;
pub type RuleId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    tokens: Vec<String>,
    lookup: HashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new<I, S>(tokens: I) -> Result<Self, SystemError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut alphabet = Alphabet {
            tokens: Vec::new(),
            lookup: HashMap::new(),
        };
        for tok in tokens {
            let tok = tok.into();
            if tok.is_empty() || tok.chars().any(char::is_whitespace) || tok == "->" {
                return Err(SystemError::BadToken(tok));
            }
            if RESERVED_TOKENS.contains(&tok.as_str()) {
                return Err(SystemError::ReservedToken(tok));
            }
            if alphabet.lookup.contains_key(&tok) {
                return Err(SystemError::DuplicateToken(tok));
            }
            if alphabet.tokens.len() >= u16::MAX as usize {
                return Err(SystemError::BadToken(tok));
            }
            let sym = Symbol(alphabet.tokens.len() as u16);
            alphabet.lookup.insert(tok.clone(), sym);
            alphabet.tokens.push(tok);
        }
        if alphabet.tokens.is_empty() {
            return Err(SystemError::MissingAlphabet);
        }
        Ok(alphabet)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn symbol(&self, token: &str) -> Option<Symbol> {
        self.lookup.get(token).copied()
    }

    pub fn token(&self, sym: Symbol) -> &str {
        &self.tokens[sym.index()]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.tokens.len()).map(|i| Symbol(i as u16))
    }

    /// Parses a whitespace-separated token list.
    pub fn parse_word(&self, text: &str) -> Result<Word, SystemError> {
        text.split_whitespace()
            .map(|tok| {
                self.symbol(tok).ok_or_else(|| SystemError::UnknownSymbol {
                    line: 0,
                    token: tok.to_string(),
                })
            })
            .collect()
    }

    pub fn render(&self, word: &[Symbol]) -> String {
        let mut out = String::new();
        for (i, &s) in word.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(self.token(s));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub id: RuleId,
    pub lhs: Word,
    pub rhs: Word,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("no alphabet declared")]
    MissingAlphabet,
    #[error("invalid token {0:?}")]
    BadToken(String),
    #[error("token {0:?} is reserved")]
    ReservedToken(String),
    #[error("token {0:?} declared twice")]
    DuplicateToken(String),
    #[error("line {line}: symbol {token:?} is not in the alphabet")]
    UnknownSymbol { line: usize, token: String },
    #[error("rule {rule}: left-hand side is empty")]
    EmptyLhs { rule: RuleId },
    #[error("rule {rule}: right-hand side is not shorter than the left-hand side")]
    NotLengthReducing { rule: RuleId },
    #[error("rules {first} and {second} share the same left-hand side")]
    DuplicateLhs { first: RuleId, second: RuleId },
    #[error("target t3 is reducible (rule {rule} applies)")]
    ReducibleTarget { rule: RuleId },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("string is irreducible")]
    Irreducible,
    #[error("string of length {len} exceeds the exhaustive-search limit {limit}")]
    SizeLimit { len: usize, limit: usize },
}

/// A redex occurrence. Positions are 1-based and inclusive.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Redex {
    pub start: usize,
    pub end: usize,
    pub rule: RuleId,
}

/// A length-reducing Thue system together with the context strings
/// `t1`, `t2` and the irreducible target `t3` of the language it defines.
#[derive(Clone, Debug)]
pub struct ThueSystem {
    alphabet: Alphabet,
    rules: Vec<Rule>,
    t1: Word,
    t2: Word,
    t3: Word,
    max_redex_len: usize,
    by_lhs: HashMap<Box<[Symbol]>, RuleId>,
}

impl ThueSystem {
    pub fn new(
        alphabet: Alphabet,
        rules: Vec<(Word, Word)>,
        t1: Word,
        t2: Word,
        t3: Word,
    ) -> Result<Self, SystemError> {
        let in_alphabet = |w: &[Symbol]| w.iter().all(|s| s.index() < alphabet.len());
        for w in [&t1, &t2, &t3] {
            if let Some(s) = w.iter().find(|s| s.index() >= alphabet.len()) {
                return Err(SystemError::UnknownSymbol {
                    line: 0,
                    token: format!("#{}", s.0),
                });
            }
        }
        let mut by_lhs: HashMap<Box<[Symbol]>, RuleId> = HashMap::with_capacity(rules.len());
        let mut out = Vec::with_capacity(rules.len());
        let mut max_redex_len = 0;
        for (id, (lhs, rhs)) in rules.into_iter().enumerate() {
            if lhs.is_empty() {
                return Err(SystemError::EmptyLhs { rule: id });
            }
            if rhs.len() >= lhs.len() {
                return Err(SystemError::NotLengthReducing { rule: id });
            }
            if !in_alphabet(&lhs) || !in_alphabet(&rhs) {
                return Err(SystemError::UnknownSymbol {
                    line: 0,
                    token: format!("rule {id}"),
                });
            }
            if let Some(&first) = by_lhs.get(lhs.as_slice()) {
                return Err(SystemError::DuplicateLhs { first, second: id });
            }
            by_lhs.insert(lhs.clone().into_boxed_slice(), id);
            max_redex_len = max_redex_len.max(lhs.len());
            out.push(Rule { id, lhs, rhs });
        }
        let sys = ThueSystem {
            alphabet,
            rules: out,
            t1,
            t2,
            t3,
            max_redex_len,
            by_lhs,
        };
        if let Some(redex) = sys.find_leftmost_redex(&sys.t3) {
            return Err(SystemError::ReducibleTarget { rule: redex.rule });
        }
        Ok(sys)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, id: RuleId) -> &Rule {
        &self.rules[id]
    }

    pub fn t1(&self) -> &[Symbol] {
        &self.t1
    }

    pub fn t2(&self) -> &[Symbol] {
        &self.t2
    }

    pub fn t3(&self) -> &[Symbol] {
        &self.t3
    }

    /// The maximum redex length `L`.
    pub fn max_redex_len(&self) -> usize {
        self.max_redex_len
    }

    pub fn rule_for_lhs(&self, lhs: &[Symbol]) -> Option<RuleId> {
        self.by_lhs.get(lhs).copied()
    }

    /// Leftmost redex: minimal end position, then longest lhs, then lowest rule id.
    pub fn find_leftmost_redex(&self, s: &[Symbol]) -> Option<Redex> {
        for end in 1..=s.len() {
            for len in (1..=self.max_redex_len.min(end)).rev() {
                let start = end - len;
                if let Some(&rule) = self.by_lhs.get(&s[start..end]) {
                    return Some(Redex {
                        start: start + 1,
                        end,
                        rule,
                    });
                }
            }
        }
        None
    }

    pub fn is_irreducible(&self, s: &[Symbol]) -> bool {
        self.find_leftmost_redex(s).is_none()
    }

    pub fn reduce_once_leftmost(&self, s: &[Symbol]) -> Result<Word, RewriteError> {
        let redex = self
            .find_leftmost_redex(s)
            .ok_or(RewriteError::Irreducible)?;
        Ok(self.apply_at(s, redex.start - 1, redex.rule))
    }

    fn apply_at(&self, s: &[Symbol], offset: usize, rule: RuleId) -> Word {
        let rule = &self.rules[rule];
        let mut out = Vec::with_capacity(s.len() - rule.lhs.len() + rule.rhs.len());
        out.extend_from_slice(&s[..offset]);
        out.extend_from_slice(&rule.rhs);
        out.extend_from_slice(&s[offset + rule.lhs.len()..]);
        out
    }

    pub fn normal_form_leftmost(&self, s: &[Symbol]) -> Word {
        let mut cur = s.to_vec();
        while let Ok(next) = self.reduce_once_leftmost(&cur) {
            cur = next;
        }
        cur
    }

    /// Every string on the leftmost reduction path from `s`, `s` first.
    pub fn leftmost_derivation(&self, s: &[Symbol]) -> Vec<Word> {
        let mut path = vec![s.to_vec()];
        while let Ok(next) = self.reduce_once_leftmost(path.last().unwrap()) {
            path.push(next);
        }
        path
    }

    /// All one-step reducts of `s`, one per redex occurrence.
    pub fn one_step_reducts(&self, s: &[Symbol]) -> Vec<Word> {
        let mut out = Vec::new();
        for start in 0..s.len() {
            for len in 1..=self.max_redex_len.min(s.len() - start) {
                if let Some(&rule) = self.by_lhs.get(&s[start..start + len]) {
                    out.push(self.apply_at(s, start, rule));
                }
            }
        }
        out
    }

    /// Irreducible strings reachable from `s` under any reduction order.
    pub fn all_normal_forms(
        &self,
        s: &[Symbol],
        size_limit: usize,
    ) -> Result<BTreeSet<Word>, RewriteError> {
        if s.len() > size_limit {
            return Err(RewriteError::SizeLimit {
                len: s.len(),
                limit: size_limit,
            });
        }
        let mut seen: HashSet<Word> = HashSet::new();
        let mut stack = vec![s.to_vec()];
        let mut forms = BTreeSet::new();
        seen.insert(s.to_vec());
        while let Some(cur) = stack.pop() {
            let next = self.one_step_reducts(&cur);
            if next.is_empty() {
                forms.insert(cur);
                continue;
            }
            for w in next {
                if seen.insert(w.clone()) {
                    stack.push(w);
                }
            }
        }
        Ok(forms)
    }

    pub fn critical_pairs(&self) -> Vec<CriticalPair> {
        // proper prefix -> rules whose lhs strictly extends it
        let mut by_prefix: HashMap<&[Symbol], Vec<RuleId>> = HashMap::new();
        for rule in &self.rules {
            for k in 1..rule.lhs.len() {
                by_prefix.entry(&rule.lhs[..k]).or_default().push(rule.id);
            }
        }
        let mut pairs = Vec::new();
        for r1 in &self.rules {
            let u1 = &r1.lhs;
            // suffix-prefix overlaps
            for k in 1..u1.len() {
                let suffix = &u1[u1.len() - k..];
                let Some(ids) = by_prefix.get(suffix) else {
                    continue;
                };
                for &id2 in ids {
                    let r2 = &self.rules[id2];
                    let mut peak = u1.clone();
                    peak.extend_from_slice(&r2.lhs[k..]);
                    let left = self.apply_at(&peak, 0, r1.id);
                    let right = self.apply_at(&peak, u1.len() - k, id2);
                    pairs.push(CriticalPair {
                        peak,
                        left,
                        right,
                        kind: OverlapKind::SuffixPrefix,
                        rules: (r1.id, id2),
                    });
                }
            }
            // another lhs occurring inside this one
            for start in 0..u1.len() {
                for len in 1..=(u1.len() - start) {
                    if len == u1.len() {
                        continue;
                    }
                    if let Some(&id2) = self.by_lhs.get(&u1[start..start + len]) {
                        let left = self.rhs_of(r1.id).to_vec();
                        let right = self.apply_at(u1, start, id2);
                        pairs.push(CriticalPair {
                            peak: u1.clone(),
                            left,
                            right,
                            kind: OverlapKind::Containment,
                            rules: (r1.id, id2),
                        });
                    }
                }
            }
        }
        pairs
    }

    fn rhs_of(&self, id: RuleId) -> &[Symbol] {
        &self.rules[id].rhs
    }

    /// Confluence via joinability of every critical pair. Length reduction
    /// guarantees termination, so local confluence suffices.
    pub fn is_church_rosser(&self) -> ChurchRosser {
        let limit = 2 * self.max_redex_len;
        for cp in self.critical_pairs() {
            let left = self
                .all_normal_forms(&cp.left, limit)
                .expect("reducts are shorter than the peak");
            let right = self
                .all_normal_forms(&cp.right, limit)
                .expect("reducts are shorter than the peak");
            if left.is_disjoint(&right) {
                return ChurchRosser::No {
                    witness: cp,
                    left_forms: left,
                    right_forms: right,
                };
            }
        }
        ChurchRosser::Yes
    }

    /// Membership in the language `{x : t1 x t2 ->* t3}`.
    pub fn accepts(&self, x: &[Symbol]) -> bool {
        self.normal_form_leftmost(&self.wrap(x)) == self.t3
    }

    /// `t1 x t2`.
    pub fn wrap(&self, x: &[Symbol]) -> Word {
        let mut w = Vec::with_capacity(self.t1.len() + x.len() + self.t2.len());
        w.extend_from_slice(&self.t1);
        w.extend_from_slice(x);
        w.extend_from_slice(&self.t2);
        w
    }

    /// Serializes back to the line-based system format.
    pub fn to_text(&self) -> String {
        let a = &self.alphabet;
        let mut out = String::new();
        out.push_str("alphabet");
        for tok in a.tokens() {
            out.push(' ');
            out.push_str(tok);
        }
        out.push('\n');
        for (name, w) in [("t1", &self.t1), ("t2", &self.t2), ("t3", &self.t3)] {
            out.push_str(name);
            if !w.is_empty() {
                out.push(' ');
                out.push_str(&a.render(w));
            }
            out.push('\n');
        }
        for rule in &self.rules {
            out.push_str("rule ");
            out.push_str(&a.render(&rule.lhs));
            out.push_str(" ->");
            if !rule.rhs.is_empty() {
                out.push(' ');
                out.push_str(&a.render(&rule.rhs));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum OverlapKind {
    SuffixPrefix,
    Containment,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalPair {
    pub peak: Word,
    pub left: Word,
    pub right: Word,
    pub kind: OverlapKind,
    pub rules: (RuleId, RuleId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChurchRosser {
    Yes,
    No {
        witness: CriticalPair,
        left_forms: BTreeSet<Word>,
        right_forms: BTreeSet<Word>,
    },
}

impl ChurchRosser {
    pub fn is_yes(&self) -> bool {
        matches!(self, ChurchRosser::Yes)
    }
}

impl fmt::Display for OverlapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OverlapKind::SuffixPrefix => write!(f, "suffix-prefix"),
            OverlapKind::Containment => write!(f, "containment"),
        }
    }
}

/// Parses the line-based system format:
///
/// ```text
/// # comment
/// alphabet a b c d
/// t1 c
/// t2 d
/// t3 c d
/// rule a b ->
/// ```
pub fn parse_system(text: &str) -> Result<ThueSystem, SystemError> {
    let mut alphabet: Option<Alphabet> = None;
    let mut contexts: [Option<Word>; 3] = [None, None, None];
    let mut rules = Vec::new();
    let mut rule_lines = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let keyword = toks.next().unwrap();
        let malformed = |message: &str| SystemError::Malformed {
            line: line_no,
            message: message.to_string(),
        };
        if alphabet.is_none() && keyword != "alphabet" {
            return Err(malformed("the first declaration must be `alphabet`"));
        }
        let word = |alpha: &Alphabet, toks: &[&str]| -> Result<Word, SystemError> {
            toks.iter()
                .map(|t| {
                    alpha.symbol(t).ok_or_else(|| SystemError::UnknownSymbol {
                        line: line_no,
                        token: t.to_string(),
                    })
                })
                .collect()
        };
        match keyword {
            "alphabet" => {
                if alphabet.is_some() {
                    return Err(malformed("alphabet declared twice"));
                }
                alphabet = Some(Alphabet::new(toks)?);
            }
            "t1" | "t2" | "t3" => {
                let slot = (keyword.as_bytes()[1] - b'1') as usize;
                if contexts[slot].is_some() {
                    return Err(malformed(&format!("{keyword} declared twice")));
                }
                let rest: Vec<&str> = toks.collect();
                contexts[slot] = Some(word(alphabet.as_ref().unwrap(), &rest)?);
            }
            "rule" => {
                let rest: Vec<&str> = toks.collect();
                let arrows: Vec<usize> = rest
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| **t == "->")
                    .map(|(i, _)| i)
                    .collect();
                if arrows.len() != 1 {
                    return Err(malformed("a rule needs exactly one `->`"));
                }
                let alpha = alphabet.as_ref().unwrap();
                let lhs = word(alpha, &rest[..arrows[0]])?;
                let rhs = word(alpha, &rest[arrows[0] + 1..])?;
                rules.push((lhs, rhs));
                rule_lines.push(line_no);
            }
            other => return Err(malformed(&format!("unknown keyword {other:?}"))),
        }
    }
    let alphabet = alphabet.ok_or(SystemError::MissingAlphabet)?;
    let [t1, t2, t3] = contexts.map(Option::unwrap_or_default);
    ThueSystem::new(alphabet, rules, t1, t2, t3)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DYCK: &str = "alphabet a b c d\nt1 c\nt2 d\nt3 c d\nrule a b ->\n";

    fn sys(text: &str) -> ThueSystem {
        parse_system(text).unwrap()
    }

    fn w(sys: &ThueSystem, s: &str) -> Word {
        sys.alphabet().parse_word(s).unwrap()
    }

    #[test]
    fn parses_dyck() {
        let s = sys(DYCK);
        assert_eq!(s.rules().len(), 1);
        assert_eq!(s.max_redex_len(), 2);
        assert_eq!(s.t3(), w(&s, "c d").as_slice());
        assert!(s.rule(0).rhs.is_empty());
    }

    #[test]
    fn rejects_bad_files() {
        let growing = "alphabet a b\nrule a -> a b\n";
        assert!(matches!(
            parse_system(growing),
            Err(SystemError::NotLengthReducing { rule: 0 })
        ));
        let reducible = "alphabet a b c d\nt3 a b\nrule a b ->\n";
        assert!(matches!(
            parse_system(reducible),
            Err(SystemError::ReducibleTarget { rule: 0 })
        ));
        let dup = "alphabet a b\nrule a b -> a\nrule a b -> b\n";
        assert!(matches!(
            parse_system(dup),
            Err(SystemError::DuplicateLhs {
                first: 0,
                second: 1
            })
        ));
        let unknown = "alphabet a b\nrule a z -> a\n";
        assert!(matches!(
            parse_system(unknown),
            Err(SystemError::UnknownSymbol { line: 2, .. })
        ));
        assert!(matches!(
            parse_system("alphabet a B\n"),
            Err(SystemError::ReservedToken(_))
        ));
        assert!(matches!(
            parse_system("rule a -> \n"),
            Err(SystemError::Malformed { line: 1, .. })
        ));
        assert!(parse_system("alphabet a\nrule a a -> a -> a\n").is_err());
    }

    #[test]
    fn text_roundtrip() {
        let s = sys(DYCK);
        let again = sys(&s.to_text());
        assert_eq!(again.to_text(), s.to_text());
    }

    #[test]
    fn leftmost_redex_examples() {
        let s = sys(DYCK);
        let r = s.find_leftmost_redex(&w(&s, "a a b b")).unwrap();
        assert_eq!((r.start, r.end, r.rule), (2, 3, 0));
        assert!(s.find_leftmost_redex(&w(&s, "b b a a")).is_none());

        let t = sys("alphabet a b\nrule a a b -> a\nrule a b -> b\n");
        let r = t.find_leftmost_redex(&w(&t, "a a b")).unwrap();
        assert_eq!((r.start, r.rule), (1, 0));
    }

    #[test]
    fn reduce_and_normal_form_examples() {
        let s = sys(DYCK);
        assert_eq!(
            s.reduce_once_leftmost(&w(&s, "a a b b")).unwrap(),
            w(&s, "a b")
        );
        assert_eq!(
            s.reduce_once_leftmost(&w(&s, "a b a b")).unwrap(),
            w(&s, "a b")
        );
        assert_eq!(
            s.reduce_once_leftmost(&w(&s, "b a")),
            Err(RewriteError::Irreducible)
        );
        assert_eq!(
            s.normal_form_leftmost(&w(&s, "a a b b")),
            Vec::<Symbol>::new()
        );
        assert_eq!(s.normal_form_leftmost(&w(&s, "b a")), w(&s, "b a"));

        let aa = sys("alphabet a\nrule a a -> a\n");
        assert_eq!(
            aa.reduce_once_leftmost(&w(&aa, "a a a")).unwrap(),
            w(&aa, "a a")
        );
    }

    #[test]
    fn all_normal_forms_examples() {
        let s = sys(DYCK);
        let forms = s.all_normal_forms(&w(&s, "a a b b"), 10).unwrap();
        assert_eq!(forms.into_iter().collect::<Vec<_>>(), vec![Vec::new()]);
        assert!(matches!(
            s.all_normal_forms(&w(&s, "a a b b"), 3),
            Err(RewriteError::SizeLimit { .. })
        ));

        // Two reduction orders ending in different normal forms.
        let two = sys("alphabet a b c\nrule a b -> a\nrule b c -> b\n");
        let forms = two.all_normal_forms(&w(&two, "a b c"), 10).unwrap();
        assert_eq!(
            forms.into_iter().collect::<Vec<_>>(),
            vec![w(&two, "a"), w(&two, "a c")]
        );

        let aa = sys("alphabet a\nrule a a -> a\n");
        let forms = aa.all_normal_forms(&w(&aa, "a a a"), 10).unwrap();
        assert_eq!(forms.into_iter().collect::<Vec<_>>(), vec![w(&aa, "a")]);
    }

    #[test]
    fn critical_pair_examples() {
        let aa = sys("alphabet a\nrule a a -> a\n");
        let cps = aa.critical_pairs();
        assert_eq!(cps.len(), 1);
        assert_eq!(cps[0].peak, w(&aa, "a a a"));
        assert_eq!(cps[0].left, w(&aa, "a a"));
        assert_eq!(cps[0].right, w(&aa, "a a"));
        assert!(aa.is_church_rosser().is_yes());

        assert!(sys(DYCK).critical_pairs().is_empty());
        assert!(sys(DYCK).is_church_rosser().is_yes());

        let bad = sys("alphabet a b\nrule a b -> a\nrule b a -> b\n");
        match bad.is_church_rosser() {
            ChurchRosser::No {
                witness,
                left_forms,
                right_forms,
            } => {
                assert_eq!(witness.peak, w(&bad, "a b a"));
                assert_eq!(
                    left_forms.into_iter().collect::<Vec<_>>(),
                    vec![w(&bad, "a a")]
                );
                assert_eq!(
                    right_forms.into_iter().collect::<Vec<_>>(),
                    vec![w(&bad, "a")]
                );
            }
            ChurchRosser::Yes => panic!("expected a non-joinable pair"),
        }

        let joinable = sys("alphabet a b c\nrule a b -> a\nrule b c -> c\n");
        assert!(joinable.is_church_rosser().is_yes());
    }

    #[test]
    fn containment_overlaps_are_found() {
        let s = sys("alphabet a b c\nrule a b c -> c\nrule b -> \n");
        let cps = s.critical_pairs();
        assert_eq!(cps.len(), 1);
        assert_eq!(cps[0].kind, OverlapKind::Containment);
        assert_eq!(cps[0].left, w(&s, "c"));
        assert_eq!(cps[0].right, w(&s, "a c"));
        assert!(!s.is_church_rosser().is_yes());
    }

    #[test]
    fn accepts_examples() {
        let s = sys(DYCK);
        assert!(s.accepts(&w(&s, "a b")));
        assert!(!s.accepts(&w(&s, "b a")));
        assert!(s.accepts(&[]));
    }
}
