//! The redex automaton: a multi-pattern DFA over `Σ ∪ {B}` that enters an
//! accepting state exactly at the end of the leftmost redex.
//!
//! Construction is the usual goto/failure scheme over a trie of left-hand
//! sides, flattened into a total transition table. Each accepting state names
//! the rule chosen by the leftmost-redex tie-break (longest lhs ending at the
//! current position, then lowest rule id), so runtime never re-resolves ties.
//! The automaton is not minimized: state identity shows up in compound tape
//! symbols and therefore in crossing sequences.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::rewrite::{RuleId, Symbol, ThueSystem};

/// A state of the redex automaton; state 0 is the initial state `k0`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DfaState(pub u32);

impl DfaState {
    pub const INITIAL: DfaState = DfaState(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A symbol of `Σ ∪ {B}`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Blank,
    Sym(Symbol),
}

impl Letter {
    pub fn is_blank(self) -> bool {
        matches!(self, Letter::Blank)
    }

    pub fn symbol(self) -> Option<Symbol> {
        match self {
            Letter::Blank => None,
            Letter::Sym(s) => Some(s),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RedexDfa {
    symbols: usize,
    delta: Vec<u32>,
    accepting: Vec<Option<RuleId>>,
}

impl RedexDfa {
    pub fn build(sys: &ThueSystem) -> RedexDfa {
        let symbols = sys.alphabet().len();
        let mut goto: Vec<Vec<Option<u32>>> = vec![vec![None; symbols]];
        let mut terminal: Vec<Option<RuleId>> = vec![None];
        for rule in sys.rules() {
            let mut node = 0usize;
            for s in &rule.lhs {
                node = match goto[node][s.index()] {
                    Some(next) => next as usize,
                    None => {
                        goto.push(vec![None; symbols]);
                        terminal.push(None);
                        let next = goto.len() - 1;
                        goto[node][s.index()] = Some(next as u32);
                        next
                    }
                };
            }
            // lhs are unique, so a node names at most one rule
            terminal[node] = Some(rule.id);
        }

        // Breadth-first renumbering keeps k0 = 0 and makes dumps stable.
        let count = goto.len();
        let mut order = Vec::with_capacity(count);
        let mut rank = vec![u32::MAX; count];
        let mut queue = VecDeque::from([0usize]);
        rank[0] = 0;
        while let Some(node) = queue.pop_front() {
            order.push(node);
            for s in 0..symbols {
                if let Some(next) = goto[node][s] {
                    let next = next as usize;
                    rank[next] = order.len() as u32 + queue.len() as u32;
                    queue.push_back(next);
                }
            }
        }

        let width = symbols + 1;
        let mut delta = vec![0u32; count * width];
        let mut accepting = vec![None; count];
        let mut fail = vec![0u32; count];
        for &node in &order {
            let state = rank[node] as usize;
            let f = fail[state] as usize;
            accepting[state] = terminal[node].or(if state == 0 { None } else { accepting[f] });
            for s in 0..symbols {
                match goto[node][s] {
                    Some(child) => {
                        let child = rank[child as usize];
                        delta[state * width + s] = child;
                        fail[child as usize] = if state == 0 { 0 } else { delta[f * width + s] };
                    }
                    None => {
                        delta[state * width + s] =
                            if state == 0 { 0 } else { delta[f * width + s] };
                    }
                }
            }
            delta[state * width + symbols] = state as u32;
        }
        RedexDfa {
            symbols,
            delta,
            accepting,
        }
    }

    pub fn state_count(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> DfaState {
        DfaState::INITIAL
    }

    pub fn next(&self, k: DfaState, letter: Letter) -> DfaState {
        let col = match letter {
            Letter::Blank => self.symbols,
            Letter::Sym(s) => s.index(),
        };
        DfaState(self.delta[k.index() * (self.symbols + 1) + col])
    }

    pub fn accepting(&self, k: DfaState) -> Option<RuleId> {
        self.accepting[k.index()]
    }

    pub fn states(&self) -> impl Iterator<Item = DfaState> {
        (0..self.state_count() as u32).map(DfaState)
    }

    /// First position (1-based) at which an accepting state is entered.
    pub fn scan(&self, letters: &[Letter]) -> Option<(usize, RuleId)> {
        let mut k = self.initial();
        for (i, &a) in letters.iter().enumerate() {
            k = self.next(k, a);
            if let Some(rule) = self.accepting(k) {
                return Some((i + 1, rule));
            }
        }
        None
    }

    /// True iff each cell's state is the automaton's state after reading
    /// the letters up to and including that cell.
    pub fn is_historical(&self, cells: &[(Letter, DfaState)]) -> bool {
        let mut k = self.initial();
        cells.iter().all(|&(a, kj)| {
            k = self.next(k, a);
            k == kj
        })
    }

    /// Tab-separated listing: a header, one `state` line per state with its
    /// accepted rule (or `-`), then one `delta` line per transition.
    pub fn dump(&self, sys: &ThueSystem) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "states\t{}", self.state_count());
        for k in self.states() {
            let acc = match self.accepting(k) {
                Some(r) => r.to_string(),
                None => "-".to_string(),
            };
            let _ = writeln!(out, "state\t{}\t{}", k.0, acc);
        }
        for k in self.states() {
            for s in sys.alphabet().symbols() {
                let _ = writeln!(
                    out,
                    "delta\t{}\t{}\t{}",
                    k.0,
                    sys.alphabet().token(s),
                    self.next(k, Letter::Sym(s)).0
                );
            }
            let _ = writeln!(out, "delta\t{}\tB\t{}", k.0, self.next(k, Letter::Blank).0);
        }
        out
    }
}

pub fn letters(word: &[Symbol]) -> Vec<Letter> {
    word.iter().map(|&s| Letter::Sym(s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::parse_system;

    const DYCK: &str = "alphabet a b c d\nt1 c\nt2 d\nt3 c d\nrule a b ->\n";

    #[test]
    fn dyck_automaton_by_hand() {
        let sys = parse_system(DYCK).unwrap();
        let dfa = RedexDfa::build(&sys);
        let a = Letter::Sym(Symbol(0));
        let b = Letter::Sym(Symbol(1));
        assert_eq!(dfa.state_count(), 3);
        let k0 = dfa.initial();
        let after_a = dfa.next(k0, a);
        let accept = dfa.next(after_a, b);
        assert_eq!(after_a, DfaState(1));
        assert_eq!(accept, DfaState(2));
        assert_eq!(dfa.next(after_a, a), after_a);
        assert_eq!(dfa.next(k0, b), k0);
        assert_eq!(dfa.accepting(accept), Some(0));
        assert_eq!(dfa.accepting(after_a), None);
        for k in dfa.states() {
            assert_eq!(dfa.next(k, Letter::Blank), k);
        }
    }

    #[test]
    fn longest_match_is_baked_in() {
        let sys = parse_system("alphabet a b\nrule a a b -> a\nrule a b -> b\n").unwrap();
        let dfa = RedexDfa::build(&sys);
        let w = letters(&sys.alphabet().parse_word("a a b").unwrap());
        assert_eq!(dfa.scan(&w), Some((3, 0)));
        let w = letters(&sys.alphabet().parse_word("b a b").unwrap());
        assert_eq!(dfa.scan(&w), Some((3, 1)));
    }

    #[test]
    fn scan_examples() {
        let sys = parse_system(DYCK).unwrap();
        let dfa = RedexDfa::build(&sys);
        let a = Letter::Sym(Symbol(0));
        let b = Letter::Sym(Symbol(1));
        assert_eq!(dfa.scan(&[a, Letter::Blank, b]), Some((3, 0)));
        assert_eq!(dfa.scan(&[b, b]), None);
        assert_eq!(dfa.scan(&[a, a, b, b]), Some((3, 0)));
    }

    #[test]
    fn historical_examples() {
        let sys = parse_system(DYCK).unwrap();
        let dfa = RedexDfa::build(&sys);
        let a = Letter::Sym(Symbol(0));
        assert!(dfa.is_historical(&[]));
        assert!(dfa.is_historical(&[(a, DfaState(1))]));
        assert!(!dfa.is_historical(&[(a, DfaState(0))]));
        assert!(dfa.is_historical(&[(a, DfaState(1)), (Letter::Blank, DfaState(1))]));
    }

    #[test]
    fn dump_is_tab_separated() {
        let sys = parse_system(DYCK).unwrap();
        let dump = RedexDfa::build(&sys).dump(&sys);
        assert!(dump.starts_with("states\t3\n"));
        assert!(dump.contains("state\t2\t0\n"));
        assert!(dump.contains("delta\t1\tb\t2\n"));
        assert!(dump.contains("delta\t0\tB\t0\n"));
    }
}
