//! Finite automata and rational transducers whose edges carry words, plus
//! regular expressions, bounded enumeration, and oracle slicing.
//!
//! Edges are labelled by words over a symmetric alphabet, with the empty
//! word allowed; cycles labelled entirely by empty words are rejected at
//! construction so bounded enumeration always terminates. Regular
//! expressions compile to such automata, and expressions shaped like
//! `u1* v1 u2* v2 ...` admit a direct enumeration that sidesteps the
//! generic breadth-first search.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::oracles::GroupOracle;
use crate::words::{same_alphabet, SymmetricAlphabet, Word, WordError};

/// Errors from automaton and regular expression handling.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomataError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("state {state} out of range for {states} states")]
    StateOutOfRange { state: usize, states: usize },
    /// A cycle whose labels are all empty would let enumeration spin
    /// forever without growing the word.
    #[error("cycle of empty-word labels")]
    EmptyLabelCycle,
    #[error("regular expression error at position {position}: {message}")]
    RegexSyntax { position: usize, message: String },
    /// Enumeration was cut off before completing.
    #[error("enumeration exceeded the budget of {budget} configurations")]
    BudgetExceeded { budget: u64 },
    #[error("malformed machine description: {0}")]
    Malformed(String),
}

fn check_state(state: usize, states: usize) -> Result<(), AutomataError> {
    if state >= states {
        return Err(AutomataError::StateOutOfRange { state, states });
    }
    Ok(())
}

/// Detects a cycle in the directed graph of zero-weight edges.
fn has_silent_cycle(states: usize, silent: &[Vec<usize>]) -> bool {
    // 0 = unseen, 1 = on stack, 2 = done.
    let mut color = vec![0u8; states];
    for root in 0..states {
        if color[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        color[root] = 1;
        while let Some(&(v, next)) = stack.last() {
            if next < silent[v].len() {
                stack.last_mut().expect("stack nonempty").1 += 1;
                let w = silent[v][next];
                match color[w] {
                    0 => {
                        color[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => return true,
                    _ => {}
                }
            } else {
                color[v] = 2;
                stack.pop();
            }
        }
    }
    false
}

#[derive(Serialize, Deserialize)]
struct FsaJson {
    alphabet: Vec<String>,
    states: usize,
    start: usize,
    accepting: Vec<usize>,
    edges: Vec<FsaEdgeJson>,
}

#[derive(Serialize, Deserialize)]
struct FsaEdgeJson {
    from: usize,
    label: String,
    to: usize,
}

/// A nondeterministic finite automaton with word labels on its edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fsa {
    alphabet: Arc<SymmetricAlphabet>,
    states: usize,
    start: usize,
    accepting: Vec<bool>,
    /// Outgoing edges per state: (label letters, target).
    edges: Vec<Vec<(Vec<usize>, usize)>>,
}

impl Fsa {
    /// Builds an automaton with edge labels given as word text.
    pub fn new(
        alphabet: &Arc<SymmetricAlphabet>,
        states: usize,
        start: usize,
        accepting: &[usize],
        edges: &[(usize, &str, usize)],
    ) -> Result<Self, AutomataError> {
        let parsed = edges
            .iter()
            .map(|&(from, label, to)| {
                Ok((from, alphabet.parse_word(label)?.letters().to_vec(), to))
            })
            .collect::<Result<Vec<_>, WordError>>()?;
        Self::from_parts(Arc::clone(alphabet), states, start, accepting, parsed)
    }

    fn from_parts(
        alphabet: Arc<SymmetricAlphabet>,
        states: usize,
        start: usize,
        accepting: &[usize],
        edges: Vec<(usize, Vec<usize>, usize)>,
    ) -> Result<Self, AutomataError> {
        check_state(start, states)?;
        let mut accept_flags = vec![false; states];
        for &a in accepting {
            check_state(a, states)?;
            accept_flags[a] = true;
        }
        let mut out: Vec<Vec<(Vec<usize>, usize)>> = vec![Vec::new(); states];
        let mut silent: Vec<Vec<usize>> = vec![Vec::new(); states];
        for (from, label, to) in edges {
            check_state(from, states)?;
            check_state(to, states)?;
            if label.is_empty() {
                silent[from].push(to);
            }
            out[from].push((label, to));
        }
        if has_silent_cycle(states, &silent) {
            return Err(AutomataError::EmptyLabelCycle);
        }
        Ok(Self { alphabet, states, start, accepting: accept_flags, edges: out })
    }

    pub fn alphabet(&self) -> &Arc<SymmetricAlphabet> {
        &self.alphabet
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn accepting_states(&self) -> Vec<usize> {
        (0..self.states).filter(|&s| self.accepting[s]).collect()
    }

    /// Edges as (from, label, to) triples.
    pub fn edge_triples(&self) -> Vec<(usize, Word, usize)> {
        let mut out = Vec::new();
        for (from, row) in self.edges.iter().enumerate() {
            for (label, to) in row {
                let w = self
                    .alphabet
                    .word_from_letters(label.clone())
                    .expect("stored labels are valid");
                out.push((from, w, *to));
            }
        }
        out
    }

    /// True when the automaton accepts `w`.
    ///
    /// Panics if `w` is spelled over a different alphabet.
    pub fn accepts(&self, w: &Word) -> bool {
        assert!(
            same_alphabet(&self.alphabet, w.alphabet()),
            "word is spelled over a foreign alphabet"
        );
        let target = w.letters();
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert((self.start, 0usize));
        queue.push_back((self.start, 0usize));
        while let Some((state, pos)) = queue.pop_front() {
            if pos == target.len() && self.accepting[state] {
                return true;
            }
            for (label, to) in &self.edges[state] {
                if target[pos..].starts_with(label) {
                    let next = (*to, pos + label.len());
                    if seen.insert(next) {
                        queue.push_back(next);
                    }
                }
            }
        }
        false
    }

    /// All accepted words of length at most `max_len`, in length-then-
    /// lexicographic order without duplicates.
    pub fn enumerate(&self, max_len: usize) -> Vec<Word> {
        self.enumerate_with_budget(max_len, u64::MAX)
            .expect("unlimited budget cannot be exceeded")
    }

    /// Bounded enumeration that gives up once more than `budget` distinct
    /// (state, word) configurations have been explored.
    pub fn enumerate_with_budget(
        &self,
        max_len: usize,
        budget: u64,
    ) -> Result<Vec<Word>, AutomataError> {
        let mut found: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
        let mut seen: HashSet<(usize, Vec<usize>)> = HashSet::new();
        let mut queue: VecDeque<(usize, Vec<usize>)> = VecDeque::new();
        let mut spent: u64 = 1;
        seen.insert((self.start, Vec::new()));
        queue.push_back((self.start, Vec::new()));
        while let Some((state, word)) = queue.pop_front() {
            if self.accepting[state] {
                found.insert((word.len(), word.clone()));
            }
            for (label, to) in &self.edges[state] {
                if word.len() + label.len() > max_len {
                    continue;
                }
                let mut next = word.clone();
                next.extend_from_slice(label);
                let key = (*to, next);
                if !seen.contains(&key) {
                    spent += 1;
                    if spent > budget {
                        return Err(AutomataError::BudgetExceeded { budget });
                    }
                    seen.insert(key.clone());
                    queue.push_back(key);
                }
            }
        }
        Ok(found
            .into_iter()
            .map(|(_, letters)| {
                self.alphabet
                    .word_from_letters(letters)
                    .expect("enumerated letters are valid")
            })
            .collect())
    }

    /// Serializes to JSON; labels use word text.
    pub fn to_json_string(&self) -> String {
        let edges = self
            .edge_triples()
            .into_iter()
            .map(|(from, label, to)| FsaEdgeJson { from, label: label.to_text(), to })
            .collect();
        let doc = FsaJson {
            alphabet: self.alphabet.positive_names().iter().map(|s| s.to_string()).collect(),
            states: self.states,
            start: self.start,
            accepting: self.accepting_states(),
            edges,
        };
        serde_json::to_string_pretty(&doc).expect("automaton serialization cannot fail")
    }

    /// Parses the JSON form produced by `to_json_string`.
    pub fn from_json_str(text: &str) -> Result<Self, AutomataError> {
        let doc: FsaJson = serde_json::from_str(text).map_err(|e| {
            AutomataError::Malformed(format!("bad automaton JSON: {e}"))
        })?;
        let names: Vec<&str> = doc.alphabet.iter().map(String::as_str).collect();
        let alphabet = SymmetricAlphabet::from_positive(&names).map_err(AutomataError::Word)?;
        let edges: Vec<(usize, &str, usize)> = doc
            .edges
            .iter()
            .map(|e| (e.from, e.label.as_str(), e.to))
            .collect();
        Self::new(&alphabet, doc.states, doc.start, &doc.accepting, &edges)
    }
}

/// Abstract syntax of a regular expression over a symmetric alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegexAst {
    /// Matches nothing.
    Empty,
    /// Matches only the empty word.
    Epsilon,
    /// Matches one letter (positive or inverse).
    Letter(usize),
    Concat(Vec<RegexAst>),
    Union(Vec<RegexAst>),
    Star(Box<RegexAst>),
}

impl RegexAst {
    /// True when the empty word matches.
    fn nullable(&self) -> bool {
        match self {
            RegexAst::Empty | RegexAst::Letter(_) => false,
            RegexAst::Epsilon => true,
            RegexAst::Concat(ps) => ps.iter().all(RegexAst::nullable),
            RegexAst::Union(ps) => ps.iter().any(RegexAst::nullable),
            RegexAst::Star(_) => true,
        }
    }

    /// An expression for the same language minus the empty word.
    fn without_empty_word(&self) -> RegexAst {
        if !self.nullable() {
            return self.clone();
        }
        match self {
            RegexAst::Epsilon => RegexAst::Empty,
            RegexAst::Union(ps) => {
                RegexAst::Union(ps.iter().map(RegexAst::without_empty_word).collect())
            }
            RegexAst::Star(inner) => RegexAst::Concat(vec![
                inner.without_empty_word(),
                RegexAst::Star(inner.clone()),
            ]),
            RegexAst::Concat(ps) => {
                // All parts are nullable here; a nonempty match has a first
                // part that contributes letters.
                let options = (0..ps.len())
                    .map(|i| {
                        let mut seq = vec![ps[i].without_empty_word()];
                        seq.extend(ps[i + 1..].iter().cloned());
                        RegexAst::Concat(seq)
                    })
                    .collect();
                RegexAst::Union(options)
            }
            RegexAst::Empty | RegexAst::Letter(_) => unreachable!("not nullable"),
        }
    }
}

/// A parsed regular expression tied to its alphabet.
///
/// Grammar: `+` is union, postfix `*` is iteration, juxtaposition is
/// concatenation, parentheses group. Letters follow the alphabet's
/// spelling, so `taTA` and `a_g a_h'*` both lex as letter sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Regex {
    alphabet: Arc<SymmetricAlphabet>,
    ast: RegexAst,
}

#[derive(Debug)]
enum RegexToken {
    Letter(usize),
    Star,
    Plus,
    Open,
    Close,
}

fn lex_regex(
    alphabet: &Arc<SymmetricAlphabet>,
    text: &str,
) -> Result<Vec<(usize, RegexToken)>, AutomataError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let token = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '*' => RegexToken::Star,
            '+' => RegexToken::Plus,
            '(' => RegexToken::Open,
            ')' => RegexToken::Close,
            _ => {
                let start = i;
                let name: String = if alphabet.is_single_char() {
                    chars[i..=i].iter().collect()
                } else {
                    let mut j = i;
                    while j < chars.len()
                        && !chars[j].is_whitespace()
                        && !matches!(chars[j], '*' | '+' | '(' | ')')
                    {
                        j += 1;
                    }
                    chars[i..j].iter().collect()
                };
                i = start + name.chars().count();
                let letter = alphabet.letter(&name).map_err(|e| {
                    AutomataError::RegexSyntax { position: start, message: e.to_string() }
                })?;
                tokens.push((start, RegexToken::Letter(letter)));
                continue;
            }
        };
        tokens.push((i, token));
        i += 1;
    }
    Ok(tokens)
}

struct RegexParser {
    tokens: Vec<(usize, RegexToken)>,
    pos: usize,
    end: usize,
}

impl RegexParser {
    fn error(&self, message: &str) -> AutomataError {
        let position = self.tokens.get(self.pos).map_or(self.end, |t| t.0);
        AutomataError::RegexSyntax { position, message: message.to_string() }
    }

    fn peek(&self) -> Option<&RegexToken> {
        self.tokens.get(self.pos).map(|t| &t.1)
    }

    fn union(&mut self) -> Result<RegexAst, AutomataError> {
        let mut parts = vec![self.concat()?];
        while matches!(self.peek(), Some(RegexToken::Plus)) {
            self.pos += 1;
            parts.push(self.concat()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { RegexAst::Union(parts) })
    }

    fn concat(&mut self) -> Result<RegexAst, AutomataError> {
        let mut parts = vec![self.postfix()?];
        while matches!(self.peek(), Some(RegexToken::Letter(_)) | Some(RegexToken::Open)) {
            parts.push(self.postfix()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { RegexAst::Concat(parts) })
    }

    fn postfix(&mut self) -> Result<RegexAst, AutomataError> {
        let mut ast = self.atom()?;
        while matches!(self.peek(), Some(RegexToken::Star)) {
            self.pos += 1;
            ast = RegexAst::Star(Box::new(ast));
        }
        Ok(ast)
    }

    fn atom(&mut self) -> Result<RegexAst, AutomataError> {
        match self.peek() {
            Some(RegexToken::Letter(l)) => {
                let l = *l;
                self.pos += 1;
                Ok(RegexAst::Letter(l))
            }
            Some(RegexToken::Open) => {
                self.pos += 1;
                let inner = self.union()?;
                if !matches!(self.peek(), Some(RegexToken::Close)) {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(RegexToken::Close) => Err(self.error("unexpected ')'")),
            Some(RegexToken::Star) => Err(self.error("'*' needs something to repeat")),
            Some(RegexToken::Plus) => Err(self.error("'+' needs a left operand")),
            None => Err(self.error("unexpected end of expression")),
        }
    }
}

impl Regex {
    /// Parses `text` against the alphabet's letter spelling.
    pub fn parse(
        alphabet: &Arc<SymmetricAlphabet>,
        text: &str,
    ) -> Result<Self, AutomataError> {
        let tokens = lex_regex(alphabet, text)?;
        let end = text.chars().count();
        let mut parser = RegexParser { tokens, pos: 0, end };
        let ast = parser.union()?;
        if parser.pos < parser.tokens.len() {
            return Err(parser.error("trailing input"));
        }
        Ok(Self { alphabet: Arc::clone(alphabet), ast })
    }

    /// Wraps an explicit syntax tree.
    pub fn from_ast(alphabet: &Arc<SymmetricAlphabet>, ast: RegexAst) -> Self {
        Self { alphabet: Arc::clone(alphabet), ast }
    }

    pub fn alphabet(&self) -> &Arc<SymmetricAlphabet> {
        &self.alphabet
    }

    pub fn ast(&self) -> &RegexAst {
        &self.ast
    }

    /// Compiles to an automaton with single-letter and empty labels.
    ///
    /// Iteration over a language containing the empty word is rewritten so
    /// the result never has a cycle of empty labels.
    pub fn compile(&self) -> Fsa {
        let mut builder = ThompsonBuilder { states: 0, edges: Vec::new() };
        let frag = builder.build(&self.ast);
        Fsa::from_parts(
            Arc::clone(&self.alphabet),
            builder.states,
            frag.start,
            &[frag.accept],
            builder.edges,
        )
        .expect("compiled automata have no empty-label cycles")
    }

    /// Splits the expression into a chain of fixed and starred words when
    /// it has the shape `w1 u1* w2 u2* ...`; `None` otherwise.
    pub fn star_chain(&self) -> Option<Vec<ChainAtom>> {
        fn plain_word(ast: &RegexAst) -> Option<Vec<usize>> {
            match ast {
                RegexAst::Letter(l) => Some(vec![*l]),
                RegexAst::Concat(ps) => {
                    let mut letters = Vec::new();
                    for p in ps {
                        letters.extend(plain_word(p)?);
                    }
                    Some(letters)
                }
                _ => None,
            }
        }
        fn walk(
            alphabet: &Arc<SymmetricAlphabet>,
            ast: &RegexAst,
            out: &mut Vec<ChainAtom>,
        ) -> Option<()> {
            match ast {
                RegexAst::Letter(l) => {
                    let w = alphabet.word_from_letters(vec![*l]).expect("letter in range");
                    out.push(ChainAtom::Fixed(w));
                    Some(())
                }
                RegexAst::Concat(ps) => {
                    for p in ps {
                        walk(alphabet, p, out)?;
                    }
                    Some(())
                }
                RegexAst::Star(inner) => {
                    let letters = plain_word(inner)?;
                    let w = alphabet
                        .word_from_letters(letters)
                        .expect("letters in range");
                    out.push(ChainAtom::Starred(w));
                    Some(())
                }
                RegexAst::Empty | RegexAst::Epsilon | RegexAst::Union(_) => None,
            }
        }
        let mut atoms = Vec::new();
        walk(&self.alphabet, &self.ast, &mut atoms)?;
        Some(atoms)
    }
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn needs_parens(ast: &RegexAst, context: u8) -> bool {
            // context: 0 union, 1 concat, 2 star operand.
            match ast {
                RegexAst::Union(_) => context >= 1,
                RegexAst::Concat(_) => context >= 2,
                _ => false,
            }
        }
        fn render(
            ast: &RegexAst,
            alphabet: &SymmetricAlphabet,
            context: u8,
            out: &mut String,
        ) {
            if needs_parens(ast, context) {
                out.push('(');
                render(ast, alphabet, 0, out);
                out.push(')');
                return;
            }
            match ast {
                RegexAst::Empty => out.push_str("()"),
                RegexAst::Epsilon => {}
                RegexAst::Letter(l) => {
                    if !alphabet.is_single_char()
                        && !out.is_empty()
                        && !out.ends_with(['(', '*', '+'])
                    {
                        out.push(' ');
                    }
                    out.push_str(alphabet.name(*l));
                }
                RegexAst::Concat(ps) => {
                    for p in ps {
                        render(p, alphabet, 1, out);
                    }
                }
                RegexAst::Union(ps) => {
                    for (i, p) in ps.iter().enumerate() {
                        if i > 0 {
                            out.push('+');
                        }
                        render(p, alphabet, 1, out);
                    }
                }
                RegexAst::Star(inner) => {
                    match inner.as_ref() {
                        RegexAst::Letter(_) => render(inner, alphabet, 2, out),
                        _ => {
                            out.push('(');
                            render(inner, alphabet, 0, out);
                            out.push(')');
                        }
                    }
                    out.push('*');
                }
            }
        }
        let mut s = String::new();
        render(&self.ast, &self.alphabet, 0, &mut s);
        f.write_str(&s)
    }
}

struct Fragment {
    start: usize,
    accept: usize,
}

struct ThompsonBuilder {
    states: usize,
    edges: Vec<(usize, Vec<usize>, usize)>,
}

impl ThompsonBuilder {
    fn fresh(&mut self) -> usize {
        self.states += 1;
        self.states - 1
    }

    fn edge(&mut self, from: usize, label: Vec<usize>, to: usize) {
        self.edges.push((from, label, to));
    }

    fn build(&mut self, ast: &RegexAst) -> Fragment {
        match ast {
            RegexAst::Empty => {
                let start = self.fresh();
                let accept = self.fresh();
                Fragment { start, accept }
            }
            RegexAst::Epsilon => {
                let start = self.fresh();
                let accept = self.fresh();
                self.edge(start, Vec::new(), accept);
                Fragment { start, accept }
            }
            RegexAst::Letter(l) => {
                let start = self.fresh();
                let accept = self.fresh();
                self.edge(start, vec![*l], accept);
                Fragment { start, accept }
            }
            RegexAst::Concat(ps) => {
                if ps.is_empty() {
                    return self.build(&RegexAst::Epsilon);
                }
                let first = self.build(&ps[0]);
                let mut accept = first.accept;
                for p in &ps[1..] {
                    let next = self.build(p);
                    self.edge(accept, Vec::new(), next.start);
                    accept = next.accept;
                }
                Fragment { start: first.start, accept }
            }
            RegexAst::Union(ps) => {
                let start = self.fresh();
                let accept = self.fresh();
                for p in ps {
                    let inner = self.build(p);
                    self.edge(start, Vec::new(), inner.start);
                    self.edge(inner.accept, Vec::new(), accept);
                }
                Fragment { start, accept }
            }
            RegexAst::Star(inner) => {
                // Iterating a nullable expression would create a loop of
                // empty labels; dropping the empty word from the iterated
                // language keeps the language intact.
                let core =
                    if inner.nullable() { inner.without_empty_word() } else { (**inner).clone() };
                let frag = self.build(&core);
                let start = self.fresh();
                let accept = self.fresh();
                self.edge(start, Vec::new(), accept);
                self.edge(start, Vec::new(), frag.start);
                self.edge(frag.accept, Vec::new(), accept);
                self.edge(frag.accept, Vec::new(), frag.start);
                Fragment { start, accept }
            }
        }
    }
}

/// One link of a star chain: a word that appears exactly once or is
/// iterated freely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainAtom {
    Fixed(Word),
    Starred(Word),
}

/// Enumerates the language of a star chain up to `max_len`, in length-then-
/// lexicographic order without duplicates.
///
/// Exponent tuples are walked directly, so the cost is proportional to the
/// number of tuples rather than to the set of all words of bounded length.
pub fn enumerate_star_chain(
    alphabet: &Arc<SymmetricAlphabet>,
    atoms: &[ChainAtom],
    max_len: usize,
    budget: u64,
) -> Result<Vec<Word>, AutomataError> {
    fn go(
        atoms: &[ChainAtom],
        prefix: &mut Vec<usize>,
        max_len: usize,
        budget: u64,
        spent: &mut u64,
        found: &mut BTreeSet<(usize, Vec<usize>)>,
    ) -> Result<(), AutomataError> {
        *spent += 1;
        if *spent > budget {
            return Err(AutomataError::BudgetExceeded { budget });
        }
        let Some((head, rest)) = atoms.split_first() else {
            found.insert((prefix.len(), prefix.clone()));
            return Ok(());
        };
        match head {
            ChainAtom::Fixed(w) => {
                if prefix.len() + w.len() > max_len {
                    return Ok(());
                }
                let before = prefix.len();
                prefix.extend_from_slice(w.letters());
                go(rest, prefix, max_len, budget, spent, found)?;
                prefix.truncate(before);
            }
            ChainAtom::Starred(w) => {
                let before = prefix.len();
                loop {
                    go(rest, prefix, max_len, budget, spent, found)?;
                    if w.is_empty() || prefix.len() + w.len() > max_len {
                        break;
                    }
                    prefix.extend_from_slice(w.letters());
                }
                prefix.truncate(before);
            }
        }
        Ok(())
    }
    let mut found = BTreeSet::new();
    let mut prefix = Vec::new();
    let mut spent = 0u64;
    go(atoms, &mut prefix, max_len, budget, &mut spent, &mut found)?;
    Ok(found
        .into_iter()
        .map(|(_, letters)| {
            alphabet.word_from_letters(letters).expect("chain letters are valid")
        })
        .collect())
}

/// Words of the automaton's language, up to `max_len`, that the oracle
/// declares trivial.
pub fn oracle_slice(
    oracle: &dyn GroupOracle,
    machine: &Fsa,
    max_len: usize,
    budget: u64,
) -> Result<Vec<Word>, AutomataError> {
    if !same_alphabet(oracle.alphabet(), machine.alphabet()) {
        return Err(AutomataError::Word(WordError::AlphabetMismatch));
    }
    let words = machine.enumerate_with_budget(max_len, budget)?;
    Ok(words.into_iter().filter(|w| oracle.decide(w)).collect())
}

/// Like `oracle_slice`, but drives the enumeration from a regular
/// expression, taking the direct star-chain route when the shape allows.
pub fn oracle_slice_regex(
    oracle: &dyn GroupOracle,
    pattern: &Regex,
    max_len: usize,
    budget: u64,
) -> Result<Vec<Word>, AutomataError> {
    if !same_alphabet(oracle.alphabet(), pattern.alphabet()) {
        return Err(AutomataError::Word(WordError::AlphabetMismatch));
    }
    let words = match pattern.star_chain() {
        Some(atoms) => enumerate_star_chain(pattern.alphabet(), &atoms, max_len, budget)?,
        None => pattern.compile().enumerate_with_budget(max_len, budget)?,
    };
    Ok(words.into_iter().filter(|w| oracle.decide(w)).collect())
}

#[derive(Serialize, Deserialize)]
struct TransducerJson {
    first_alphabet: Vec<String>,
    second_alphabet: Vec<String>,
    states: usize,
    start: usize,
    accepting: Vec<usize>,
    edges: Vec<TransducerEdgeJson>,
}

#[derive(Serialize, Deserialize)]
struct TransducerEdgeJson {
    from: usize,
    first: String,
    second: String,
    to: usize,
}

/// Outgoing edges of one state: letter indices for each tape plus the
/// target state.
type PairEdges = Vec<(Vec<usize>, Vec<usize>, usize)>;

/// A rational transducer: an automaton whose edges carry a pair of words,
/// one over each tape's alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transducer {
    first: Arc<SymmetricAlphabet>,
    second: Arc<SymmetricAlphabet>,
    states: usize,
    start: usize,
    accepting: Vec<bool>,
    edges: Vec<PairEdges>,
}

impl Transducer {
    /// Builds a transducer with labels given as word text; a cycle whose
    /// labels are empty on both tapes is rejected.
    pub fn new(
        first: &Arc<SymmetricAlphabet>,
        second: &Arc<SymmetricAlphabet>,
        states: usize,
        start: usize,
        accepting: &[usize],
        edges: &[(usize, &str, &str, usize)],
    ) -> Result<Self, AutomataError> {
        check_state(start, states)?;
        let mut accept_flags = vec![false; states];
        for &a in accepting {
            check_state(a, states)?;
            accept_flags[a] = true;
        }
        let mut out: Vec<PairEdges> = vec![Vec::new(); states];
        let mut silent: Vec<Vec<usize>> = vec![Vec::new(); states];
        for &(from, u, v, to) in edges {
            check_state(from, states)?;
            check_state(to, states)?;
            let u = first.parse_word(u)?.letters().to_vec();
            let v = second.parse_word(v)?.letters().to_vec();
            if u.is_empty() && v.is_empty() {
                silent[from].push(to);
            }
            out[from].push((u, v, to));
        }
        if has_silent_cycle(states, &silent) {
            return Err(AutomataError::EmptyLabelCycle);
        }
        Ok(Self {
            first: Arc::clone(first),
            second: Arc::clone(second),
            states,
            start,
            accepting: accept_flags,
            edges: out,
        })
    }

    pub fn first_alphabet(&self) -> &Arc<SymmetricAlphabet> {
        &self.first
    }

    pub fn second_alphabet(&self) -> &Arc<SymmetricAlphabet> {
        &self.second
    }

    pub fn states(&self) -> usize {
        self.states
    }

    /// Edges as (from, first label, second label, to).
    pub fn edge_quads(&self) -> Vec<(usize, Word, Word, usize)> {
        let mut out = Vec::new();
        for (from, row) in self.edges.iter().enumerate() {
            for (u, v, to) in row {
                let uw = self.first.word_from_letters(u.clone()).expect("valid label");
                let vw = self.second.word_from_letters(v.clone()).expect("valid label");
                out.push((from, uw, vw, *to));
            }
        }
        out
    }

    /// True when the transducer accepts the pair `(u, v)`.
    pub fn accepts_pair(&self, u: &Word, v: &Word) -> bool {
        assert!(
            same_alphabet(&self.first, u.alphabet()) && same_alphabet(&self.second, v.alphabet()),
            "pair is spelled over foreign alphabets"
        );
        let (us, vs) = (u.letters(), v.letters());
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert((self.start, 0usize, 0usize));
        queue.push_back((self.start, 0usize, 0usize));
        while let Some((state, pu, pv)) = queue.pop_front() {
            if pu == us.len() && pv == vs.len() && self.accepting[state] {
                return true;
            }
            for (lu, lv, to) in &self.edges[state] {
                if us[pu..].starts_with(lu) && vs[pv..].starts_with(lv) {
                    let next = (*to, pu + lu.len(), pv + lv.len());
                    if seen.insert(next) {
                        queue.push_back(next);
                    }
                }
            }
        }
        false
    }

    /// All accepted pairs with `|u| <= max_first` and `|v| <= max_second`,
    /// sorted length-then-lexicographically by first word, then second.
    pub fn transduce_pairs(&self, max_first: usize, max_second: usize) -> Vec<(Word, Word)> {
        type Config = (usize, Vec<usize>, Vec<usize>);
        let mut found: BTreeSet<(usize, Vec<usize>, usize, Vec<usize>)> = BTreeSet::new();
        let mut seen: HashSet<Config> = HashSet::new();
        let mut queue: VecDeque<Config> = VecDeque::new();
        seen.insert((self.start, Vec::new(), Vec::new()));
        queue.push_back((self.start, Vec::new(), Vec::new()));
        while let Some((state, u, v)) = queue.pop_front() {
            if self.accepting[state] {
                found.insert((u.len(), u.clone(), v.len(), v.clone()));
            }
            for (lu, lv, to) in &self.edges[state] {
                if u.len() + lu.len() > max_first || v.len() + lv.len() > max_second {
                    continue;
                }
                let mut nu = u.clone();
                nu.extend_from_slice(lu);
                let mut nv = v.clone();
                nv.extend_from_slice(lv);
                let key = (*to, nu, nv);
                if !seen.contains(&key) {
                    seen.insert(key.clone());
                    queue.push_back(key);
                }
            }
        }
        found
            .into_iter()
            .map(|(_, u, _, v)| {
                (
                    self.first.word_from_letters(u).expect("valid letters"),
                    self.second.word_from_letters(v).expect("valid letters"),
                )
            })
            .collect()
    }

    /// Second-tape words reachable from any first-tape word in the sample,
    /// bounded by `max_second`, length-lex sorted without duplicates.
    pub fn image_of_sample(&self, sample: &[Word], max_second: usize) -> Vec<Word> {
        let mut found: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
        for u in sample {
            assert!(
                same_alphabet(&self.first, u.alphabet()),
                "sample word is spelled over a foreign alphabet"
            );
            let us = u.letters();
            let mut seen = HashSet::new();
            let mut queue = VecDeque::new();
            seen.insert((self.start, 0usize, Vec::new()));
            queue.push_back((self.start, 0usize, Vec::new()));
            while let Some((state, pu, v)) = queue.pop_front() {
                if pu == us.len() && self.accepting[state] {
                    found.insert((v.len(), v.clone()));
                }
                for (lu, lv, to) in &self.edges[state] {
                    if !us[pu..].starts_with(lu) || v.len() + lv.len() > max_second {
                        continue;
                    }
                    let mut nv = v.clone();
                    nv.extend_from_slice(lv);
                    let key = (*to, pu + lu.len(), nv);
                    if !seen.contains(&key) {
                        seen.insert(key.clone());
                        queue.push_back(key);
                    }
                }
            }
        }
        found
            .into_iter()
            .map(|(_, v)| self.second.word_from_letters(v).expect("valid letters"))
            .collect()
    }

    /// Serializes to JSON; labels use word text.
    pub fn to_json_string(&self) -> String {
        let edges = self
            .edge_quads()
            .into_iter()
            .map(|(from, u, v, to)| TransducerEdgeJson {
                from,
                first: u.to_text(),
                second: v.to_text(),
                to,
            })
            .collect();
        let doc = TransducerJson {
            first_alphabet: self.first.positive_names().iter().map(|s| s.to_string()).collect(),
            second_alphabet: self.second.positive_names().iter().map(|s| s.to_string()).collect(),
            states: self.states,
            start: self.start,
            accepting: (0..self.states).filter(|&s| self.accepting[s]).collect(),
            edges,
        };
        serde_json::to_string_pretty(&doc).expect("transducer serialization cannot fail")
    }

    /// Parses the JSON form produced by `to_json_string`.
    pub fn from_json_str(text: &str) -> Result<Self, AutomataError> {
        let doc: TransducerJson = serde_json::from_str(text)
            .map_err(|e| AutomataError::Malformed(format!("bad transducer JSON: {e}")))?;
        let first_names: Vec<&str> = doc.first_alphabet.iter().map(String::as_str).collect();
        let second_names: Vec<&str> = doc.second_alphabet.iter().map(String::as_str).collect();
        let first = SymmetricAlphabet::from_positive(&first_names).map_err(AutomataError::Word)?;
        let second =
            SymmetricAlphabet::from_positive(&second_names).map_err(AutomataError::Word)?;
        let edges: Vec<(usize, &str, &str, usize)> = doc
            .edges
            .iter()
            .map(|e| (e.from, e.first.as_str(), e.second.as_str(), e.to))
            .collect();
        Self::new(&first, &second, doc.states, doc.start, &doc.accepting, &edges)
    }
}
