//! Coset diagrams for finite-index subgroups: spanning trees, subgroup
//! generators, and the rewriting transducer between subgroup words and
//! ambient words.
//!
//! A transitive permutation action of the generators on cosets determines a
//! labelled diagram. A breadth-first spanning tree picks coset
//! representatives; each remaining positive edge contributes one subgroup
//! generator `u a u'^-1` and one fresh letter. Reading an ambient word
//! around the diagram and collecting fresh letters on non-tree edges
//! rewrites it over the subgroup alphabet, and the rational transducer
//! doing so edge by edge can be verified against any oracle for the
//! ambient group.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::Transducer;
use crate::oracles::GroupOracle;
use crate::words::{same_alphabet, MonoidHom, SymmetricAlphabet, Word, WordError};

/// Errors from coset actions and diagram construction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchreierError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("letter {letter} needs one image per coset, got {got} for degree {degree}")]
    WrongPermutationLength { letter: String, got: usize, degree: usize },
    #[error("letter {letter} does not act by a permutation: {reason}")]
    NotAPermutation { letter: String, reason: String },
    #[error("expected {expected} permutations, got {got}")]
    WrongPermutationCount { expected: usize, got: usize },
    /// The diagram only makes sense when the action has a single orbit.
    #[error("the action is not transitive: coset {unreached} is unreachable from 0")]
    NotTransitive { unreached: usize },
    #[error("malformed action description: {0}")]
    Malformed(String),
}

#[derive(Serialize, Deserialize)]
struct CosetActionJson {
    degree: usize,
    letters: Vec<String>,
    perms: Vec<Vec<usize>>,
}

/// A right action of the positive letters on the cosets `0..degree`, with
/// `0` the subgroup itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetAction {
    alphabet: Arc<SymmetricAlphabet>,
    degree: usize,
    /// Forward image per positive letter, then the inverse permutation.
    perms: Vec<Vec<usize>>,
    inverse_perms: Vec<Vec<usize>>,
}

impl CosetAction {
    /// Builds an action from one permutation per positive letter, given as
    /// images of `0..degree`.
    pub fn new(
        alphabet: &Arc<SymmetricAlphabet>,
        degree: usize,
        perms: Vec<Vec<usize>>,
    ) -> Result<Self, SchreierError> {
        if perms.len() != alphabet.rank() {
            return Err(SchreierError::WrongPermutationCount {
                expected: alphabet.rank(),
                got: perms.len(),
            });
        }
        let mut inverse_perms = Vec::with_capacity(perms.len());
        for (i, p) in perms.iter().enumerate() {
            let letter = alphabet.name(2 * i).to_string();
            if p.len() != degree {
                return Err(SchreierError::WrongPermutationLength {
                    letter: letter.clone(),
                    got: p.len(),
                    degree,
                });
            }
            let mut inv = vec![usize::MAX; degree];
            for (from, &to) in p.iter().enumerate() {
                if to >= degree {
                    return Err(SchreierError::NotAPermutation {
                        letter: letter.clone(),
                        reason: format!("image {to} out of range"),
                    });
                }
                if inv[to] != usize::MAX {
                    return Err(SchreierError::NotAPermutation {
                        letter: letter.clone(),
                        reason: format!("{to} is hit twice"),
                    });
                }
                inv[to] = from;
            }
            inverse_perms.push(inv);
        }
        Ok(Self { alphabet: Arc::clone(alphabet), degree, perms, inverse_perms })
    }

    /// Parses `{"degree": .., "letters": [..], "perms": [[..], ..]}`.
    pub fn from_json_str(text: &str) -> Result<Self, SchreierError> {
        let doc: CosetActionJson = serde_json::from_str(text)
            .map_err(|e| SchreierError::Malformed(e.to_string()))?;
        let names: Vec<&str> = doc.letters.iter().map(String::as_str).collect();
        let alphabet = SymmetricAlphabet::from_positive(&names)?;
        Self::new(&alphabet, doc.degree, doc.perms)
    }

    pub fn to_json_string(&self) -> String {
        let doc = CosetActionJson {
            degree: self.degree,
            letters: self.alphabet.positive_names().iter().map(|s| s.to_string()).collect(),
            perms: self.perms.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("action serialization cannot fail")
    }

    pub fn alphabet(&self) -> &Arc<SymmetricAlphabet> {
        &self.alphabet
    }

    /// Number of cosets, the index of the subgroup.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Image of a coset under one letter, with inverse letters acting by
    /// the inverse permutation.
    pub fn apply(&self, letter: usize, coset: usize) -> usize {
        if letter.is_multiple_of(2) {
            self.perms[letter / 2][coset]
        } else {
            self.inverse_perms[letter / 2][coset]
        }
    }

    /// Coset reached from the subgroup coset by the whole word.
    pub fn trace(&self, w: &Word) -> usize {
        assert!(
            same_alphabet(&self.alphabet, w.alphabet()),
            "word is spelled over a foreign alphabet"
        );
        w.letters().iter().fold(0, |c, &l| self.apply(l, c))
    }
}

/// One subgroup generator, read off a non-tree edge of the diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupGenerator {
    /// Positive letter in the subgroup alphabet.
    pub fresh_letter: usize,
    /// Diagram edge (coset, positive ambient letter, coset).
    pub from: usize,
    pub letter: usize,
    pub to: usize,
    /// The generator spelled in the ambient group: representative in,
    /// edge letter, representative back out.
    pub word: Word,
}

/// A coset diagram with spanning tree, subgroup generators and the
/// rewriting transducer.
#[derive(Debug, Clone)]
pub struct SchreierDiagram {
    action: CosetAction,
    /// Tree edges (from, positive letter index, to) in discovery order.
    tree_edges: Vec<(usize, usize, usize)>,
    /// Membership map (from, positive letter index) for tree edges.
    tree_set: HashMap<(usize, usize), usize>,
    /// Representative word leading from the subgroup coset to each coset.
    coset_words: Vec<Word>,
    generators: Vec<SubgroupGenerator>,
    /// Fresh letter per non-tree edge, keyed by (from, positive letter index).
    fresh_by_edge: HashMap<(usize, usize), usize>,
    subgroup_alphabet: Arc<SymmetricAlphabet>,
    transducer: Transducer,
}

impl SchreierDiagram {
    /// Builds the diagram for a transitive action: breadth-first spanning
    /// tree from coset 0 trying positive letters in order, then one fresh
    /// letter `b0, b1, ...` per remaining positive edge in (coset, letter)
    /// order.
    pub fn build(action: &CosetAction) -> Result<Self, SchreierError> {
        let alphabet = action.alphabet();
        let degree = action.degree();
        let mut coset_words: Vec<Option<Word>> = vec![None; degree];
        coset_words[0] = Some(alphabet.empty_word());
        let mut tree_edges = Vec::new();
        let mut tree_set = HashMap::new();
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for idx in 0..alphabet.rank() {
                let w = action.apply(2 * idx, v);
                if coset_words[w].is_none() {
                    let word = coset_words[v]
                        .as_ref()
                        .expect("visited coset has a word")
                        .concat(&alphabet.word_from_letters(vec![2 * idx])?)?;
                    coset_words[w] = Some(word);
                    tree_edges.push((v, idx, w));
                    tree_set.insert((v, idx), w);
                    queue.push_back(w);
                }
            }
        }
        if let Some(unreached) = coset_words.iter().position(Option::is_none) {
            return Err(SchreierError::NotTransitive { unreached });
        }
        let coset_words: Vec<Word> =
            coset_words.into_iter().map(|w| w.expect("all cosets reached")).collect();

        let mut fresh_names = Vec::new();
        let mut pending = Vec::new();
        for v in 0..degree {
            for idx in 0..alphabet.rank() {
                if tree_set.contains_key(&(v, idx)) {
                    continue;
                }
                let w = action.apply(2 * idx, v);
                fresh_names.push(format!("b{}", pending.len()));
                pending.push((v, idx, w));
            }
        }
        let name_refs: Vec<&str> = fresh_names.iter().map(String::as_str).collect();
        let subgroup_alphabet = SymmetricAlphabet::from_positive(&name_refs)?;
        let mut generators = Vec::new();
        let mut fresh_by_edge = HashMap::new();
        for (n, &(v, idx, w)) in pending.iter().enumerate() {
            let word = coset_words[v]
                .concat(&alphabet.word_from_letters(vec![2 * idx])?)?
                .concat(&coset_words[w].formal_inverse())?;
            fresh_by_edge.insert((v, idx), 2 * n);
            generators.push(SubgroupGenerator {
                fresh_letter: 2 * n,
                from: v,
                letter: 2 * idx,
                to: w,
                word,
            });
        }

        let transducer = Self::assemble_transducer(
            action,
            &tree_set,
            &fresh_by_edge,
            &subgroup_alphabet,
            false,
        )?;
        Ok(Self {
            action: action.clone(),
            tree_edges,
            tree_set,
            coset_words,
            generators,
            fresh_by_edge,
            subgroup_alphabet,
            transducer,
        })
    }

    fn assemble_transducer(
        action: &CosetAction,
        tree_set: &HashMap<(usize, usize), usize>,
        fresh_by_edge: &HashMap<(usize, usize), usize>,
        subgroup_alphabet: &Arc<SymmetricAlphabet>,
        corrupt_first_rewrite: bool,
    ) -> Result<Transducer, SchreierError> {
        let alphabet = action.alphabet();
        let mut edges: Vec<(usize, String, String, usize)> = Vec::new();
        let mut corrupted = false;
        for v in 0..action.degree() {
            for idx in 0..alphabet.rank() {
                let w = action.apply(2 * idx, v);
                let (forward_sub, backward_sub) = match fresh_by_edge.get(&(v, idx)) {
                    Some(&fresh) => (
                        subgroup_alphabet.name(fresh).to_string(),
                        subgroup_alphabet.name(fresh ^ 1).to_string(),
                    ),
                    None => {
                        debug_assert!(tree_set.contains_key(&(v, idx)));
                        (String::new(), String::new())
                    }
                };
                let mut forward_super = alphabet.name(2 * idx).to_string();
                if corrupt_first_rewrite && !forward_sub.is_empty() && !corrupted {
                    forward_super = alphabet.name(2 * idx + 1).to_string();
                    corrupted = true;
                }
                edges.push((v, forward_sub, forward_super, w));
                edges.push((w, backward_sub, alphabet.name(2 * idx + 1).to_string(), v));
            }
        }
        let edge_refs: Vec<(usize, &str, &str, usize)> = edges
            .iter()
            .map(|(f, a, b, t)| (*f, a.as_str(), b.as_str(), *t))
            .collect();
        Transducer::new(subgroup_alphabet, alphabet, action.degree(), 0, &[0], &edge_refs)
            .map_err(|e| SchreierError::Malformed(e.to_string()))
    }

    pub fn action(&self) -> &CosetAction {
        &self.action
    }

    /// Spanning tree edges (coset, positive letter index, coset) in
    /// discovery order.
    pub fn tree_edges(&self) -> &[(usize, usize, usize)] {
        &self.tree_edges
    }

    /// Representative words, one per coset.
    pub fn coset_words(&self) -> &[Word] {
        &self.coset_words
    }

    pub fn generators(&self) -> &[SubgroupGenerator] {
        &self.generators
    }

    /// The fresh alphabet with one positive letter per generator.
    pub fn subgroup_alphabet(&self) -> &Arc<SymmetricAlphabet> {
        &self.subgroup_alphabet
    }

    /// The rewriting transducer: it accepts `(u, v)` exactly when `v`
    /// traces a loop at the subgroup coset and `u` collects the fresh
    /// letters of the non-tree edges along the way.
    pub fn transducer(&self) -> &Transducer {
        &self.transducer
    }

    /// A deliberately broken copy of the transducer with one rewriting
    /// edge reading the inverse ambient letter; verification against any
    /// faithful oracle must fail on it.
    pub fn mutated_transducer(&self) -> Transducer {
        Self::assemble_transducer(
            &self.action,
            &self.tree_set,
            &self.fresh_by_edge,
            &self.subgroup_alphabet,
            true,
        )
        .expect("mutation keeps the transducer well-formed")
    }

    /// The substitution sending each fresh letter to its generator spelled
    /// in the ambient group.
    pub fn substitution(&self) -> MonoidHom {
        let pairs: Vec<(String, String)> = self
            .generators
            .iter()
            .map(|g| {
                (self.subgroup_alphabet.name(g.fresh_letter).to_string(), g.word.to_text())
            })
            .collect();
        let refs: Vec<(&str, &str)> =
            pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        MonoidHom::from_positive_images(&self.subgroup_alphabet, self.action.alphabet(), &refs)
            .expect("generator words are spelled over the ambient alphabet")
    }

    /// Reads `v` around the diagram from the subgroup coset: returns the
    /// final coset and the subgroup word collected from non-tree edges.
    pub fn rewrite(&self, v: &Word) -> (usize, Word) {
        assert!(
            same_alphabet(self.action.alphabet(), v.alphabet()),
            "word is spelled over a foreign alphabet"
        );
        let mut coset = 0usize;
        let mut collected: Vec<usize> = Vec::new();
        for &l in v.letters() {
            let next = self.action.apply(l, coset);
            let (edge, inverted) =
                if l % 2 == 0 { ((coset, l / 2), false) } else { ((next, l / 2), true) };
            if let Some(&fresh) = self.fresh_by_edge.get(&edge) {
                collected.push(if inverted { fresh ^ 1 } else { fresh });
            }
            coset = next;
        }
        let u = self
            .subgroup_alphabet
            .word_from_letters(collected)
            .expect("collected letters are valid");
        (coset, u)
    }
}

/// One disagreement found while verifying a rewriting transducer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationFailure {
    pub subgroup_word: String,
    pub ambient_word: String,
    pub reason: String,
}

/// Outcome of checking a rewriting transducer against an ambient oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub bound: usize,
    /// Accepted pairs whose two sides were compared through the oracle.
    pub pairs_checked: usize,
    /// Trivial ambient words checked for a matching trivial rewrite.
    pub trivial_words_checked: usize,
    pub failures: Vec<VerificationFailure>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Verifies the diagram's own transducer; see `verify_transducer`.
pub fn verify_transduction(
    diagram: &SchreierDiagram,
    oracle: &dyn GroupOracle,
    bound: usize,
) -> VerificationReport {
    verify_transducer(diagram, diagram.transducer(), oracle, bound)
}

/// Checks a rewriting transducer against an oracle for the ambient group,
/// up to the length bound on both tapes.
///
/// Soundness: every accepted pair `(u, v)` must satisfy `s(u) = v` in the
/// ambient group, where `s` substitutes generators for fresh letters.
/// Completeness: every trivial ambient word must rewrite, via the diagram,
/// to a subgroup word that is trivial again and accepted alongside it.
pub fn verify_transducer(
    diagram: &SchreierDiagram,
    transducer: &Transducer,
    oracle: &dyn GroupOracle,
    bound: usize,
) -> VerificationReport {
    assert!(
        same_alphabet(oracle.alphabet(), diagram.action.alphabet()),
        "oracle is for a different alphabet"
    );
    let substitution = diagram.substitution();
    let mut failures = Vec::new();

    let pairs = transducer.transduce_pairs(bound, bound);
    for (u, v) in &pairs {
        let expanded = substitution.apply(u).expect("subgroup words substitute");
        let difference = expanded.concat(&v.formal_inverse()).expect("same alphabet");
        if !oracle.decide(&difference) {
            failures.push(VerificationFailure {
                subgroup_word: u.to_text(),
                ambient_word: v.to_text(),
                reason: "substituted subgroup word differs from the ambient word".into(),
            });
        }
    }

    let alphabet = diagram.action.alphabet();
    let mut trivial_words_checked = 0;
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(letters) = stack.pop() {
        if letters.len() < bound {
            for l in (0..alphabet.len()).rev() {
                let mut next = letters.clone();
                next.push(l);
                stack.push(next);
            }
        }
        let v = alphabet.word_from_letters(letters).expect("valid letters");
        if !oracle.decide(&v) {
            continue;
        }
        trivial_words_checked += 1;
        let (coset, u) = diagram.rewrite(&v);
        if coset != 0 {
            failures.push(VerificationFailure {
                subgroup_word: u.to_text(),
                ambient_word: v.to_text(),
                reason: format!("trivial word does not close up: ends at coset {coset}"),
            });
            continue;
        }
        if !transducer.accepts_pair(&u, &v) {
            failures.push(VerificationFailure {
                subgroup_word: u.to_text(),
                ambient_word: v.to_text(),
                reason: "transducer rejects the diagram rewrite of a trivial word".into(),
            });
            continue;
        }
        let expanded = substitution.apply(&u).expect("subgroup words substitute");
        if !oracle.decide(&expanded) {
            failures.push(VerificationFailure {
                subgroup_word: u.to_text(),
                ambient_word: v.to_text(),
                reason: "rewrite of a trivial word is not trivial".into(),
            });
        }
    }

    VerificationReport { bound, pairs_checked: pairs.len(), trivial_words_checked, failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::FreeOracle;

    fn doubling_action() -> CosetAction {
        let alphabet = SymmetricAlphabet::from_positive(&["a"]).unwrap();
        CosetAction::new(&alphabet, 2, vec![vec![1, 0]]).unwrap()
    }

    fn index_three_action() -> CosetAction {
        let alphabet = SymmetricAlphabet::from_positive(&["a", "b"]).unwrap();
        CosetAction::new(&alphabet, 3, vec![vec![1, 2, 0], vec![0, 1, 2]]).unwrap()
    }

    #[test]
    fn actions_validate_their_permutations() {
        let alphabet = SymmetricAlphabet::from_positive(&["a"]).unwrap();
        assert!(matches!(
            CosetAction::new(&alphabet, 2, vec![]).err().unwrap(),
            SchreierError::WrongPermutationCount { expected: 1, got: 0 }
        ));
        assert!(matches!(
            CosetAction::new(&alphabet, 2, vec![vec![0]]).err().unwrap(),
            SchreierError::WrongPermutationLength { .. }
        ));
        assert!(matches!(
            CosetAction::new(&alphabet, 2, vec![vec![0, 0]]).err().unwrap(),
            SchreierError::NotAPermutation { .. }
        ));
        assert!(matches!(
            CosetAction::new(&alphabet, 2, vec![vec![0, 7]]).err().unwrap(),
            SchreierError::NotAPermutation { .. }
        ));
    }

    #[test]
    fn action_json_round_trips() {
        let a = index_three_action();
        let text = a.to_json_string();
        assert_eq!(CosetAction::from_json_str(&text).unwrap(), a);
    }

    #[test]
    fn tracing_applies_letters_left_to_right() {
        let a = index_three_action();
        let al = Arc::clone(a.alphabet());
        assert_eq!(a.trace(&al.parse_word("a").unwrap()), 1);
        assert_eq!(a.trace(&al.parse_word("aa").unwrap()), 2);
        assert_eq!(a.trace(&al.parse_word("aaa").unwrap()), 0);
        assert_eq!(a.trace(&al.parse_word("A").unwrap()), 2);
        assert_eq!(a.trace(&al.parse_word("b").unwrap()), 0);
    }

    #[test]
    fn intransitive_actions_are_rejected() {
        let alphabet = SymmetricAlphabet::from_positive(&["a"]).unwrap();
        let a = CosetAction::new(&alphabet, 2, vec![vec![0, 1]]).unwrap();
        assert!(matches!(
            SchreierDiagram::build(&a).err().unwrap(),
            SchreierError::NotTransitive { unreached: 1 }
        ));
    }

    #[test]
    fn index_two_subgroup_of_the_infinite_cyclic_group() {
        let d = SchreierDiagram::build(&doubling_action()).unwrap();
        assert_eq!(d.tree_edges(), &[(0, 0, 1)]);
        assert_eq!(d.generators().len(), 1);
        assert_eq!(d.generators()[0].word.to_text(), "aa");
        let pairs = d.transducer().transduce_pairs(2, 2);
        let texts: Vec<(String, String)> = pairs
            .iter()
            .map(|(u, v)| (u.to_text(), v.to_text()))
            .collect();
        assert!(texts.contains(&("".into(), "".into())));
        assert!(texts.contains(&("b0".into(), "aa".into())));
        assert!(texts.contains(&("b0'".into(), "AA".into())));
        assert!(texts.contains(&("".into(), "aA".into())));
        assert!(!texts.iter().any(|(_, v)| v == "a"));
    }

    #[test]
    fn index_three_free_group_generators_match_the_tree() {
        let d = SchreierDiagram::build(&index_three_action()).unwrap();
        assert_eq!(d.tree_edges(), &[(0, 0, 1), (1, 0, 2)]);
        let words: Vec<String> =
            d.generators().iter().map(|g| g.word.to_text()).collect();
        assert_eq!(words, vec!["b", "abA", "aaa", "aabAA"]);
        // Free of rank 4 by the index formula: 1 + 3 * (2 - 1).
        assert_eq!(d.generators().len(), 4);
        assert_eq!(d.subgroup_alphabet().rank(), 4);
    }

    #[test]
    fn rewriting_collects_fresh_letters_with_direction() {
        let d = SchreierDiagram::build(&index_three_action()).unwrap();
        let al = Arc::clone(d.action().alphabet());
        let (coset, u) = d.rewrite(&al.parse_word("aaa").unwrap());
        assert_eq!(coset, 0);
        assert_eq!(u.to_text(), "b2");
        let (coset, u) = d.rewrite(&al.parse_word("AAA").unwrap());
        assert_eq!(coset, 0);
        assert_eq!(u.to_text(), "b2'");
        let (coset, u) = d.rewrite(&al.parse_word("ab").unwrap());
        assert_eq!(coset, 1);
        assert_eq!(u.to_text(), "b1");
    }

    #[test]
    fn substitution_expands_fresh_letters() {
        let d = SchreierDiagram::build(&index_three_action()).unwrap();
        let s = d.substitution();
        let u = d.subgroup_alphabet().parse_word("b0 b2'").unwrap();
        assert_eq!(s.apply(&u).unwrap().to_text(), "bAAA");
    }

    #[test]
    fn verification_passes_for_small_fixtures() {
        let z = FreeOracle::with_letters(&["a"]).unwrap();
        let d = SchreierDiagram::build(&doubling_action()).unwrap();
        let report = verify_transduction(&d, &z, 6);
        assert!(report.passed(), "{:?}", report.failures);
        assert!(report.pairs_checked > 0);
        assert!(report.trivial_words_checked > 0);

        let f2 = FreeOracle::with_letters(&["a", "b"]).unwrap();
        let d3 = SchreierDiagram::build(&index_three_action()).unwrap();
        let report = verify_transduction(&d3, &f2, 5);
        assert!(report.passed(), "{:?}", report.failures);
    }

    #[test]
    fn corrupted_transducer_fails_verification_with_witnesses() {
        let f2 = FreeOracle::with_letters(&["a", "b"]).unwrap();
        let d = SchreierDiagram::build(&index_three_action()).unwrap();
        let bad = d.mutated_transducer();
        let report = verify_transducer(&d, &bad, &f2, 5);
        assert!(!report.passed());
        let witness = &report.failures[0];
        assert!(!witness.ambient_word.is_empty() || !witness.subgroup_word.is_empty());
    }
}
