//! Words over symmetric alphabets.
//!
//! A symmetric alphabet carries a fixed-point-free involution pairing each
//! letter with its formal inverse. Words over such an alphabet spell group
//! elements once an evaluation map is chosen; here they are plain free-monoid
//! elements with formal inversion and free reduction.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Errors arising from alphabet construction, word parsing and homomorphisms.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    /// A letter name is empty or contains a reserved character.
    #[error("invalid letter name {name:?}: {reason}")]
    InvalidLetterName { name: String, reason: String },
    /// Two letters of one alphabet would share a name.
    #[error("duplicate letter name {0:?}")]
    DuplicateLetter(String),
    /// A token in word text does not name a letter of the alphabet.
    #[error("unknown letter {0:?}")]
    UnknownLetter(String),
    /// Two words (or a word and an operation) disagree about their alphabet.
    #[error("alphabet mismatch")]
    AlphabetMismatch,
    /// A homomorphism is missing the image of a positive letter.
    #[error("no image given for letter {0:?}")]
    MissingImage(String),
}

/// Characters that may not appear in letter names (operators and separators).
const RESERVED: &[char] = &['\'', '*', '+', '(', ')', ',', ':', '#', '"'];

/// An alphabet closed under a fixed-point-free involution `a <-> a^-1`.
///
/// Letters are indexed so that the involution is `i ^ 1`: even indices hold
/// the declared (positive) letters, odd indices their inverses. When every
/// positive name is a single lowercase ASCII letter the inverse is written as
/// the uppercase letter and word text is read character by character;
/// otherwise inverses append an apostrophe and word text is read as
/// whitespace-separated tokens.
#[derive(Debug)]
pub struct SymmetricAlphabet {
    names: Vec<String>,
    index: HashMap<String, usize>,
    single_char: bool,
}

impl PartialEq for SymmetricAlphabet {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
    }
}

impl Eq for SymmetricAlphabet {}

impl SymmetricAlphabet {
    /// Builds the alphabet generated by the given positive letter names.
    pub fn from_positive(positive: &[&str]) -> Result<Arc<Self>, WordError> {
        if positive.is_empty() {
            // The empty alphabet is legal: its only word is the empty word.
            return Ok(Arc::new(Self {
                names: Vec::new(),
                index: HashMap::new(),
                single_char: true,
            }));
        }
        for name in positive {
            if name.is_empty() {
                return Err(WordError::InvalidLetterName {
                    name: name.to_string(),
                    reason: "empty name".into(),
                });
            }
            if let Some(c) = name.chars().find(|c| RESERVED.contains(c) || c.is_whitespace()) {
                return Err(WordError::InvalidLetterName {
                    name: name.to_string(),
                    reason: format!("reserved character {c:?}"),
                });
            }
        }
        let single_char = positive
            .iter()
            .all(|n| n.len() == 1 && n.chars().all(|c| c.is_ascii_lowercase() && c.is_ascii_alphabetic()));
        let mut names = Vec::with_capacity(positive.len() * 2);
        for name in positive {
            let inv = if single_char {
                name.to_ascii_uppercase()
            } else {
                format!("{name}'")
            };
            names.push(name.to_string());
            names.push(inv);
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(WordError::DuplicateLetter(n.clone()));
            }
        }
        Ok(Arc::new(Self { names, index, single_char }))
    }

    /// Number of letters including inverses.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// True when the alphabet has no letters.
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Number of positive letters.
    pub fn rank(&self) -> usize {
        self.names.len() / 2
    }

    /// Name of the letter at `i`.
    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    /// All letter names in index order.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Positive letter names in declaration order.
    pub fn positive_names(&self) -> Vec<&str> {
        self.names.iter().step_by(2).map(|s| s.as_str()).collect()
    }

    /// Index of the inverse letter.
    pub fn inverse(&self, i: usize) -> usize {
        debug_assert!(i < self.names.len());
        i ^ 1
    }

    /// True when `i` is a declared (non-inverse) letter.
    pub fn is_positive(&self, i: usize) -> bool {
        i.is_multiple_of(2)
    }

    /// Looks up a letter by name.
    pub fn letter(&self, name: &str) -> Result<usize, WordError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| WordError::UnknownLetter(name.to_string()))
    }

    /// True when word text is read character by character.
    pub fn is_single_char(&self) -> bool {
        self.single_char
    }

    /// Parses word text into letter indices.
    ///
    /// Single-character alphabets read each non-whitespace character as a
    /// letter; other alphabets read whitespace-separated tokens, a trailing
    /// apostrophe marking an inverse.
    pub fn parse_word(self: &Arc<Self>, text: &str) -> Result<Word, WordError> {
        let mut letters = Vec::new();
        if self.single_char {
            for c in text.chars() {
                if c.is_whitespace() {
                    continue;
                }
                letters.push(self.letter(&c.to_string())?);
            }
        } else {
            for token in text.split_whitespace() {
                letters.push(self.letter(token)?);
            }
        }
        Ok(Word { alphabet: Arc::clone(self), letters })
    }

    /// The empty word over this alphabet.
    pub fn empty_word(self: &Arc<Self>) -> Word {
        Word { alphabet: Arc::clone(self), letters: Vec::new() }
    }

    /// Builds a word from letter indices, checking ranges.
    pub fn word_from_letters(self: &Arc<Self>, letters: Vec<usize>) -> Result<Word, WordError> {
        if let Some(&bad) = letters.iter().find(|&&l| l >= self.names.len()) {
            return Err(WordError::UnknownLetter(format!("#{bad}")));
        }
        Ok(Word { alphabet: Arc::clone(self), letters })
    }
}

/// True when the two alphabets are interchangeable.
pub fn same_alphabet(a: &Arc<SymmetricAlphabet>, b: &Arc<SymmetricAlphabet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A free-monoid word over a symmetric alphabet.
#[derive(Clone)]
pub struct Word {
    alphabet: Arc<SymmetricAlphabet>,
    letters: Vec<usize>,
}

impl Word {
    /// The alphabet this word is spelled over.
    pub fn alphabet(&self) -> &Arc<SymmetricAlphabet> {
        &self.alphabet
    }

    /// Letter indices in spelling order.
    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    /// Word length.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    /// True for the empty word.
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Concatenation; both words must share one alphabet.
    pub fn concat(&self, other: &Word) -> Result<Word, WordError> {
        if !same_alphabet(&self.alphabet, &other.alphabet) {
            return Err(WordError::AlphabetMismatch);
        }
        let mut letters = Vec::with_capacity(self.letters.len() + other.letters.len());
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(&other.letters);
        Ok(Word { alphabet: Arc::clone(&self.alphabet), letters })
    }

    /// Reverses the word and inverts each letter.
    pub fn formal_inverse(&self) -> Word {
        let letters = self.letters.iter().rev().map(|&l| l ^ 1).collect();
        Word { alphabet: Arc::clone(&self.alphabet), letters }
    }

    /// Cancels adjacent inverse pairs until none remain.
    ///
    /// The result is independent of cancellation order, so a single
    /// stack pass suffices.
    pub fn free_reduce(&self) -> Word {
        let mut stack: Vec<usize> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if stack.last() == Some(&(l ^ 1)) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Word { alphabet: Arc::clone(&self.alphabet), letters: stack }
    }

    /// The word repeated `n` times.
    pub fn repeat(&self, n: usize) -> Word {
        let mut letters = Vec::with_capacity(self.letters.len() * n);
        for _ in 0..n {
            letters.extend_from_slice(&self.letters);
        }
        Word { alphabet: Arc::clone(&self.alphabet), letters }
    }

    /// Renders the word in the alphabet's text convention.
    pub fn to_text(&self) -> String {
        if self.alphabet.single_char {
            self.letters.iter().map(|&l| self.alphabet.name(l)).collect()
        } else {
            self.letters
                .iter()
                .map(|&l| self.alphabet.name(l))
                .collect::<Vec<_>>()
                .join(" ")
        }
    }
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.letters == other.letters && same_alphabet(&self.alphabet, &other.alphabet)
    }
}

impl Eq for Word {}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({:?})", self.to_text())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// A monoid homomorphism between free monoids on symmetric alphabets,
/// determined by images of positive letters and extended so that inverse
/// letters map to the formal inverses of those images.
#[derive(Debug, Clone)]
pub struct MonoidHom {
    source: Arc<SymmetricAlphabet>,
    target: Arc<SymmetricAlphabet>,
    images: Vec<Word>,
}

impl MonoidHom {
    /// Builds a homomorphism from images of the positive source letters.
    pub fn from_positive_images(
        source: &Arc<SymmetricAlphabet>,
        target: &Arc<SymmetricAlphabet>,
        positive_images: &[(&str, &str)],
    ) -> Result<Self, WordError> {
        let mut by_letter: HashMap<usize, Word> = HashMap::new();
        for (name, text) in positive_images {
            let l = source.letter(name)?;
            if !source.is_positive(l) {
                return Err(WordError::InvalidLetterName {
                    name: name.to_string(),
                    reason: "images are given on positive letters only".into(),
                });
            }
            let image = target.parse_word(text)?;
            if by_letter.insert(l, image).is_some() {
                return Err(WordError::DuplicateLetter(name.to_string()));
            }
        }
        let mut images = Vec::with_capacity(source.len());
        for i in 0..source.len() {
            let pos = i & !1;
            let image = by_letter
                .get(&pos)
                .ok_or_else(|| WordError::MissingImage(source.name(pos).to_string()))?;
            if source.is_positive(i) {
                images.push(image.clone());
            } else {
                images.push(image.formal_inverse());
            }
        }
        Ok(Self {
            source: Arc::clone(source),
            target: Arc::clone(target),
            images,
        })
    }

    /// The identity homomorphism on `alphabet`.
    pub fn identity(alphabet: &Arc<SymmetricAlphabet>) -> Self {
        let images = (0..alphabet.len())
            .map(|l| Word { alphabet: Arc::clone(alphabet), letters: vec![l] })
            .collect();
        Self {
            source: Arc::clone(alphabet),
            target: Arc::clone(alphabet),
            images,
        }
    }

    /// Source alphabet.
    pub fn source(&self) -> &Arc<SymmetricAlphabet> {
        &self.source
    }

    /// Target alphabet.
    pub fn target(&self) -> &Arc<SymmetricAlphabet> {
        &self.target
    }

    /// Image of the letter at `i`.
    pub fn image(&self, i: usize) -> &Word {
        &self.images[i]
    }

    /// Applies the homomorphism letter by letter.
    pub fn apply(&self, w: &Word) -> Result<Word, WordError> {
        if !same_alphabet(&self.source, w.alphabet()) {
            return Err(WordError::AlphabetMismatch);
        }
        let mut letters = Vec::new();
        for &l in w.letters() {
            letters.extend_from_slice(&self.images[l].letters);
        }
        Ok(Word { alphabet: Arc::clone(&self.target), letters })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn ab() -> Arc<SymmetricAlphabet> {
        SymmetricAlphabet::from_positive(&["a", "b"]).unwrap()
    }

    fn heis() -> Arc<SymmetricAlphabet> {
        SymmetricAlphabet::from_positive(&["a_g", "a_h", "a_z"]).unwrap()
    }

    #[test]
    fn single_char_alphabet_pairs_letters_by_case() {
        let s = SymmetricAlphabet::from_positive(&["a", "t"]).unwrap();
        assert_eq!(s.names(), &["a", "A", "t", "T"]);
        assert_eq!(s.inverse(s.letter("a").unwrap()), s.letter("A").unwrap());
        assert_eq!(s.inverse(s.letter("T").unwrap()), s.letter("t").unwrap());
        assert!(s.is_single_char());
    }

    #[test]
    fn multi_char_alphabet_pairs_letters_by_apostrophe() {
        let s = heis();
        assert_eq!(
            s.names(),
            &["a_g", "a_g'", "a_h", "a_h'", "a_z", "a_z'"]
        );
        assert!(!s.is_single_char());
        let w = s.parse_word("a_g a_h a_g'").unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w.to_text(), "a_g a_h a_g'");
    }

    #[test]
    fn parse_round_trips_single_char_text() {
        let s = SymmetricAlphabet::from_positive(&["a", "t"]).unwrap();
        let w = s.parse_word("taTAA").unwrap();
        assert_eq!(w.to_text(), "taTAA");
        assert_eq!(w.len(), 5);
    }

    #[test]
    fn parse_rejects_foreign_letters() {
        let s = ab();
        assert_eq!(
            s.parse_word("axb").unwrap_err(),
            WordError::UnknownLetter("x".into())
        );
    }

    #[test]
    fn empty_text_is_the_empty_word() {
        let s = ab();
        assert!(s.parse_word("").unwrap().is_empty());
        assert!(s.parse_word("  ").unwrap().is_empty());
    }

    #[test]
    fn reserved_characters_are_rejected_in_names() {
        for bad in ["a*", "x+y", "", "a'", "p q", "u:v"] {
            assert!(SymmetricAlphabet::from_positive(&[bad]).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn duplicate_names_are_rejected() {
        assert_eq!(
            SymmetricAlphabet::from_positive(&["a", "a"]).unwrap_err(),
            WordError::DuplicateLetter("a".into())
        );
    }

    #[test]
    fn formal_inverse_reverses_and_inverts() {
        let s = ab();
        let w = s.parse_word("abA").unwrap();
        assert_eq!(w.formal_inverse().to_text(), "aBA");
    }

    #[test]
    fn free_reduce_cancels_inner_pair() {
        let s = SymmetricAlphabet::from_positive(&["x", "y", "z"]).unwrap();
        let w = s.parse_word("xyYz").unwrap();
        assert_eq!(w.free_reduce().to_text(), "xz");
    }

    #[test]
    fn concat_requires_matching_alphabets() {
        let s = ab();
        let t = SymmetricAlphabet::from_positive(&["a", "c"]).unwrap();
        let u = s.parse_word("a").unwrap();
        let v = t.parse_word("c").unwrap();
        assert_eq!(u.concat(&v).unwrap_err(), WordError::AlphabetMismatch);
    }

    /// Reduces by deleting one adjacent inverse pair at every possible
    /// position, in every order; the set of fully reduced results must be a
    /// singleton agreeing with the stack pass.
    fn reduce_all_orders(letters: &[usize]) -> BTreeSet<Vec<usize>> {
        let mut cuts = Vec::new();
        for i in 0..letters.len().saturating_sub(1) {
            if letters[i] ^ 1 == letters[i + 1] {
                cuts.push(i);
            }
        }
        if cuts.is_empty() {
            let mut out = BTreeSet::new();
            out.insert(letters.to_vec());
            return out;
        }
        let mut out = BTreeSet::new();
        for i in cuts {
            let mut next = letters.to_vec();
            next.drain(i..i + 2);
            out.extend(reduce_all_orders(&next));
        }
        out
    }

    #[test]
    fn free_reduce_is_confluent_on_short_words() {
        let s = ab();
        for len in 0..=6 {
            let mut stack = vec![Vec::new()];
            for _ in 0..len {
                stack = stack
                    .into_iter()
                    .flat_map(|w: Vec<usize>| {
                        (0..4).map(move |l| {
                            let mut v = w.clone();
                            v.push(l);
                            v
                        })
                    })
                    .collect();
            }
            for letters in stack {
                let w = s.word_from_letters(letters.clone()).unwrap();
                let all = reduce_all_orders(&letters);
                assert_eq!(all.len(), 1, "non-confluent on {letters:?}");
                assert_eq!(all.into_iter().next().unwrap(), w.free_reduce().letters);
            }
        }
    }

    #[test]
    fn hom_requires_every_positive_letter_image() {
        let s = ab();
        let t = ab();
        let err = MonoidHom::from_positive_images(&s, &t, &[("a", "ab")]).unwrap_err();
        assert_eq!(err, WordError::MissingImage("b".into()));
    }

    #[test]
    fn hom_sends_inverse_letters_to_inverse_images() {
        let s = SymmetricAlphabet::from_positive(&["x"]).unwrap();
        let t = ab();
        let h = MonoidHom::from_positive_images(&s, &t, &[("x", "aB")]).unwrap();
        let w = s.parse_word("xX").unwrap();
        assert_eq!(h.apply(&w).unwrap().to_text(), "aBbA");
    }

    fn arb_word(max_len: usize) -> impl Strategy<Value = Vec<usize>> {
        prop::collection::vec(0usize..4, 0..=max_len)
    }

    proptest! {
        #[test]
        fn double_inverse_is_identity(letters in arb_word(12)) {
            let s = ab();
            let w = s.word_from_letters(letters).unwrap();
            prop_assert_eq!(w.formal_inverse().formal_inverse(), w);
        }

        #[test]
        fn inverse_antihomomorphism(u in arb_word(8), v in arb_word(8)) {
            let s = ab();
            let u = s.word_from_letters(u).unwrap();
            let v = s.word_from_letters(v).unwrap();
            let lhs = u.concat(&v).unwrap().formal_inverse();
            let rhs = v.formal_inverse().concat(&u.formal_inverse()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn reduction_is_idempotent(letters in arb_word(16)) {
            let s = ab();
            let w = s.word_from_letters(letters).unwrap();
            let r = w.free_reduce();
            prop_assert_eq!(r.free_reduce(), r);
        }

        #[test]
        fn word_times_inverse_reduces_to_empty(letters in arb_word(16)) {
            let s = ab();
            let w = s.word_from_letters(letters).unwrap();
            let prod = w.concat(&w.formal_inverse()).unwrap();
            prop_assert!(prod.free_reduce().is_empty());
        }

        #[test]
        fn hom_respects_concat(u in arb_word(8), v in arb_word(8)) {
            let s = ab();
            let t = SymmetricAlphabet::from_positive(&["p", "q"]).unwrap();
            let h = MonoidHom::from_positive_images(&s, &t, &[("a", "pq"), ("b", "qP")]).unwrap();
            let u = s.word_from_letters(u).unwrap();
            let v = s.word_from_letters(v).unwrap();
            let lhs = h.apply(&u.concat(&v).unwrap()).unwrap();
            let rhs = h.apply(&u).unwrap().concat(&h.apply(&v).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn hom_respects_inverse(u in arb_word(10)) {
            let s = ab();
            let t = SymmetricAlphabet::from_positive(&["p", "q"]).unwrap();
            let h = MonoidHom::from_positive_images(&s, &t, &[("a", "pq"), ("b", "qP")]).unwrap();
            let u = s.word_from_letters(u).unwrap();
            let lhs = h.apply(&u.formal_inverse()).unwrap();
            let rhs = h.apply(&u).unwrap().formal_inverse();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
