//! Exact group-element oracles: each oracle decides whether a word over its
//! symmetric alphabet evaluates to the identity of its group.
//!
//! Every family works with exact arithmetic in a faithful model (free
//! reduction, exponent sums, unitriangular coordinates, dyadic affine maps,
//! unimodular matrix actions, commuting cancellation), so answers are
//! decisions, not approximations. Product and pullback combinators close the
//! families under direct products and relabelling along homomorphisms.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::graphs::SimpleGraph;
use crate::words::{same_alphabet, MonoidHom, SymmetricAlphabet, Word, WordError};

/// Errors from oracle construction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Word(#[from] WordError),
    /// Direct products need disjoint positive letter names.
    #[error("product factors share letter {0:?}")]
    OverlappingLetters(String),
    /// Torus bundle monodromy must have determinant +1 or -1.
    #[error("monodromy determinant is {0}, expected +1 or -1")]
    NotUnimodular(i64),
    /// Pullback homomorphism must land in the inner oracle's alphabet.
    #[error("homomorphism target does not match the oracle alphabet")]
    HomTargetMismatch,
}

/// Decides the word problem of a fixed finitely generated group.
///
/// `decide(w)` answers whether `w` evaluates to the group identity. Oracles
/// are pure and callable from multiple threads.
pub trait GroupOracle: Send + Sync {
    /// Human-readable family name with parameters.
    fn name(&self) -> String;
    /// The symmetric alphabet words must be spelled over.
    fn alphabet(&self) -> &Arc<SymmetricAlphabet>;
    /// True when `w` evaluates to the identity.
    ///
    /// Panics if `w` is spelled over a different alphabet; parse words
    /// against `alphabet()` first.
    fn decide(&self, w: &Word) -> bool;
}

fn check_alphabet(oracle: &Arc<SymmetricAlphabet>, w: &Word) {
    assert!(
        same_alphabet(oracle, w.alphabet()),
        "word is spelled over a foreign alphabet"
    );
}

/// Default generator names: `a`, `b`, ... up to rank 26, then `x1`, `x2`, ...
fn default_letters(rank: usize) -> Vec<String> {
    if rank <= 26 {
        (0..rank).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    } else {
        (1..=rank).map(|i| format!("x{i}")).collect()
    }
}

/// Free group: a word is trivial exactly when it freely reduces to nothing.
pub struct FreeOracle {
    alphabet: Arc<SymmetricAlphabet>,
}

impl FreeOracle {
    /// Free group of the given rank with default generator names.
    pub fn of_rank(rank: usize) -> Result<Self, OracleError> {
        let names = default_letters(rank);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Self::with_letters(&refs)
    }

    /// Free group on explicitly named generators.
    pub fn with_letters(letters: &[&str]) -> Result<Self, OracleError> {
        Ok(Self { alphabet: SymmetricAlphabet::from_positive(letters)? })
    }
}

impl GroupOracle for FreeOracle {
    fn name(&self) -> String {
        format!("free[{}]", self.alphabet.positive_names().join(","))
    }

    fn alphabet(&self) -> &Arc<SymmetricAlphabet> {
        &self.alphabet
    }

    fn decide(&self, w: &Word) -> bool {
        check_alphabet(&self.alphabet, w);
        let mut stack: Vec<usize> = Vec::with_capacity(w.len());
        for &l in w.letters() {
            if stack.last() == Some(&(l ^ 1)) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        stack.is_empty()
    }
}

/// Free abelian group: a word is trivial exactly when every generator's
/// exponent sum vanishes.
pub struct AbelianOracle {
    alphabet: Arc<SymmetricAlphabet>,
}

impl AbelianOracle {
    /// `Z^rank` with default generator names.
    pub fn of_rank(rank: usize) -> Result<Self, OracleError> {
        let names = default_letters(rank);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Self::with_letters(&refs)
    }

    /// Free abelian group on explicitly named generators.
    pub fn with_letters(letters: &[&str]) -> Result<Self, OracleError> {
        Ok(Self { alphabet: SymmetricAlphabet::from_positive(letters)? })
    }
}

impl GroupOracle for AbelianOracle {
    fn name(&self) -> String {
        format!("abelian[{}]", self.alphabet.positive_names().join(","))
    }

    fn alphabet(&self) -> &Arc<SymmetricAlphabet> {
        &self.alphabet
    }

    fn decide(&self, w: &Word) -> bool {
        check_alphabet(&self.alphabet, w);
        let mut sums = vec![0i64; self.alphabet.rank()];
        for &l in w.letters() {
            sums[l / 2] += if l % 2 == 0 { 1 } else { -1 };
        }
        sums.iter().all(|&s| s == 0)
    }
}

/// Discrete Heisenberg group in unitriangular coordinates `(a, b, c)` with
/// `(a, b, c) * (a', b', c') = (a + a', b + b', c + c' + a * b')`.
///
/// Generators: `a_g = (1,0,0)`, `a_h = (0,1,0)` and the central
/// `a_z = (0,0,-1)`, so the commutator of `a_g` and `a_h` equals the
/// inverse image of `a_z`.
pub struct HeisenbergOracle {
    alphabet: Arc<SymmetricAlphabet>,
}

impl HeisenbergOracle {
    pub fn new() -> Self {
        let alphabet = SymmetricAlphabet::from_positive(&["a_g", "a_h", "a_z"])
            .expect("fixed alphabet is valid");
        Self { alphabet }
    }
}

impl Default for HeisenbergOracle {
    fn default() -> Self {
        Self::new()
    }
}

impl GroupOracle for HeisenbergOracle {
    fn name(&self) -> String {
        "heisenberg".into()
    }

    fn alphabet(&self) -> &Arc<SymmetricAlphabet> {
        &self.alphabet
    }

    fn decide(&self, w: &Word) -> bool {
        check_alphabet(&self.alphabet, w);
        // |a|, |b| <= len and |c| <= len^2, so i128 never overflows for any
        // word that fits in memory.
        let (mut a, mut b, mut c) = (0i128, 0i128, 0i128);
        for &l in w.letters() {
            let (da, db, dc) = match l {
                0 => (1, 0, 0),
                1 => (-1, 0, 0),
                2 => (0, 1, 0),
                3 => (0, -1, 0),
                4 => (0, 0, -1),
                5 => (0, 0, 1),
                _ => unreachable!("alphabet has six letters"),
            };
            c += dc + a * db;
            a += da;
            b += db;
        }
        a == 0 && b == 0 && c == 0
    }
}

/// An exact dyadic rational `num / 2^exp`, kept normalized so `num` is odd
/// or the value is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Dyadic {
    num: BigInt,
    exp: u64,
}

impl Dyadic {
    fn zero() -> Self {
        Self { num: BigInt::zero(), exp: 0 }
    }

    fn integer(n: i64) -> Self {
        Self { num: BigInt::from(n), exp: 0 }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.num.is_zero() {
            self.exp = 0;
            return self;
        }
        while self.exp > 0 && (&self.num % 2u8).is_zero() {
            self.num /= 2;
            self.exp -= 1;
        }
        self
    }

    /// Multiplies by `2^k`.
    fn scale_pow2(&self, k: i64) -> Self {
        if self.num.is_zero() {
            return Self::zero();
        }
        if k >= 0 {
            let k = k as u64;
            if k >= self.exp {
                Self { num: &self.num << (k - self.exp), exp: 0 }
            } else {
                Self { num: self.num.clone(), exp: self.exp - k }
            }
        } else {
            Self { num: self.num.clone(), exp: self.exp + (-k) as u64 }.normalized()
        }
    }

    fn add(&self, other: &Self) -> Self {
        let exp = self.exp.max(other.exp);
        let num = (&self.num << (exp - self.exp)) + (&other.num << (exp - other.exp));
        Self { num, exp }.normalized()
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

/// The affine map `x -> 2^log_scale * x + translation` on dyadic rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
struct DyadicAffineMap {
    log_scale: i64,
    translation: Dyadic,
}

impl DyadicAffineMap {
    fn identity() -> Self {
        Self { log_scale: 0, translation: Dyadic::zero() }
    }

    /// Composition `self . other` (apply `other` first).
    fn compose(&self, other: &Self) -> Self {
        Self {
            log_scale: self.log_scale + other.log_scale,
            translation: other.translation.scale_pow2(self.log_scale).add(&self.translation),
        }
    }

    fn is_identity(&self) -> bool {
        self.log_scale == 0 && self.translation.is_zero()
    }
}

/// Baumslag-Solitar group `BS(1,2)` through its faithful affine action on
/// dyadic rationals: `a` acts as `x -> x + 1` and `t` as `x -> 2x`.
pub struct Bs12Oracle {
    alphabet: Arc<SymmetricAlphabet>,
}

impl Bs12Oracle {
    pub fn new() -> Self {
        let alphabet =
            SymmetricAlphabet::from_positive(&["a", "t"]).expect("fixed alphabet is valid");
        Self { alphabet }
    }
}

impl Default for Bs12Oracle {
    fn default() -> Self {
        Self::new()
    }
}

impl GroupOracle for Bs12Oracle {
    fn name(&self) -> String {
        "bs12".into()
    }

    fn alphabet(&self) -> &Arc<SymmetricAlphabet> {
        &self.alphabet
    }

    fn decide(&self, w: &Word) -> bool {
        check_alphabet(&self.alphabet, w);
        let mut acc = DyadicAffineMap::identity();
        for &l in w.letters() {
            let step = match l {
                0 => DyadicAffineMap { log_scale: 0, translation: Dyadic::integer(1) },
                1 => DyadicAffineMap { log_scale: 0, translation: Dyadic::integer(-1) },
                2 => DyadicAffineMap { log_scale: 1, translation: Dyadic::zero() },
                3 => DyadicAffineMap { log_scale: -1, translation: Dyadic::zero() },
                _ => unreachable!("alphabet has four letters"),
            };
            acc = acc.compose(&step);
        }
        acc.is_identity()
    }
}

/// An exact 2x2 integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Mat2 {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl Mat2 {
    fn identity() -> Self {
        Self { a: BigInt::one(), b: BigInt::zero(), c: BigInt::zero(), d: BigInt::one() }
    }

    fn mul(&self, o: &Self) -> Self {
        Self {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Mat2::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    fn apply(&self, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
        (&self.a * x + &self.b * y, &self.c * x + &self.d * y)
    }
}

/// Torus bundle group `Z^2 x| Z` with a unimodular monodromy matrix: the
/// stable letter `t` acts on the fiber `Z^2` by the matrix.
///
/// Elements are pairs `(v, k)` with `(v, k)(w, l) = (v + A^k w, k + l)`.
/// Generators: fiber letters `x`, `y` and the stable letter `t`.
pub struct TorusBundleOracle {
    alphabet: Arc<SymmetricAlphabet>,
    monodromy: Mat2,
    inverse: Mat2,
    entries: [i64; 4],
}

impl TorusBundleOracle {
    /// Builds the bundle with monodromy `[[a, b], [c, d]]`; the determinant
    /// must be `+1` or `-1` so the action is invertible over `Z`.
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, OracleError> {
        let det = a
            .checked_mul(d)
            .and_then(|ad| b.checked_mul(c).map(|bc| ad - bc))
            .ok_or(OracleError::NotUnimodular(0))?;
        if det != 1 && det != -1 {
            return Err(OracleError::NotUnimodular(det));
        }
        let monodromy = Mat2 {
            a: BigInt::from(a),
            b: BigInt::from(b),
            c: BigInt::from(c),
            d: BigInt::from(d),
        };
        // det = +-1, so adj(A)/det stays integral.
        let inverse = Mat2 {
            a: BigInt::from(d * det),
            b: BigInt::from(-b * det),
            c: BigInt::from(-c * det),
            d: BigInt::from(a * det),
        };
        let alphabet =
            SymmetricAlphabet::from_positive(&["x", "y", "t"]).expect("fixed alphabet is valid");
        Ok(Self { alphabet, monodromy, inverse, entries: [a, b, c, d] })
    }

    /// Exact matrix power `A^n` applied to `(1, 0)`, for growth baselines.
    pub fn monodromy_power_of_e1(&self, n: u64) -> (BigInt, BigInt) {
        let p = self.monodromy.pow(n);
        p.apply(&BigInt::one(), &BigInt::zero())
    }

    fn power(&self, k: i64) -> Mat2 {
        if k >= 0 {
            self.monodromy.pow(k as u64)
        } else {
            self.inverse.pow(k.unsigned_abs())
        }
    }
}

impl GroupOracle for TorusBundleOracle {
    fn name(&self) -> String {
        let [a, b, c, d] = self.entries;
        format!("torusbundle[{a},{b},{c},{d}]")
    }

    fn alphabet(&self) -> &Arc<SymmetricAlphabet> {
        &self.alphabet
    }

    fn decide(&self, w: &Word) -> bool {
        check_alphabet(&self.alphabet, w);
        let mut vx = BigInt::zero();
        let mut vy = BigInt::zero();
        let mut k = 0i64;
        for &l in w.letters() {
            let (wx, wy, dl) = match l {
                0 => (1, 0, 0),
                1 => (-1, 0, 0),
                2 => (0, 1, 0),
                3 => (0, -1, 0),
                4 => (0, 0, 1),
                5 => (0, 0, -1),
                _ => unreachable!("alphabet has six letters"),
            };
            if wx != 0 || wy != 0 {
                let (ax, ay) = self.power(k).apply(&BigInt::from(wx), &BigInt::from(wy));
                vx += ax;
                vy += ay;
            }
            k += dl;
        }
        vx.is_zero() && vy.is_zero() && k == 0
    }
}

/// Right-angled Artin group of a simple graph: vertices generate, adjacent
/// vertices commute.
///
/// A word is trivial exactly when iterated cancellation empties it: a pair
/// `v ... v^-1` may be deleted whenever every letter strictly between is
/// adjacent to `v` in the graph. Adjacency is irreflexive, so intermediate
/// letters on the same vertex block the deletion.
pub struct RaagOracle {
    alphabet: Arc<SymmetricAlphabet>,
    adjacency: Vec<u64>,
    graph: SimpleGraph,
}

impl RaagOracle {
    /// Builds the oracle; vertex names become the positive letters.
    pub fn new(graph: &SimpleGraph) -> Result<Self, OracleError> {
        let names = graph.vertex_names();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let alphabet = SymmetricAlphabet::from_positive(&refs)?;
        Ok(Self {
            alphabet,
            adjacency: graph.adjacency_masks().to_vec(),
            graph: graph.clone(),
        })
    }

    /// The defining graph.
    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }
}

impl GroupOracle for RaagOracle {
    fn name(&self) -> String {
        format!("raag[{}]", self.graph.vertex_names().join(","))
    }

    fn alphabet(&self) -> &Arc<SymmetricAlphabet> {
        &self.alphabet
    }

    fn decide(&self, w: &Word) -> bool {
        check_alphabet(&self.alphabet, w);
        let mut letters: Vec<usize> = w.letters().to_vec();
        'outer: loop {
            for i in 0..letters.len() {
                let li = letters[i];
                let vi = li / 2;
                for j in i + 1..letters.len() {
                    let lj = letters[j];
                    if lj == li ^ 1 {
                        letters.remove(j);
                        letters.remove(i);
                        continue 'outer;
                    }
                    if self.adjacency[vi] & (1 << (lj / 2)) == 0 {
                        // Non-commuting blocker; letters on vertex vi block
                        // too because the graph has no loops.
                        break;
                    }
                }
            }
            break;
        }
        letters.is_empty()
    }
}

/// Direct product of two groups on disjoint generator names: a word is
/// trivial exactly when both of its projections are.
pub struct ProductOracle {
    alphabet: Arc<SymmetricAlphabet>,
    left: Box<dyn GroupOracle>,
    right: Box<dyn GroupOracle>,
    /// For each combined letter: (belongs to right factor, component letter).
    routing: Vec<(bool, usize)>,
}

impl ProductOracle {
    pub fn new(
        left: Box<dyn GroupOracle>,
        right: Box<dyn GroupOracle>,
    ) -> Result<Self, OracleError> {
        let left_names = left.alphabet().positive_names().into_iter().map(String::from).collect::<Vec<_>>();
        let right_names = right.alphabet().positive_names().into_iter().map(String::from).collect::<Vec<_>>();
        if let Some(shared) = left_names.iter().find(|n| right_names.contains(n)) {
            return Err(OracleError::OverlappingLetters(shared.clone()));
        }
        let combined: Vec<&str> = left_names
            .iter()
            .chain(right_names.iter())
            .map(String::as_str)
            .collect();
        let alphabet = SymmetricAlphabet::from_positive(&combined)?;
        let mut routing = Vec::with_capacity(alphabet.len());
        for i in 0..alphabet.len() {
            let positive = i & !1;
            let name = alphabet.name(positive).to_string();
            let (is_right, component) = match left.alphabet().letter(&name) {
                Ok(l) => (false, l),
                Err(_) => (true, right.alphabet().letter(&name)?),
            };
            routing.push((is_right, component | (i & 1)));
        }
        Ok(Self { alphabet, left, right, routing })
    }

    /// The two factors.
    pub fn factors(&self) -> (&dyn GroupOracle, &dyn GroupOracle) {
        (self.left.as_ref(), self.right.as_ref())
    }
}

impl GroupOracle for ProductOracle {
    fn name(&self) -> String {
        format!("product({}, {})", self.left.name(), self.right.name())
    }

    fn alphabet(&self) -> &Arc<SymmetricAlphabet> {
        &self.alphabet
    }

    fn decide(&self, w: &Word) -> bool {
        check_alphabet(&self.alphabet, w);
        let mut left_letters = Vec::new();
        let mut right_letters = Vec::new();
        for &l in w.letters() {
            let (is_right, component) = self.routing[l];
            if is_right {
                right_letters.push(component);
            } else {
                left_letters.push(component);
            }
        }
        let lw = self
            .left
            .alphabet()
            .word_from_letters(left_letters)
            .expect("routed letters are in range");
        let rw = self
            .right
            .alphabet()
            .word_from_letters(right_letters)
            .expect("routed letters are in range");
        self.left.decide(&lw) && self.right.decide(&rw)
    }
}

/// Pullback of an oracle along a homomorphism: decides triviality of the
/// image, so it answers for the subgroup (or relabelled group) generated by
/// the images of the source letters.
pub struct PullbackOracle {
    inner: Box<dyn GroupOracle>,
    hom: MonoidHom,
}

impl PullbackOracle {
    pub fn new(inner: Box<dyn GroupOracle>, hom: MonoidHom) -> Result<Self, OracleError> {
        if !same_alphabet(hom.target(), inner.alphabet()) {
            return Err(OracleError::HomTargetMismatch);
        }
        Ok(Self { inner, hom })
    }

    /// The homomorphism words are pushed through.
    pub fn hom(&self) -> &MonoidHom {
        &self.hom
    }
}

impl GroupOracle for PullbackOracle {
    fn name(&self) -> String {
        format!("pullback({})", self.inner.name())
    }

    fn alphabet(&self) -> &Arc<SymmetricAlphabet> {
        self.hom.source()
    }

    fn decide(&self, w: &Word) -> bool {
        check_alphabet(self.hom.source(), w);
        let image = self.hom.apply(w).expect("alphabet checked above");
        self.inner.decide(&image)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use std::collections::HashSet;
    use std::collections::VecDeque;

    fn word(o: &dyn GroupOracle, text: &str) -> Word {
        o.alphabet().parse_word(text).unwrap()
    }

    #[test]
    fn free_group_cancels_only_adjacent_inverses() {
        let f = FreeOracle::with_letters(&["x", "y"]).unwrap();
        assert!(f.decide(&word(&f, "")));
        assert!(f.decide(&word(&f, "xX")));
        assert!(f.decide(&word(&f, "xyYX")));
        assert!(!f.decide(&word(&f, "xyXY")));
    }

    #[test]
    fn abelian_group_kills_commutators() {
        let z2 = AbelianOracle::of_rank(2).unwrap();
        assert!(z2.decide(&word(&z2, "abAB")));
        assert!(!z2.decide(&word(&z2, "aabB")));
    }

    #[test]
    fn heisenberg_commutator_equals_central_letter() {
        let h = HeisenbergOracle::new();
        assert!(h.decide(&word(&h, "a_g a_h a_g' a_h' a_z")));
        assert!(!h.decide(&word(&h, "a_g a_h a_g' a_h'")));
        assert!(h.decide(&word(&h, "a_g a_z a_g' a_z'")));
        assert!(h.decide(&word(&h, "a_h a_z a_h' a_z'")));
    }

    #[test]
    fn heisenberg_box_words_need_exact_central_power() {
        let h = HeisenbergOracle::new();
        for (m, n) in [(1usize, 1usize), (2, 3), (4, 2)] {
            let text = format!(
                "{} {} {} {} {}",
                "a_g ".repeat(m),
                "a_h ".repeat(n),
                "a_g' ".repeat(m),
                "a_h' ".repeat(n),
                "a_z ".repeat(m * n),
            );
            assert!(h.decide(&word(&h, &text)), "m={m} n={n}");
            let off = format!("{text} a_z");
            assert!(!h.decide(&word(&h, &off)), "m={m} n={n}");
        }
    }

    #[test]
    fn bs12_relator_and_powers() {
        let b = Bs12Oracle::new();
        assert!(b.decide(&word(&b, "taTAA")));
        assert!(!b.decide(&word(&b, "taTA")));
        assert!(b.decide(&word(&b, "aA")));
        for n in 0..10usize {
            let text = format!(
                "{}a{}{}",
                "t".repeat(n),
                "T".repeat(n),
                "A".repeat(1 << n)
            );
            assert!(b.decide(&word(&b, &text)), "n={n}");
            assert!(!b.decide(&word(&b, &format!("{text}A"))), "n={n}");
        }
    }

    #[test]
    fn torus_bundle_defining_relations() {
        let t = TorusBundleOracle::new(2, 1, 1, 1).unwrap();
        assert!(t.decide(&word(&t, "xyXY")));
        assert!(t.decide(&word(&t, "txTYXX")));
        assert!(t.decide(&word(&t, "tyTYX")));
        assert!(!t.decide(&word(&t, "txT")));
        assert!(!t.decide(&word(&t, "t")));
    }

    #[test]
    fn torus_bundle_rejects_singular_monodromy() {
        assert_eq!(
            TorusBundleOracle::new(1, 1, 1, 1).err().unwrap(),
            OracleError::NotUnimodular(0)
        );
        assert_eq!(
            TorusBundleOracle::new(2, 0, 0, 2).err().unwrap(),
            OracleError::NotUnimodular(4)
        );
        assert!(TorusBundleOracle::new(1, 0, 0, -1).is_ok());
    }

    #[test]
    fn monodromy_powers_of_e1_grow_like_fibonacci() {
        let t = TorusBundleOracle::new(2, 1, 1, 1).unwrap();
        let sums: Vec<u64> = (1..=4)
            .map(|n| {
                let (x, y) = t.monodromy_power_of_e1(n);
                (x.abs() + y.abs()).try_into().unwrap()
            })
            .collect();
        assert_eq!(sums, vec![3, 8, 21, 55]);
    }

    fn p4() -> SimpleGraph {
        SimpleGraph::from_named_edges(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("b", "c"), ("c", "d")],
        )
        .unwrap()
    }

    #[test]
    fn raag_respects_graph_commutation() {
        let o = RaagOracle::new(&p4()).unwrap();
        assert!(o.decide(&word(&o, "abAB")));
        assert!(o.decide(&word(&o, "bcBC")));
        assert!(o.decide(&word(&o, "cdCD")));
        assert!(!o.decide(&word(&o, "acAC")));
        assert!(!o.decide(&word(&o, "adAD")));
        // a[b,c]A is trivial, but abcBAC reduces to [a,c] which is not.
        assert!(o.decide(&word(&o, "abcBCA")));
        assert!(!o.decide(&word(&o, "abcBAC")));
    }

    #[test]
    fn raag_blocks_cancellation_across_same_vertex() {
        let o = RaagOracle::new(&p4()).unwrap();
        // aXa^-1 with a blocker on the same vertex between the pair.
        assert!(!o.decide(&word(&o, "aabA")));
        assert!(o.decide(&word(&o, "aabAAB")));
    }

    /// Trace-monoid reference: explore commuting swaps and adjacent inverse
    /// deletions; the word is trivial exactly when the empty word is
    /// reachable.
    fn raag_brute_force(g: &SimpleGraph, letters: &[usize]) -> bool {
        let adj = g.adjacency_masks();
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut queue: VecDeque<Vec<usize>> = VecDeque::new();
        seen.insert(letters.to_vec());
        queue.push_back(letters.to_vec());
        while let Some(w) = queue.pop_front() {
            if w.is_empty() {
                return true;
            }
            for i in 0..w.len() - 1 {
                if w[i + 1] == w[i] ^ 1 {
                    let mut next = w.clone();
                    next.drain(i..i + 2);
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
                let (vi, vj) = (w[i] / 2, w[i + 1] / 2);
                if vi != vj && adj[vi] & (1 << vj) != 0 {
                    let mut next = w.clone();
                    next.swap(i, i + 1);
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
        false
    }

    #[test]
    fn raag_matches_trace_monoid_search_exhaustively() {
        let graphs = [
            p4(),
            SimpleGraph::from_named_edges(
                &["a", "b", "c", "d"],
                &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")],
            )
            .unwrap(),
            SimpleGraph::from_named_edges(&["a", "b", "c"], &[("a", "b")]).unwrap(),
        ];
        for g in &graphs {
            let o = RaagOracle::new(g).unwrap();
            let k = o.alphabet().len();
            for len in 0..=5 {
                let mut idx = vec![0usize; len];
                loop {
                    let w = o.alphabet().word_from_letters(idx.clone()).unwrap();
                    assert_eq!(
                        o.decide(&w),
                        raag_brute_force(g, &idx),
                        "graph={} word={}",
                        o.name(),
                        w
                    );
                    let mut i = len;
                    loop {
                        if i == 0 {
                            break;
                        }
                        i -= 1;
                        idx[i] += 1;
                        if idx[i] < k {
                            break;
                        }
                        idx[i] = 0;
                    }
                    if idx.iter().all(|&x| x == 0) {
                        break;
                    }
                }
            }
        }
    }

    #[test]
    fn raag_matches_trace_monoid_search_on_longer_samples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let g = p4();
        let o = RaagOracle::new(&g).unwrap();
        let k = o.alphabet().len();
        for _ in 0..2000 {
            let len = rng.gen_range(6..=9);
            let idx: Vec<usize> = (0..len).map(|_| rng.gen_range(0..k)).collect();
            let w = o.alphabet().word_from_letters(idx.clone()).unwrap();
            assert_eq!(o.decide(&w), raag_brute_force(&g, &idx), "word={w}");
        }
    }

    #[test]
    fn product_checks_both_projections() {
        let f1 = FreeOracle::with_letters(&["a", "b"]).unwrap();
        let f2 = FreeOracle::with_letters(&["p", "q"]).unwrap();
        let p = ProductOracle::new(Box::new(f1), Box::new(f2)).unwrap();
        assert!(p.decide(&word(&p, "apAP")));
        assert!(p.decide(&word(&p, "aApP")));
        assert!(!p.decide(&word(&p, "ab")));
        assert!(!p.decide(&word(&p, "apA")));
    }

    #[test]
    fn product_rejects_shared_letters() {
        let f1 = FreeOracle::with_letters(&["a", "b"]).unwrap();
        let f2 = FreeOracle::with_letters(&["b", "c"]).unwrap();
        assert_eq!(
            ProductOracle::new(Box::new(f1), Box::new(f2)).err().unwrap(),
            OracleError::OverlappingLetters("b".into())
        );
    }

    #[test]
    fn pullback_along_identity_changes_nothing() {
        let f = FreeOracle::with_letters(&["a", "b"]).unwrap();
        let hom = MonoidHom::identity(f.alphabet());
        let alphabet = Arc::clone(f.alphabet());
        let p = PullbackOracle::new(Box::new(f), hom).unwrap();
        for text in ["", "aA", "ab", "abAB", "abBA"] {
            let w = alphabet.parse_word(text).unwrap();
            let f2 = FreeOracle::with_letters(&["a", "b"]).unwrap();
            assert_eq!(p.decide(&w), f2.decide(&word(&f2, text)), "{text}");
        }
    }

    #[test]
    fn fiber_product_oracle_over_f2_times_f2() {
        let f1 = FreeOracle::with_letters(&["a", "b"]).unwrap();
        let f2 = FreeOracle::with_letters(&["p", "q"]).unwrap();
        let big = ProductOracle::new(Box::new(f1), Box::new(f2)).unwrap();
        let source = SymmetricAlphabet::from_positive(&["r", "s", "t"]).unwrap();
        let hom = MonoidHom::from_positive_images(
            &source,
            big.alphabet(),
            &[("r", "ap"), ("s", "bq"), ("t", "abAB")],
        )
        .unwrap();
        let p = PullbackOracle::new(Box::new(big), hom).unwrap();
        assert!(p.decide(&word(&p, "rR")));
        assert!(p.decide(&word(&p, "")));
        assert!(!p.decide(&word(&p, "t")));
        assert!(!p.decide(&word(&p, "rs")));
        // t maps into the first factor's commutator, so it commutes with
        // nothing visible on the second coordinate alone.
        assert!(p.decide(&word(&p, "tT")));
    }

    #[test]
    fn pullback_requires_matching_target() {
        let f = FreeOracle::with_letters(&["a", "b"]).unwrap();
        let other = SymmetricAlphabet::from_positive(&["z"]).unwrap();
        let src = SymmetricAlphabet::from_positive(&["r"]).unwrap();
        let hom = MonoidHom::from_positive_images(&src, &other, &[("r", "z")]).unwrap();
        assert!(matches!(
            PullbackOracle::new(Box::new(f), hom).err().unwrap(),
            OracleError::HomTargetMismatch
        ));
    }

    #[test]
    fn conjugates_of_relators_die_everywhere() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let h = HeisenbergOracle::new();
        let b = Bs12Oracle::new();
        let t = TorusBundleOracle::new(2, 1, 1, 1).unwrap();
        let cases: Vec<(&dyn GroupOracle, &str)> = vec![
            (&h, "a_g a_h a_g' a_h' a_z"),
            (&b, "taTAA"),
            (&t, "txTYXX"),
            (&t, "xyXY"),
        ];
        for (oracle, relator) in cases {
            let r = oracle.alphabet().parse_word(relator).unwrap();
            let k = oracle.alphabet().len();
            // Cyclic permutations are conjugates, hence trivial.
            for rot in 0..r.len() {
                let mut letters = r.letters().to_vec();
                letters.rotate_left(rot);
                let w = oracle.alphabet().word_from_letters(letters).unwrap();
                assert!(oracle.decide(&w), "{} rot {rot}", oracle.name());
            }
            for _ in 0..50 {
                let len = rng.gen_range(0..=8);
                let letters: Vec<usize> = (0..len).map(|_| rng.gen_range(0..k)).collect();
                let u = oracle.alphabet().word_from_letters(letters).unwrap();
                let conj = u
                    .concat(&r)
                    .unwrap()
                    .concat(&u.formal_inverse())
                    .unwrap();
                assert!(oracle.decide(&conj), "{}", oracle.name());
            }
        }
    }
}
