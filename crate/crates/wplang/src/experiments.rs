//! Reproducible growth studies tying oracles, language slices and point
//! sets together.
//!
//! Each study enumerates an identity sublanguage or a canonical word
//! family, projects it to integer points, and certifies how the points
//! grow. Everything that lands in a report is derived from exact
//! arithmetic, so equal inputs give byte-identical serialized reports.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{oracle_slice_regex, AutomataError, Regex};
use crate::graphs::SimpleGraph;
use crate::oracles::{
    Bs12Oracle, FreeOracle, GroupOracle, HeisenbergOracle, OracleError, ProductOracle,
    PullbackOracle, RaagOracle, TorusBundleOracle,
};
use crate::parikh::{
    as_pairs, check_certificate, fit_semilinear, max_collinear, parikh, points_to_csv, project,
    GrowthCertificate, ParikhError, Projection, Ratio,
};
use crate::words::{MonoidHom, SymmetricAlphabet, Word, WordError};

/// Errors raised while assembling a report.
#[derive(Debug, Error)]
pub enum ExperimentError {
    /// The experiment name is not in the catalogue.
    #[error("unknown experiment {0:?}")]
    UnknownExperiment(String),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Parikh(#[from] ParikhError),
    /// A bounded witness search ran out of candidates.
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    /// A size parameter fell outside the range the study can honor.
    #[error("bound out of range: {0}")]
    BoundOutOfRange(String),
}

/// One named verification performed while assembling a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.to_string(), passed, detail }
    }
}

/// Deterministic outcome of one growth study.
///
/// `points` is sorted and duplicate-free. `semilinear_fit_found` is the
/// verdict of the bounded fitting step for studies that run one, where
/// `Some(false)` means the search space was exhausted without a match.
/// Nothing time-dependent is stored, so serialization is reproducible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub group: String,
    pub size: usize,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(u64, u64)>,
    pub certificate: Option<GrowthCertificate>,
    pub certificate_holds: Option<bool>,
    pub semilinear_fit_found: Option<bool>,
    pub max_collinear: usize,
    pub checks: Vec<Check>,
}

impl ExperimentReport {
    /// True when every check passed and the certificate, if any, holds.
    pub fn passed(&self) -> bool {
        self.certificate_holds != Some(false) && self.checks.iter().all(|c| c.passed)
    }

    /// The point set as labelled CSV.
    pub fn points_csv(&self) -> String {
        let labels = [self.x_label.clone(), self.y_label.clone()];
        let rows: Vec<Vec<u64>> = self.points.iter().map(|&(x, y)| vec![x, y]).collect();
        points_to_csv(&labels, &rows)
    }
}

/// Names accepted by `run_experiment`, in catalogue order.
pub const EXPERIMENT_NAMES: [&str; 5] = [
    "bs12-growth",
    "heisenberg-gap",
    "path-subgroup-quadratic",
    "fiber-product-distortion",
    "torus-bundle-growth",
];

/// Default size parameter for each catalogued experiment.
///
/// The size is a maximum word length for the slice studies, a family
/// index bound for `path-subgroup-quadratic`, and the exponent grid
/// bound for `fiber-product-distortion`.
pub fn default_size(name: &str) -> Option<usize> {
    match name {
        "bs12-growth" => Some(45),
        "heisenberg-gap" => Some(30),
        "path-subgroup-quadratic" => Some(5),
        "fiber-product-distortion" => Some(2),
        "torus-bundle-growth" => Some(2601),
        _ => None,
    }
}

/// Runs a catalogued experiment, falling back to its default size.
pub fn run_experiment(
    name: &str,
    size: Option<usize>,
) -> Result<ExperimentReport, ExperimentError> {
    let size = size.or_else(|| default_size(name));
    match name {
        "bs12-growth" => bs12_growth(size.expect("catalogued name has a default")),
        "heisenberg-gap" => heisenberg_gap(size.expect("catalogued name has a default")),
        "path-subgroup-quadratic" => {
            path_subgroup_quadratic(size.expect("catalogued name has a default"))
        }
        "fiber-product-distortion" => {
            let bound = size.expect("catalogued name has a default");
            fiber_product_distortion(bound, bound)
        }
        "torus-bundle-growth" => torus_bundle_growth(size.expect("catalogued name has a default")),
        _ => Err(ExperimentError::UnknownExperiment(name.to_string())),
    }
}

/// Node budget handed to slice enumerations; generous for every
/// catalogued size but still a hard stop.
const SLICE_BUDGET: u64 = 100_000_000;

fn run_word(alphabet: &Arc<SymmetricAlphabet>, runs: &[(&str, usize)]) -> Word {
    let mut letters = Vec::new();
    for &(name, count) in runs {
        let l = alphabet.letter(name).expect("run letter belongs to the alphabet");
        letters.extend(std::iter::repeat_n(l, count));
    }
    alphabet.word_from_letters(letters).expect("letters are in range")
}

fn sorted_texts(words: &[Word]) -> Vec<String> {
    let mut texts: Vec<String> = words.iter().map(|w| w.to_text()).collect();
    texts.sort_unstable();
    texts
}

fn point_set(words: &[Word], projection: &Projection) -> Result<Vec<(u64, u64)>, ParikhError> {
    let vectors: Vec<_> = words.iter().map(parikh).collect();
    let mut points = as_pairs(&project(&vectors, projection))?;
    points.sort_unstable();
    points.dedup();
    Ok(points)
}

fn trivial(oracle: &dyn GroupOracle, left: &Word, right: &Word) -> bool {
    let diff = left.concat(&right.formal_inverse()).expect("words share an alphabet");
    oracle.decide(&diff)
}

/// Identity words of `<a, t | t a t' = a a>` inside the slice
/// `t* a T* A*`.
///
/// The slice meets the word problem exactly in `t^n a T^n A^(2^n)`, so
/// counting `t` against `A` exposes exponential growth: the report
/// certifies `y >= 2^x` and that no three points are collinear.
pub fn bs12_growth(max_len: usize) -> Result<ExperimentReport, ExperimentError> {
    if max_len < 2 {
        return Err(ExperimentError::BoundOutOfRange(format!(
            "bs12-growth needs max_len >= 2 so the shortest identity fits, got {max_len}"
        )));
    }
    let oracle = Bs12Oracle::new();
    let alphabet = Arc::clone(oracle.alphabet());
    let pattern = Regex::parse(&alphabet, "t*a(T)*(A)*")?;
    let words = oracle_slice_regex(&oracle, &pattern, max_len, SLICE_BUDGET)?;

    let mut expected = Vec::new();
    let mut n = 0usize;
    loop {
        let doubled = 1u128 << n;
        if (2 * n + 1) as u128 + doubled > max_len as u128 {
            break;
        }
        expected.push(run_word(&alphabet, &[("t", n), ("a", 1), ("T", n), ("A", doubled as usize)]));
        n += 1;
    }
    let family = Check::new(
        "slice-matches-doubling-family",
        words == expected,
        format!("slice has {} identity words, closed form predicts {}", words.len(), expected.len()),
    );

    let projection = Projection::parse("t,A", &alphabet)?;
    let points = point_set(&words, &projection)?;
    let certificate =
        GrowthCertificate::ExponentialLowerBound { base: Ratio::new(2, 1).expect("2 is a ratio") };
    let holds = check_certificate(&points, &certificate);
    let collinear = max_collinear(&points);
    let convex = Check::new(
        "no-three-points-collinear",
        collinear <= 2,
        format!("largest collinear subset has {collinear} points"),
    );

    Ok(ExperimentReport {
        experiment: "bs12-growth".to_string(),
        group: oracle.name(),
        size: max_len,
        x_label: projection.labels()[0].clone(),
        y_label: projection.labels()[1].clone(),
        points,
        certificate: Some(certificate),
        certificate_holds: Some(holds),
        semilinear_fit_found: None,
        max_collinear: collinear,
        checks: vec![family, convex],
    })
}

/// The multiplication-table points inside the box `[0,6] x [0,9]`,
/// split into members and non-members: `(x, y)` belongs iff `y` is a
/// multiple of `x`, with only the origin in the `x = 0` column.
fn table_box_split() -> (Vec<Vec<u64>>, Vec<Vec<u64>>) {
    const BOX_X: u64 = 6;
    const BOX_Y: u64 = 9;
    let mut points_in = Vec::new();
    let mut points_out = Vec::new();
    for x in 0..=BOX_X {
        for y in 0..=BOX_Y {
            let member = if x == 0 { y == 0 } else { y % x == 0 };
            if member {
                points_in.push(vec![x, y]);
            } else {
                points_out.push(vec![x, y]);
            }
        }
    }
    (points_in, points_out)
}

/// Identity words of the discrete Heisenberg group inside the slice
/// `a_g* a_h* (a_g')* (a_h')* a_z*`.
///
/// The identities are `a_g^m a_h^n a_g'^m a_h'^n a_z^(m n)`, so plotting
/// `|w|_ag` against `|w|_az` produces the multiplication table `(m, m n)`.
/// The report certifies the vertical-gap property and records that an
/// exhaustive search finds no two-component semilinear set with two
/// generators and coordinates at most three matching the points inside
/// the box `[0,6] x [0,9]`.
pub fn heisenberg_gap(max_len: usize) -> Result<ExperimentReport, ExperimentError> {
    if max_len < 4 {
        return Err(ExperimentError::BoundOutOfRange(format!(
            "heisenberg-gap needs max_len >= 4 so a nonzero commutation fits, got {max_len}"
        )));
    }
    let oracle = HeisenbergOracle::new();
    let alphabet = Arc::clone(oracle.alphabet());
    let pattern = Regex::parse(&alphabet, "a_g* a_h* (a_g')* (a_h')* a_z*")?;
    let words = oracle_slice_regex(&oracle, &pattern, max_len, SLICE_BUDGET)?;

    let mut expected = Vec::new();
    for m in 0..=max_len / 2 {
        for n in 0.. {
            if 2 * m + 2 * n + m * n > max_len {
                break;
            }
            expected.push(run_word(
                &alphabet,
                &[("a_g", m), ("a_h", n), ("a_g'", m), ("a_h'", n), ("a_z", m * n)],
            ));
        }
    }
    let family = Check::new(
        "slice-matches-commutation-family",
        sorted_texts(&words) == sorted_texts(&expected),
        format!("slice has {} identity words, closed form predicts {}", words.len(), expected.len()),
    );

    let projection = Projection::parse("a_g,a_z", &alphabet)?;
    let points = point_set(&words, &projection)?;
    let certificate = GrowthCertificate::VerticalGap;
    let holds = check_certificate(&points, &certificate);

    // Inside the box the projected points are exactly the pairs where the
    // second coordinate is a multiple of the first.
    let (points_in, points_out) = table_box_split();
    let boxed: Vec<Vec<u64>> = points
        .iter()
        .filter(|&&(x, y)| x <= 6 && y <= 9)
        .map(|&(x, y)| vec![x, y])
        .collect();
    let box_check = Check::new(
        "box-matches-divisibility",
        boxed == points_in,
        format!("{} projected points fall inside the box", boxed.len()),
    );
    let fit_found = fit_semilinear(&points_in, &points_out, 2, 2, 3)?.is_some();
    let fit_check = Check::new(
        "no-small-semilinear-fit",
        !fit_found,
        "searched every semilinear set with <=2 components, <=2 generators, coordinates <=3"
            .to_string(),
    );

    let collinear = max_collinear(&points);
    Ok(ExperimentReport {
        experiment: "heisenberg-gap".to_string(),
        group: oracle.name(),
        size: max_len,
        x_label: projection.labels()[0].clone(),
        y_label: projection.labels()[1].clone(),
        points,
        certificate: Some(certificate),
        certificate_holds: Some(holds),
        semilinear_fit_found: Some(fit_found),
        max_collinear: collinear,
        checks: vec![family, box_check, fit_check],
    })
}

/// A quadratically growing word family in the subgroup of the path
/// group `<a, b, c, d | [a,b], [b,c], [c,d]>` generated by `aB`, `bC`
/// and `cD`.
///
/// Over generators `x -> aB`, `y -> bC`, `z -> cD` the building blocks
/// `u_k = x y^(2k-1) z'` and `v_k = x' y^(2k-1) z` land on
/// `b^(2k-2) (ad) c^(-2k)` and `b^(2k) (a'd') c^(2-2k)`, so alternating
/// them with falling powers of `y'` telescopes to `(ad)^n (a'd')^n`.
/// The combined word is freely reduced and spends `2 n^2` positive `y`
/// letters, which the report certifies as `y >= 2 x^2`.
pub fn path_subgroup_quadratic(max_index: usize) -> Result<ExperimentReport, ExperimentError> {
    if max_index < 1 {
        return Err(ExperimentError::BoundOutOfRange(
            "path-subgroup-quadratic needs an index bound of at least 1".to_string(),
        ));
    }
    let graph = SimpleGraph::from_named_edges(
        &["a", "b", "c", "d"],
        &[("a", "b"), ("b", "c"), ("c", "d")],
    )
    .expect("the path on four vertices is a simple graph");
    let oracle = RaagOracle::new(&graph)?;
    let target = Arc::clone(oracle.alphabet());
    let source = SymmetricAlphabet::from_positive(&["x", "y", "z"])?;
    let hom = MonoidHom::from_positive_images(
        &source,
        &target,
        &[("x", "aB"), ("y", "bC"), ("z", "cD")],
    )?;

    let mut images_ok = true;
    let mut reduced_ok = true;
    let mut count_ok = true;
    let y_letter = source.letter("y")?;
    let y_inverse = source.letter("Y")?;
    let mut exponent_sums = Vec::new();
    let mut points = Vec::new();
    for n in 1..=max_index {
        let u_n = run_word(&source, &[("x", 1), ("y", 2 * n - 1), ("Z", 1)]);
        let u_img = run_word(&target, &[("b", 2 * n - 2), ("a", 1), ("d", 1), ("C", 2 * n)]);
        images_ok &= trivial(&oracle, &hom.apply(&u_n)?, &u_img);
        let v_n = run_word(&source, &[("X", 1), ("y", 2 * n - 1), ("z", 1)]);
        let v_img = run_word(&target, &[("b", 2 * n), ("A", 1), ("D", 1), ("C", 2 * n - 2)]);
        images_ok &= trivial(&oracle, &hom.apply(&v_n)?, &v_img);

        let mut runs: Vec<(&str, usize)> = Vec::new();
        for k in 1..=n {
            runs.extend([("x", 1), ("y", 2 * k - 1), ("Z", 1)]);
            if k < n {
                runs.push(("Y", 2 * k));
            }
        }
        runs.push(("Y", 2 * n));
        runs.extend([("X", 1), ("y", 2 * n - 1), ("z", 1)]);
        for k in (1..n).rev() {
            runs.push(("Y", 2 * k));
            runs.extend([("X", 1), ("y", 2 * k - 1), ("z", 1)]);
        }
        let f_n = run_word(&source, &runs);

        let mut commutator_runs: Vec<(&str, usize)> = Vec::new();
        commutator_runs.extend(std::iter::repeat_n([("a", 1), ("d", 1)], n).flatten());
        commutator_runs.extend(std::iter::repeat_n([("A", 1), ("D", 1)], n).flatten());
        let f_img = run_word(&target, &commutator_runs);
        images_ok &= trivial(&oracle, &hom.apply(&f_n)?, &f_img);

        reduced_ok &= f_n.free_reduce() == f_n;
        let counts = parikh(&f_n);
        count_ok &= counts.counts()[y_letter] as usize == 2 * n * n;
        exponent_sums.push(counts.counts()[y_letter] as i64 - counts.counts()[y_inverse] as i64);
        points.push((n as u64, (2 * n * n) as u64));
    }

    let checks = vec![
        Check::new(
            "images-telescope",
            images_ok,
            format!("checked u, v and combined images for indices 1..={max_index}"),
        ),
        Check::new(
            "family-freely-reduced",
            reduced_ok,
            "free reduction leaves every family word unchanged".to_string(),
        ),
        Check::new(
            "positive-y-count-quadratic",
            count_ok,
            format!(
                "family word n spends exactly 2 n^2 positive y letters; \
                 y exponent sums are {exponent_sums:?}"
            ),
        ),
    ];
    let certificate =
        GrowthCertificate::QuadraticLowerBound { coeff: Ratio::new(2, 1).expect("2 is a ratio") };
    let holds = check_certificate(&points, &certificate);
    let collinear = max_collinear(&points);
    Ok(ExperimentReport {
        experiment: "path-subgroup-quadratic".to_string(),
        group: oracle.name(),
        size: max_index,
        x_label: "n".to_string(),
        y_label: "y".to_string(),
        points,
        certificate: Some(certificate),
        certificate_holds: Some(holds),
        semilinear_fit_found: None,
        max_collinear: collinear,
        checks,
    })
}

/// Letters paired as `2i, 2i+1`, so `^ 1` flips a letter's sign.
fn reduce_concat(reduced: &[usize], tail: &[usize]) -> Vec<usize> {
    let mut out = reduced.to_vec();
    for &l in tail {
        if out.last() == Some(&(l ^ 1)) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn invert(word: &[usize]) -> Vec<usize> {
    word.iter().rev().map(|&l| l ^ 1).collect()
}

/// Splits `g w g'` into the peeled conjugator `g` and the cyclic core `w`.
fn cyclic_split(word: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut core = word.to_vec();
    let mut conjugator = Vec::new();
    while core.len() >= 2 && core[0] == core[core.len() - 1] ^ 1 {
        conjugator.push(core[0]);
        core.pop();
        core.remove(0);
    }
    (conjugator, core)
}

/// One conjugate `h C h'` or `h C' h'` of the basic commutator.
#[derive(Debug, Clone)]
struct ConjugateFactor {
    conjugator: Vec<usize>,
    positive: bool,
}

/// Bounded-radius search state for writing a word as a product of
/// conjugates of `C = a b a' b'`.
struct CommutatorSearch {
    commutator: Vec<usize>,
    rotations: Vec<(Vec<usize>, Vec<usize>, bool)>,
    layer1: Vec<(Vec<usize>, ConjugateFactor)>,
    layer2: Vec<(Vec<usize>, usize, usize)>,
    layer2_index: HashMap<Vec<usize>, (usize, usize)>,
}

impl CommutatorSearch {
    /// Precomputes every conjugate with conjugator radius at most
    /// `radius`, and all products of two of them.
    fn new(radius: usize) -> Self {
        let commutator = vec![0, 2, 1, 3];
        let inverse = invert(&commutator);
        let mut rotations = Vec::new();
        for (cyclic, positive) in [(&commutator, true), (&inverse, false)] {
            for k in 0..cyclic.len() {
                let mut rotated = cyclic[k..].to_vec();
                rotated.extend_from_slice(&cyclic[..k]);
                // rotated = prefix' C prefix, so the prefix rejoins the
                // peeled conjugator when recovering a factor.
                rotations.push((rotated, cyclic[..k].to_vec(), positive));
            }
        }

        let mut conjugators = vec![Vec::new()];
        let mut frontier = vec![Vec::<usize>::new()];
        for _ in 0..radius {
            let mut next = Vec::new();
            for h in &frontier {
                for l in 0..4 {
                    if h.last() == Some(&(l ^ 1)) {
                        continue;
                    }
                    let mut longer = h.clone();
                    longer.push(l);
                    next.push(longer);
                }
            }
            conjugators.extend(next.iter().cloned());
            frontier = next;
        }

        let mut layer1: Vec<(Vec<usize>, ConjugateFactor)> = Vec::new();
        let mut seen1 = HashMap::new();
        for h in &conjugators {
            for positive in [true, false] {
                let core = if positive { &commutator } else { &inverse };
                let word = reduce_concat(&reduce_concat(h, core), &invert(h));
                if seen1.contains_key(&word) {
                    continue;
                }
                seen1.insert(word.clone(), ());
                layer1.push((word, ConjugateFactor { conjugator: h.clone(), positive }));
            }
        }

        let mut layer2 = Vec::new();
        let mut layer2_index = HashMap::new();
        for (i, (left, _)) in layer1.iter().enumerate() {
            for (j, (right, _)) in layer1.iter().enumerate() {
                let word = reduce_concat(left, right);
                if layer2_index.contains_key(&word) {
                    continue;
                }
                layer2_index.insert(word.clone(), (i, j));
                layer2.push((word, i, j));
            }
        }
        Self { commutator, rotations, layer1, layer2, layer2_index }
    }

    /// Recognizes a conjugate of `C` or its inverse exactly, via cyclic
    /// reduction, and recovers the conjugator.
    fn as_factor(&self, word: &[usize]) -> Option<ConjugateFactor> {
        let (peeled, core) = cyclic_split(word);
        if core.len() != self.commutator.len() {
            return None;
        }
        for (rotated, prefix, positive) in &self.rotations {
            if core == *rotated {
                let conjugator = reduce_concat(&peeled, &invert(prefix));
                return Some(ConjugateFactor { conjugator, positive: *positive });
            }
        }
        None
    }

    /// Smallest k found such that `word` is a product of k conjugates of
    /// the basic commutator, together with the factors.
    ///
    /// The search is exact for k <= 1 and exhaustive over conjugator
    /// radius 4 beyond that, which covers every commutator shape the
    /// catalogue asks for; k > 4 is reported as exhaustion.
    fn decompose(&self, word: &[usize]) -> Result<Vec<ConjugateFactor>, ExperimentError> {
        if word.is_empty() {
            return Ok(Vec::new());
        }
        if let Some(factor) = self.as_factor(word) {
            return Ok(vec![factor]);
        }
        for (left, factor) in &self.layer1 {
            let rest = reduce_concat(&invert(left), word);
            if let Some(last) = self.as_factor(&rest) {
                return Ok(vec![factor.clone(), last]);
            }
        }
        for (pair, i, j) in &self.layer2 {
            let rest = reduce_concat(&invert(pair), word);
            if let Some(last) = self.as_factor(&rest) {
                return Ok(vec![
                    self.layer1[*i].1.clone(),
                    self.layer1[*j].1.clone(),
                    last,
                ]);
            }
        }
        for (pair, i, j) in &self.layer2 {
            let rest = reduce_concat(&invert(pair), word);
            if let Some(&(k, l)) = self.layer2_index.get(&rest) {
                return Ok(vec![
                    self.layer1[*i].1.clone(),
                    self.layer1[*j].1.clone(),
                    self.layer1[k].1.clone(),
                    self.layer1[l].1.clone(),
                ]);
            }
        }
        Err(ExperimentError::SearchExhausted(format!(
            "no product of at most 4 commutator conjugates matches a word of length {}",
            word.len()
        )))
    }
}

/// Minimal `t` usage in the fibre product of two free groups over
/// `F(a, b)`.
///
/// The fibre product is pulled back along `r -> ap`, `s -> bq`,
/// `t -> abAB`. A word undoing `(a^n b^m a'^n b'^m, 1)` costs one `t`
/// letter per conjugate of the basic commutator, so the minimal count
/// is `n * m`. For every exponent pair in the grid the search rebuilds
/// a cheapest witness, verifies it against the product oracle, and
/// plots `(n, n m)`; the resulting multiplication table then repeats
/// the bounded-fit refusal on its boxed shape.
pub fn fiber_product_distortion(
    n_max: usize,
    m_max: usize,
) -> Result<ExperimentReport, ExperimentError> {
    if n_max * m_max > 4 {
        return Err(ExperimentError::BoundOutOfRange(format!(
            "fiber-product-distortion searches products of at most 4 commutator conjugates, \
             so the grid bound n_max * m_max = {} is out of reach",
            n_max * m_max
        )));
    }
    let product = ProductOracle::new(
        Box::new(FreeOracle::with_letters(&["a", "b"])?),
        Box::new(FreeOracle::with_letters(&["p", "q"])?),
    )?;
    let product_alphabet = Arc::clone(product.alphabet());
    let source = SymmetricAlphabet::from_positive(&["r", "s", "t"])?;
    let hom = MonoidHom::from_positive_images(
        &source,
        &product_alphabet,
        &[("r", "ap"), ("s", "bq"), ("t", "abAB")],
    )?;
    let fibre = PullbackOracle::new(Box::new(product), hom)?;
    let checker = ProductOracle::new(
        Box::new(FreeOracle::with_letters(&["a", "b"])?),
        Box::new(FreeOracle::with_letters(&["p", "q"])?),
    )?;
    let t_letter = source.letter("t")?;
    let t_inverse = source.letter("T")?;

    let search = CommutatorSearch::new(4);
    let mut checks = Vec::new();
    let mut points = Vec::new();
    for n in 0..=n_max {
        for m in 0..=m_max {
            // the witness must spell the inverse of the first-factor
            // commutator a^n b^m a'^n b'^m
            let mut commutator: Vec<usize> = Vec::new();
            commutator.extend(std::iter::repeat_n(0, n));
            commutator.extend(std::iter::repeat_n(2, m));
            commutator.extend(std::iter::repeat_n(1, n));
            commutator.extend(std::iter::repeat_n(3, m));
            // degenerate exponents leave cancelling pairs, so reduce first
            let target = invert(&reduce_concat(&[], &commutator));
            let factors = search.decompose(&target)?;

            let mut witness_letters = Vec::new();
            for factor in &factors {
                witness_letters.extend_from_slice(&factor.conjugator);
                witness_letters.push(if factor.positive { t_letter } else { t_inverse });
                witness_letters.extend(invert(&factor.conjugator));
            }
            let witness = source.word_from_letters(witness_letters)?;
            let counts = parikh(&witness);
            let t_count = (counts.counts()[t_letter] + counts.counts()[t_inverse]) as usize;

            // witness followed by the spelled commutator must vanish in
            // the ambient product; the witness alone is trivial in the
            // fibre product only for degenerate exponents
            let image = fibre.hom().apply(&witness)?;
            let spelled =
                run_word(&product_alphabet, &[("a", n), ("b", m), ("A", n), ("B", m)]);
            let image_ok = checker.decide(&image.concat(&spelled).expect("same alphabet"));
            let degenerate_ok = fibre.decide(&witness) == (n * m == 0);

            checks.push(Check::new(
                &format!("t-count-{n}-{m}"),
                t_count == n * m && image_ok && degenerate_ok,
                format!(
                    "witness {:?} uses {} t letters, expected {}",
                    witness.to_text(),
                    t_count,
                    n * m
                ),
            ));
            points.push((n as u64, t_count as u64));
        }
    }
    points.sort_unstable();
    points.dedup();

    let certificate = GrowthCertificate::VerticalGap;
    let holds = check_certificate(&points, &certificate);
    let (points_in, points_out) = table_box_split();
    let fit_found = fit_semilinear(&points_in, &points_out, 2, 2, 3)?.is_some();
    checks.push(Check::new(
        "no-small-semilinear-fit",
        !fit_found,
        "the full multiplication-table shape inside [0,6] x [0,9] admits no semilinear set \
         with <=2 components, <=2 generators, coordinates <=3"
            .to_string(),
    ));

    let collinear = max_collinear(&points);
    Ok(ExperimentReport {
        experiment: "fiber-product-distortion".to_string(),
        group: fibre.name(),
        size: n_max.max(m_max),
        x_label: "n".to_string(),
        y_label: "t".to_string(),
        points,
        certificate: Some(certificate),
        certificate_holds: Some(holds),
        semilinear_fit_found: Some(fit_found),
        max_collinear: collinear,
        checks,
    })
}

/// Identity words of the `[[2,1],[1,1]]` torus bundle inside the slice
/// `t* x T* {x, y, x', y'}*`.
///
/// Conjugating the fibre generator `x` by `t^n` multiplies the fibre
/// vector by the n-th matrix power, so the cheapest identity per
/// t-power is `t^n x T^n X^i Y^j` with `(i, j)` the image of `(1, 0)`,
/// spending one fibre letter per unit of 1-norm. Counting `t` against
/// `X + Y` on those words reads off the matrix growth, certified here
/// against `y >= (3/2)^x`; small lengths are re-enumerated over the
/// unrestricted fibre suffix to confirm nothing cheaper decides
/// trivial.
pub fn torus_bundle_growth(max_len: usize) -> Result<ExperimentReport, ExperimentError> {
    if max_len < 2 {
        return Err(ExperimentError::BoundOutOfRange(format!(
            "torus-bundle-growth needs max_len >= 2 so the shortest identity fits, got {max_len}"
        )));
    }
    let oracle = TorusBundleOracle::new(2, 1, 1, 1)?;
    let alphabet = Arc::clone(oracle.alphabet());

    let mut words = Vec::new();
    let mut norms = Vec::new();
    let mut identity_ok = true;
    let mut n = 0usize;
    loop {
        let (v1, v2) = oracle.monodromy_power_of_e1(n as u64);
        let Some(norm) = v1.to_usize().zip(v2.to_usize()).map(|(a, b)| a + b) else {
            break;
        };
        if 2 * n + 1 + norm > max_len {
            break;
        }
        let i = v1.to_usize().expect("entry fits above");
        let j = v2.to_usize().expect("entry fits above");
        let w = run_word(&alphabet, &[("t", n), ("x", 1), ("T", n), ("X", i), ("Y", j)]);
        identity_ok &= oracle.decide(&w);
        words.push(w);
        norms.push(norm);
        n += 1;
    }
    let identity = Check::new(
        "conjugates-spell-matrix-powers",
        identity_ok,
        format!("verified {} canonical identity words against the oracle", words.len()),
    );
    // A has trace 3 and determinant 1, so A^2 = 3A - 1 and the norms obey
    // the same recurrence; this checks the powers independently.
    let recurrence_ok = norms
        .windows(3)
        .all(|w| w[2] + w[0] == 3 * w[1]);
    let recurrence = Check::new(
        "norms-satisfy-trace-recurrence",
        recurrence_ok,
        "matrix power norms follow f(n+2) = 3 f(n+1) - f(n)".to_string(),
    );

    let projection = Projection::parse("t,X+Y", &alphabet)?;
    let points = point_set(&words, &projection)?;
    let expected_points: Vec<(u64, u64)> =
        norms.iter().enumerate().map(|(k, &f)| (k as u64, f as u64)).collect();
    let agreement = Check::new(
        "projection-matches-matrix-powers",
        points == expected_points,
        format!("{} points match the matrix power norms", points.len()),
    );

    // Small lengths are cheap enough to enumerate outright; restricted
    // to ordered suffixes the slice contains nothing but the family.
    let small = max_len.min(13);
    let pattern = Regex::parse(&alphabet, "t*x(T)*(X)*(Y)*")?;
    let enumerated = oracle_slice_regex(&oracle, &pattern, small, SLICE_BUDGET)?;
    let formula_small: Vec<Word> =
        words.iter().filter(|w| w.len() <= small).cloned().collect();
    let exhaustive = Check::new(
        "small-slice-exhausted-by-family",
        sorted_texts(&enumerated) == sorted_texts(&formula_small),
        format!("lengths <= {small} contain exactly {} identity words", formula_small.len()),
    );

    // Arbitrary fibre suffixes may waste letters on cancelling pairs,
    // but the per-power minimum must still be the matrix norm.
    let full_bound = max_len.min(8);
    let full_pattern = Regex::parse(&alphabet, "t*x(T)*(x+y+X+Y)*")?;
    let full_words = oracle_slice_regex(&oracle, &full_pattern, full_bound, SLICE_BUDGET)?;
    let t_letter = alphabet.letter("t")?;
    let mut minima: HashMap<usize, usize> = HashMap::new();
    for w in &full_words {
        let t_power = parikh(w).counts()[t_letter] as usize;
        let fibre_len = w.len() - 2 * t_power - 1;
        let best = minima.entry(t_power).or_insert(usize::MAX);
        *best = (*best).min(fibre_len);
    }
    let mut minima_ok = true;
    let mut reachable = 0;
    for (k, &norm) in norms.iter().enumerate() {
        if 2 * k + 1 + norm <= full_bound {
            reachable += 1;
            minima_ok &= minima.get(&k) == Some(&norm);
        }
    }
    minima_ok &= minima.len() == reachable;
    let minimality = Check::new(
        "free-suffix-minima-match-norms",
        minima_ok,
        format!(
            "per-power fibre minima over unrestricted suffixes up to length {full_bound} \
             equal the matrix norms"
        ),
    );

    let certificate = GrowthCertificate::ExponentialLowerBound {
        base: Ratio::new(3, 2).expect("3/2 is a ratio"),
    };
    let holds = check_certificate(&points, &certificate);
    let collinear = max_collinear(&points);
    let convex = Check::new(
        "no-three-points-collinear",
        collinear <= 2,
        format!("largest collinear subset has {collinear} points"),
    );

    Ok(ExperimentReport {
        experiment: "torus-bundle-growth".to_string(),
        group: oracle.name(),
        size: max_len,
        x_label: projection.labels()[0].clone(),
        y_label: projection.labels()[1].clone(),
        points,
        certificate: Some(certificate),
        certificate_holds: Some(holds),
        semilinear_fit_found: None,
        max_collinear: collinear,
        checks: vec![identity, recurrence, agreement, exhaustive, minimality, convex],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bs12_growth_doubles() {
        let report = bs12_growth(45).unwrap();
        assert_eq!(report.points, vec![(0, 1), (1, 2), (2, 4), (3, 8), (4, 16), (5, 32)]);
        assert_eq!(report.max_collinear, 2);
        assert_eq!(report.certificate_holds, Some(true));
        assert!(report.passed(), "{:?}", report.checks);
    }

    #[test]
    fn bs12_growth_shrinks_with_length() {
        let report = bs12_growth(9).unwrap();
        assert_eq!(report.points, vec![(0, 1), (1, 2), (2, 4)]);
        assert!(report.passed());
    }

    #[test]
    fn heisenberg_gap_resists_small_fits() {
        let report = heisenberg_gap(30).unwrap();
        let mut expected = Vec::new();
        for m in 0u64..=15 {
            for n in 0u64.. {
                if 2 * m + 2 * n + m * n > 30 {
                    break;
                }
                expected.push((m, m * n));
            }
        }
        expected.sort_unstable();
        expected.dedup();
        assert_eq!(report.points, expected);
        assert_eq!(report.certificate_holds, Some(true));
        assert!(report.passed(), "{:?}", report.checks);
    }

    #[test]
    fn path_subgroup_counts_quadratically() {
        let report = path_subgroup_quadratic(5).unwrap();
        assert_eq!(report.points, vec![(1, 2), (2, 8), (3, 18), (4, 32), (5, 50)]);
        assert_eq!(report.max_collinear, 2);
        assert!(report.passed(), "{:?}", report.checks);
    }

    #[test]
    fn path_family_word_is_explicit() {
        let source = SymmetricAlphabet::from_positive(&["x", "y", "z"]).unwrap();
        let expected = source.parse_word("xyZYYxyyyZYYYYXyyyzYYXyz").unwrap();
        // rebuild n = 2 the same way the experiment does
        let runs: Vec<(&str, usize)> = vec![
            ("x", 1),
            ("y", 1),
            ("Z", 1),
            ("Y", 2),
            ("x", 1),
            ("y", 3),
            ("Z", 1),
            ("Y", 4),
            ("X", 1),
            ("y", 3),
            ("z", 1),
            ("Y", 2),
            ("X", 1),
            ("y", 1),
            ("z", 1),
        ];
        assert_eq!(run_word(&source, &runs), expected);
        assert_eq!(expected.free_reduce(), expected);
    }

    #[test]
    fn fiber_product_costs_match_commutator_shape() {
        let report = fiber_product_distortion(2, 2).unwrap();
        assert_eq!(
            report.points,
            vec![(0, 0), (1, 0), (1, 1), (1, 2), (2, 0), (2, 2), (2, 4)]
        );
        assert_eq!(report.checks.len(), 10);
        assert_eq!(report.semilinear_fit_found, Some(false));
        assert_eq!(report.certificate_holds, Some(true));
        assert!(report.passed(), "{:?}", report.checks);
    }

    #[test]
    fn fiber_product_handles_lopsided_grids() {
        let report = fiber_product_distortion(3, 1).unwrap();
        assert_eq!(
            report.points,
            vec![(0, 0), (1, 0), (1, 1), (2, 0), (2, 2), (3, 0), (3, 3)]
        );
        assert!(report.passed(), "{:?}", report.checks);
    }

    #[test]
    fn undersized_bounds_are_rejected() {
        assert!(matches!(bs12_growth(1), Err(ExperimentError::BoundOutOfRange(_))));
        assert!(matches!(heisenberg_gap(3), Err(ExperimentError::BoundOutOfRange(_))));
        assert!(matches!(path_subgroup_quadratic(0), Err(ExperimentError::BoundOutOfRange(_))));
        assert!(matches!(torus_bundle_growth(1), Err(ExperimentError::BoundOutOfRange(_))));
        assert!(matches!(
            fiber_product_distortion(3, 3),
            Err(ExperimentError::BoundOutOfRange(_))
        ));
    }

    #[test]
    fn commutator_search_is_exact_for_single_conjugates() {
        let search = CommutatorSearch::new(4);
        // h C h' for a conjugator outside the precomputed radius
        let h = vec![0, 2, 0, 2, 0, 2];
        let conjugate = reduce_concat(&reduce_concat(&h, &[0, 2, 1, 3]), &invert(&h));
        let factors = search.decompose(&conjugate).unwrap();
        assert_eq!(factors.len(), 1);
        assert_eq!(factors[0].conjugator, h);
        assert!(factors[0].positive);
    }

    #[test]
    fn torus_bundle_growth_tracks_matrix_powers() {
        let report = torus_bundle_growth(2601).unwrap();
        assert_eq!(
            report.points,
            vec![
                (0, 1),
                (1, 3),
                (2, 8),
                (3, 21),
                (4, 55),
                (5, 144),
                (6, 377),
                (7, 987),
                (8, 2584)
            ]
        );
        assert_eq!(report.max_collinear, 2);
        assert!(report.passed(), "{:?}", report.checks);
    }

    #[test]
    fn catalogue_dispatch_matches_direct_calls() {
        let direct = bs12_growth(45).unwrap();
        let dispatched = run_experiment("bs12-growth", None).unwrap();
        assert_eq!(direct, dispatched);
        assert!(run_experiment("no-such-study", None).is_err());
        for name in EXPERIMENT_NAMES {
            assert!(default_size(name).is_some());
        }
    }

    #[test]
    fn reports_serialize_deterministically() {
        let report = bs12_growth(9).unwrap();
        let first = serde_json::to_string(&report).unwrap();
        let second = serde_json::to_string(&bs12_growth(9).unwrap()).unwrap();
        assert_eq!(first, second);
        assert!(first.contains("\"certificate\""));
        let csv = report.points_csv();
        assert!(csv.starts_with("t,A\n"), "{csv}");
    }
}
