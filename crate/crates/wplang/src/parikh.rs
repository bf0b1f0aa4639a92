//! Parikh vectors, semilinear sets with exact membership, bounded semilinear
//! fitting, and growth certificates over integer point sets.
//!
//! All arithmetic is exact: membership and fitting work over naturals,
//! certificate checks use unbounded integers, and collinearity uses integer
//! cross products rather than floating-point slopes.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::words::{SymmetricAlphabet, Word, WordError};
use std::sync::Arc;

/// Errors from projections, fitting and point I/O.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParikhError {
    /// Letter name in a projection selector is not in the alphabet.
    #[error(transparent)]
    Word(#[from] WordError),
    /// Points of differing dimension were mixed.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// A point was listed both as inside and outside.
    #[error("point {0:?} appears in both points_in and points_out")]
    OverlappingPoints(Vec<u64>),
    /// The requested fitting bounds generate too many candidates.
    #[error("fit search space too large: {0}")]
    SearchSpaceTooLarge(String),
    /// A certificate description could not be parsed.
    #[error("invalid certificate {0:?}: {1}")]
    InvalidCertificate(String, String),
    /// Certificate checks require two-dimensional points.
    #[error("certificate checks require 2-dimensional points, got dimension {0}")]
    NotPlanar(usize),
    /// Malformed CSV point data.
    #[error("invalid point data: {0}")]
    InvalidPoints(String),
}

/// Letter-count vector of a word, indexed by alphabet letter order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParikhVector {
    counts: Vec<u64>,
}

impl ParikhVector {
    /// Per-letter counts in alphabet index order.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }
}

/// Counts every letter occurrence of `w`.
pub fn parikh(w: &Word) -> ParikhVector {
    let mut counts = vec![0u64; w.alphabet().len()];
    for &l in w.letters() {
        counts[l] += 1;
    }
    ParikhVector { counts }
}

/// A coordinate selection: each output coordinate sums the counts of one
/// group of letters, so `t,A` reads off `(|w|_t, |w|_A)` and `x+X` counts
/// occurrences of `x` regardless of sign.
#[derive(Debug, Clone)]
pub struct Projection {
    groups: Vec<Vec<usize>>,
    labels: Vec<String>,
}

impl Projection {
    /// Parses a comma-separated selector list; letters joined by `+`
    /// within one selector are summed.
    pub fn parse(spec: &str, alphabet: &Arc<SymmetricAlphabet>) -> Result<Self, ParikhError> {
        let mut groups = Vec::new();
        let mut labels = Vec::new();
        for selector in spec.split(',') {
            let selector = selector.trim();
            if selector.is_empty() {
                return Err(ParikhError::InvalidPoints("empty projection selector".into()));
            }
            let mut group = Vec::new();
            for name in selector.split('+') {
                group.push(alphabet.letter(name.trim())?);
            }
            groups.push(group);
            labels.push(selector.split('+').map(str::trim).collect::<Vec<_>>().join("+"));
        }
        Ok(Self { groups, labels })
    }

    /// Column labels, one per output coordinate.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Output dimension.
    pub fn dim(&self) -> usize {
        self.groups.len()
    }

    /// Applies the projection to one Parikh vector.
    pub fn apply(&self, v: &ParikhVector) -> Vec<u64> {
        self.groups
            .iter()
            .map(|g| g.iter().map(|&l| v.counts[l]).sum())
            .collect()
    }
}

/// Projects a sequence of Parikh vectors, deduplicating while preserving
/// first-occurrence order.
pub fn project(vs: &[ParikhVector], p: &Projection) -> Vec<Vec<u64>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for v in vs {
        let row = p.apply(v);
        if seen.insert(row.clone()) {
            out.push(row);
        }
    }
    out
}

/// The set `base + N-span(generators)` inside `N^dim`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSet {
    pub base: Vec<u64>,
    pub generators: Vec<Vec<u64>>,
}

impl LinearSet {
    /// Exact membership by bounded search over generator multiplicities.
    ///
    /// Each multiplicity is capped by the target's remaining coordinates,
    /// so zero generators contribute nothing and the search stays finite.
    pub fn member(&self, v: &[u64]) -> bool {
        if v.len() != self.base.len() {
            return false;
        }
        let mut rem = Vec::with_capacity(v.len());
        for (a, b) in v.iter().zip(&self.base) {
            match a.checked_sub(*b) {
                Some(d) => rem.push(d),
                None => return false,
            }
        }
        fn solve(rem: &mut [u64], gens: &[Vec<u64>]) -> bool {
            match gens.split_first() {
                None => rem.iter().all(|&d| d == 0),
                Some((g, rest)) => {
                    let cap = rem
                        .iter()
                        .zip(g)
                        .filter(|(_, &gj)| gj > 0)
                        .map(|(&dj, &gj)| dj / gj)
                        .min();
                    match cap {
                        // All-zero generator: only multiplicity 0 matters.
                        None => solve(rem, rest),
                        Some(cap) => {
                            for c in 0..=cap {
                                let mut next: Vec<u64> = rem
                                    .iter()
                                    .zip(g)
                                    .map(|(&dj, &gj)| dj - c * gj)
                                    .collect();
                                if solve(&mut next, rest) {
                                    return true;
                                }
                            }
                            false
                        }
                    }
                }
            }
        }
        solve(&mut rem, &self.generators)
    }
}

/// A finite union of linear sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemilinearSet {
    pub dim: usize,
    pub components: Vec<LinearSet>,
}

impl SemilinearSet {
    /// Membership in the union.
    pub fn member(&self, v: &[u64]) -> bool {
        v.len() == self.dim && self.components.iter().any(|c| c.member(v))
    }
}

/// Upper bound on `(coord_bound + 1)^dim` candidate vectors.
const MAX_CANDIDATE_VECTORS: u64 = 4096;
/// Upper bound on (base, generator-set) candidates examined by the fitter.
const MAX_CANDIDATE_COMPONENTS: u64 = 2_000_000;

/// Searches exhaustively for a semilinear set that contains every point of
/// `points_in` and no point of `points_out`, using at most `max_components`
/// linear sets, each with at most `max_generators` generators, and all base
/// and generator coordinates bounded by `coord_bound`.
///
/// Candidates are scanned in lexicographic order and the first solution is
/// returned, so the result is deterministic. `None` means the search space
/// was exhausted without a fit, which certifies that no semilinear set
/// within the stated bounds separates the two point sets.
pub fn fit_semilinear(
    points_in: &[Vec<u64>],
    points_out: &[Vec<u64>],
    max_components: usize,
    max_generators: usize,
    coord_bound: u64,
) -> Result<Option<SemilinearSet>, ParikhError> {
    let dim = match points_in.first().or_else(|| points_out.first()) {
        Some(p) => p.len(),
        None => return Ok(Some(SemilinearSet { dim: 0, components: Vec::new() })),
    };
    for p in points_in.iter().chain(points_out) {
        if p.len() != dim {
            return Err(ParikhError::DimensionMismatch { expected: dim, got: p.len() });
        }
    }
    let out_set: HashSet<&Vec<u64>> = points_out.iter().collect();
    if let Some(p) = points_in.iter().find(|p| out_set.contains(p)) {
        return Err(ParikhError::OverlappingPoints(p.clone()));
    }
    if points_in.is_empty() {
        return Ok(Some(SemilinearSet { dim, components: Vec::new() }));
    }

    let vector_count = (coord_bound + 1)
        .checked_pow(dim as u32)
        .filter(|&n| n <= MAX_CANDIDATE_VECTORS)
        .ok_or_else(|| {
            ParikhError::SearchSpaceTooLarge(format!(
                "(coord_bound+1)^dim = {}^{} exceeds {}",
                coord_bound + 1,
                dim,
                MAX_CANDIDATE_VECTORS
            ))
        })?;
    let mut gen_sets: u64 = 1;
    let mut acc: u64 = 1;
    for k in 0..max_generators as u64 {
        acc = acc
            .saturating_mul(vector_count.saturating_sub(1 + k))
            .checked_div(k + 1)
            .unwrap_or(0);
        gen_sets = gen_sets.saturating_add(acc);
    }
    let candidate_count = vector_count.saturating_mul(gen_sets);
    if candidate_count > MAX_CANDIDATE_COMPONENTS {
        return Err(ParikhError::SearchSpaceTooLarge(format!(
            "{candidate_count} candidate components exceed {MAX_CANDIDATE_COMPONENTS}"
        )));
    }

    // All candidate vectors in lexicographic order.
    let mut vectors: Vec<Vec<u64>> = Vec::with_capacity(vector_count as usize);
    let mut cur = vec![0u64; dim];
    'enumerate: loop {
        vectors.push(cur.clone());
        let mut i = dim;
        while i > 0 {
            i -= 1;
            if cur[i] < coord_bound {
                cur[i] += 1;
                cur[i + 1..].iter_mut().for_each(|c| *c = 0);
                continue 'enumerate;
            }
        }
        break;
    }
    let nonzero: Vec<usize> = (0..vectors.len())
        .filter(|&i| vectors[i].iter().any(|&c| c > 0))
        .collect();

    // Enumerate clean candidate components (no out-point, at least one
    // in-point) together with their in-point coverage masks.
    let blocks = points_in.len().div_ceil(64);
    let full_mask = {
        let mut m = vec![u64::MAX; blocks];
        let extra = blocks * 64 - points_in.len();
        if extra > 0 {
            m[blocks - 1] >>= extra;
        }
        m
    };
    let mut candidates: Vec<(Vec<u64>, LinearSet)> = Vec::new();
    let mut gen_choice: Vec<usize> = Vec::new();
    // recursion state is passed explicitly to keep the search allocation-free
    #[allow(clippy::too_many_arguments)]
    fn visit(
        vectors: &[Vec<u64>],
        nonzero: &[usize],
        start: usize,
        left: usize,
        base: &Vec<u64>,
        gen_choice: &mut Vec<usize>,
        points_in: &[Vec<u64>],
        points_out: &[Vec<u64>],
        blocks: usize,
        candidates: &mut Vec<(Vec<u64>, LinearSet)>,
    ) {
        let cand = LinearSet {
            base: base.clone(),
            generators: gen_choice.iter().map(|&i| vectors[i].clone()).collect(),
        };
        if points_out.iter().all(|p| !cand.member(p)) {
            let mut mask = vec![0u64; blocks];
            let mut any = false;
            for (i, p) in points_in.iter().enumerate() {
                if cand.member(p) {
                    mask[i / 64] |= 1 << (i % 64);
                    any = true;
                }
            }
            if any {
                candidates.push((mask, cand));
            }
        }
        if left == 0 {
            return;
        }
        for (k, &gi) in nonzero.iter().enumerate().skip(start) {
            gen_choice.push(gi);
            visit(
                vectors, nonzero, k + 1, left - 1, base, gen_choice, points_in, points_out,
                blocks, candidates,
            );
            gen_choice.pop();
        }
    }
    for base in &vectors {
        visit(
            &vectors, &nonzero, 0, max_generators, base, &mut gen_choice, points_in,
            points_out, blocks, &mut candidates,
        );
    }

    // Greedy-free exact cover search over candidate unions, smallest
    // component count first, candidates in discovery (lexicographic) order.
    const MAX_COVER_STEPS: u64 = 50_000_000;
    fn cover(
        candidates: &[(Vec<u64>, LinearSet)],
        start: usize,
        left: usize,
        acc: &[u64],
        full: &[u64],
        chosen: &mut Vec<usize>,
        steps: &mut u64,
    ) -> Result<bool, ParikhError> {
        if acc == full {
            return Ok(true);
        }
        if left == 0 {
            return Ok(false);
        }
        for i in start..candidates.len() {
            *steps += 1;
            if *steps > MAX_COVER_STEPS {
                return Err(ParikhError::SearchSpaceTooLarge(format!(
                    "cover search exceeded {MAX_COVER_STEPS} steps"
                )));
            }
            let (mask, _) = &candidates[i];
            if mask.iter().zip(acc).all(|(m, a)| m & !a == 0) {
                continue;
            }
            let next: Vec<u64> = acc.iter().zip(mask).map(|(a, m)| a | m).collect();
            chosen.push(i);
            if cover(candidates, i + 1, left - 1, &next, full, chosen, steps)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }
    let mut steps = 0u64;
    for k in 1..=max_components {
        let mut chosen = Vec::new();
        let zero = vec![0u64; blocks];
        if cover(&candidates, 0, k, &zero, &full_mask, &mut chosen, &mut steps)? {
            let components = chosen.iter().map(|&i| candidates[i].1.clone()).collect();
            return Ok(Some(SemilinearSet { dim, components }));
        }
    }
    Ok(None)
}

/// An exact positive rational, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Ratio {
    /// Builds `num/den` in lowest terms; `den` must be nonzero.
    pub fn new(num: u64, den: u64) -> Option<Self> {
        if den == 0 {
            return None;
        }
        let g = gcd(num, den).max(1);
        Some(Self { num: num / g, den: den / g })
    }

    /// True when the ratio exceeds one.
    pub fn exceeds_one(&self) -> bool {
        self.num > self.den
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Ratio {
    type Err = String;

    /// Accepts integers (`2`), fractions (`3/2`) and finite decimals (`1.5`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let parse_u64 = |t: &str| t.parse::<u64>().map_err(|e| e.to_string());
        if let Some((n, d)) = s.split_once('/') {
            return Ratio::new(parse_u64(n)?, parse_u64(d)?).ok_or_else(|| "zero denominator".into());
        }
        if let Some((whole, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
                return Err(format!("malformed decimal {s:?}"));
            }
            let scale = 10u64
                .checked_pow(frac.len() as u32)
                .ok_or("decimal too long")?;
            let whole: u64 = if whole.is_empty() { 0 } else { parse_u64(whole)? };
            let frac: u64 = parse_u64(frac)?;
            let num = whole
                .checked_mul(scale)
                .and_then(|w| w.checked_add(frac))
                .ok_or("decimal too large")?;
            return Ratio::new(num, scale).ok_or_else(|| "zero denominator".into());
        }
        Ratio::new(parse_u64(s)?, 1).ok_or_else(|| "zero denominator".into())
    }
}

/// A claimed growth shape for a planar point set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthCertificate {
    /// Any two points sharing first coordinate `m` have second coordinates
    /// at least `m` apart.
    VerticalGap,
    /// Every point `(x, y)` satisfies `y >= base^x`; the base exceeds one.
    ExponentialLowerBound { base: Ratio },
    /// Every point `(x, y)` satisfies `y >= coeff * x^2`.
    QuadraticLowerBound { coeff: Ratio },
}

impl fmt::Display for GrowthCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthCertificate::VerticalGap => write!(f, "vertical-gap"),
            GrowthCertificate::ExponentialLowerBound { base } => write!(f, "exp:{base}"),
            GrowthCertificate::QuadraticLowerBound { coeff } => write!(f, "quad:{coeff}"),
        }
    }
}

impl FromStr for GrowthCertificate {
    type Err = ParikhError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let invalid = |msg: &str| ParikhError::InvalidCertificate(s.to_string(), msg.to_string());
        let s = s.trim();
        if s == "vertical-gap" {
            return Ok(GrowthCertificate::VerticalGap);
        }
        if let Some(rest) = s.strip_prefix("exp:") {
            let base: Ratio = rest.parse().map_err(|e: String| invalid(&e))?;
            if !base.exceeds_one() {
                return Err(invalid("exponential base must exceed 1"));
            }
            return Ok(GrowthCertificate::ExponentialLowerBound { base });
        }
        if let Some(rest) = s.strip_prefix("quad:") {
            let coeff: Ratio = rest.parse().map_err(|e: String| invalid(&e))?;
            return Ok(GrowthCertificate::QuadraticLowerBound { coeff });
        }
        Err(invalid("expected vertical-gap, exp:BASE or quad:COEFF"))
    }
}

/// True when `y * den^x >= num^x`, computed with early exit so enormous
/// exponents terminate quickly. Requires `num > den`.
fn exp_bound_holds(x: u64, y: u64, base: Ratio) -> bool {
    debug_assert!(base.num > base.den);
    // (1 + 1/den)^den >= 2, so x >= 128*den forces base^x > 2^128 > y.
    // This keeps the incremental loop below provably short.
    if x as u128 >= 128u128 * base.den as u128 {
        return false;
    }
    let num = BigUint::from(base.num);
    let den = BigUint::from(base.den);
    let y = BigUint::from(y);
    let mut acc_num = BigUint::one();
    let mut acc_den = BigUint::one();
    for _ in 0..x {
        acc_num *= &num;
        acc_den *= &den;
        // base > 1, so once base^i alone exceeds y the bound already fails.
        if acc_num > &y * &acc_den {
            return false;
        }
    }
    y * acc_den >= acc_num
}

/// Checks a growth certificate against two-dimensional points.
///
/// Returns `false` when some pair or point violates the claimed bound;
/// failure is an answer, not an error.
pub fn check_certificate(points: &[(u64, u64)], c: &GrowthCertificate) -> bool {
    match c {
        GrowthCertificate::VerticalGap => {
            for (i, &(x1, y1)) in points.iter().enumerate() {
                for &(x2, y2) in &points[i + 1..] {
                    if x1 == x2 && y1.abs_diff(y2) < x1 {
                        return false;
                    }
                }
            }
            true
        }
        GrowthCertificate::ExponentialLowerBound { base } => {
            points.iter().all(|&(x, y)| exp_bound_holds(x, y, *base))
        }
        GrowthCertificate::QuadraticLowerBound { coeff } => points.iter().all(|&(x, y)| {
            let lhs = y as u128 * coeff.den as u128;
            match (x as u128)
                .checked_mul(x as u128)
                .and_then(|x2| x2.checked_mul(coeff.num as u128))
            {
                Some(rhs) => lhs >= rhs,
                // x^2 * num overflowed 128 bits, so it certainly exceeds y * den.
                None => false,
            }
        }),
    }
}

/// Maximum number of distinct points lying on one affine line, decided with
/// integer cross products. Fewer than three points are trivially collinear.
pub fn max_collinear(points: &[(u64, u64)]) -> usize {
    let mut distinct: Vec<(u64, u64)> = Vec::new();
    let mut seen = HashSet::new();
    for &p in points {
        if seen.insert(p) {
            distinct.push(p);
        }
    }
    let n = distinct.len();
    if n <= 2 {
        return n;
    }
    let mut best = 2;
    for i in 0..n {
        for j in i + 1..n {
            let (x1, y1) = distinct[i];
            let (x2, y2) = distinct[j];
            let dx = x2 as i128 - x1 as i128;
            let dy = y2 as i128 - y1 as i128;
            let mut count = 2;
            for &(x3, y3) in &distinct[j + 1..] {
                let ex = x3 as i128 - x1 as i128;
                let ey = y3 as i128 - y1 as i128;
                if dx * ey - dy * ex == 0 {
                    count += 1;
                }
            }
            best = best.max(count);
        }
    }
    best
}

/// Narrows rows to coordinate pairs, for certificate checks.
pub fn as_pairs(rows: &[Vec<u64>]) -> Result<Vec<(u64, u64)>, ParikhError> {
    rows.iter()
        .map(|r| match r[..] {
            [x, y] => Ok((x, y)),
            _ => Err(ParikhError::NotPlanar(r.len())),
        })
        .collect()
}

/// Renders labelled integer points as CSV with a header row.
pub fn points_to_csv(labels: &[String], rows: &[Vec<u64>]) -> String {
    let mut out = String::new();
    out.push_str(&labels.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(u64::to_string).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Parses CSV integer points; a non-numeric first row is taken as a header.
pub fn points_from_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<u64>>), ParikhError> {
    let mut labels: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Result<Vec<u64>, _> = cells.iter().map(|c| c.parse::<u64>()).collect();
        match parsed {
            Ok(row) => {
                if let Some(first) = rows.first() {
                    if first.len() != row.len() {
                        return Err(ParikhError::InvalidPoints(format!(
                            "row {} has {} cells, expected {}",
                            lineno + 1,
                            row.len(),
                            first.len()
                        )));
                    }
                }
                rows.push(row);
            }
            Err(_) if rows.is_empty() && labels.is_empty() => {
                labels = cells.iter().map(|c| c.to_string()).collect();
            }
            Err(e) => {
                return Err(ParikhError::InvalidPoints(format!("row {}: {}", lineno + 1, e)));
            }
        }
    }
    if labels.is_empty() {
        let width = rows.first().map_or(0, Vec::len);
        labels = (0..width).map(|i| format!("c{i}")).collect();
    }
    Ok((labels, rows))
}
