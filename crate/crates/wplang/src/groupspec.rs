//! A small textual language naming the supported groups, so oracles can be
//! requested from the command line or a config file.
//!
//! Grammar:
//!
//! ```text
//! spec := free:RANK | free:LETTERS | zn:RANK | zn:LETTERS
//!       | heisenberg | bs12
//!       | torusbundle:A,B,C,D
//!       | raag:GRAPH-FILE
//!       | product(SPEC,SPEC)
//!       | pullback(SPEC,HOM-FILE)
//! ```
//!
//! `RANK` is a nonnegative integer with default letter names; `LETTERS` is
//! a run of distinct lowercase letters naming the generators directly.
//! Graph files use `{"vertices": [...], "edges": [[u, v], ...]}`;
//! homomorphism files use `{"source": [...], "images": {letter: word}}`
//! with images spelled over the inner group's alphabet.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use crate::graphs::{GraphError, SimpleGraph};
use crate::oracles::{
    AbelianOracle, Bs12Oracle, FreeOracle, GroupOracle, HeisenbergOracle, OracleError,
    ProductOracle, PullbackOracle, RaagOracle, TorusBundleOracle,
};
use crate::words::{MonoidHom, SymmetricAlphabet, WordError};

/// Errors from parsing a group description.
#[derive(Debug, Error)]
pub enum GroupSpecError {
    #[error("cannot parse group spec {spec:?}: {message}")]
    Syntax { spec: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("malformed homomorphism file {path}: {message}")]
    MalformedHom { path: PathBuf, message: String },
}

fn syntax(spec: &str, message: impl Into<String>) -> GroupSpecError {
    GroupSpecError::Syntax { spec: spec.to_string(), message: message.into() }
}

/// Splits `text` at top-level commas, ignoring commas inside parentheses.
fn split_top_level(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

/// A run of distinct lowercase letters naming generators directly.
fn letter_run(spec: &str, arg: &str) -> Result<Vec<String>, GroupSpecError> {
    if arg.is_empty() || !arg.chars().all(|c| c.is_ascii_lowercase()) {
        return Err(syntax(spec, "expected a rank or a run of lowercase letters"));
    }
    let letters: Vec<String> = arg.chars().map(|c| c.to_string()).collect();
    for (i, l) in letters.iter().enumerate() {
        if letters[..i].contains(l) {
            return Err(syntax(spec, format!("letter {l:?} repeats")));
        }
    }
    Ok(letters)
}

fn read_file(base: &Path, rel: &str) -> Result<String, GroupSpecError> {
    let path = base.join(rel.trim());
    std::fs::read_to_string(&path).map_err(|source| GroupSpecError::Io { path, source })
}

#[derive(Deserialize)]
struct HomJson {
    source: Vec<String>,
    images: BTreeMap<String, String>,
}

/// Parses a homomorphism description against a fixed target alphabet.
pub fn hom_from_json_str(
    text: &str,
    target: &Arc<SymmetricAlphabet>,
    origin: &Path,
) -> Result<MonoidHom, GroupSpecError> {
    let doc: HomJson = serde_json::from_str(text).map_err(|e| {
        GroupSpecError::MalformedHom { path: origin.to_path_buf(), message: e.to_string() }
    })?;
    let names: Vec<&str> = doc.source.iter().map(String::as_str).collect();
    let source = SymmetricAlphabet::from_positive(&names)?;
    let pairs: Vec<(&str, &str)> =
        doc.images.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
    Ok(MonoidHom::from_positive_images(&source, target, &pairs)?)
}

/// Builds the oracle named by `spec`; file references resolve relative to
/// `base`.
pub fn parse_group_spec(
    spec: &str,
    base: &Path,
) -> Result<Box<dyn GroupOracle>, GroupSpecError> {
    let s = spec.trim();
    for combinator in ["product", "pullback"] {
        let Some(rest) = s.strip_prefix(combinator) else { continue };
        let rest = rest.trim_start();
        let Some(inner) = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')) else {
            return Err(syntax(spec, format!("{combinator} needs parenthesized arguments")));
        };
        let args = split_top_level(inner);
        if args.len() != 2 {
            return Err(syntax(spec, format!("{combinator} takes exactly two arguments")));
        }
        return match combinator {
            "product" => {
                let left = parse_group_spec(args[0], base)?;
                let right = parse_group_spec(args[1], base)?;
                Ok(Box::new(ProductOracle::new(left, right)?))
            }
            _ => {
                let inner_oracle = parse_group_spec(args[0], base)?;
                let path = base.join(args[1].trim());
                let text = read_file(base, args[1])?;
                let hom = hom_from_json_str(&text, inner_oracle.alphabet(), &path)?;
                Ok(Box::new(PullbackOracle::new(inner_oracle, hom)?))
            }
        };
    }
    if let Some((head, tail)) = s.split_once(':') {
        return match head.trim() {
            "free" => {
                if let Ok(rank) = tail.trim().parse::<usize>() {
                    return Ok(Box::new(FreeOracle::of_rank(rank)?));
                }
                let letters = letter_run(spec, tail.trim())?;
                let refs: Vec<&str> = letters.iter().map(String::as_str).collect();
                Ok(Box::new(FreeOracle::with_letters(&refs)?))
            }
            "zn" => {
                if let Ok(rank) = tail.trim().parse::<usize>() {
                    return Ok(Box::new(AbelianOracle::of_rank(rank)?));
                }
                let letters = letter_run(spec, tail.trim())?;
                let refs: Vec<&str> = letters.iter().map(String::as_str).collect();
                Ok(Box::new(AbelianOracle::with_letters(&refs)?))
            }
            "torusbundle" => {
                let nums: Vec<i64> = split_top_level(tail)
                    .iter()
                    .map(|p| p.trim().parse::<i64>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| syntax(spec, format!("bad matrix entry: {e}")))?;
                let [a, b, c, d] = nums[..] else {
                    return Err(syntax(spec, "torusbundle takes four integers a,b,c,d"));
                };
                Ok(Box::new(TorusBundleOracle::new(a, b, c, d)?))
            }
            "raag" => {
                let text = read_file(base, tail)?;
                let graph = SimpleGraph::from_json_str(&text)?;
                Ok(Box::new(RaagOracle::new(&graph)?))
            }
            other => Err(syntax(spec, format!("unknown group family {other:?}"))),
        };
    }
    match s {
        "heisenberg" => Ok(Box::new(HeisenbergOracle::new())),
        "bs12" => Ok(Box::new(Bs12Oracle::new())),
        "" => Err(syntax(spec, "empty group spec")),
        other => Err(syntax(spec, format!("unknown group {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decide(oracle: &dyn GroupOracle, text: &str) -> bool {
        oracle.decide(&oracle.alphabet().parse_word(text).unwrap())
    }

    #[test]
    fn plain_families_parse() {
        let base = Path::new(".");
        let free = parse_group_spec("free:2", base).unwrap();
        assert_eq!(free.name(), "free[a,b]");
        assert!(decide(free.as_ref(), "abBA"));
        assert!(!decide(free.as_ref(), "abAB"));

        let z2 = parse_group_spec("zn:2", base).unwrap();
        assert!(decide(z2.as_ref(), "abAB"));

        assert!(decide(parse_group_spec("heisenberg", base).unwrap().as_ref(),
            "a_g a_h a_g' a_h' a_z"));
        assert!(decide(parse_group_spec("bs12", base).unwrap().as_ref(), "taTAA"));
        assert!(decide(
            parse_group_spec("torusbundle:2,1,1,1", base).unwrap().as_ref(),
            "txTYXX"
        ));
    }

    #[test]
    fn letter_runs_name_generators_directly() {
        let base = Path::new(".");
        let f = parse_group_spec("free:xy", base).unwrap();
        assert_eq!(f.name(), "free[x,y]");
        assert!(decide(f.as_ref(), "xyYX"));
        let z = parse_group_spec("zn:pq", base).unwrap();
        assert_eq!(z.name(), "abelian[p,q]");
    }

    #[test]
    fn product_of_free_groups() {
        let p = parse_group_spec("product(free:ab,free:pq)", Path::new(".")).unwrap();
        assert_eq!(p.name(), "product(free[a,b], free[p,q])");
        assert!(decide(p.as_ref(), "apAP"));
        assert!(!decide(p.as_ref(), "ab"));
    }

    #[test]
    fn raag_from_graph_file() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("path.json"),
            r#"{"vertices": ["a","b","c","d"],
                "edges": [["a","b"],["b","c"],["c","d"]]}"#,
        )
        .unwrap();
        let o = parse_group_spec("raag:path.json", dir.path()).unwrap();
        assert!(decide(o.as_ref(), "abAB"));
        assert!(!decide(o.as_ref(), "acAC"));
    }

    #[test]
    fn pullback_through_a_hom_file() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("diag.json"),
            r#"{"source": ["r","s","t"],
                "images": {"r": "ap", "s": "bq", "t": "abAB"}}"#,
        )
        .unwrap();
        let o = parse_group_spec(
            "pullback(product(free:ab,free:pq),diag.json)",
            dir.path(),
        )
        .unwrap();
        assert!(decide(o.as_ref(), "rR"));
        assert!(!decide(o.as_ref(), "t"));
        assert!(!decide(o.as_ref(), "rs"));
    }

    #[test]
    fn bad_specs_are_rejected_with_reasons() {
        let base = Path::new(".");
        for bad in [
            "", "nonsense", "free", "free:", "free:aba", "free:aB",
            "zn:x1", "torusbundle:1,1,1", "torusbundle:1,1,1,1", "product(free:1)",
            "product(free:a,free:a)", "pullback(bs12)", "raag:/definitely/missing.json",
        ] {
            assert!(parse_group_spec(bad, base).is_err(), "{bad}");
        }
    }

    #[test]
    fn top_level_split_respects_parentheses() {
        assert_eq!(split_top_level("a,b"), vec!["a", "b"]);
        assert_eq!(split_top_level("f(a,b),c"), vec!["f(a,b)", "c"]);
        assert_eq!(
            split_top_level("product(free:1,free:1),zn:2"),
            vec!["product(free:1,free:1)", "zn:2"]
        );
    }
}
