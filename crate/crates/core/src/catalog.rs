//! Built-in codes and the `perm(name, cycles)` combinator.

use thiserror::Error;

use crate::pauli::{PauliError, StabilizerCode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown code {0:?} (known: steane7, perfect5, shor9)")]
    UnknownCode(String),
    #[error("malformed code expression {0:?}")]
    Malformed(String),
    #[error(transparent)]
    Code(#[from] PauliError),
}

pub const NAMES: [&str; 3] = ["steane7", "perfect5", "shor9"];

fn build(lines: &[&str]) -> StabilizerCode {
    StabilizerCode::parse_text(&lines.join("\n")).expect("catalog code is valid")
}

/// The `[[7,1,3]]` Steane code in CSS form, X checks first.
pub fn steane7() -> StabilizerCode {
    build(&[
        "XXXXIII", "XXIIXXI", "XIXIXIX", "ZZZZIII", "ZZIIZZI", "ZIZIZIZ",
    ])
}

/// The perfect `[[5,1,3]]` code, cyclic shifts of `XZZXI`.
pub fn perfect5() -> StabilizerCode {
    build(&["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"])
}

/// Shor's `[[9,1,3]]` code.
pub fn shor9() -> StabilizerCode {
    build(&[
        "ZZIIIIIII",
        "IZZIIIIII",
        "IIIZZIIII",
        "IIIIZZIII",
        "IIIIIIZZI",
        "IIIIIIIZZ",
        "XXXXXXIII",
        "IIIXXXXXX",
    ])
}

pub fn by_name(name: &str) -> Option<StabilizerCode> {
    match name.trim() {
        "steane7" => Some(steane7()),
        "perfect5" => Some(perfect5()),
        "shor9" => Some(shor9()),
        _ => None,
    }
}

/// Parses cycle notation with 1-based qubit labels into a 0-based map
/// `q -> perm[q]`. Inside a cycle, labels are separated by spaces or commas;
/// a cycle without separators such as `(34)` is read one digit per label.
pub fn parse_cycles(text: &str, n: usize) -> Result<Vec<usize>, CatalogError> {
    let bad = || CatalogError::Malformed(text.to_string());
    let mut perm: Vec<usize> = (0..n).collect();
    let mut seen = vec![false; n];
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body_start = rest.strip_prefix('(').ok_or_else(bad)?;
        let close = body_start.find(')').ok_or_else(bad)?;
        let body = body_start[..close].trim();
        rest = body_start[close + 1..].trim_start();
        let labels: Vec<usize> = if body.contains([' ', ',']) {
            body.split([' ', ','])
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?
        } else {
            body.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                .collect::<Result<_, _>>()?
        };
        for &l in &labels {
            if l == 0 || l > n || std::mem::replace(&mut seen[l - 1], true) {
                return Err(bad());
            }
        }
        for (i, &l) in labels.iter().enumerate() {
            perm[l - 1] = labels[(i + 1) % labels.len()] - 1;
        }
    }
    Ok(perm)
}

/// Resolves a catalog name or a `perm(name, cycles)` expression.
pub fn resolve(expr: &str) -> Result<StabilizerCode, CatalogError> {
    let expr = expr.trim();
    if let Some(inner) = expr.strip_prefix("perm(").and_then(|s| s.strip_suffix(')')) {
        let comma = inner
            .find(',')
            .ok_or_else(|| CatalogError::Malformed(expr.to_string()))?;
        let base = resolve(&inner[..comma])?;
        let perm = parse_cycles(&inner[comma + 1..], base.n())?;
        return Ok(base.permuted(&perm)?);
    }
    by_name(expr).ok_or_else(|| CatalogError::UnknownCode(expr.to_string()))
}
