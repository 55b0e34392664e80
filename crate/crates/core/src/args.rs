//! Parsers for the small comma-separated arguments the CLI accepts.

use thiserror::Error;

use crate::bench::QdCutoffs;

#[derive(Debug, Error, PartialEq)]
pub enum ArgError {
    #[error("expected a non-empty comma-separated list")]
    Empty,
    #[error("invalid number `{token}` at position {pos}")]
    InvalidNumber { pos: usize, token: String },
    #[error("expected exactly {expected} comma-separated values, found {found}")]
    WrongCount { expected: usize, found: usize },
    #[error("bin edges must be strictly increasing and at least 1")]
    BadEdges,
    #[error("cutoffs must satisfy 0 <= medium < high")]
    BadCutoffs,
}

/// Parses a transaction argument such as `0,1,3,4` into article indices.
/// Duplicates and bounds are validated against the matrix later.
pub fn parse_article_list(s: &str) -> Result<Vec<usize>, ArgError> {
    if s.is_empty() {
        return Err(ArgError::Empty);
    }
    s.split(',')
        .enumerate()
        .map(|(pos, token)| {
            token.parse::<usize>().map_err(|_| ArgError::InvalidNumber {
                pos: pos + 1,
                token: token.to_string(),
            })
        })
        .collect()
}

fn parse_fixed<const N: usize>(s: &str) -> Result<[u64; N], ArgError> {
    if s.is_empty() {
        return Err(ArgError::Empty);
    }
    let tokens: Vec<&str> = s.split(',').collect();
    if tokens.len() != N {
        return Err(ArgError::WrongCount {
            expected: N,
            found: tokens.len(),
        });
    }
    let mut out = [0u64; N];
    for (pos, token) in tokens.iter().enumerate() {
        out[pos] = token.parse().map_err(|_| ArgError::InvalidNumber {
            pos: pos + 1,
            token: token.to_string(),
        })?;
    }
    Ok(out)
}

/// Parses labeled-histogram bin edges such as `2,5,24`: the upper bounds of
/// the Very Short, Short, and Normal bins.
pub fn parse_bin_edges(s: &str) -> Result<[u64; 3], ArgError> {
    let edges = parse_fixed::<3>(s)?;
    if edges[0] < 1 || edges[0] >= edges[1] || edges[1] >= edges[2] {
        return Err(ArgError::BadEdges);
    }
    Ok(edges)
}

/// Parses query-dependency label cutoffs such as `0.2,0.6`.
pub fn parse_qd_cutoffs(s: &str) -> Result<QdCutoffs, ArgError> {
    if s.is_empty() {
        return Err(ArgError::Empty);
    }
    let tokens: Vec<&str> = s.split(',').collect();
    if tokens.len() != 2 {
        return Err(ArgError::WrongCount {
            expected: 2,
            found: tokens.len(),
        });
    }
    let mut values = [0.0f64; 2];
    for (pos, token) in tokens.iter().enumerate() {
        let v: f64 = token.parse().map_err(|_| ArgError::InvalidNumber {
            pos: pos + 1,
            token: token.to_string(),
        })?;
        if !v.is_finite() {
            return Err(ArgError::InvalidNumber {
                pos: pos + 1,
                token: token.to_string(),
            });
        }
        values[pos] = v;
    }
    if values[0] < 0.0 || values[0] >= values[1] {
        return Err(ArgError::BadCutoffs);
    }
    Ok(QdCutoffs {
        medium: values[0],
        high: values[1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn article_lists() {
        assert_eq!(parse_article_list("0,1,3,4").unwrap(), vec![0, 1, 3, 4]);
        assert_eq!(parse_article_list("7").unwrap(), vec![7]);
        assert_eq!(parse_article_list(""), Err(ArgError::Empty));
        assert!(matches!(
            parse_article_list("0,x,2"),
            Err(ArgError::InvalidNumber { pos: 2, .. })
        ));
        assert!(matches!(
            parse_article_list("0,,2"),
            Err(ArgError::InvalidNumber { pos: 2, .. })
        ));
        assert!(matches!(
            parse_article_list("-1"),
            Err(ArgError::InvalidNumber { .. })
        ));
    }

    #[test]
    fn bin_edges() {
        assert_eq!(parse_bin_edges("2,5,24").unwrap(), [2, 5, 24]);
        assert_eq!(parse_bin_edges("1,2,3").unwrap(), [1, 2, 3]);
        assert_eq!(
            parse_bin_edges("2,5"),
            Err(ArgError::WrongCount {
                expected: 3,
                found: 2
            })
        );
        assert_eq!(parse_bin_edges("5,5,24"), Err(ArgError::BadEdges));
        assert_eq!(parse_bin_edges("0,5,24"), Err(ArgError::BadEdges));
    }

    #[test]
    fn qd_cutoffs() {
        let c = parse_qd_cutoffs("0.2,0.6").unwrap();
        assert_eq!((c.medium, c.high), (0.2, 0.6));
        assert_eq!(parse_qd_cutoffs("0.6,0.2"), Err(ArgError::BadCutoffs));
        assert_eq!(parse_qd_cutoffs("-0.1,0.6"), Err(ArgError::BadCutoffs));
        assert!(matches!(
            parse_qd_cutoffs("nan,0.6"),
            Err(ArgError::InvalidNumber { .. })
        ));
        assert!(matches!(
            parse_qd_cutoffs("0.2"),
            Err(ArgError::WrongCount { .. })
        ));
    }
}
