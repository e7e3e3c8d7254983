//! Small parsers shared by the description-string grammars.

/// Parses `(a, b, …)` into its components.
pub(crate) fn parse_tuple(s: &str) -> Option<Vec<f64>> {
    let inner = s.trim().strip_prefix('(')?.strip_suffix(')')?;
    inner
        .split(',')
        .map(|t| t.trim().parse::<f64>().ok())
        .collect()
}

/// Parses a comma-separated sequence of parenthesised tuples, such as
/// `(0, 1), (2, 3)`.
pub(crate) fn parse_tuples(s: &str) -> Option<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let close = rest.find(')')?;
        out.push(parse_tuple(&rest[..=close])?);
        rest = rest[close + 1..].trim_start();
        if let Some(r) = rest.strip_prefix(',') {
            rest = r.trim_start();
            if rest.is_empty() {
                return None;
            }
        } else if !rest.is_empty() {
            return None;
        }
    }
    Some(out)
}

/// Parses `[lo, hi]`.
pub(crate) fn parse_interval(s: &str) -> Option<(f64, f64)> {
    let inner = s.trim().strip_prefix('[')?.strip_suffix(']')?;
    let (a, b) = inner.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

pub(crate) fn format_tuple(c: &[f64]) -> String {
    let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuples() {
        assert_eq!(parse_tuple(" (1, -2.5) "), Some(vec![1.0, -2.5]));
        assert_eq!(parse_tuple("1,2"), None);
        assert_eq!(
            parse_tuples("(-5,-2.5),(5, 2.5)"),
            Some(vec![vec![-5.0, -2.5], vec![5.0, 2.5]])
        );
        assert_eq!(parse_tuples("(1,2),"), None);
        assert_eq!(parse_tuples("(1,2) (3,4)"), None);
        assert_eq!(parse_interval("[-inf, 2]"), Some((f64::NEG_INFINITY, 2.0)));
        assert_eq!(format_tuple(&[1.0, -0.5]), "(1,-0.5)");
    }
}
