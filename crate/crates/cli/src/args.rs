//! Parsers for the `--box` and `--target` flag syntaxes.

use plcert::oracle::GridBox;
use plcert::{RVector, Rational};

fn rational(s: &str) -> Result<Rational, String> {
    s.trim().parse::<Rational>().map_err(|e| format!("{s:?}: {e}"))
}

fn interval(s: &str) -> Result<(Rational, Rational), String> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| format!("expected an interval like [-2,2], got {s:?}"))?;
    let (lo, hi) = inner
        .split_once(',')
        .ok_or_else(|| format!("interval {s:?} needs two endpoints"))?;
    let (lo, hi) = (rational(lo)?, rational(hi)?);
    if lo > hi {
        return Err(format!("interval {s:?} is empty"));
    }
    Ok((lo, hi))
}

/// A box written `[lo,hi]`, applied to every coordinate, or as a product
/// `[a,b]x[c,d]x…` with one interval per coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxArg(pub Vec<(Rational, Rational)>);

impl BoxArg {
    pub fn parse(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(['x', '×']).collect();
        parts.iter().map(|p| interval(p)).collect::<Result<_, _>>().map(BoxArg)
    }

    pub fn for_dim(&self, n: usize) -> Result<GridBox, String> {
        match self.0.len() {
            1 => Ok(GridBox::cube(n, self.0[0].0.clone(), self.0[0].1.clone())),
            k if k == n => Ok(GridBox {
                ranges: self.0.clone(),
            }),
            k => Err(format!("box has {k} intervals but the map lives in dimension {n}")),
        }
    }
}

/// A point written as comma-separated rationals: `4`, `1/2,-3`.
pub fn parse_target(s: &str) -> Result<RVector, String> {
    s.split(',').map(rational).collect::<Result<Vec<_>, _>>().map(RVector::new)
}

pub fn parse_rational(s: &str) -> Result<Rational, String> {
    rational(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use plcert::q;

    #[test]
    fn boxes() {
        let b = BoxArg::parse("[-2,2]").unwrap();
        assert_eq!(b.for_dim(2).unwrap(), GridBox::cube(2, q(-2, 1), q(2, 1)));
        let b = BoxArg::parse("[0,1/2]x[-1,1]").unwrap();
        assert_eq!(b.0, vec![(q(0, 1), q(1, 2)), (q(-1, 1), q(1, 1))]);
        assert!(b.for_dim(3).is_err());
        assert!(BoxArg::parse("[2,1]").is_err());
        assert!(BoxArg::parse("-2,2").is_err());
        assert!(BoxArg::parse("[a,1]").is_err());
    }

    #[test]
    fn targets() {
        assert_eq!(parse_target("4").unwrap(), RVector::from_ints(&[4]));
        assert_eq!(parse_target("1/2, -3").unwrap(), RVector::new(vec![q(1, 2), q(-3, 1)]));
        assert!(parse_target("1/0").is_err());
    }
}
