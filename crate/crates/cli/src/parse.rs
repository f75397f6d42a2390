//! Value parsers for ranges and lists given on the command line.

use std::str::FromStr;

/// Comma-separated integers and inclusive ranges, e.g. `4..6` or `4,6,8..9`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UsizeList(pub Vec<usize>);

impl FromStr for UsizeList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim) {
            if let Some((a, b)) = part.split_once("..") {
                let lo: usize = a.trim().parse().map_err(|e| format!("bad range start {a:?}: {e}"))?;
                let hi: usize = b
                    .trim_start_matches('=')
                    .trim()
                    .parse()
                    .map_err(|e| format!("bad range end {b:?}: {e}"))?;
                if lo > hi {
                    return Err(format!("empty range {part}"));
                }
                out.extend(lo..=hi);
            } else {
                out.push(part.parse().map_err(|e| format!("bad integer {part:?}: {e}"))?);
            }
        }
        if out.is_empty() {
            return Err("empty list".into());
        }
        Ok(UsizeList(out))
    }
}

/// Closed real interval `a..b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for Interval {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
        let lo: f64 = a.trim().parse().map_err(|e| format!("bad interval start {a:?}: {e}"))?;
        let hi: f64 = b
            .trim_start_matches('=')
            .trim()
            .parse()
            .map_err(|e| format!("bad interval end {b:?}: {e}"))?;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(format!("invalid interval {s}"));
        }
        Ok(Interval { lo, hi })
    }
}

impl Interval {
    /// `steps` evenly spaced points including both ends.
    pub fn grid(&self, steps: usize) -> Vec<f64> {
        if steps <= 1 {
            return vec![self.lo];
        }
        (0..steps)
            .map(|k| self.lo + (self.hi - self.lo) * k as f64 / (steps - 1) as f64)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!("4..6".parse::<UsizeList>().unwrap().0, vec![4, 5, 6]);
        assert_eq!("4,6,8..=9".parse::<UsizeList>().unwrap().0, vec![4, 6, 8, 9]);
        assert_eq!("3".parse::<UsizeList>().unwrap().0, vec![3]);
        assert!("6..4".parse::<UsizeList>().is_err());
        assert!("x".parse::<UsizeList>().is_err());
    }

    #[test]
    fn intervals() {
        let i: Interval = "0..1".parse().unwrap();
        assert_eq!(i.grid(3), vec![0.0, 0.5, 1.0]);
        assert!("1..0".parse::<Interval>().is_err());
        assert!("0.5".parse::<Interval>().is_err());
    }
}
