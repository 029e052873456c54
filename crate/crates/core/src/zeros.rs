//! Zero-ordinate lists and the windowed object sets built from them.
//!
//! A zero list holds the imaginary parts `t_k` of the nontrivial zeros
//! `1/2 + i t_k`, strictly increasing. Object sets are the rows handed to the
//! metrics: windows of `m` consecutive ordinates, either disjoint blocks
//! ([`Approach::Disjoint`]) or stride-one sliding windows
//! ([`Approach::Sliding`]).
//!
//! Values are stored as `f64`; decimal input carrying more than ~15
//! significant digits is rounded on parse.

use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// Strictly increasing, strictly positive zero ordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroList {
    values: Vec<f64>,
    source_path: String,
}

impl ZeroList {
    /// Validates ordering and positivity; `source_path` is informational.
    pub fn new(values: Vec<f64>, source_path: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (k, &v) in values.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parse {
                    line: k + 1,
                    token: v.to_string(),
                });
            }
            if k > 0 && v <= values[k - 1] {
                return Err(Error::Monotonicity {
                    line: k + 1,
                    previous: values[k - 1],
                    value: v,
                });
            }
        }
        Ok(ZeroList {
            values,
            source_path: source_path.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn source_path(&self) -> &str {
        &self.source_path
    }

    /// The first `count` ordinates (or all of them, if fewer exist).
    pub fn truncated(&self, count: usize) -> ZeroList {
        ZeroList {
            values: self.values[..count.min(self.values.len())].to_vec(),
            source_path: self.source_path.clone(),
        }
    }

    /// One shortest round-trip decimal per line; [`parse_zeros`] reads it back exactly.
    pub fn serialize(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 20);
        for v in &self.values {
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }
}

/// Reads one decimal per non-empty line. Lines starting with `#` are comments;
/// LF and CRLF endings are both accepted. Line numbers in errors are 1-based
/// physical lines of the input.
pub fn parse_zeros<R: BufRead>(reader: R, source_path: &str) -> Result<ZeroList> {
    let mut values: Vec<f64> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            token: format!("<unreadable: {e}>"),
        })?;
        let token = line.trim();
        if token.is_empty() || token.starts_with('#') {
            continue;
        }
        let value = f64::from_str(token)
            .ok()
            .filter(|v| v.is_finite() && *v > 0.0)
            .ok_or_else(|| Error::Parse {
                line: lineno,
                token: token.to_string(),
            })?;
        if let Some(&previous) = values.last() {
            if value <= previous {
                return Err(Error::Monotonicity {
                    line: lineno,
                    previous,
                    value,
                });
            }
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(ZeroList {
        values,
        source_path: source_path.to_string(),
    })
}

/// How consecutive windows are laid over the zero list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Approach {
    /// A1: disjoint blocks, row `i + 1` starts `m` positions after row `i`.
    Disjoint,
    /// A2: sliding windows, row `i + 1` starts one position after row `i`.
    Sliding,
}

impl Approach {
    pub fn name(self) -> &'static str {
        match self {
            Approach::Disjoint => "a1",
            Approach::Sliding => "a2",
        }
    }

    fn stride(self, m: usize) -> usize {
        match self {
            Approach::Disjoint => m,
            Approach::Sliding => 1,
        }
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Approach {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a1" | "disjoint" => Ok(Approach::Disjoint),
            "a2" | "sliding" => Ok(Approach::Sliding),
            other => Err(Error::precondition(format!("unknown approach {other:?}"))),
        }
    }
}

/// `N x m` matrix of windows over a zero list.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectSet {
    vectors: Array2<f64>,
    approach: Approach,
    starts: Vec<usize>,
    source_path: String,
}

impl ObjectSet {
    pub fn vectors(&self) -> ArrayView2<'_, f64> {
        self.vectors.view()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.vectors.row(i)
    }

    /// Number of objects `N`.
    pub fn len(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.nrows() == 0
    }

    /// Window length `m`.
    pub fn m(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn approach(&self) -> Approach {
        self.approach
    }

    /// 0-based position in the origin list where each row begins.
    pub fn starts(&self) -> &[usize] {
        &self.starts
    }

    pub fn source_path(&self) -> &str {
        &self.source_path
    }
}

/// Windows the list under `approach`, capping the row count at `limit`.
pub fn window(
    zeros: &ZeroList,
    m: usize,
    approach: Approach,
    limit: Option<usize>,
) -> Result<ObjectSet> {
    let len = zeros.len();
    if m == 0 || len < m {
        return Err(Error::InvalidWindow { m, available: len });
    }
    let stride = approach.stride(m);
    let available = (len - m) / stride + 1;
    let n = limit.map_or(available, |cap| cap.min(available));
    let starts: Vec<usize> = (0..n).map(|i| i * stride).collect();
    let values = zeros.values();
    let vectors = Array2::from_shape_fn((n, m), |(i, k)| values[starts[i] + k]);
    Ok(ObjectSet {
        vectors,
        approach,
        starts,
        source_path: zeros.source_path().to_string(),
    })
}

/// Approach A1: rows `[x((i-1)m+1), ..., x(im)]`; a trailing partial window is dropped.
pub fn window_disjoint(zeros: &ZeroList, m: usize, limit: Option<usize>) -> Result<ObjectSet> {
    window(zeros, m, Approach::Disjoint, limit)
}

/// Approach A2: rows `[x(i), ..., x(i+m-1)]`.
pub fn window_sliding(zeros: &ZeroList, m: usize, limit: Option<usize>) -> Result<ObjectSet> {
    window(zeros, m, Approach::Sliding, limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(text: &str) -> Result<ZeroList> {
        parse_zeros(text.as_bytes(), "<test>")
    }

    fn ramp(n: usize) -> ZeroList {
        ZeroList::new((1..=n).map(|k| k as f64 * 1.5).collect(), "ramp").unwrap()
    }

    #[test]
    fn parses_values_in_file_order() {
        let z = parse("14.134725142\n21.022039639\n").unwrap();
        assert_eq!(z.values(), &[14.134725142, 21.022039639]);
    }

    #[test]
    fn skips_comments_and_blank_lines() {
        let z = parse("# header\n\n5.0\n").unwrap();
        assert_eq!(z.values(), &[5.0]);
    }

    #[test]
    fn accepts_crlf() {
        let z = parse("# c\r\n1.5\r\n2.5\r\n").unwrap();
        assert_eq!(z.values(), &[1.5, 2.5]);
    }

    #[test]
    fn rejects_decreasing_pair_with_line() {
        match parse("3.0\n2.0\n") {
            Err(Error::Monotonicity { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_repeated_value() {
        assert!(matches!(
            parse("1.0\n\n1.0\n"),
            Err(Error::Monotonicity { line: 3, .. })
        ));
    }

    #[test]
    fn rejects_garbage_and_nonpositive() {
        assert!(matches!(
            parse("1.0\nabc\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(parse("-1.0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("inf\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn empty_input() {
        assert_eq!(parse(""), Err(Error::EmptyInput));
        assert_eq!(parse("# only\n\n"), Err(Error::EmptyInput));
    }

    #[test]
    fn disjoint_two_rows_from_twenty() {
        let z = ramp(20);
        let set = window_disjoint(&z, 10, None).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.row(1).to_vec(), z.values()[10..20].to_vec());
        assert_eq!(set.approach(), Approach::Disjoint);
    }

    #[test]
    fn disjoint_thousand_rows_from_ten_thousand() {
        let set = window_disjoint(&ramp(10_000), 10, None).unwrap();
        assert_eq!(set.len(), 1000);
    }

    #[test]
    fn disjoint_drops_partial_tail() {
        let set = window_disjoint(&ramp(25), 10, None).unwrap();
        assert_eq!(set.len(), 2);
    }

    #[test]
    fn too_few_zeros() {
        assert_eq!(
            window_disjoint(&ramp(9), 10, None),
            Err(Error::InvalidWindow {
                m: 10,
                available: 9
            })
        );
        assert!(window_sliding(&ramp(9), 10, None).is_err());
        assert!(window_sliding(&ramp(9), 0, None).is_err());
    }

    #[test]
    fn sliding_counts() {
        assert_eq!(window_sliding(&ramp(20), 10, None).unwrap().len(), 11);
        let whole = window_sliding(&ramp(10), 10, None).unwrap();
        assert_eq!(whole.len(), 1);
        assert_eq!(whole.row(0).to_vec(), ramp(10).values().to_vec());
    }

    #[test]
    fn sliding_limit_starts_enumerated() {
        let z = ramp(10_000);
        let set = window_sliding(&z, 10, Some(1000)).unwrap();
        assert_eq!(set.len(), 1000);
        // Brute-force enumeration of the expected 1-based window starts.
        let mut expected = Vec::new();
        let mut s = 1;
        while expected.len() < 1000 && s + 10 - 1 <= z.len() {
            expected.push(s - 1);
            s += 1;
        }
        assert_eq!(set.starts(), expected.as_slice());
        for (i, &start) in set.starts().iter().enumerate() {
            assert_eq!(set.row(i).to_vec(), z.values()[start..start + 10].to_vec());
        }
    }

    proptest! {
        #[test]
        fn disjoint_rows_concatenate_to_prefix(
            gaps in prop::collection::vec(0.01f64..5.0, 1..200),
            m in 1usize..12,
        ) {
            let mut acc = 0.0;
            let values: Vec<f64> = gaps.iter().map(|g| { acc += g; acc }).collect();
            let z = ZeroList::new(values, "p").unwrap();
            prop_assume!(z.len() >= m);
            let set = window_disjoint(&z, m, None).unwrap();
            let flat: Vec<f64> = set.vectors().iter().copied().collect();
            prop_assert_eq!(flat.as_slice(), &z.values()[..set.len() * m]);
            for row in set.vectors().rows() {
                prop_assert!(row.windows(2).into_iter().all(|w| w[0] < w[1]));
            }
        }

        #[test]
        fn sliding_neighbours_share_shifted_values(
            gaps in prop::collection::vec(0.01f64..5.0, 2..150),
            m in 1usize..10,
        ) {
            let mut acc = 0.0;
            let values: Vec<f64> = gaps.iter().map(|g| { acc += g; acc }).collect();
            let z = ZeroList::new(values, "p").unwrap();
            prop_assume!(z.len() >= m);
            let set = window_sliding(&z, m, None).unwrap();
            prop_assert_eq!(set.len(), z.len() - m + 1);
            for i in 0..set.len().saturating_sub(1) {
                let a = set.row(i);
                let b = set.row(i + 1);
                for k in 1..m {
                    prop_assert_eq!(a[k], b[k - 1]);
                }
            }
        }

        #[test]
        fn serialize_round_trips(
            gaps in prop::collection::vec(1e-9f64..1e3, 1..100),
        ) {
            let mut acc = 0.0;
            let values: Vec<f64> = gaps.iter().map(|g| { acc += g; acc }).collect();
            prop_assume!(values.windows(2).all(|w| w[0] < w[1]));
            let z = ZeroList::new(values, "p").unwrap();
            let back = parse_zeros(z.serialize().as_bytes(), "p").unwrap();
            prop_assert_eq!(back.values(), z.values());
        }
    }
}
