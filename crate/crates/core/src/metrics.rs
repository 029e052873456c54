//! The six dissimilarities, dense distance matrices, and an axiom checker.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest object count accepted by [`distance_matrix`].
pub const MAX_OBJECTS: usize = 12_000;

/// Per-comparison tolerance of [`check_axioms`], relative to `max(1, |value|)`.
pub const AXIOM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Arccosine,
    Jaccard,
    Chebyshev,
    Euclidean,
    Canberra,
    Lorentzian,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Arccosine,
        Metric::Jaccard,
        Metric::Chebyshev,
        Metric::Euclidean,
        Metric::Canberra,
        Metric::Lorentzian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Arccosine => "arccosine",
            Metric::Jaccard => "jaccard",
            Metric::Chebyshev => "chebyshev",
            Metric::Euclidean => "euclidean",
            Metric::Canberra => "canberra",
            Metric::Lorentzian => "lorentzian",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == lower)
            .ok_or_else(|| Error::precondition(format!("unknown metric {s:?}")))
    }
}

/// Which formula a [`Metric`] evaluates.
///
/// `AsPrinted` only changes two kinds. Jaccard returns the raw Tanimoto
/// coefficient `T = sum ab / (sum a^2 + sum b^2 - sum ab)` instead of `1 - T`,
/// so `d(x, x) = 1`. Chebyshev returns `max_k (|a_k| - b_k)`, which is
/// asymmetric and can be negative. Every other kind ignores the variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Variant {
    #[default]
    Standard,
    AsPrinted,
}

/// A metric together with its formula variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Measure {
    pub metric: Metric,
    pub variant: Variant,
}

impl Measure {
    pub fn standard(metric: Metric) -> Self {
        Measure {
            metric,
            variant: Variant::Standard,
        }
    }

    pub fn as_printed(metric: Metric) -> Self {
        Measure {
            metric,
            variant: Variant::AsPrinted,
        }
    }

    /// Whether results may be negative or asymmetric.
    pub fn is_printed_form(self) -> bool {
        self.variant == Variant::AsPrinted
            && matches!(self.metric, Metric::Jaccard | Metric::Chebyshev)
    }
}

impl From<Metric> for Measure {
    fn from(metric: Metric) -> Self {
        Measure::standard(metric)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_printed_form() {
            write!(f, "{}-printed", self.metric)
        } else {
            write!(f, "{}", self.metric)
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dissimilarity between two equal-length vectors.
pub fn distance(measure: impl Into<Measure>, a: &[f64], b: &[f64]) -> Result<f64> {
    let measure = measure.into();
    if a.len() != b.len() {
        return Err(Error::Dimension {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::precondition("vectors must have at least one coordinate"));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite coordinate".into()));
    }
    let printed = measure.variant == Variant::AsPrinted;
    let d = match measure.metric {
        Metric::Arccosine => {
            let aa = dot(a, a);
            let bb = dot(b, b);
            if aa == 0.0 || bb == 0.0 {
                return Err(Error::DegenerateInput(
                    "arccosine distance of a zero vector".into(),
                ));
            }
            let cos = dot(a, b) / (aa * bb).sqrt();
            cos.clamp(-1.0, 1.0).acos()
        }
        Metric::Jaccard => {
            let ab = dot(a, b);
            let denom = dot(a, a) + dot(b, b) - ab;
            if denom == 0.0 {
                return Err(Error::DegenerateInput(
                    "jaccard distance between two zero vectors".into(),
                ));
            }
            let tanimoto = ab / denom;
            if printed {
                tanimoto
            } else {
                1.0 - tanimoto
            }
        }
        Metric::Chebyshev => {
            if printed {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| x.abs() - y)
                    .fold(f64::NEG_INFINITY, f64::max)
            } else {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max)
            }
        }
        Metric::Euclidean => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt(),
        Metric::Canberra => a
            .iter()
            .zip(b)
            .map(|(x, y)| {
                let denom = x.abs() + y.abs();
                if denom == 0.0 {
                    0.0
                } else {
                    (x - y).abs() / denom
                }
            })
            .sum(),
        Metric::Lorentzian => a.iter().zip(b).map(|(x, y)| (x - y).abs().ln_1p()).sum(),
    };
    Ok(d)
}

fn view_distance(measure: Measure, a: ArrayView1<f64>, b: ArrayView1<f64>) -> Result<f64> {
    match (a.as_slice(), b.as_slice()) {
        (Some(x), Some(y)) => distance(measure, x, y),
        _ => distance(measure, &a.to_vec(), &b.to_vec()),
    }
}

/// Dense symmetric `N x N` dissimilarity matrix with an exactly zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    entries: Array2<f64>,
    measure: Option<Measure>,
}

impl DistanceMatrix {
    /// Wraps a caller-supplied matrix after checking symmetry, the zero
    /// diagonal, finiteness and non-negativity. Negative entries are only
    /// tolerated when `measure` is a printed-form variant.
    pub fn from_entries(entries: Array2<f64>, measure: Option<Measure>) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n {
            return Err(Error::Dimension {
                left: n,
                right: entries.ncols(),
            });
        }
        let allow_negative = measure.is_some_and(Measure::is_printed_form);
        for i in 0..n {
            if entries[[i, i]] != 0.0 {
                return Err(Error::DegenerateInput(format!(
                    "diagonal entry {i} is {}",
                    entries[[i, i]]
                )));
            }
            for j in (i + 1)..n {
                let d = entries[[i, j]];
                if !d.is_finite() || (d < 0.0 && !allow_negative) {
                    return Err(Error::DegenerateInput(format!("entry ({i}, {j}) is {d}")));
                }
                if d != entries[[j, i]] {
                    return Err(Error::DegenerateInput(format!(
                        "asymmetric entries at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(DistanceMatrix { entries, measure })
    }

    pub fn entries(&self) -> ArrayView2<'_, f64> {
        self.entries.view()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[[i, j]]
    }

    pub fn n_objects(&self) -> usize {
        self.entries.nrows()
    }

    pub fn measure(&self) -> Option<Measure> {
        self.measure
    }

    /// Writes `i,j,d` rows for the strict upper triangle, 1-based.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "i,j,d")?;
        let n = self.n_objects();
        for i in 0..n {
            for j in (i + 1)..n {
                writeln!(w, "{},{},{}", i + 1, j + 1, self.entries[[i, j]])?;
            }
        }
        Ok(())
    }
}

/// Pairwise dissimilarities between the rows of `objects`.
///
/// Each unordered pair is evaluated once, as `d(row_i, row_j)` with `i < j`,
/// and mirrored. Rows are distributed over the rayon pool; since no entry
/// depends on another, the result is identical to a sequential pass.
pub fn distance_matrix(objects: ArrayView2<f64>, measure: impl Into<Measure>) -> Result<DistanceMatrix> {
    let measure = measure.into();
    let n = objects.nrows();
    if n < 2 {
        return Err(Error::precondition(format!("need at least 2 objects, got {n}")));
    }
    if n > MAX_OBJECTS {
        return Err(Error::TooLarge {
            n,
            bytes: n * n * std::mem::size_of::<f64>(),
            limit: MAX_OBJECTS,
        });
    }
    let upper: Vec<Result<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..n)
                .map(|j| {
                    view_distance(measure, objects.row(i), objects.row(j))
                        .map_err(|e| e.at_pair(i, j))
                })
                .collect()
        })
        .collect();
    let mut entries = Array2::<f64>::zeros((n, n));
    for (i, row) in upper.into_iter().enumerate() {
        for (offset, d) in row?.into_iter().enumerate() {
            let j = i + 1 + offset;
            if !d.is_finite() || (d < 0.0 && !measure.is_printed_form()) {
                return Err(Error::DegenerateInput(format!("distance {d}")).at_pair(i, j));
            }
            entries[[i, j]] = d;
            entries[[j, i]] = d;
        }
    }
    Ok(DistanceMatrix {
        entries,
        measure: Some(measure),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Identity,
    Symmetry,
    Triangle,
}

/// A failed axiom check. Identity repeats its index; symmetry repeats `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Counterexample {
    pub axiom: Axiom,
    pub indices: (usize, usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub identity_pass: f64,
    pub symmetry_pass: f64,
    pub triangle_pass: f64,
    pub counterexamples: Vec<Counterexample>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

fn within(x: f64, scale: f64) -> bool {
    x <= AXIOM_TOLERANCE * scale.abs().max(1.0)
}

fn distinct(rng: &mut ChaCha8Rng, n: usize, count: usize) -> [usize; 3] {
    let mut picked = [usize::MAX; 3];
    let mut filled = 0;
    while filled < count {
        let c = rng.random_range(0..n);
        if !picked[..filled].contains(&c) {
            picked[filled] = c;
            filled += 1;
        }
    }
    picked
}

/// Samples `samples` objects, pairs and triples from the rows of `objects` and
/// tests identity, symmetry and the triangle inequality
/// `d(a, b) <= d(a, c) + d(b, c)`.
///
/// Deterministic for a given seed. An evaluation error counts as a failure.
pub fn check_axioms(
    measure: impl Into<Measure>,
    objects: ArrayView2<f64>,
    samples: usize,
    seed: u64,
) -> Result<AxiomReport> {
    let measure = measure.into();
    let n = objects.nrows();
    if samples == 0 {
        return Err(Error::precondition("samples must be at least 1"));
    }
    if n < 3 {
        return Err(Error::precondition(format!("need at least 3 objects, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = |i: usize, j: usize| view_distance(measure, objects.row(i), objects.row(j));
    let mut counterexamples = Vec::new();
    let (mut identity_ok, mut symmetry_ok, mut triangle_ok) = (0usize, 0usize, 0usize);

    for _ in 0..samples {
        let i = rng.random_range(0..n);
        match d(i, i) {
            Ok(v) if within(v.abs(), 0.0) => identity_ok += 1,
            _ => counterexamples.push(Counterexample {
                axiom: Axiom::Identity,
                indices: (i, i, i),
            }),
        }
    }
    for _ in 0..samples {
        let [i, j, _] = distinct(&mut rng, n, 2);
        match (d(i, j), d(j, i)) {
            (Ok(a), Ok(b)) if within((a - b).abs(), a.abs().max(b.abs())) => symmetry_ok += 1,
            _ => counterexamples.push(Counterexample {
                axiom: Axiom::Symmetry,
                indices: (i, j, j),
            }),
        }
    }
    for _ in 0..samples {
        let [i, j, k] = distinct(&mut rng, n, 3);
        match (d(i, j), d(i, k), d(j, k)) {
            (Ok(ab), Ok(ac), Ok(bc)) if within(ab - (ac + bc), ac + bc) => triangle_ok += 1,
            _ => counterexamples.push(Counterexample {
                axiom: Axiom::Triangle,
                indices: (i, j, k),
            }),
        }
    }
    let frac = |ok: usize| ok as f64 / samples as f64;
    Ok(AxiomReport {
        identity_pass: frac(identity_ok),
        symmetry_pass: frac(symmetry_ok),
        triangle_pass: frac(triangle_ok),
        counterexamples,
    })
}
