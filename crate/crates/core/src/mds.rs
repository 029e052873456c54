//! Classical (Torgerson) multidimensional scaling and its diagnostics.
//!
//! `B = -1/2 J (D o D) J` is decomposed in full. Coordinates come from the
//! leading strictly positive eigenpairs only, `x_p = sqrt(lambda_p) v_p`;
//! negative eigenvalues are kept in [`Embedding::eigenvalues`] because they
//! measure how far the dissimilarities are from Euclidean.

use std::io::{self, Write};

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2};

use crate::eigen::eigendecompose_symmetric;
use crate::error::{Error, Result};
use crate::metrics::{DistanceMatrix, Measure};

/// Eigenvalues at or below `POSITIVE_EIGEN_RTOL * max |lambda|` count as zero.
pub const POSITIVE_EIGEN_RTOL: f64 = 1e-10;

/// Double-centered squared dissimilarities.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: Array2<f64>,
}

impl GramMatrix {
    pub fn entries(&self) -> ArrayView2<'_, f64> {
        self.entries.view()
    }

    pub fn trace(&self) -> f64 {
        self.entries.diag().sum()
    }
}

/// `B = -1/2 J (D o D) J` with `J = I - 11^T / N`, evaluated through row and
/// grand means of `D o D`. Only the upper triangle is computed, so `B` is
/// exactly symmetric.
pub fn double_center(d: &DistanceMatrix) -> GramMatrix {
    let n = d.n_objects();
    let sq = d.entries().mapv(|x| x * x);
    let row_means: Vec<f64> = sq.rows().into_iter().map(|r| r.sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let mut entries = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let b = -0.5 * (sq[[i, j]] - row_means[i] - row_means[j] + grand);
            entries[[i, j]] = b;
            entries[[j, i]] = b;
        }
    }
    GramMatrix { entries }
}

/// Low-dimensional coordinates plus the full spectrum of the Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    coordinates: Array2<f64>,
    eigenvalues: Array1<f64>,
    source: Option<Measure>,
}

impl Embedding {
    /// Assembles an embedding from coordinates that were produced elsewhere
    /// (for instance read back from CSV). `eigenvalues` may be longer than the
    /// coordinate column count.
    pub fn from_parts(
        coordinates: Array2<f64>,
        eigenvalues: Array1<f64>,
        source: Option<Measure>,
    ) -> Result<Self> {
        if eigenvalues.len() < coordinates.ncols() {
            return Err(Error::Dimension {
                left: coordinates.ncols(),
                right: eigenvalues.len(),
            });
        }
        Ok(Embedding {
            coordinates,
            eigenvalues,
            source,
        })
    }

    /// Uses squared column norms as the eigenvalues.
    pub fn from_coordinates(coordinates: Array2<f64>) -> Self {
        let eigenvalues = coordinates
            .columns()
            .into_iter()
            .map(|c| c.dot(&c))
            .collect();
        Embedding {
            coordinates,
            eigenvalues,
            source: None,
        }
    }

    pub fn coordinates(&self) -> ArrayView2<'_, f64> {
        self.coordinates.view()
    }

    pub fn component(&self, p: usize) -> ArrayView1<'_, f64> {
        self.coordinates.column(p)
    }

    /// Embedding dimension `n`.
    pub fn dims(&self) -> usize {
        self.coordinates.ncols()
    }

    pub fn n_objects(&self) -> usize {
        self.coordinates.nrows()
    }

    /// Full spectrum of `B`, descending.
    pub fn eigenvalues(&self) -> ArrayView1<'_, f64> {
        self.eigenvalues.view()
    }

    pub fn source(&self) -> Option<Measure> {
        self.source
    }

    pub fn positive_count(&self) -> usize {
        count_positive(self.eigenvalues.view())
    }

    /// Count and sum of the eigenvalues below `-POSITIVE_EIGEN_RTOL * max |lambda|`.
    pub fn negative_spectrum(&self) -> (usize, f64) {
        let tol = eigen_tolerance(self.eigenvalues.view());
        self.eigenvalues
            .iter()
            .filter(|&&x| x < -tol)
            .fold((0, 0.0), |(c, s), &x| (c + 1, s + x))
    }

    /// The first `n` coordinate columns.
    pub fn truncated(&self, n: usize) -> Result<Embedding> {
        if n == 0 || n > self.dims() {
            return Err(Error::DimensionUnavailable {
                requested: n,
                available: self.dims(),
            });
        }
        Ok(Embedding {
            coordinates: self.coordinates.slice(s![.., ..n]).to_owned(),
            eigenvalues: self.eigenvalues.clone(),
            source: self.source,
        })
    }

    /// `i,c1,...,cn` with 1-based `i`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "i")?;
        for p in 1..=self.dims() {
            write!(w, ",c{p}")?;
        }
        writeln!(w)?;
        for (i, row) in self.coordinates.rows().into_iter().enumerate() {
            write!(w, "{}", i + 1)?;
            for x in row {
                write!(w, ",{x}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// `p,lambda` for the whole spectrum.
    pub fn write_eigenvalues_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "p,lambda")?;
        for (p, l) in self.eigenvalues.iter().enumerate() {
            writeln!(w, "{},{}", p + 1, l)?;
        }
        Ok(())
    }
}

fn eigen_tolerance(values: ArrayView1<f64>) -> f64 {
    let scale = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    POSITIVE_EIGEN_RTOL * scale
}

fn count_positive(values: ArrayView1<f64>) -> usize {
    let tol = eigen_tolerance(values);
    values.iter().filter(|&&x| x > tol).count()
}

/// Classical MDS into `n` dimensions.
///
/// Each eigenvector is oriented so that its entry of largest magnitude (the
/// first one, on ties) is positive, which makes the output reproducible.
pub fn embed(d: &DistanceMatrix, n: usize) -> Result<Embedding> {
    embed_with(d, n, false)
}

/// Like [`embed`], but keeps only as many dimensions as there are strictly
/// positive eigenvalues when fewer than `n` exist.
pub fn embed_at_most(d: &DistanceMatrix, n: usize) -> Result<Embedding> {
    embed_with(d, n, true)
}

fn embed_with(d: &DistanceMatrix, n: usize, clip: bool) -> Result<Embedding> {
    if n == 0 {
        return Err(Error::precondition("embedding dimension must be at least 1"));
    }
    let gram = double_center(d);
    let eig = eigendecompose_symmetric(gram.entries())?;
    let available = count_positive(eig.values.view());
    let n = if clip { n.min(available) } else { n };
    if n > available || n == 0 {
        return Err(Error::DimensionUnavailable {
            requested: n.max(1),
            available,
        });
    }
    let rows = d.n_objects();
    let mut coordinates = Array2::<f64>::zeros((rows, n));
    for p in 0..n {
        let v = eig.vectors.column(p);
        let mut lead = 0;
        for (k, x) in v.iter().enumerate() {
            if x.abs() > v[lead].abs() {
                lead = k;
            }
        }
        let sign = if v[lead] < 0.0 { -1.0 } else { 1.0 };
        let scale = sign * eig.values[p].sqrt();
        for (i, x) in v.iter().enumerate() {
            coordinates[[i, p]] = scale * x;
        }
    }
    Ok(Embedding {
        coordinates,
        eigenvalues: eig.values,
        source: d.measure(),
    })
}

fn check_compatible(d: &DistanceMatrix, e: &Embedding) -> Result<()> {
    if d.n_objects() != e.n_objects() {
        return Err(Error::Dimension {
            left: d.n_objects(),
            right: e.n_objects(),
        });
    }
    Ok(())
}

fn embedded_distance(coords: ArrayView2<f64>, i: usize, j: usize) -> f64 {
    coords
        .row(i)
        .iter()
        .zip(coords.row(j))
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Kruskal stress-1, `sqrt(sum (d - d~)^2 / sum d^2)` over unordered pairs.
pub fn kruskal_stress(d: &DistanceMatrix, e: &Embedding) -> Result<f64> {
    check_compatible(d, e)?;
    let coords = e.coordinates();
    let n = d.n_objects();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let dij = d.get(i, j);
            let diff = dij - embedded_distance(coords, i, j);
            num += diff * diff;
            den += dij * dij;
        }
    }
    if den == 0.0 {
        return Err(Error::DegenerateInput(
            "stress is undefined for an all-zero distance matrix".into(),
        ));
    }
    Ok((num / den).sqrt())
}

/// `(d_ij, d~_ij)` for every `i < j`, row-major.
pub fn shepard_points(d: &DistanceMatrix, e: &Embedding) -> Result<Vec<(f64, f64)>> {
    check_compatible(d, e)?;
    let coords = e.coordinates();
    let n = d.n_objects();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            out.push((d.get(i, j), embedded_distance(coords, i, j)));
        }
    }
    Ok(out)
}

/// Stress-1 for `n = 1..=n_max`, from a single decomposition.
pub fn stress_curve(d: &DistanceMatrix, n_max: usize) -> Result<Vec<(usize, f64)>> {
    let full = embed(d, n_max)?;
    curve_from(d, &full)
}

fn curve_from(d: &DistanceMatrix, full: &Embedding) -> Result<Vec<(usize, f64)>> {
    (1..=full.dims())
        .map(|n| Ok((n, kruskal_stress(d, &full.truncated(n)?)?)))
        .collect()
}

/// Pearson correlation of the Shepard cloud; 1 means no scatter.
pub fn shepard_correlation(pairs: &[(f64, f64)]) -> f64 {
    let n = pairs.len() as f64;
    let (mx, my) = pairs
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Stress, Shepard cloud and stress-vs-dimension curve for one embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct StressReport {
    pub stress_1: f64,
    pub shepard_pairs: Vec<(f64, f64)>,
    pub stress_curve: Vec<(usize, f64)>,
}

impl StressReport {
    /// Stress and Shepard cloud for the first `n` columns of `wide`, and the
    /// stress curve over every column of `wide`. One decomposition serves both.
    pub fn build(d: &DistanceMatrix, wide: &Embedding, n: usize) -> Result<Self> {
        let e = wide.truncated(n)?;
        Ok(StressReport {
            stress_1: kruskal_stress(d, &e)?,
            shepard_pairs: shepard_points(d, &e)?,
            stress_curve: curve_from(d, wide)?,
        })
    }

    /// Whether the curve never increases with `n`. Guaranteed for Euclidean
    /// dissimilarities; other inputs can overshoot once the embedded
    /// distances exceed the originals.
    pub fn curve_is_monotone(&self) -> bool {
        self.stress_curve.windows(2).all(|w| w[1].1 <= w[0].1)
    }

    pub fn write_curve_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "n,stress")?;
        for (n, s) in &self.stress_curve {
            writeln!(w, "{n},{s}")?;
        }
        Ok(())
    }

    /// `i,j,d,d_embedded` for every `i < j`, 1-based.
    pub fn write_shepard_csv<W: Write>(&self, n_objects: usize, mut w: W) -> io::Result<()> {
        writeln!(w, "i,j,d,d_embedded")?;
        let mut pairs = self.shepard_pairs.iter();
        for i in 0..n_objects {
            for j in (i + 1)..n_objects {
                if let Some((a, b)) = pairs.next() {
                    writeln!(w, "{},{},{a},{b}", i + 1, j + 1)?;
                }
            }
        }
        Ok(())
    }
}
