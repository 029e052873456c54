//! The four subcommands. Each failure is tagged with the stage it came from,
//! which fixes the process exit code.

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use ndarray::Array2;
use serde_json::json;
use zeta_mds_core::zeta::GUARANTEED_T;
use zeta_mds_core::{
    check_axioms, distance_matrix, embed_at_most, fit_components, parse_zeros, shepard_correlation,
    summarize, verify_zero, window, write_fits_csv, zeta_critical, AxiomReport, DistanceMatrix,
    Embedding, Error, LawSummary, ObjectSet, SinusoidFit, StressReport, ZeroList,
};

use crate::config::{Cli, Command, MetricArg, RunConfig};
use crate::manifest::{InputDigest, Manifest, ANALYSIS_MANIFEST, EMBED_MANIFEST};
use crate::svg::{self, View};

/// Dimensions covered by the stress-vs-dimension curve when the spectrum allows.
pub const STRESS_CURVE_DIMS: usize = 10;
/// Random objects, pairs and triples drawn for the axiom report.
pub const AXIOM_SAMPLES: usize = 10_000;
/// Counterexamples listed in `axioms.json`.
const LISTED_COUNTEREXAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Input,
    Verification,
    Embedding,
    Analysis,
}

impl Stage {
    pub fn exit_code(self) -> u8 {
        match self {
            Stage::Input => 2,
            Stage::Verification => 3,
            Stage::Embedding => 4,
            Stage::Analysis => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Stage::Input => "input",
            Stage::Verification => "verification",
            Stage::Embedding => "embedding",
            Stage::Analysis => "analysis",
        }
    }
}

#[derive(Debug)]
pub struct StageError {
    pub stage: Stage,
    pub source: anyhow::Error,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} stage: {:#}", self.stage.name(), self.source)
    }
}

impl std::error::Error for StageError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(self.source.as_ref())
    }
}

trait InStage<T> {
    fn stage(self, stage: Stage) -> Result<T, StageError>;
}

impl<T, E: Into<anyhow::Error>> InStage<T> for Result<T, E> {
    fn stage(self, stage: Stage) -> Result<T, StageError> {
        self.map_err(|e| StageError {
            stage,
            source: e.into(),
        })
    }
}

pub fn run(cli: &Cli) -> Result<(), StageError> {
    match &cli.command {
        Command::Validate(args) => {
            let cfg = RunConfig::from_args(&args.run).stage(Stage::Input)?;
            let checks = cmd_validate(&cfg, args.count, args.tol)?;
            for c in &checks {
                println!("{c}");
            }
            let (pass, fail, skip) = tally(&checks);
            println!("{pass} passed, {fail} failed, {skip} skipped");
            match checks.iter().find(|c| c.status == CheckStatus::Fail) {
                Some(first) => Err(StageError {
                    stage: Stage::Verification,
                    source: anyhow!(
                        "t = {} on line {} of {} is not a zero (|zeta| = {:e}, tolerance {:e})",
                        first.t,
                        first.line,
                        cfg.zeros_path.display(),
                        first.modulus,
                        args.tol
                    ),
                }),
                None => Ok(()),
            }
        }
        Command::Embed(args) => {
            let cfg = RunConfig::from_args(args).stage(Stage::Input)?;
            let run = cmd_embed(&cfg)?;
            println!("{}", run.describe(&cfg));
            Ok(())
        }
        Command::Analyze(args) => {
            let cfg = RunConfig::from_args(&args.run)
                .stage(Stage::Input)?
                .for_analysis();
            let analysis = cmd_analyze(&cfg, args.embedding.as_deref(), args.periodic_r2)?;
            for f in &analysis.fits {
                let mark = if f.is_periodic(args.periodic_r2) { "  periodic" } else { "" };
                println!(
                    "c{}: A = {:.6}  omega = {:.6}  phi = {:.4}  r2 = {:.4}{mark}",
                    f.p, f.amplitude, f.omega, f.phi, f.r2
                );
            }
            println!("{}", describe_laws(&analysis.laws));
            println!("wrote {}", cfg.out_dir.display());
            Ok(())
        }
        Command::Sweep(args) => {
            let cfg = RunConfig::from_args(&args.run).stage(Stage::Input)?;
            let outcomes = cmd_sweep(&cfg, &args.metrics)?;
            for o in &outcomes {
                match &o.result {
                    Ok(stress) => println!("{}: ok, stress-1 = {stress:.6}", metric_dir_name(o.metric)),
                    Err(e) => println!("{}: failed ({e})", metric_dir_name(o.metric)),
                }
            }
            Ok(())
        }
    }
}

// ---------------------------------------------------------------- input

pub struct LoadedZeros {
    pub zeros: ZeroList,
    pub digest: InputDigest,
    /// Physical 1-based line number of each ordinate in the file.
    pub lines: Vec<usize>,
}

pub fn load_zeros(path: &Path, count: usize) -> Result<LoadedZeros, StageError> {
    let bytes = fs::read(path)
        .with_context(|| format!("reading {}", path.display()))
        .stage(Stage::Input)?;
    let source = path.display().to_string();
    let zeros = parse_zeros(bytes.as_slice(), &source)
        .with_context(|| format!("parsing {source}"))
        .stage(Stage::Input)?
        .truncated(count);
    let text = String::from_utf8_lossy(&bytes);
    let lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        })
        .map(|(k, _)| k + 1)
        .take(zeros.len())
        .collect();
    Ok(LoadedZeros {
        zeros,
        digest: InputDigest::of_bytes(path, &bytes),
        lines,
    })
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_with(
    dir: &Path,
    name: &str,
    written: &mut Vec<String>,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> anyhow::Result<()> {
    let path = dir.join(name);
    let mut w = create(&path)?;
    body(&mut w).and_then(|_| w.flush()).with_context(|| format!("writing {}", path.display()))?;
    written.push(name.to_string());
    Ok(())
}

fn write_text(dir: &Path, name: &str, written: &mut Vec<String>, text: &str) -> anyhow::Result<()> {
    write_with(dir, name, written, |w| w.write_all(text.as_bytes()))
}

fn write_json(dir: &Path, name: &str, written: &mut Vec<String>, value: &serde_json::Value) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(dir, name, written, &text)
}

// ---------------------------------------------------------------- validate

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Beyond the range where the evaluator's accuracy is guaranteed.
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrdinateCheck {
    pub index: usize,
    pub line: usize,
    pub t: f64,
    pub modulus: f64,
    pub status: CheckStatus,
}

impl fmt::Display for OrdinateCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "SKIP",
        };
        write!(
            f,
            "#{:<5} line {:<6} t = {:<22} |zeta| = {:.3e}  {status}",
            self.index, self.line, self.t, self.modulus
        )
    }
}

fn tally(checks: &[OrdinateCheck]) -> (usize, usize, usize) {
    let count = |s| checks.iter().filter(|c| c.status == s).count();
    (
        count(CheckStatus::Pass),
        count(CheckStatus::Fail),
        count(CheckStatus::Skipped),
    )
}

/// Evaluates `|zeta(1/2 + it)|` at the first `count` ordinates.
pub fn cmd_validate(cfg: &RunConfig, count: usize, tol: f64) -> Result<Vec<OrdinateCheck>, StageError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(StageError {
            stage: Stage::Input,
            source: anyhow!("--tol must be positive, got {tol}"),
        });
    }
    let loaded = load_zeros(&cfg.zeros_path, count.min(cfg.num_zeros))?;
    let values = loaded.zeros.values();
    values
        .iter()
        .zip(&loaded.lines)
        .enumerate()
        .map(|(k, (&t, &line))| {
            if t.abs() > GUARANTEED_T {
                return Ok(OrdinateCheck {
                    index: k + 1,
                    line,
                    t,
                    modulus: f64::NAN,
                    status: CheckStatus::Skipped,
                });
            }
            let modulus = zeta_critical(t).stage(Stage::Verification)?.norm();
            let ok = verify_zero(t, tol).stage(Stage::Verification)?;
            Ok(OrdinateCheck {
                index: k + 1,
                line,
                t,
                modulus,
                status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            })
        })
        .collect()
}

// ---------------------------------------------------------------- embed

pub struct EmbedRun {
    pub objects: ObjectSet,
    pub distances: DistanceMatrix,
    pub embedding: Embedding,
    pub stress: StressReport,
    pub axioms: anyhow::Result<AxiomReport>,
    pub digest: InputDigest,
    pub outputs: Vec<String>,
}

impl EmbedRun {
    fn describe(&self, cfg: &RunConfig) -> String {
        let (neg, neg_sum) = self.embedding.negative_spectrum();
        format!(
            "embedded N = {} windows (m = {}, {}, {}) into {} dimensions\n\
             stress-1 = {:.6}, Shepard correlation = {:.6}\n\
             positive eigenvalues: {}, negative: {} (sum {:e})\n\
             wrote {}",
            self.objects.len(),
            cfg.m,
            self.objects.approach(),
            cfg.measure(),
            self.embedding.dims(),
            self.stress.stress_1,
            shepard_correlation(&self.stress.shepard_pairs),
            self.embedding.positive_count(),
            neg,
            neg_sum,
            cfg.out_dir.display()
        )
    }
}

/// Windows, distances and the embedding plus its stress report.
pub fn compute_embedding(
    cfg: &RunConfig,
    zeros: &ZeroList,
) -> anyhow::Result<(ObjectSet, DistanceMatrix, Embedding, StressReport)> {
    let objects = window(zeros, cfg.m, cfg.approach.into(), cfg.limit).context("windowing")?;
    let distances = distance_matrix(objects.vectors(), cfg.measure()).context("distance matrix")?;
    let wide = embed_at_most(&distances, cfg.dims.max(STRESS_CURVE_DIMS)).context("scaling")?;
    if wide.dims() < cfg.dims {
        return Err(Error::DimensionUnavailable {
            requested: cfg.dims,
            available: wide.dims(),
        })
        .context("scaling");
    }
    let embedding = wide.truncated(cfg.dims).context("scaling")?;
    let stress = StressReport::build(&distances, &wide, cfg.dims).context("stress report")?;
    Ok((objects, distances, embedding, stress))
}

pub fn cmd_embed(cfg: &RunConfig) -> Result<EmbedRun, StageError> {
    let loaded = load_zeros(&cfg.zeros_path, cfg.num_zeros)?;
    let (objects, distances, embedding, stress) =
        compute_embedding(cfg, &loaded.zeros).stage(Stage::Embedding)?;
    let axioms = check_axioms(cfg.measure(), objects.vectors(), AXIOM_SAMPLES, cfg.seed).map_err(anyhow::Error::from);
    let mut run = EmbedRun {
        objects,
        distances,
        embedding,
        stress,
        axioms,
        digest: loaded.digest,
        outputs: Vec::new(),
    };
    write_embed_outputs(cfg, &mut run).stage(Stage::Embedding)?;
    Ok(run)
}

fn write_embed_outputs(cfg: &RunConfig, run: &mut EmbedRun) -> anyhow::Result<()> {
    let dir = &cfg.out_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    let e = &run.embedding;
    write_with(dir, "embedding.csv", &mut written, |w| e.write_csv(w))?;
    write_with(dir, "eigenvalues.csv", &mut written, |w| e.write_eigenvalues_csv(w))?;
    write_with(dir, "stress.csv", &mut written, |w| run.stress.write_curve_csv(w))?;
    write_with(dir, "shepard.csv", &mut written, |w| {
        run.stress.write_shepard_csv(e.n_objects(), w)
    })?;
    if cfg.write_distances {
        write_with(dir, "distances.csv", &mut written, |w| run.distances.write_csv(w))?;
    }
    let (neg, neg_sum) = e.negative_spectrum();
    let summary = json!({
        "n_objects": run.objects.len(),
        "m": cfg.m,
        "approach": run.objects.approach().name(),
        "metric": cfg.measure().to_string(),
        "dims": e.dims(),
        "stress_1": run.stress.stress_1,
        "shepard_correlation": shepard_correlation(&run.stress.shepard_pairs),
        "stress_curve_monotone": run.stress.curve_is_monotone(),
        "positive_eigenvalues": e.positive_count(),
        "negative_eigenvalues": { "count": neg, "sum": neg_sum },
        "note": "Whether the locus shows structure is judged by eye from locus.svg; no numeric criterion is applied here.",
    });
    write_json(dir, "summary.json", &mut written, &summary)?;
    let axioms = match &run.axioms {
        Ok(report) => json!({
            "metric": cfg.measure().to_string(),
            "samples": AXIOM_SAMPLES,
            "seed": cfg.seed,
            "identity_pass": report.identity_pass,
            "symmetry_pass": report.symmetry_pass,
            "triangle_pass": report.triangle_pass,
            "counterexamples": report
                .counterexamples
                .iter()
                .take(LISTED_COUNTEREXAMPLES)
                .map(|c| json!({
                    "axiom": format!("{:?}", c.axiom).to_lowercase(),
                    "indices": [c.indices.0 + 1, c.indices.1 + 1, c.indices.2 + 1],
                }))
                .collect::<Vec<_>>(),
            "counterexample_count": report.counterexamples.len(),
        }),
        Err(err) => json!({
            "metric": cfg.measure().to_string(),
            "error": format!("{err:#}"),
        }),
    };
    write_json(dir, "axioms.json", &mut written, &axioms)?;
    let view = View {
        azimuth: cfg.azimuth,
        elevation: cfg.elevation,
    };
    let title = format!("{}, m = {}, {}, N = {}", cfg.measure(), cfg.m, run.objects.approach(), e.n_objects());
    write_text(dir, "locus.svg", &mut written, &svg::locus(e.coordinates(), view, &title))?;
    written.push(EMBED_MANIFEST.to_string());
    Manifest::new("embed", cfg, run.digest.clone(), written.clone()).write(&dir.join(EMBED_MANIFEST))?;
    run.outputs = written;
    Ok(())
}

// ---------------------------------------------------------------- analyze

pub struct Analysis {
    pub embedding: Embedding,
    pub fits: Vec<SinusoidFit>,
    pub laws: LawSummary,
    /// Where the embedding came from: `csv`, `reused` or `computed`.
    pub origin: &'static str,
}

fn describe_laws(laws: &LawSummary) -> String {
    match (laws.amplitude_law, laws.frequency_law) {
        (Some(a), Some(w)) => format!(
            "A_p ~ {:.4} p^{:.4} (log-log r2 {:.4}); omega_p = {:.6} p + {:.6} (r2 {:.4})",
            a.prefactor, a.exponent, a.r2, w.slope, w.intercept, w.r2
        ),
        _ => "cross-component laws: insufficient components (need at least 3)".to_string(),
    }
}

/// Reads `i,c1,...,cn` back into an embedding.
pub fn read_embedding_csv(path: &Path) -> anyhow::Result<Embedding> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| anyhow!("{} is empty", path.display()))?;
    let cols = header.split(',').count();
    if cols < 2 {
        bail!("{}: header needs an index column and at least one component", path.display());
    }
    let mut data = Vec::new();
    let mut rows = 0;
    for (k, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols {
            bail!("{} line {}: expected {cols} fields, found {}", path.display(), k + 1, fields.len());
        }
        for f in &fields[1..] {
            let v: f64 = f
                .trim()
                .parse()
                .with_context(|| format!("{} line {}: bad number {f:?}", path.display(), k + 1))?;
            data.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        bail!("{} has no rows", path.display());
    }
    let coords = Array2::from_shape_vec((rows, cols - 1), data)?;
    Ok(Embedding::from_coordinates(coords))
}

/// The embedding written by an earlier `embed` with the same configuration
/// and the same input bytes, if there is one.
fn reusable_embedding(cfg: &RunConfig, digest: &InputDigest) -> Option<Embedding> {
    let manifest = Manifest::read(&cfg.out_dir.join(EMBED_MANIFEST))?;
    if manifest.command != "embed" || &manifest.config != cfg || manifest.input.sha256 != digest.sha256 {
        return None;
    }
    let e = read_embedding_csv(&cfg.out_dir.join("embedding.csv")).ok()?;
    (e.dims() == cfg.dims).then_some(e)
}

pub fn cmd_analyze(cfg: &RunConfig, embedding_csv: Option<&Path>, periodic_r2: f64) -> Result<Analysis, StageError> {
    let (embedding, digest, origin) = match embedding_csv {
        Some(path) => {
            let e = read_embedding_csv(path).stage(Stage::Input)?;
            let bytes = fs::read(path).stage(Stage::Input)?;
            (e, InputDigest::of_bytes(path, &bytes), "csv")
        }
        None => {
            let loaded = load_zeros(&cfg.zeros_path, cfg.num_zeros)?;
            match reusable_embedding(cfg, &loaded.digest) {
                Some(e) => (e, loaded.digest, "reused"),
                None => {
                    let run = cmd_embed(cfg)?;
                    (run.embedding, run.digest, "computed")
                }
            }
        }
    };
    let fits = fit_components(&embedding, cfg.components).stage(Stage::Analysis)?;
    let laws = summarize(&fits).stage(Stage::Analysis)?;
    let analysis = Analysis {
        embedding,
        fits,
        laws,
        origin,
    };
    write_analysis_outputs(cfg, &analysis, digest, periodic_r2).stage(Stage::Analysis)?;
    Ok(analysis)
}

fn write_analysis_outputs(
    cfg: &RunConfig,
    a: &Analysis,
    digest: InputDigest,
    periodic_r2: f64,
) -> anyhow::Result<()> {
    let dir = &cfg.out_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    write_with(dir, "fits.csv", &mut written, |w| write_fits_csv(&a.fits, w))?;
    write_with(dir, "laws.csv", &mut written, |w| a.laws.write_csv(w))?;
    let shown = a.fits.len().max(1).min(a.embedding.dims());
    let traces = svg::traces(a.embedding.truncated(shown)?.coordinates(), &a.fits);
    write_text(dir, "traces.svg", &mut written, &traces)?;
    write_text(dir, "parameters.svg", &mut written, &svg::parameters(&a.fits, &a.laws))?;
    let laws = match (a.laws.amplitude_law, a.laws.frequency_law) {
        (Some(p), Some(l)) => json!({
            "status": "fitted",
            "power_law": { "exponent": p.exponent, "prefactor": p.prefactor, "r2": p.r2 },
            "linear": { "slope": l.slope, "intercept": l.intercept, "r2": l.r2 },
        }),
        _ => json!({ "status": "insufficient", "reason": "cross-component laws need at least 3 components" }),
    };
    let report = json!({
        "embedding_source": a.origin,
        "components": a.fits.len(),
        "periodic_r2_threshold": periodic_r2,
        "periodic_components": a.fits.iter().filter(|f| f.is_periodic(periodic_r2)).map(|f| f.p).collect::<Vec<_>>(),
        "laws": laws,
    });
    write_json(dir, "analysis.json", &mut written, &report)?;
    written.push(ANALYSIS_MANIFEST.to_string());
    Manifest::new("analyze", cfg, digest, written).write(&dir.join(ANALYSIS_MANIFEST))
}

// ---------------------------------------------------------------- sweep

pub struct SweepOutcome {
    pub metric: MetricArg,
    pub out_dir: PathBuf,
    /// Stress-1 on success.
    pub result: Result<f64, String>,
}

pub fn metric_dir_name(metric: MetricArg) -> &'static str {
    zeta_mds_core::Metric::from(metric).name()
}

/// One `embed` per metric into `out/<metric>/`, then a combined `loci.svg`.
/// Fails only when every metric fails.
pub fn cmd_sweep(cfg: &RunConfig, metrics: &[MetricArg]) -> Result<Vec<SweepOutcome>, StageError> {
    if metrics.is_empty() {
        return Err(StageError {
            stage: Stage::Input,
            source: anyhow!("no metrics to sweep"),
        });
    }
    // Fail early on unreadable input rather than once per metric.
    load_zeros(&cfg.zeros_path, cfg.num_zeros)?;
    let mut outcomes = Vec::new();
    let mut panels: Vec<(String, Embedding)> = Vec::new();
    for &metric in metrics {
        let sub = RunConfig {
            metric,
            out_dir: cfg.out_dir.join(metric_dir_name(metric)),
            ..cfg.clone()
        };
        let result = match cmd_embed(&sub) {
            Ok(run) => {
                let stress = run.stress.stress_1;
                panels.push((sub.measure().to_string(), run.embedding));
                Ok(stress)
            }
            Err(e) => Err(e.to_string()),
        };
        outcomes.push(SweepOutcome {
            metric,
            out_dir: sub.out_dir,
            result,
        });
    }
    let dir = &cfg.out_dir;
    let mut written = Vec::new();
    let mut write = || -> anyhow::Result<()> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let views: Vec<(String, ndarray::ArrayView2<f64>)> =
            panels.iter().map(|(t, e)| (t.clone(), e.coordinates())).collect();
        let view = View {
            azimuth: cfg.azimuth,
            elevation: cfg.elevation,
        };
        write_text(dir, "loci.svg", &mut written, &svg::loci_grid(&views, view))?;
        let report: Vec<_> = outcomes
            .iter()
            .map(|o| match &o.result {
                Ok(s) => json!({ "metric": metric_dir_name(o.metric), "status": "ok", "stress_1": s }),
                Err(e) => json!({ "metric": metric_dir_name(o.metric), "status": "failed", "error": e }),
            })
            .collect();
        write_json(dir, "sweep.json", &mut written, &json!({ "runs": report }))
    };
    write().stage(Stage::Embedding)?;
    if outcomes.iter().all(|o| o.result.is_err()) {
        return Err(StageError {
            stage: Stage::Embedding,
            source: anyhow!("every metric failed; see sweep.json"),
        });
    }
    Ok(outcomes)
}
