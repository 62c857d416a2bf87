//! `isf` command-line front end.

pub mod sky;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isf_core::io::{
    read_metrics_csv, read_pnm, read_volume, write_labels, write_mask, write_metrics_csv, write_overlay,
    MetricsRow, PnmImage, Volume, VOLUME_MAGIC,
};
use isf_core::{
    evaluate, isf_run, verify_forest, IsfConfig, IsfError, IsfOutput, LabelMap, Lattice, Method, Scalar,
};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNREADABLE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_INTERNAL: i32 = 70;
pub const EXIT_CANT_CREATE: i32 = 73;

#[derive(Debug, Parser)]
#[command(name = "isf", version, about = "Iterative spanning forest superpixels and supervoxels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment an image or volume into superpixels.
    Segment(SegmentArgs),
    /// Compare a label map with a ground truth.
    Metrics(MetricsArgs),
    /// Time segmentations over a grid of parameters.
    Bench(BenchArgs),
    /// Extract the sky region of a color image.
    Sky(SkyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Precision {
    F32,
    F64,
}

#[derive(Debug, Clone, Args)]
pub struct SegmentArgs {
    /// Color or grayscale PNM image (P5/P6), or an ISF3 volume.
    #[arg(long)]
    pub input: PathBuf,
    /// One of grid-root, mix-root, grid-mean, mix-mean, regmin.
    #[arg(long, default_value = "mix-mean", value_parser = parse_method)]
    pub method: Method,
    /// Desired number of superpixels.
    #[arg(long)]
    pub superpixels: usize,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 12.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 10)]
    pub iters: usize,
    /// Output label map: 16-bit P5 for images, ISF3 for volumes.
    #[arg(long)]
    pub labels: PathBuf,
    /// Color image with superpixel borders (cyan) and ground-truth borders (magenta).
    #[arg(long)]
    pub overlay: Option<PathBuf>,
    /// Ground-truth label map; prints a metrics row when given.
    #[arg(long)]
    pub gt: Option<PathBuf>,
    /// Final seeds as `label,x,y,z` lines.
    #[arg(long)]
    pub seed_dump: Option<PathBuf>,
    /// Tolerance in pixels for boundary recall.
    #[arg(long, default_value_t = 2)]
    pub br_radius: usize,
    /// Floating-point type used for colors and costs.
    #[arg(long, value_enum, default_value_t = Precision::F64)]
    pub precision: Precision,
    /// Report per-iteration diagnostics on standard error.
    #[arg(long)]
    pub verbose: bool,
}

#[derive(Debug, Clone, Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub gt: PathBuf,
    /// Tolerance in pixels for boundary recall.
    #[arg(long, default_value_t = 2)]
    pub br_radius: usize,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// An image or volume, or a directory of them.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "mix-mean", value_parser = parse_method)]
    pub method: Method,
    /// Comma-separated superpixel counts.
    #[arg(long, value_delimiter = ',', required = true)]
    pub superpixels: Vec<usize>,
    /// Comma-separated alpha values.
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 12.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 10)]
    pub iters: usize,
    /// Runs per configuration; the mean time is reported.
    #[arg(long, default_value_t = 1)]
    pub repeat: usize,
    /// Ground truth for a single input, or a directory with matching names.
    #[arg(long)]
    pub gt: Option<PathBuf>,
    /// Tolerance in pixels for boundary recall.
    #[arg(long, default_value_t = 2)]
    pub br_radius: usize,
    /// Write the table here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SkyArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub superpixels: usize,
    #[arg(long, default_value_t = 0.08)]
    pub alpha: f64,
    #[arg(long, default_value_t = 12.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 10)]
    pub iters: usize,
    /// Lab distance up to which adjacent superpixels merge.
    #[arg(long)]
    pub threshold: f64,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: IsfError| e.to_string())
}

/// A failure carrying its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    fn unreadable(path: &Path, e: impl std::fmt::Display) -> Self {
        Self::new(EXIT_UNREADABLE, format!("{}: {e}", path.display()))
    }
}

impl From<IsfError> for CliError {
    fn from(e: IsfError) -> Self {
        let code = match &e {
            IsfError::Parse { .. } | IsfError::Io(_) | IsfError::Csv(_) => EXIT_UNREADABLE,
            IsfError::DimensionMismatch { .. } => EXIT_DATA,
            IsfError::Consistency(_) => EXIT_INTERNAL,
            IsfError::Domain(_) | IsfError::Unsupported(_) => EXIT_USAGE,
        };
        Self::new(code, e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Segment(a) => match a.precision {
            Precision::F64 => cmd_segment::<f64>(&a, stdout, stderr),
            Precision::F32 => cmd_segment::<f32>(&a, stdout, stderr),
        },
        Command::Metrics(a) => cmd_metrics(&a, stdout),
        Command::Bench(a) => cmd_bench(&a, stdout),
        Command::Sky(a) => cmd_sky(&a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "isf: {}", e.message);
            e.code
        }
    }
}

/// A decoded input file.
#[derive(Debug, Clone)]
pub enum Input {
    Image(PnmImage),
    Volume(Volume),
}

impl Input {
    pub fn lattice<T: Scalar>(&self) -> isf_core::Result<Lattice<T>> {
        match self {
            Input::Image(i) => i.to_lattice(),
            Input::Volume(v) => v.to_lattice(),
        }
    }

    pub fn labels(&self) -> isf_core::Result<LabelMap> {
        match self {
            Input::Image(i) => i.to_labels(),
            Input::Volume(v) => v.to_labels(),
        }
    }
}

pub fn read_input(path: &Path) -> CliResult<Input> {
    let bytes = std::fs::read(path).map_err(|e| CliError::unreadable(path, e))?;
    let parsed = if bytes.starts_with(VOLUME_MAGIC) {
        read_volume(&bytes).map(Input::Volume)
    } else {
        read_pnm(&bytes).map(Input::Image)
    };
    parsed.map_err(|e| CliError::unreadable(path, e))
}

fn read_label_file(path: &Path) -> CliResult<LabelMap> {
    read_input(path)?.labels().map_err(|e| CliError::unreadable(path, e))
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::new(EXIT_CANT_CREATE, format!("{}: {e}", path.display())))
}

/// Label map bytes in the format matching the input dimensionality.
pub fn encode_labels(labels: &LabelMap) -> isf_core::Result<Vec<u8>> {
    if labels.is_3d() {
        Ok(isf_core::io::write_volume(&Volume::from_labels(labels)?))
    } else {
        write_labels(labels)
    }
}

/// Runs the segmentation, timing nothing but the segmentation call itself.
pub fn timed_segmentation<T: Scalar>(
    lattice: &Lattice<T>,
    config: &IsfConfig,
) -> isf_core::Result<(IsfOutput<T>, Duration)> {
    let start = Instant::now();
    let out = isf_run(lattice, config);
    let elapsed = start.elapsed();
    out.map(|o| (o, elapsed))
}

fn metrics_row(image: &Path, method: &str, k: usize, alpha: Option<f64>, seconds: Option<f64>) -> MetricsRow {
    MetricsRow { image: image.display().to_string(), method: method.into(), k, alpha, seconds, ..Default::default() }
}

fn cmd_segment<T: Scalar>(a: &SegmentArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let input = read_input(&a.input)?;
    let gt = a.gt.as_deref().map(read_label_file).transpose()?;
    let lattice: Lattice<T> = input.lattice()?;
    if a.overlay.is_some() && lattice.is_3d() {
        return Err(CliError::new(EXIT_USAGE, "--overlay needs a 2D image"));
    }
    if let Some(g) = &gt {
        if g.dims() != lattice.dims() {
            return Err(IsfError::DimensionMismatch { left: lattice.dims(), right: g.dims() }.into());
        }
    }
    let config = IsfConfig::new(a.method, a.superpixels).with_alpha(a.alpha).with_beta(a.beta).with_iters(a.iters);
    let (out, elapsed) = timed_segmentation(&lattice, &config)?;

    let report = verify_forest(&out.forest, &lattice, &lattice.adjacency(), &out.seeds, &out.spec, 1e-9);
    if !report.is_ok() {
        return Err(CliError::new(EXIT_INTERNAL, format!("forest verification failed: {:?}", report.violations)));
    }

    write_file(&a.labels, &encode_labels(&out.labels)?)?;
    if let (Some(path), Input::Image(img)) = (&a.overlay, &input) {
        write_file(path, &write_overlay(img, &out.labels, gt.as_ref())?)?;
    }
    if let Some(path) = &a.seed_dump {
        let mut text = String::from("label,x,y,z\n");
        for (j, s) in out.seeds.seeds().iter().enumerate() {
            text.push_str(&format!("{},{},{},{}\n", j + 1, s[0], s[1], s[2]));
        }
        write_file(path, text.as_bytes())?;
    }
    if a.verbose {
        let d = &out.diagnostics;
        let _ = writeln!(stderr, "superpixels: {}", out.superpixels());
        for i in 0..d.iterations() {
            let _ = writeln!(
                stderr,
                "iteration {}: F={:.6e} changed={} seconds={:.6}",
                i + 1,
                d.functional[i],
                d.changed_sites[i],
                d.seconds[i]
            );
        }
        for i in d.functional_increases() {
            let _ = writeln!(stderr, "note: functional increased at iteration {}", i + 1);
        }
    }
    if let Some(g) = &gt {
        let m = evaluate(&out.labels, g, a.br_radius)?;
        let mut row = metrics_row(&a.input, a.method.name(), out.superpixels(), Some(a.alpha), Some(elapsed.as_secs_f64()));
        row.br = Some(m.br);
        row.ue = Some(m.ue);
        row.dice = Some(m.dice);
        emit(stdout, &[row])?;
    }
    Ok(())
}

fn emit(stdout: &mut dyn Write, rows: &[MetricsRow]) -> CliResult<()> {
    let bytes = write_metrics_csv(rows)?;
    stdout.write_all(&bytes).map_err(|e| CliError::new(EXIT_CANT_CREATE, e.to_string()))
}

fn cmd_metrics(a: &MetricsArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let labels = read_label_file(&a.labels)?;
    let gt = read_label_file(&a.gt)?;
    let m = evaluate(&labels, &gt, a.br_radius)?;
    let mut row = metrics_row(&a.labels, "", m.superpixels, None, None);
    row.br = Some(m.br);
    row.ue = Some(m.ue);
    row.dice = Some(m.dice);
    emit(stdout, &[row])
}

const INPUT_EXTENSIONS: [&str; 5] = ["ppm", "pgm", "pnm", "isf3", "vol"];

/// Inputs of a bench run: the file itself, or the recognised files of a
/// directory sorted by name.
pub fn bench_inputs(path: &Path) -> CliResult<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|e| CliError::unreadable(path, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|x| x.to_str())
                    .is_some_and(|x| INPUT_EXTENSIONS.contains(&x.to_ascii_lowercase().as_str()))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::unreadable(path, "no image or volume files found"));
    }
    Ok(files)
}

fn cmd_bench(a: &BenchArgs, stdout: &mut dyn Write) -> CliResult<()> {
    if a.repeat == 0 {
        return Err(CliError::new(EXIT_USAGE, "--repeat must be at least 1"));
    }
    let inputs = bench_inputs(&a.input)?;
    let mut rows = Vec::new();
    for path in &inputs {
        let lattice: Lattice<f64> = read_input(path)?.lattice()?;
        let gt = match &a.gt {
            Some(g) if g.is_dir() => {
                let name = path.file_name().expect("input files have names");
                let candidate = g.join(name);
                candidate.exists().then(|| read_label_file(&candidate)).transpose()?
            }
            Some(g) => Some(read_label_file(g)?),
            None => None,
        };
        for &k in &a.superpixels {
            for &alpha in &a.alpha {
                let config = IsfConfig::new(a.method, k).with_alpha(alpha).with_beta(a.beta).with_iters(a.iters);
                let mut total = Duration::ZERO;
                let mut last = None;
                for _ in 0..a.repeat {
                    let (out, t) = timed_segmentation(&lattice, &config)?;
                    total += t;
                    last = Some(out);
                }
                let out = last.expect("repeat >= 1");
                let seconds = total.as_secs_f64() / a.repeat as f64;
                let mut row = metrics_row(path, a.method.name(), out.superpixels(), Some(alpha), Some(seconds));
                if let Some(g) = &gt {
                    let m = evaluate(&out.labels, g, a.br_radius)?;
                    row.br = Some(m.br);
                    row.ue = Some(m.ue);
                    row.dice = Some(m.dice);
                }
                rows.push(row);
            }
        }
    }
    match &a.out {
        Some(p) => write_file(p, &write_metrics_csv(&rows)?),
        None => emit(stdout, &rows),
    }
}

fn cmd_sky(a: &SkyArgs) -> CliResult<()> {
    let input = read_input(&a.input)?;
    let Input::Image(_) = &input else {
        return Err(CliError::new(EXIT_USAGE, "sky extraction needs a 2D image"));
    };
    let lattice: Lattice<f64> = input.lattice()?;
    let config = IsfConfig::new(Method::MixMean, a.superpixels).with_alpha(a.alpha).with_beta(a.beta).with_iters(a.iters);
    let out = isf_run(&lattice, &config)?;
    let mask = sky::sky_mask(&lattice, &out.labels, a.threshold)?;
    let [w, h, _] = lattice.dims();
    write_file(&a.out, &write_mask(w, h, &mask)?)
}

/// Reads a metrics table back; handy for scripts and tests.
pub fn parse_metrics_output(bytes: &[u8]) -> isf_core::Result<Vec<MetricsRow>> {
    read_metrics_csv(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timer_brackets_only_the_segmentation() {
        let colors = (0..48 * 48).map(|i| [((i * 13) % 100) as f64, 0.0, 0.0]).collect();
        let lattice = Lattice::from_lab_2d(48, 48, colors).unwrap();
        let config = IsfConfig::new(Method::GridMean, 20).with_iters(3);
        let outer = Instant::now();
        let (out, inner) = timed_segmentation(&lattice, &config).unwrap();
        let outer = outer.elapsed();
        let passes: f64 = out.diagnostics.seconds.iter().sum();
        assert!(inner <= outer);
        assert!(inner.as_secs_f64() >= passes);
    }

    #[test]
    fn unknown_flags_and_methods_are_usage_errors() {
        let mut o = Vec::new();
        let mut e = Vec::new();
        assert_eq!(run(["isf", "segment", "--bogus"], &mut o, &mut e), EXIT_USAGE);
        assert_eq!(
            run(["isf", "segment", "--input", "x", "--labels", "y", "--superpixels", "4", "--method", "slic"], &mut o, &mut e),
            EXIT_USAGE
        );
        assert_eq!(run(["isf", "--help"], &mut o, &mut e), EXIT_OK);
    }

    #[test]
    fn error_codes_follow_error_kinds() {
        let c = |e: IsfError| CliError::from(e).code;
        assert_eq!(c(IsfError::Parse { offset: 0, message: String::new() }), EXIT_UNREADABLE);
        assert_eq!(c(IsfError::DimensionMismatch { left: [1; 3], right: [2; 3] }), EXIT_DATA);
        assert_eq!(c(IsfError::Consistency(String::new())), EXIT_INTERNAL);
        assert_eq!(c(IsfError::Domain(String::new())), EXIT_USAGE);
    }
}
