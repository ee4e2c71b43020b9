//! `ifsquad` command-line front end.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde_json::{json, Value};

use ifsquad::geometry::separation_params;
use ifsquad::harness::{
    builtin_studies, emit, evaluate, preset, run_convergence, write_csv, write_plot_data, ErrorMetric,
    ExperimentConfig, IfsSpec, KernelSpec, ReportFormat, SmoothFunction, PRESETS, STUDIES,
};
use ifsquad::kernel_helmholtz::{bound_helmholtz_singular, HelmholtzKernel};
use ifsquad::kernel_phi_t::{bound_phi_t_double, bound_phi_t_single, SingularOptions};
use ifsquad::partition::{level_h, partition_lh};
use ifsquad::{Attractor, Error, ErrorKind};

const THREADS_ENV: &str = "IFSQUAD_THREADS";

#[derive(Parser)]
#[command(name = "ifsquad", version, about = "Quadrature on self-similar fractal attractors")]
struct Cli {
    /// Worker threads (overrides IFSQUAD_THREADS; default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the preset attractors.
    Presets,
    /// Hausdorff dimension and basic metadata.
    Dimension(IfsArgs),
    /// Barycentre of the attractor.
    Barycentre(IfsArgs),
    /// The partition L_h of the attractor.
    Partition {
        #[command(flatten)]
        ifs: IfsArgs,
        #[command(flatten)]
        res: Resolution,
        /// Also print the vector indices.
        #[arg(long)]
        indices: bool,
    },
    /// Separation parameters at resolution h.
    Separation {
        #[command(flatten)]
        ifs: IfsArgs,
        #[command(flatten)]
        res: Resolution,
    },
    /// Evaluate one integral.
    Integrate {
        #[command(flatten)]
        ifs: IfsArgs,
        #[command(flatten)]
        res: Resolution,
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        flags: RuleFlags,
    },
    /// Run a convergence study from a TOML configuration.
    Convergence {
        /// Experiment configuration file.
        config: PathBuf,
        /// Output path (overrides the config; default: standard output).
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Output format (overrides the config).
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        /// Treat precondition warnings as errors.
        #[arg(long)]
        strict: bool,
    },
    /// Run one of the built-in studies and print plot data.
    Reproduce {
        /// Study name.
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(STUDIES))]
        study: String,
        /// Use the full study and reference levels (slow).
        #[arg(long)]
        paper_scale: bool,
        /// Directory for one CSV per series plus plot-data files.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct IfsArgs {
    /// Preset name, e.g. "cantor(1/3)".
    #[arg(long, conflicts_with = "ifs", required_unless_present = "ifs")]
    preset: Option<String>,
    /// TOML file describing an IFS (dim, maps, optional measure and diam).
    #[arg(long)]
    ifs: Option<PathBuf>,
}

impl IfsArgs {
    fn build(&self) -> ifsquad::Result<Attractor> {
        match (&self.preset, &self.ifs) {
            (Some(p), _) => preset(p),
            (None, Some(path)) => {
                IfsSpec::from_file(path)?.build()
            }
            (None, None) => Err(Error::Config("give --preset or --ifs".into())),
        }
    }
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Resolution {
    /// Partition parameter h.
    #[arg(long)]
    h: Option<f64>,
    /// Level l, meaning h = rho_max^l * diam.
    #[arg(long)]
    level: Option<usize>,
}

impl Resolution {
    fn h(&self, a: &Attractor) -> ifsquad::Result<f64> {
        match (self.h, self.level) {
            (Some(h), _) if h > 0.0 && h.is_finite() => Ok(h),
            (Some(h), _) => Err(Error::Config(format!("h = {h} must be positive"))),
            (None, Some(l)) => Ok(level_h(a, l)),
            (None, None) => Err(Error::Config("give --h or --level".into())),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelKind {
    /// Double integral of Phi_t.
    PhiT,
    /// Integral of Phi_t against a fixed point.
    FixedPoint,
    /// Double integral of the Helmholtz kernel.
    Helmholtz,
    /// A smooth test function.
    Smooth,
}

#[derive(Clone, Copy, ValueEnum)]
enum FunctionArg {
    One,
    Affine,
    XSquared,
    Cos,
    CosDiff,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long, value_enum)]
    kernel: KernelKind,
    /// Exponent t for phi-t and fixed-point.
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    /// Map index m for fixed-point.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Wavenumber for helmholtz.
    #[arg(long)]
    k: Option<f64>,
    /// Screen dimension for helmholtz (default: ambient dimension).
    #[arg(long)]
    n: Option<usize>,
    /// Oscillation threshold for helmholtz (default 2*pi).
    #[arg(long)]
    c_osc: Option<f64>,
    /// Function for smooth.
    #[arg(long, value_enum, default_value = "one")]
    function: FunctionArg,
    /// Frequency parameter of the smooth function.
    #[arg(long)]
    c: Option<f64>,
}

impl KernelArgs {
    fn spec(&self) -> ifsquad::Result<KernelSpec> {
        Ok(match self.kernel {
            KernelKind::PhiT => KernelSpec::PhiT { t: self.t },
            KernelKind::FixedPoint => KernelSpec::PhiTFixedPoint { t: self.t, m: self.m },
            KernelKind::Helmholtz => KernelSpec::Helmholtz {
                k: self.k.ok_or_else(|| Error::Config("helmholtz needs --k".into()))?,
                n: self.n,
                c_osc: self.c_osc,
            },
            KernelKind::Smooth => KernelSpec::Smooth {
                function: match self.function {
                    FunctionArg::One => SmoothFunction::One,
                    FunctionArg::Affine => SmoothFunction::Affine,
                    FunctionArg::XSquared => SmoothFunction::XSquared,
                    FunctionArg::Cos => SmoothFunction::Cos,
                    FunctionArg::CosDiff => SmoothFunction::CosDiff,
                },
                c: self.c,
            },
        })
    }
}

#[derive(Args)]
struct RuleFlags {
    /// Evaluate symmetric double sums in full instead of one triangle.
    #[arg(long)]
    no_symmetry: bool,
    /// Treat precondition warnings as errors.
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    PlotData,
}

fn print_json(v: &Value) -> ifsquad::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(|e| Error::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}

fn json_num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn metadata(a: &Attractor) -> Value {
    json!({
        "ambient_dim": a.ambient_dim(),
        "maps": a.num_maps(),
        "ratios": a.ratios(),
        "uniform": a.is_uniform(),
        "dimension": a.dim(),
        "measure": a.measure(),
        "diam": a.diam(),
    })
}

fn bound_for(a: &Attractor, kernel: &KernelSpec, h: f64) -> Option<f64> {
    let r = match kernel {
        KernelSpec::PhiT { t } => bound_phi_t_double(a, *t, h),
        KernelSpec::PhiTFixedPoint { t, m } => bound_phi_t_single(a, *t, *m, h),
        KernelSpec::Helmholtz { k, n, c_osc } => {
            let n = n.unwrap_or(a.ambient_dim());
            let kernel = match c_osc {
                Some(c) => HelmholtzKernel::with_c_osc(*k, n, *c),
                None => HelmholtzKernel::new(*k, n),
            };
            kernel.and_then(|kk| bound_helmholtz_singular(a, &kk, h))
        }
        KernelSpec::Smooth { .. } => return None,
    };
    r.ok()
}

fn run(cli: Cli) -> ifsquad::Result<()> {
    match cli.command {
        Command::Presets => print_json(&json!(PRESETS)),
        Command::Dimension(ifs) => print_json(&metadata(&ifs.build()?)),
        Command::Barycentre(ifs) => {
            let a = ifs.build()?;
            let b = a.barycentre();
            let b: Vec<f64> = b[..a.ambient_dim()].to_vec();
            print_json(&json!({ "barycentre": b, "measure": a.measure() }))
        }
        Command::Partition { ifs, res, indices } => {
            let a = ifs.build()?;
            let h = res.h(&a)?;
            let p = partition_lh(&a, h)?;
            let mut v = json!({ "h": h, "N": p.len() });
            if indices {
                v["indices"] = json!(p.indices().iter().map(|i| i.to_string()).collect::<Vec<_>>());
            }
            print_json(&v)
        }
        Command::Separation { ifs, res } => {
            let a = ifs.build()?;
            let h = res.h(&a)?;
            let s = separation_params(&a, h)?;
            print_json(&serde_json::to_value(&s).map_err(|e| Error::Io(e.into()))?)
        }
        Command::Integrate { ifs, res, kernel, flags } => {
            let a = ifs.build()?;
            let h = res.h(&a)?;
            let spec = kernel.spec()?;
            let opts = SingularOptions { symmetric: !flags.no_symmetry, strict: flags.strict };
            let v = evaluate(&a, &spec, h, opts)?;
            let n = partition_lh(&a, h)?.len();
            let bound = bound_for(&a, &spec, h);
            print_json(&json!({
                "kernel": spec.to_string(),
                "h": h,
                "N": n,
                "value_re": json_num(v.re),
                "value_im": json_num(v.im),
                "bound": bound.map(json_num),
            }))
        }
        Command::Convergence { config, output, format, strict } => {
            let mut c = ExperimentConfig::from_file(&config)?;
            if output.is_some() {
                c.output = output;
            }
            if let Some(f) = format {
                c.format = match f {
                    FormatArg::Csv => ReportFormat::Csv,
                    FormatArg::PlotData => ReportFormat::PlotData,
                };
            }
            c.strict |= strict;
            let report = run_convergence(&c)?;
            info!("study finished in {:.2}s", report.meta.wall_time_s);
            match &c.output {
                Some(path) => emit(&report, c.format, path),
                None => {
                    let out = io::stdout().lock();
                    match c.format {
                        ReportFormat::Csv => write_csv(&report, out),
                        ReportFormat::PlotData => {
                            let name = format!("{} {}", report.meta.attractor, report.meta.kernel);
                            write_plot_data(&[(name.as_str(), &report)], ErrorMetric::Absolute, out)
                        }
                    }
                }
            }
        }
        Command::Reproduce { study, paper_scale, output_dir } => reproduce(&study, paper_scale, output_dir.as_deref()),
    }
}

fn reproduce(study: &str, full: bool, dir: Option<&Path>) -> ifsquad::Result<()> {
    let configs = builtin_studies(study, full)?;
    let mut reports = Vec::with_capacity(configs.len());
    for c in &configs {
        info!("running {} {}", c.attractor_label(), c.kernel);
        reports.push((c.attractor_label(), run_convergence(c)?));
    }
    let series: Vec<(&str, &ifsquad::ConvergenceReport)> = reports.iter().map(|(n, r)| (n.as_str(), r)).collect();
    match dir {
        None => {
            let mut out = io::stdout().lock();
            writeln!(out, "# absolute error")?;
            write_plot_data(&series, ErrorMetric::Absolute, &mut out)?;
            writeln!(out)?;
            writeln!(out, "# relative error")?;
            write_plot_data(&series, ErrorMetric::Relative, &mut out)
        }
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for (name, r) in &series {
                let file = sanitize(name);
                write_csv(r, BufWriter::new(File::create(dir.join(format!("{study}-{file}.csv")))?))?;
            }
            let abs = BufWriter::new(File::create(dir.join(format!("{study}-abs.dat")))?);
            write_plot_data(&series, ErrorMetric::Absolute, abs)?;
            let rel = BufWriter::new(File::create(dir.join(format!("{study}-rel.dat")))?);
            write_plot_data(&series, ErrorMetric::Relative, rel)
        }
    }
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect()
}

fn threads(cli: &Cli) -> ifsquad::Result<Option<usize>> {
    if let Some(n) = cli.threads {
        return if n == 0 { Err(Error::Config("--threads must be at least 1".into())) } else { Ok(Some(n)) };
    }
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Config => 2,
        ErrorKind::Numeric => 3,
        ErrorKind::Io => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = threads(&cli).and_then(|n| {
        if let Some(n) = n {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
        }
        run(cli)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
