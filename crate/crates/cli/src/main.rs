//! `leaky`: run, export and verify the leaky abelian sandpile model.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "leaky", version, about = "Leaky abelian sandpile simulations and analytics")]
#[command(args_override_self = true)]
struct Cli {
	#[command(subcommand)]
	command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
	/// Stabilize a point source and write heights, odometer and a summary.
	Stabilize(StabilizeArgs),
	/// Death probabilities of the killed random walk.
	Krw(KrwArgs),
	/// Limit curves, radial bands, the amoeba and the duality check.
	Shape(ShapeArgs),
	/// Run verification suites; exits nonzero when a check fails.
	Verify(VerifyArgs),
	/// Render a heights CSV as a PPM image.
	Render(RenderArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
	Float,
	Rational,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
	Fifo,
	Random,
}

#[derive(Args, Debug, Serialize)]
pub struct StabilizeArgs {
	/// Chips at the origin: decimal, mantissa-exponent ("1e100") or "p/q".
	#[arg(long)]
	pub n: String,
	#[arg(long, default_value = "2")]
	pub d: String,
	/// Weights up,right,down,left.
	#[arg(long, default_value = "1,1,1,1")]
	pub weights: String,
	#[arg(long, value_enum, default_value_t = Mode::Float)]
	pub mode: Mode,
	#[arg(long, value_enum, default_value_t = Order::Fifo)]
	pub order: Order,
	/// Seed for `--order random`.
	#[arg(long, default_value_t = 0)]
	pub seed: u64,
	/// Starting grid radius; estimated from n and d when absent.
	#[arg(long)]
	pub grid_radius: Option<usize>,
	/// Fail instead of growing the grid.
	#[arg(long)]
	pub fixed_grid: bool,
	/// Fire one topple at a time instead of in batches.
	#[arg(long)]
	pub single: bool,
	/// Also write a PPM render of the final configuration.
	#[arg(long)]
	pub render: bool,
	#[arg(long, default_value = "out")]
	pub out: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClosedForm {
	Ne,
	Line,
	Contour,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldMethodArg {
	Dp,
	Contour,
}

#[derive(Args, Debug, Serialize)]
pub struct KrwArgs {
	#[arg(long, default_value_t = 2.0)]
	pub d: f64,
	#[arg(long, default_value = "1,1,1,1")]
	pub weights: String,
	/// Grid radius; defaults to the step horizon K.
	#[arg(long)]
	pub radius: Option<usize>,
	#[arg(long, default_value_t = 1e-30)]
	pub tail_eps: f64,
	#[arg(long, value_enum, default_value_t = FieldMethodArg::Dp)]
	pub method: FieldMethodArg,
	/// Evaluate one closed form instead of a whole field.
	#[arg(long, value_enum)]
	pub closed_form: Option<ClosedForm>,
	#[arg(long)]
	pub i: Option<i64>,
	#[arg(long)]
	pub j: Option<i64>,
	#[arg(long, default_value = "out")]
	pub out: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
	Uniform,
	Ne,
	Amoeba,
	Dual,
}

#[derive(Args, Debug, Serialize)]
pub struct ShapeArgs {
	#[arg(long, default_value_t = 2.0)]
	pub d: f64,
	#[arg(long, default_value_t = 65)]
	pub samples: usize,
	#[arg(long, value_enum, default_value_t = CurveKind::Uniform)]
	pub curve: CurveKind,
	/// Chip count for the radial band and the scaled curve.
	#[arg(long)]
	pub n: Option<f64>,
	/// `logn` or `logn-halfloglogn`.
	#[arg(long, default_value = "logn-halfloglogn")]
	pub scale: String,
	#[arg(long, default_value = "out")]
	pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
	/// sandwich, operators, shape, leak, coupling or all.
	#[arg(long, default_value = "all")]
	pub suite: String,
	/// Comma-separated chip counts, replacing the preset.
	#[arg(long)]
	pub n: Option<String>,
	/// Comma-separated d values.
	#[arg(long)]
	pub d: Option<String>,
	/// Comma-separated leakiness values.
	#[arg(long)]
	pub t: Option<String>,
	/// Semicolon-separated weight sets, each up,right,down,left.
	#[arg(long)]
	pub weights: Option<String>,
	#[arg(long)]
	pub radius: Option<usize>,
	#[arg(long)]
	pub seed: Option<u64>,
	/// Tolerance overrides, e.g. `shape_deviation=2.5,anisotropy=0.04`.
	#[arg(long)]
	pub tol: Option<String>,
	#[arg(long, default_value = "out")]
	pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct RenderArgs {
	/// Heights CSV written by `stabilize`.
	#[arg(long)]
	pub heights: PathBuf,
	/// Odometer CSV; its sites are drawn as visited.
	#[arg(long)]
	pub odometer: Option<PathBuf>,
	/// Firing threshold c·d used for the colour buckets.
	#[arg(long)]
	pub threshold: f64,
	#[arg(long, default_value = "render.ppm")]
	pub name: String,
	#[arg(long, default_value = "out")]
	pub out: PathBuf,
}

fn thread_pool() -> anyhow::Result<rayon::ThreadPool> {
	let mut b = rayon::ThreadPoolBuilder::new();
	if let Ok(v) = std::env::var("LEAKY_THREADS") {
		let n: usize = v.trim().parse().map_err(|_| anyhow::anyhow!("LEAKY_THREADS={v} is not a count"))?;
		b = b.num_threads(n.max(1));
	}
	Ok(b.build()?)
}

fn main() -> ExitCode {
	let argv = match config::expand_args(std::env::args().collect()) {
		Ok(a) => a,
		Err(e) => {
			eprintln!("error: {e:#}");
			return ExitCode::from(2);
		}
	};
	let cli = Cli::parse_from(argv);
	let pool = match thread_pool() {
		Ok(p) => p,
		Err(e) => {
			eprintln!("error: {e:#}");
			return ExitCode::from(2);
		}
	};
	let res = pool.install(|| match &cli.command {
		Command::Stabilize(a) => commands::stabilize(a),
		Command::Krw(a) => commands::krw(a),
		Command::Shape(a) => commands::shape(a),
		Command::Verify(a) => commands::verify(a),
		Command::Render(a) => commands::render(a),
	});
	match res {
		Ok(true) => ExitCode::SUCCESS,
		Ok(false) => ExitCode::FAILURE,
		Err(e) => {
			eprintln!("error: {e:#}");
			ExitCode::from(2)
		}
	}
}
