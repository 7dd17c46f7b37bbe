//! `wco`: experiments on weighted composition operators.
//!
//! Exit codes: 0 success, 1 invalid input or failed computation,
//! 2 an acceptance check requested with `--check` failed.

mod spec;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use wco_core::blaschke::{exact_frame_bounds, Decomposer};
use wco_core::linalg::PowerConfig;
use wco_core::series::random_polynomial;
use wco_core::spaces::{multiplier_norm_with, seq_norm};
use wco_core::spectra::{
    annulus_probe, growth_probe, predicted_spectrum, radius_sequence, spectrum_report, GrowthKind,
    Shape, DEFAULT_DELTA,
};
use wco_core::{BlaschkeProduct, Complex64, Moebius, SpaceWeight, Wco};

use rand::rngs::StdRng;
use rand::SeedableRng;

/// Radius brackets used by `--check`, relative to the predicted radius.
const BRACKET: (f64, f64) = (0.85, 1.25);

#[derive(Parser, Debug)]
#[command(name = "wco", version, about = "Weighted composition operators on Dirichlet, Hardy and Bergman spaces")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Truncation order N.
    #[arg(long, global = true, default_value_t = 256)]
    order: usize,
    /// dirichlet, hardy or bergman.
    #[arg(long, global = true, default_value = "dirichlet")]
    space: SpaceWeight,
    /// Write JSON here instead of stdout.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Write the CSV projection here.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Seed for random trials.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Evaluate acceptance checks; exit 2 if one fails.
    #[arg(long, global = true)]
    check: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify e^{iθ}(p − z)/(1 − p̄z).
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        /// Half-width of the parabolic band around |p| = cos(θ/2).
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Block decomposition f = Σ g_k B^k.
    Decompose {
        /// Coefficients of f (omit to draw a random polynomial).
        #[arg(long, allow_hyphen_values = true)]
        f: Option<String>,
        /// Degree of the random polynomial.
        #[arg(long, default_value_t = 100)]
        degree: usize,
        /// Zeros of B, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        zeros: String,
        /// Number of blocks (default ⌊N / deg B⌋).
        #[arg(long)]
        blocks: Option<usize>,
    },
    /// Sweep of finite-section multiplier norms.
    Multnorm {
        /// Symbol u (coefficients, quotient, or preset).
        #[arg(long, allow_hyphen_values = true, required_unless_present = "preset")]
        u: Option<String>,
        #[arg(long)]
        preset: Option<String>,
        /// Use T_u C_φ with φ = (1 − z)/2.
        #[arg(long)]
        compose_half: bool,
        #[arg(long, default_value = "64..4096")]
        orders: String,
    },
    /// Predicted spectrum, eigenvalue cloud and radius sequences.
    Spectrum {
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(long, default_value = "1..64")]
        n_list: String,
    },
    /// Gelfand radius sequence of W (and of its inverse when it exists).
    Radius {
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(long, default_value = "1..64")]
        n_list: String,
    },
    /// Growth of sup|φₙ'| along closed-form iterates.
    ProbeGrowth {
        /// parabolic:y, hyperbolic:μ or elliptic:θ.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n_list: Option<String>,
    },
    /// Exploratory comparison of eigenvalue clouds with the predicted annulus.
    ProbeAnnulus {
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(long, default_value = "64,128")]
        orders: String,
        #[arg(long, default_value = "1..32")]
        n_list: String,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
    },
}

enum Failure {
    Invalid(String),
    Check(String),
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Invalid(s)
    }
}

impl From<wco_core::Error> for Failure {
    fn from(e: wco_core::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Check(_) => 2,
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Invalid(msg) => eprintln!("error: {msg}"),
                Failure::Check(msg) => eprintln!("check failed: {msg}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    match &cli.command {
        Command::Classify { p, theta, tol } => classify(g, p, *theta, *tol),
        Command::Decompose {
            f,
            degree,
            zeros,
            blocks,
        } => decompose(g, f.as_deref(), *degree, zeros, *blocks),
        Command::Multnorm {
            u,
            preset,
            compose_half,
            orders,
        } => multnorm(g, u.as_deref().or(preset.as_deref()).unwrap_or_default(), *compose_half, orders),
        Command::Spectrum { h, phi, n_list } => spectrum(g, h, phi, n_list),
        Command::Radius { h, phi, n_list } => radius(g, h, phi, n_list),
        Command::ProbeGrowth { kind, n_list } => probe_growth(g, kind, n_list.as_deref()),
        Command::ProbeAnnulus {
            h,
            phi,
            orders,
            n_list,
            delta,
        } => probe_annulus(g, h, phi, orders, n_list, *delta),
    }
}

fn emit<T: Serialize>(g: &Global, value: &T, csv: Option<String>) -> Outcome {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    text.push('\n');
    match &g.json {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?,
        None => print!("{text}"),
    }
    if let (Some(path), Some(body)) = (&g.csv, csv) {
        fs::write(path, body).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn build_wco(g: &Global, h: &str, phi: &str) -> Result<Wco, Failure> {
    let h = spec::parse_symbol(h, g.order)?;
    let phi = spec::parse_phi(phi)?;
    Ok(Wco::new(h, phi)?)
}

fn counts(s: &str) -> Result<Vec<u64>, Failure> {
    let v = spec::parse_counts(s)?;
    if v.is_empty() || v.contains(&0) {
        return Err(Failure::Invalid(format!("`{s}` must list integers >= 1")));
    }
    Ok(v)
}

#[derive(Serialize)]
struct ClassifyOut {
    p: [f64; 2],
    theta: f64,
    tol: f64,
    kind: wco_core::AutoKind,
    fixed_points: Vec<[f64; 2]>,
    multiplier: wco_core::Multiplier,
    margin: f64,
    near_parabolic: bool,
}

fn classify(g: &Global, p: &str, theta: f64, tol: f64) -> Outcome {
    let p = spec::parse_complex(p)?;
    if !(p.norm() < 1.0) {
        return Err(Failure::Invalid(format!("|p| = {} must be < 1", p.norm())));
    }
    if !theta.is_finite() || !(tol >= 0.0) {
        return Err(Failure::Invalid("theta and tol must be finite, tol >= 0".into()));
    }
    let m = Moebius::disc_automorphism(p, theta)?;
    let c = m.classify_with_tolerance(tol)?;
    let out = ClassifyOut {
        p: pair(p),
        theta,
        tol,
        kind: c.kind,
        fixed_points: c.fixed_points.iter().copied().map(pair).collect(),
        multiplier: c.multiplier,
        margin: c.margin,
        near_parabolic: c.near_parabolic,
    };
    emit(g, &out, None)
}

#[derive(Serialize)]
struct DecomposeOut {
    order: usize,
    space: String,
    seed: Option<u64>,
    zeros: Vec<[f64; 2]>,
    blocks: usize,
    block_norms: Vec<f64>,
    parseval: Parseval,
    residual: f64,
    frame_ratio: f64,
    exact_frame_bounds: Option<[f64; 2]>,
}

#[derive(Serialize)]
struct Parseval {
    norm_sq: f64,
    blocks_sq: f64,
    relative_error: f64,
}

fn decompose(g: &Global, f: Option<&str>, degree: usize, zeros: &str, blocks: Option<usize>) -> Outcome {
    let zeros = spec::parse_list(zeros)?;
    let b = BlaschkeProduct::from_zeros(zeros.clone())?;
    let (f, seed) = match f {
        Some(s) => (spec::parse_symbol(s, g.order)?.truncate(g.order), None),
        None => {
            if degree > g.order {
                return Err(Failure::Invalid(format!("degree {degree} exceeds order {}", g.order)));
            }
            let mut rng = StdRng::seed_from_u64(g.seed);
            (random_polynomial(&mut rng, degree, g.order), Some(g.seed))
        }
    };
    let dec = Decomposer::new(&b, g.order, blocks)?;
    let d = dec.decompose(&f);
    let norm_sq = seq_norm(&f, SpaceWeight::Hardy).powi(2);
    let blocks_sq: f64 = d.block_norms().iter().map(|x| x * x).sum();
    let relative_error = (blocks_sq - norm_sq).abs() / norm_sq;
    let frame_ratio = seq_norm(&f, g.space).powi(2) / d.weighted_energy(g.space);
    let exact = if f.degree() <= 256 {
        exact_frame_bounds(&b, g.space, f.degree()).ok().map(|(lo, hi)| [lo, hi])
    } else {
        None
    };
    let out = DecomposeOut {
        order: g.order,
        space: g.space.to_string(),
        seed,
        zeros: zeros.into_iter().map(pair).collect(),
        blocks: dec.blocks(),
        block_norms: d.block_norms(),
        parseval: Parseval {
            norm_sq,
            blocks_sq,
            relative_error,
        },
        residual: d.residual,
        frame_ratio,
        exact_frame_bounds: exact,
    };
    let mut csv = String::from("k,norm\n");
    for (k, n) in out.block_norms.iter().enumerate() {
        csv.push_str(&format!("{k},{n:.17e}\n"));
    }
    emit(g, &out, Some(csv))?;
    if g.check && !(relative_error < 1e-9) {
        return Err(Failure::Check(format!("Parseval relative error {relative_error:e}")));
    }
    Ok(())
}

#[derive(Serialize)]
struct MultnormRow {
    #[serde(rename = "N")]
    order: usize,
    norm: f64,
    iterations: usize,
    converged: bool,
}

#[derive(Serialize)]
struct MultnormOut {
    symbol: String,
    space: String,
    composite_half: bool,
    rows: Vec<MultnormRow>,
    strictly_increasing: bool,
}

fn multnorm(g: &Global, u: &str, compose_half: bool, orders: &str) -> Outcome {
    let orders = counts(orders)?;
    let top = *orders.iter().max().expect("nonempty") as usize;
    let sym = spec::parse_symbol(u, top)?;
    let cfg = PowerConfig::default();
    let w = if compose_half {
        Some(Wco::new(sym.clone(), spec::parse_phi("half")?)?)
    } else {
        None
    };
    let rows: Vec<MultnormRow> = orders
        .iter()
        .map(|&n| {
            let n = n as usize;
            let r = match &w {
                Some(w) => w.section_norm(g.space, n, cfg),
                None => multiplier_norm_with(&sym, g.space, n, cfg),
            };
            MultnormRow {
                order: n,
                norm: r.value,
                iterations: r.iterations,
                converged: r.converged,
            }
        })
        .collect();
    let strictly_increasing = rows.windows(2).all(|p| p[1].norm > p[0].norm);
    let mut csv = String::from("N,norm\n");
    for r in &rows {
        csv.push_str(&format!("{},{:.17e}\n", r.order, r.norm));
    }
    let out = MultnormOut {
        symbol: u.to_string(),
        space: g.space.to_string(),
        composite_half: compose_half,
        rows,
        strictly_increasing,
    };
    emit(g, &out, Some(csv))
}

fn bracket_ok(value: f64, target: f64) -> bool {
    value >= BRACKET.0 * target && value <= BRACKET.1 * target
}

fn spectrum(g: &Global, h: &str, phi: &str, n_list: &str) -> Outcome {
    let w = build_wco(g, h, phi)?;
    let ns = counts(n_list)?;
    if g.check && !w.is_automorphism() {
        return Err(Failure::Check("φ is not an automorphism".into()));
    }
    let mut report = spectrum_report(&w, g.space, g.order, &ns)?;
    report.metadata.seed = Some(g.seed);
    let csv = report.eigenvalues_csv();
    emit(g, &report, Some(csv))?;
    if g.check {
        let r = report.radius_sequence.last().map(|e| e.1).unwrap_or(0.0);
        let ri = report
            .inverse_radius_sequence
            .as_ref()
            .and_then(|s| s.last())
            .map(|e| e.1);
        match &report.predicted.shape {
            Shape::Circle { radius } => {
                if !bracket_ok(r, *radius) {
                    return Err(Failure::Check(format!("r_n = {r} outside bracket of {radius}")));
                }
                if let Some(ri) = ri {
                    if !bracket_ok(ri, 1.0 / radius) {
                        return Err(Failure::Check(format!(
                            "inverse r_n = {ri} outside bracket of {}",
                            1.0 / radius
                        )));
                    }
                }
            }
            Shape::Annulus { inner, outer } => {
                if r > BRACKET.1 * outer || ri.is_some_and(|ri| ri > BRACKET.1 / inner) {
                    return Err(Failure::Check("radius sequence leaves the annulus bracket".into()));
                }
            }
            Shape::RootSet { .. } | Shape::PointSet { .. } => {
                let worst = report.max_distance();
                if !(worst <= 1e-6) {
                    return Err(Failure::Check(format!("eigenvalue at distance {worst:e} from the predicted set")));
                }
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct RadiusOut {
    space: String,
    radius_sequence: wco_core::RadiusSequence,
    inverse_radius_sequence: Option<wco_core::RadiusSequence>,
    predicted: Option<wco_core::SpectrumModel>,
}

fn radius(g: &Global, h: &str, phi: &str, n_list: &str) -> Outcome {
    let w = build_wco(g, h, phi)?;
    let ns = counts(n_list)?;
    let seq = radius_sequence(&w, g.space, g.order, &ns)?;
    let inv = match w.formal_inverse(g.order) {
        Ok(v) => Some(radius_sequence(&v, g.space, g.order, &ns)?),
        Err(_) => None,
    };
    let mut csv = String::from("n,r,r_inverse\n");
    for (k, (n, r)) in seq.entries.iter().enumerate() {
        let ri = inv
            .as_ref()
            .map(|s| format!("{:.17e}", s.entries[k].1))
            .unwrap_or_default();
        csv.push_str(&format!("{n},{r:.17e},{ri}\n"));
    }
    let out = RadiusOut {
        space: g.space.to_string(),
        radius_sequence: seq,
        inverse_radius_sequence: inv,
        predicted: predicted_spectrum(&w).ok(),
    };
    emit(g, &out, Some(csv))
}

fn probe_growth(g: &Global, kind: &str, n_list: Option<&str>) -> Outcome {
    let (name, arg) = kind
        .split_once(':')
        .ok_or_else(|| format!("expected kind:parameter, got `{kind}`"))?;
    let x = spec::parse_real(arg)?;
    let (kind, default) = match name {
        "parabolic" => (GrowthKind::Parabolic { y: x }, "16..4096"),
        "hyperbolic" => (GrowthKind::Hyperbolic { mu: x }, "1..=30"),
        "elliptic" => (GrowthKind::Elliptic { theta: x }, "1..=30"),
        _ => return Err(Failure::Invalid(format!("unknown growth kind `{name}`"))),
    };
    let ns = counts(n_list.unwrap_or(default))?;
    let table = growth_probe(kind, &ns)?;
    let mut csv = String::from("n,sup,normalized\n");
    for r in &table.rows {
        csv.push_str(&format!("{},{:.17e},{:.17e}\n", r.n, r.sup, r.normalized));
    }
    emit(g, &table, Some(csv))?;
    if g.check && !(table.spread < 4.0) {
        return Err(Failure::Check(format!("normalized spread {} >= 4", table.spread)));
    }
    Ok(())
}

fn probe_annulus(g: &Global, h: &str, phi: &str, orders: &str, n_list: &str, delta: f64) -> Outcome {
    let w = build_wco(g, h, phi)?;
    let orders: Vec<usize> = counts(orders)?.into_iter().map(|n| n as usize).collect();
    let ns = counts(n_list)?;
    let probe = annulus_probe(&w, g.space, &orders, &ns, delta)?;
    let mut csv = String::from("N,lo,hi,count\n");
    for e in &probe.entries {
        for b in &e.histogram {
            csv.push_str(&format!("{},{:.17e},{:.17e},{}\n", e.order, b.lo, b.hi, b.count));
        }
    }
    emit(g, &probe, Some(csv))
}

#[cfg(test)]
mod tests {
    use std::path::PathBuf;

    use serde_json::Value;

    use super::*;

    struct Scratch(PathBuf);

    impl Scratch {
        fn new(tag: &str) -> Self {
            let dir = std::env::temp_dir().join(format!("wco-{tag}-{}", std::process::id()));
            fs::create_dir_all(&dir).unwrap();
            Scratch(dir)
        }

        fn path(&self, name: &str) -> String {
            self.0.join(name).to_string_lossy().into_owned()
        }
    }

    impl Drop for Scratch {
        fn drop(&mut self) {
            let _ = fs::remove_dir_all(&self.0);
        }
    }

    fn exec(args: &[&str]) -> Result<(), u8> {
        let cli = Cli::try_parse_from(std::iter::once("wco").chain(args.iter().copied())).map_err(|_| 1u8)?;
        run(&cli).map_err(|f| f.code())
    }

    fn exec_json(scratch: &Scratch, args: &[&str]) -> Value {
        let out = scratch.path("out.json");
        let mut full = vec!["--json", &out];
        full.extend_from_slice(args);
        exec(&full).expect("command succeeds");
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap()
    }

    #[test]
    fn classify_reports_kind_and_fixed_points() {
        let s = Scratch::new("classify");
        let v = exec_json(&s, &["classify", "--p", "0.5", "--theta", "0.3"]);
        assert_eq!(v["kind"], "elliptic");
        assert_eq!(v["fixed_points"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn malformed_input_is_code_one() {
        assert_eq!(exec(&["classify", "--p", "abc", "--theta", "0"]), Err(1));
        assert_eq!(exec(&["spectrum", "--h", "2,1", "--phi", "spiral:1"]), Err(1));
        assert_eq!(exec(&["--space", "sobolev", "classify", "--p", "0", "--theta", "0"]), Err(1));
    }

    #[test]
    fn failed_check_is_code_two() {
        assert_eq!(exec(&["--order", "64", "--check", "spectrum", "--h", "2,1", "--phi", "half"]), Err(2));
    }

    #[test]
    fn spectrum_report_has_schema_fields() {
        let s = Scratch::new("spectrum");
        let v = exec_json(
            &s,
            &["--order", "64", "--check", "spectrum", "--h", "2,1", "--phi", "rotation-turns:1/3", "--n-list", "1..16"],
        );
        for key in ["predicted", "eigenvalues", "radius_sequence", "metadata"] {
            assert!(!v[key].is_null(), "missing {key}");
        }
        assert_eq!(v["predicted"]["shape"], "rootset");
        assert_eq!(v["metadata"]["N"], 64);
    }

    #[test]
    fn decompose_check_passes_and_writes_csv() {
        let s = Scratch::new("decompose");
        let csv = s.path("blocks.csv");
        let v = exec_json(
            &s,
            &["--order", "128", "--check", "--csv", &csv, "decompose", "--zeros", "0,0.5", "--degree", "40"],
        );
        assert!(v["parseval"]["relative_error"].as_f64().unwrap() < 1e-9);
        assert!(fs::read_to_string(&csv).unwrap().lines().count() > 1);
    }
}
