use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use linunion::charging::{ordering_violations, verify_claims, CurveArrangement};
use linunion::depth::{check_common_point_bound, depth_bounds_from, DiscArrangement};
use linunion::family::{
    gen_common_point_discs, gen_lines_parabolas, gen_random_curves, gen_random_discs, load_family,
    save_family, Family, GeneratorParams, Members,
};
use linunion::geom::Point;
use linunion::graph::{build_graph, corollary_report, graph_stats, theorem1_report, StatsSummary};
use linunion::sampling::{SamplingContext, DEFAULT_TRIALS};
use linunion::verify::{run_suite, SuiteConfig};
use linunion::{Error, Kind, TOOL_NAME, VERSION};

const EXIT_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_GENERATION: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "linunion", version, about = "Depth, edge-count and charging checks for disc and curve families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a family and write it as JSON.
    Generate(GenerateArgs),
    /// Graph statistics, depth profile and bound checks for a family file.
    Analyze(AnalyzeArgs),
    /// Random-sampling experiment on a disc family.
    Sample(SampleArgs),
    /// Red/blue charging certificate for a curve family.
    Charge(ChargeArgs),
    /// Run the acceptance suite on internally generated families.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
enum Generator {
    RandomDiscs,
    CommonPointDiscs,
    LinesParabolas,
    RandomCurves,
}

#[derive(Args, Debug, Serialize)]
struct GenerateArgs {
    generator: Generator,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of lines plus one (lines-parabolas only).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    box_min: f64,
    #[arg(long, default_value_t = 10.0)]
    box_max: f64,
    #[arg(long, default_value_t = 0.5)]
    r_min: f64,
    #[arg(long, default_value_t = 2.0)]
    r_max: f64,
    #[arg(long, default_value_t = 0.01)]
    margin: f64,
    /// Common point (common-point-discs only).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    ox: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    oy: f64,
    /// Crossings of random curves stay within |x| <= this.
    #[arg(long, default_value_t = 50.0)]
    x_window: f64,
    #[arg(long, default_value_t = 100)]
    max_rounds: usize,
    /// Overrides the extent-derived tolerance.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct AnalyzeArgs {
    input: PathBuf,
    /// Union-complexity constant for the edge bound.
    #[arg(long, default_value_t = 6.0)]
    c: f64,
    /// Also write the depth profile as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug)]
enum PArg {
    Auto,
    Value(f64),
}

impl FromStr for PArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(PArg::Auto);
        }
        s.parse::<f64>().map(PArg::Value).map_err(|_| format!("expected a number or `auto`, got {s}"))
    }
}

impl Serialize for PArg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            PArg::Auto => s.serialize_str("auto"),
            PArg::Value(p) => s.serialize_f64(*p),
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct SampleArgs {
    input: PathBuf,
    /// Keep probability in (0, 1), or `auto` for 1/omega.
    #[arg(long, default_value = "auto")]
    p: PArg,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 6.0)]
    c: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug)]
enum KArg {
    All,
    Value(usize),
}

impl FromStr for KArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            return Ok(KArg::All);
        }
        s.parse::<usize>().map(KArg::Value).map_err(|_| format!("expected an integer or `all`, got {s}"))
    }
}

impl Serialize for KArg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            KArg::All => s.serialize_str("all"),
            KArg::Value(k) => s.serialize_u64(*k as u64),
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct ChargeArgs {
    input: PathBuf,
    #[arg(long)]
    k: KArg,
    /// Ledger CSV path; with `--k all` one file per k is written as `<stem>.k<k>.csv`.
    #[arg(long)]
    ledger: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value_t = SuiteConfig::default().seed)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// CLI failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Generation { .. } => EXIT_GENERATION,
            Error::CertificateFailure(_) => EXIT_VIOLATION,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

type CmdResult = Result<u8, Failure>;

fn envelope(command: &str, config: &impl Serialize, seed: Option<u64>, result: Value) -> Value {
    json!({
        "tool": TOOL_NAME,
        "version": VERSION,
        "command": command,
        "config": config,
        "seed": seed,
        "result": result,
    })
}

fn emit(value: &Value, output: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<Family, Failure> {
    load_family(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn generate(args: &GenerateArgs) -> CmdResult {
    let params = GeneratorParams {
        n: args.n,
        seed: args.seed,
        box_min: args.box_min,
        box_max: args.box_max,
        r_min: args.r_min,
        r_max: args.r_max,
        margin: args.margin,
        x_window: args.x_window,
        max_rounds: args.max_rounds,
        eps: args.eps,
        ..GeneratorParams::default()
    };
    let family = match args.generator {
        Generator::RandomDiscs => gen_random_discs(&params)?,
        Generator::CommonPointDiscs => gen_common_point_discs(&params, Point::new(args.ox, args.oy))?,
        Generator::LinesParabolas => {
            let k = args.k.ok_or_else(|| Failure::usage("lines-parabolas requires --k"))?;
            gen_lines_parabolas(args.n, k)?
        }
        Generator::RandomCurves => gen_random_curves(&params)?,
    };
    let bbox = family
        .bounding_box()
        .map(|(lo, hi)| format!("[{lo}, {hi}]"))
        .unwrap_or_else(|| "none".into());
    let summary = format!(
        "generated {} family: n={} eps={} bbox={}",
        family.kind(),
        family.len(),
        family.tol().eps(),
        bbox
    );
    match &args.output {
        Some(path) => {
            save_family(&family, path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            println!("{summary} -> {}", path.display());
        }
        None => {
            print!("{}", family.to_json());
            eprintln!("{summary}");
        }
    }
    Ok(0)
}

fn analyze(args: &AnalyzeArgs) -> CmdResult {
    let family = load(&args.input)?;
    let mut violations: Vec<String> = Vec::new();
    let result = match family.members() {
        Members::Discs(_) => {
            let arr = DiscArrangement::from_family(&family)?;
            let stats = graph_stats(&build_graph(&family)?)?;
            let thm1 = theorem1_report(&stats, args.c);
            let cor = corollary_report(&stats);
            let depth = depth_bounds_from(&arr, Some(stats.omega));
            let common = check_common_point_bound(&family, &arr)?;
            let profile = arr.profile();

            violations.extend(thm1.failures().map(|i| i.to_string()));
            violations.extend(cor.failures().map(|i| i.to_string()));
            if !depth.kedem_pass {
                violations.push(format!(
                    "union complexity {} > 6n-12 = {}",
                    depth.union_complexity, depth.kedem_bound
                ));
            }
            if depth.depth_within_omega == Some(false) {
                violations.push(format!("max depth {} > omega {}", depth.max_depth, stats.omega));
            }
            for row in depth.rows.iter().filter(|r| r.verdict == linunion::depth::Verdict::Fail) {
                violations.push(format!("g(F,{}) = {} > 6ekn = {}", row.k, row.g, row.bound_6ekn));
            }
            for row in common.rows.iter().filter(|r| !r.pass) {
                violations.push(format!("g(F,{}) = {} > 2(k-1)n = {}", row.k, row.g, row.bound));
            }
            if let Some(path) = &args.csv {
                fs::write(path, profile.to_csv())
                    .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            }
            json!({
                "kind": Kind::Discs,
                "label": family.label(),
                "stats": StatsSummary::new(&stats, &thm1, &cor),
                "degeneracy_order": stats.degeneracy_order,
                "theorem1": thm1,
                "corollary": cor,
                "depth_profile": profile,
                "depth_bounds": depth,
                "common_point_bound": common,
            })
        }
        Members::Curves(_) => {
            if args.csv.is_some() {
                return Err(Failure::usage("--csv writes a depth profile and needs a discs family"));
            }
            let arr = CurveArrangement::new(&family)?;
            let mut certificates = Vec::new();
            for k in 2..=family.len() {
                let ledger = arr.ledger(k)?;
                let cert = verify_claims(&ledger, &family)?;
                let ordering = ordering_violations(&ledger, &family)?.len();
                if !cert.pass {
                    violations.push(format!(
                        "charging certificate fails at k = {k} (max red {}, max blue {}, limit {})",
                        cert.max_red, cert.max_blue, cert.per_color_limit
                    ));
                }
                if ordering > 0 {
                    violations.push(format!("{ordering} charges contradict curve ordering at k = {k}"));
                }
                certificates.push(to_value(&cert));
            }
            json!({
                "kind": Kind::Curves,
                "label": family.label(),
                "n": family.len(),
                "crossings": arr.charges().len(),
                "certificates": certificates,
            })
        }
    };
    let pass = violations.is_empty();
    let mut report = envelope("analyze", args, family.seed(), result);
    report["pass"] = json!(pass);
    report["violations"] = json!(violations);
    emit(&report, args.output.as_deref())?;
    for v in &violations {
        eprintln!("violation: {v}");
    }
    Ok(if pass { 0 } else { EXIT_VIOLATION })
}

fn sample(args: &SampleArgs) -> CmdResult {
    let family = load(&args.input)?;
    if family.kind() != Kind::Discs {
        return Err(Failure::usage("sample needs a discs family"));
    }
    if args.trials == 0 {
        return Err(Failure::usage("--trials must be at least 1"));
    }
    let ctx = SamplingContext::new(&family)?;
    let p = match args.p {
        PArg::Auto => ctx.auto_p(),
        PArg::Value(p) => p,
    };
    if !(p > 0.0 && p < 1.0) {
        return Err(Failure::usage(format!(
            "p must lie in (0, 1), got {p}{}",
            if matches!(args.p, PArg::Auto) { " from 1/omega" } else { "" }
        )));
    }
    let report = ctx.run_trials(p, args.trials, args.seed, args.c)?;
    let chain = ctx.chain(args.c);
    let pass = chain.passed() && report.per_trial_violations == 0;
    let mut out = envelope("sample", args, Some(args.seed), json!({ "sample": report, "chain": chain }));
    out["config"]["p_resolved"] = json!(p);
    out["pass"] = json!(pass);
    emit(&out, args.output.as_deref())?;
    if !chain.passed() {
        for f in chain.report.failures() {
            eprintln!("violation: {f}");
        }
    }
    if report.per_trial_violations > 0 {
        eprintln!("violation: {} trials exceed 6n*-12", report.per_trial_violations);
    }
    Ok(if pass { 0 } else { EXIT_VIOLATION })
}

fn charge(args: &ChargeArgs) -> CmdResult {
    let family = load(&args.input)?;
    if family.kind() != Kind::Curves {
        return Err(Failure::usage("charge needs a curves family"));
    }
    let n = family.len();
    let ks: Vec<usize> = match args.k {
        KArg::All => (2..=n).collect(),
        KArg::Value(k) if (2..=n).contains(&k) => vec![k],
        KArg::Value(k) => return Err(Failure::usage(format!("k must lie in 2..={n}, got {k}"))),
    };
    if ks.is_empty() {
        return Err(Failure::usage("charging needs at least two curves"));
    }
    let arr = CurveArrangement::new(&family)?;
    let mut certificates = Vec::new();
    let mut pass = true;
    for &k in &ks {
        let ledger = arr.ledger(k)?;
        let cert = verify_claims(&ledger, &family)?;
        let ordering = ordering_violations(&ledger, &family)?.len();
        pass &= cert.pass && ordering == 0;
        if let Some(path) = &args.ledger {
            let path = if ks.len() == 1 { path.clone() } else { per_k_path(path, k) };
            fs::write(&path, ledger.to_csv()).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        }
        if !cert.pass {
            eprintln!("violation: {}", cert.clone().into_result().err().map(|e| e.to_string()).unwrap_or_default());
        }
        let mut v = to_value(&cert);
        v["ordering_violations"] = json!(ordering);
        certificates.push(v);
    }
    let mut out = envelope("charge", args, family.seed(), json!({ "certificates": certificates }));
    out["pass"] = json!(pass);
    emit(&out, args.output.as_deref())?;
    Ok(if pass { 0 } else { EXIT_VIOLATION })
}

fn per_k_path(path: &Path, k: usize) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("ledger");
    path.with_file_name(format!("{stem}.k{k}.csv"))
}

fn verify(args: &VerifyArgs) -> CmdResult {
    let cfg = SuiteConfig { quick: args.quick, seed: args.seed };
    let results = run_suite(&cfg);
    for r in &results {
        println!("{r}");
    }
    let pass = results.iter().all(|r| r.pass);
    println!("{}", if pass { "all criteria passed" } else { "some criteria FAILED" });
    if let Some(path) = &args.output {
        let mut out = envelope("verify", args, Some(args.seed), to_value(&results));
        out["pass"] = json!(pass);
        emit(&out, Some(path))?;
    }
    Ok(if pass { 0 } else { EXIT_VIOLATION })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Analyze(a) => analyze(a),
        Command::Sample(a) => sample(a),
        Command::Charge(a) => charge(a),
        Command::Verify(a) => verify(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
