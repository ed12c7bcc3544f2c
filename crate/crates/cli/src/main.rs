use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kptrop_core::combinatorics::{hypercube, permutohedron, simplex, tamari, Poset};
use kptrop_core::evolution::{classify_evolution, refine_with_levels, table_conditions, tree_at_event};
use kptrop_core::exact::{fmt_rational, parse_decimal, parse_rational, rat};
use kptrop_core::general::{build_tau, p_limit, parallel_events, parallel_sweep, parallel_tau, WedgeSpec};
use kptrop_core::model::load_config_json;
use kptrop_core::render::{
    extract_boundaries, parse_resolution, svg_exact, svg_field, time_label, tree_dot, tropical_field, BBox, FieldSource, Style,
};
use kptrop_core::testkit;
use kptrop_core::{Error, Rational, SolitonConfig};

#[derive(Parser)]
#[command(name = "kptrop", version, about = "Tropical classification of KP-II line soliton evolutions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TextFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ImageFormat {
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
enum PosetFamily {
    Simplex,
    Hypercube,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    All,
    Visibility,
    Braid,
    Tables,
}

#[derive(Subcommand)]
enum Command {
    /// Visible critical times, trees and the Tamari chain of an evolution.
    Classify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        refine_levels: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: TextFormat,
    },
    /// One SVG frame of the dominant-phase field per time.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        /// `t=-10,-5.7,0` or `-10,-5.7,0`.
        #[arg(long, allow_hyphen_values = true)]
        times: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "svg")]
        format: ImageFormat,
        #[arg(long, default_value = "-20,20,-20,20", allow_hyphen_values = true)]
        bbox: String,
        #[arg(long, default_value = "160x160")]
        res: String,
    },
    /// Dominant-phase field (or exact `u` with `--exact`) at one time.
    Plot {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        t4: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        t5: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        bbox: String,
        #[arg(long, default_value = "200x200")]
        res: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        exact: bool,
    },
    Tamari {
        #[arg(long)]
        r: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: GraphFormat,
        #[arg(long)]
        chains: bool,
        #[arg(long)]
        classes: bool,
    },
    Permutohedron {
        #[arg(long)]
        r: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: GraphFormat,
        #[arg(long)]
        chains: bool,
    },
    Posets {
        #[arg(long, value_enum)]
        kind: PosetFamily,
        #[arg(long = "M")]
        m: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: GraphFormat,
    },
    /// Wedge-product τ-functions.
    General {
        /// `{"factors": [[{"index":1,"sign":1}, …], …]}`.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Momenta and constants for `--spec`.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, requires_all = ["spec", "config"])]
        plot: bool,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        t: String,
        #[arg(long, allow_hyphen_values = true, default_value = "-20,20,-20,20")]
        bbox: String,
        #[arg(long, default_value = "200x200")]
        res: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Parallel-soliton event times for `q, a, b, c`.
        #[arg(long)]
        events: bool,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        q: String,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        a: String,
        #[arg(long, allow_hyphen_values = true, default_value = "1/2")]
        b: String,
        /// Four constants, comma separated.
        #[arg(long, allow_hyphen_values = true, default_value = "0,0,0,0")]
        c: String,
        /// Merge `p_i` and `p_{i+1}`.
        #[arg(long, requires_all = ["spec", "config"])]
        limit: Option<usize>,
    },
    /// Randomized oracle suites.
    Check {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        cases: usize,
    },
}

enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Invalid(_) | Error::Degenerate(_) => 1,
                Error::Inconsistency(_) => 2,
                Error::ResourceGuard(_) => 3,
            })
        }
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> std::result::Result<SolitonConfig, Failure> {
    Ok(load_config_json(&read(path)?)?)
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn parse_times(text: &str) -> kptrop_core::Result<Vec<Rational>> {
    let body = text.trim().strip_prefix("t=").unwrap_or(text.trim());
    body.split(',').filter(|s| !s.trim().is_empty() && s.trim() != "…").map(|s| parse_decimal(s.trim())).collect()
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Classify { config, refine_levels, format } => classify(&load(&config)?, refine_levels, format),
        Command::Evolve { config, times, out, format: ImageFormat::Svg, bbox, res } => {
            let cfg = load(&config)?;
            let times = parse_times(&times)?;
            let bbox = BBox::parse(&bbox)?;
            let (nx, ny) = parse_resolution(&res)?;
            for (k, t) in times.iter().enumerate() {
                let grid = tropical_field(FieldSource::Simple(&cfg), &bbox, nx, ny, t)?;
                let svg = svg_field(&grid, &extract_boundaries(&grid), &Style::default(), &format!("t = {}", time_label(t)));
                let path = out.join(format!("frame_{k:02}.svg"));
                write(&path, &svg)?;
                println!("{}", path.display());
                match tree_at_event(&cfg.with_time(3, t.clone())?) {
                    Ok(tree) => write(&out.join(format!("tree_{k:02}.dot")), &tree_dot(&tree, &format!("t = {}", time_label(t))))?,
                    Err(Error::Degenerate(_)) => {}
                    Err(e) => return Err(e.into()),
                }
            }
            Ok(())
        }
        Command::Plot { config, t, t4, t5, bbox, res, out, exact } => {
            let mut cfg = load(&config)?;
            if let Some(v) = t5 {
                cfg = cfg.with_time(5, parse_decimal(&v)?)?;
            }
            if let Some(v) = t4 {
                cfg = cfg.with_time(4, parse_decimal(&v)?)?;
            }
            let t = parse_decimal(&t)?;
            let bbox = BBox::parse(&bbox)?;
            let (nx, ny) = parse_resolution(&res)?;
            let svg = if exact {
                svg_exact(FieldSource::Simple(&cfg), &bbox, nx, ny, &t, &Style::default())?
            } else {
                let grid = tropical_field(FieldSource::Simple(&cfg), &bbox, nx, ny, &t)?;
                svg_field(&grid, &extract_boundaries(&grid), &Style::default(), &format!("t = {}", time_label(&t)))
            };
            write(&out, &svg)
        }
        Command::Tamari { r, format, chains, classes } => {
            let poset = tamari(r)?;
            emit_poset(&poset, format, chains, classes)
        }
        Command::Permutohedron { r, format, chains } => {
            let poset = permutohedron(r)?;
            emit_poset(&poset, format, chains, false)
        }
        Command::Posets { kind, m, format } => match kind {
            PosetFamily::Simplex => emit_poset(&simplex(m)?, format, false, false),
            PosetFamily::Hypercube => emit_poset(&hypercube(m)?, format, false, false),
        },
        Command::General { spec, config, plot, t, bbox, res, out, events, q, a, b, c, limit } => {
            if events {
                let (q, a, b) = (parse_rational(&q)?, parse_rational(&a)?, parse_rational(&b)?);
                let c = c.split(',').map(|s| parse_rational(s.trim())).collect::<kptrop_core::Result<Vec<_>>>()?;
                let ev = parallel_events(&q, &a, &b, &c)?;
                let tau = parallel_tau(&q, &a, &b, &c)?;
                let lo = ev.t_minus.to_f64().floor() as i64 - 1;
                let hi = ev.t_plus.to_f64().ceil() as i64 + 1;
                let probe: Vec<Rational> = (lo..=hi).map(rat).collect();
                let sweep: Vec<Value> = parallel_sweep(&tau, &probe)?
                    .into_iter()
                    .map(|(t, lines)| {
                        let names: Vec<String> = lines.iter().map(|(x, y)| format!("{x}|{y}")).collect();
                        json!({"t": fmt_rational(&t), "visible": names.len(), "lines": names})
                    })
                    .collect();
                print_json(&json!({"events": to_value(&ev), "sweep": sweep}));
                return Ok(());
            }
            let (Some(spec), Some(config)) = (spec, config) else {
                return Err(Error::Invalid("general needs --events, or --spec and --config".into()).into());
            };
            let spec = WedgeSpec::from_json(&read(&spec)?)?;
            let cfg = load(&config)?;
            let tau = build_tau(&cfg, &spec)?;
            if plot {
                let out = out.ok_or_else(|| Error::Invalid("--plot needs --out".into()))?;
                let t = parse_decimal(&t)?;
                let bbox = BBox::parse(&bbox)?;
                let (nx, ny) = parse_resolution(&res)?;
                let grid = tropical_field(FieldSource::General(&tau), &bbox, nx, ny, &t)?;
                let svg = svg_field(&grid, &extract_boundaries(&grid), &Style::default(), &format!("t = {}", time_label(&t)));
                return write(&out, &svg);
            }
            if let Some(i) = limit {
                print_json(&to_value(&p_limit(&tau, i)?));
                return Ok(());
            }
            print_json(&to_value(&tau));
            Ok(())
        }
        Command::Check { suite, seed, cases } => check(suite, seed, cases),
    }
}

fn classify(cfg: &SolitonConfig, refine: bool, format: TextFormat) -> Outcome {
    let chain = classify_evolution(cfg)?;
    let refined = if refine { Some(refine_with_levels(cfg, &chain)?) } else { None };
    let table = if cfg.m() == 5 { Some(table_conditions(cfg)?) } else { None };
    match format {
        TextFormat::Json => {
            let mut v = json!({"evolution": to_value(&chain), "word": chain.word().to_string()});
            if let Some(r) = &refined {
                v["refined"] = to_value(r);
            }
            if let Some(t) = &table {
                v["table"] = to_value(t);
            }
            print_json(&v);
        }
        TextFormat::Text => {
            println!("M = {}", chain.m);
            println!("initial {}", chain.initial.y_code);
            for step in &chain.steps {
                let names: Vec<String> = step.events.iter().map(|e| format!("t{e}")).collect();
                let flag = if step.is_degenerate() { "  (simultaneous)" } else { "" };
                println!("{:>12}  {:<12} a{:?}  -> {}{flag}", fmt_rational(&step.time), names.join(","), step.sites, step.tree.y_code);
            }
            println!("word {}", chain.word());
            if let Some(t) = chain.table_type {
                println!("type {t}");
            }
            if let Some(t) = &table {
                println!("lambda {}  mu {}  region {:?}  t4-rows {:?}", fmt_rational(&t.lambda), fmt_rational(&t.mu), t.region, t.t4_regions);
            }
            if let Some(r) = &refined {
                println!("levels {}", r.initial);
                for ev in &r.events {
                    println!("{:>12}  {:?}  -> {}", fmt_rational(&ev.time), ev.kind, ev.level_code);
                }
                if r.degenerate {
                    println!("(level crossings coincide)");
                }
            }
        }
    }
    Ok(())
}

trait PosetOut {
    fn dot(&self) -> String;
    fn json(&self) -> Value;
    fn chain_words(&self) -> kptrop_core::Result<Vec<String>>;
    fn class_list(&self) -> kptrop_core::Result<Vec<Vec<String>>>;
}

const CHAIN_LIMIT: usize = 100_000;

impl<N: std::fmt::Display + Clone + Ord> PosetOut for Poset<N> {
    fn dot(&self) -> String {
        self.to_dot()
    }

    fn json(&self) -> Value {
        self.to_json()
    }

    fn chain_words(&self) -> kptrop_core::Result<Vec<String>> {
        self.maximal_chains(CHAIN_LIMIT)?.iter().map(|c| Ok(self.chain_labels(c).join(" "))).collect()
    }

    fn class_list(&self) -> kptrop_core::Result<Vec<Vec<String>>> {
        let chains = self.maximal_chains(CHAIN_LIMIT)?;
        let classes = self.classes_of(&chains)?;
        Ok(classes
            .into_iter()
            .map(|members| members.into_iter().map(|k| self.chain_labels(&chains[k]).join(" ")).collect())
            .collect())
    }
}

fn emit_poset(poset: &dyn PosetOut, format: GraphFormat, chains: bool, classes: bool) -> Outcome {
    match format {
        GraphFormat::Json => {
            let mut v = poset.json();
            if chains {
                v["chains"] = json!(poset.chain_words()?);
            }
            if classes {
                v["classes"] = json!(poset.class_list()?);
            }
            print_json(&v);
        }
        GraphFormat::Dot => {
            print!("{}", poset.dot());
            if chains {
                for w in poset.chain_words()? {
                    println!("// chain {w}");
                }
            }
            if classes {
                for (k, class) in poset.class_list()?.iter().enumerate() {
                    println!("// class {}: {}", k + 1, class.join(" | "));
                }
            }
        }
    }
    Ok(())
}

fn check(suite: Suite, seed: u64, cases: usize) -> Outcome {
    let mut failed = false;
    if matches!(suite, Suite::All | Suite::Visibility) {
        let mut rng = testkit::rng(seed);
        let (mut checks, mut bad) = (0, Vec::new());
        for m in 4..=6 {
            for _ in 0..cases {
                let cfg = testkit::random_config(&mut rng, m);
                let sweep = testkit::visibility_sweep(&cfg)?;
                checks += sweep.point_checks;
                bad.extend(sweep.disagreements);
            }
        }
        println!("visibility: {} configs, {checks} point checks, {} disagreements", 3 * cases, bad.len());
        for b in &bad {
            println!("  {b}");
        }
        failed |= !bad.is_empty();
    }
    if matches!(suite, Suite::All | Suite::Braid) {
        let n = testkit::braid_sweep(7)?;
        println!("braid: {n} instances, all agree");
    }
    if matches!(suite, Suite::All | Suite::Tables) {
        let sweep = testkit::table_sweep(&mut testkit::rng(seed), cases.max(1))?;
        println!(
            "tables: {} samples, {} generic, per row {:?}, {} mismatches",
            sweep.samples,
            sweep.generic,
            &sweep.per_region[1..],
            sweep.mismatches.len()
        );
        for m in &sweep.mismatches {
            println!("  {m}");
        }
        failed |= !sweep.mismatches.is_empty();
    }
    if failed {
        return Err(Error::Inconsistency("oracle disagreement".into()).into());
    }
    Ok(())
}
