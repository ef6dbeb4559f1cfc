use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use hfcanon::io::{self, Instance, Kind, DEFAULT_GROUP_CAP};
use hfcanon::oracle::{brute_aut, brute_canonical_labeling, OracleBudget};
use hfcanon::{Canonizer, Error, Perm, PermutationGroup};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "hfcanon", version, about = "Canonical forms and isomorphism tests for hypergraphs, codes, groups and finite set structures")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Canonize one input and print a JSON report.
    Canon {
        kind: KindArg,
        /// Input file, or `-` for stdin.
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Emit::All)]
        emit: Emit,
        /// Use the brute-force reference instead of the recursive algorithm.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        threads: Option<usize>,
        /// Largest group enumerated for `group` inputs.
        #[arg(long, default_value_t = DEFAULT_GROUP_CAP)]
        group_cap: usize,
    },
    /// Decide isomorphism by comparing canonical encodings.
    Iso {
        kind: KindArg,
        file_a: PathBuf,
        file_b: PathBuf,
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_GROUP_CAP)]
        group_cap: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Hyper,
    Graph,
    Code,
    Group,
    Object,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::Hyper => Kind::Hyper,
            KindArg::Graph => Kind::Graph,
            KindArg::Code => Kind::Code,
            KindArg::Group => Kind::Group,
            KindArg::Object => Kind::Object,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Encoding,
    Labeling,
    Aut,
    All,
}

#[derive(Serialize)]
struct RunReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    encoding: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labeling: Option<BTreeMap<String, u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    aut_generators: Option<Vec<BTreeMap<String, String>>>,
    /// Decimal string, since the order can exceed any fixed-width integer.
    #[serde(skip_serializing_if = "Option::is_none")]
    aut_order: Option<String>,
    wall_time_ms: f64,
}

#[derive(Serialize)]
struct IsoReport {
    verdict: &'static str,
    encoding_a: String,
    encoding_b: String,
    wall_time_ms: f64,
}

struct Outcome {
    encoding: Vec<u8>,
    labeling: Perm,
    aut: PermutationGroup,
}

struct Settings {
    oracle: bool,
    group_cap: usize,
    canonizer: Canonizer,
}

fn read(path: &Path) -> Result<String, Error> {
    let r = if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin())
    } else {
        std::fs::read_to_string(path)
    };
    r.map_err(|e| Error::Invalid(format!("{}: {}", path.display(), e)))
}

fn run(inst: &Instance, s: &Settings) -> Result<Outcome, Error> {
    let obj = inst.to_object(s.group_cap)?;
    if s.oracle {
        let budget = OracleBudget::default();
        let (labeling, form) = brute_canonical_labeling(&obj, &budget)?;
        let aut = brute_aut(&obj, &budget)?;
        return Ok(Outcome { encoding: form.encode()?, labeling, aut });
    }
    let coset = inst.canonize(&s.canonizer, s.group_cap)?;
    let labeling = coset.rep().clone();
    let encoding = obj.image(&labeling)?.encode()?;
    Ok(Outcome { encoding, labeling, aut: coset.group().clone() })
}

fn settings(oracle: bool, threads: Option<usize>, group_cap: usize) -> Result<Settings, Error> {
    let parallel = threads.is_some_and(|t| t > 1);
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global()
            .map_err(|e| Error::Invalid(e.to_string()))?;
    }
    Ok(Settings { oracle, group_cap, canonizer: Canonizer::parallel(parallel) })
}

fn report(inst: &Instance, out: &Outcome, emit: Emit, started: Instant) -> RunReport {
    let names = inst.names();
    let want = |e: Emit| emit == e || emit == Emit::All;
    let labeling = want(Emit::Labeling)
        .then(|| names.iter().enumerate().map(|(v, s)| (s.clone(), out.labeling.apply(v as u32) + 1)).collect());
    let aut_generators = want(Emit::Aut).then(|| {
        out.aut
            .canonical_generators()
            .iter()
            .map(|g| {
                (0..names.len() as u32)
                    .filter(|&v| g.apply(v) != v)
                    .map(|v| (names[v as usize].clone(), names[g.apply(v) as usize].clone()))
                    .collect()
            })
            .collect()
    });
    RunReport {
        encoding: want(Emit::Encoding).then(|| hex::encode(&out.encoding)),
        labeling,
        aut_generators,
        aut_order: want(Emit::Aut).then(|| out.aut.order().to_string()),
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    }
}

fn canon(kind: Kind, file: &Path, emit: Emit, s: &Settings) -> Result<ExitCode, Error> {
    let started = Instant::now();
    let inst = io::parse(kind, &read(file)?)?;
    let out = run(&inst, s)?;
    println!("{}", serde_json::to_string_pretty(&report(&inst, &out, emit, started)).unwrap());
    Ok(ExitCode::SUCCESS)
}

fn iso(kind: Kind, a: &Path, b: &Path, s: &Settings) -> Result<ExitCode, Error> {
    let started = Instant::now();
    let ia = io::parse(kind, &read(a)?)?;
    let ib = io::parse(kind, &read(b)?)?;
    let ea = run(&ia, s)?.encoding;
    let eb = run(&ib, s)?.encoding;
    let same = ea == eb;
    let rep = IsoReport {
        verdict: if same { "isomorphic" } else { "non-isomorphic" },
        encoding_a: hex::encode(ea),
        encoding_b: hex::encode(eb),
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    println!("{}", serde_json::to_string_pretty(&rep).unwrap());
    Ok(if same { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Canon { kind, file, emit, oracle, threads, group_cap } => {
            settings(oracle, threads, group_cap).and_then(|s| canon(kind.into(), &file, emit, &s))
        }
        Cmd::Iso { kind, file_a, file_b, oracle, threads, group_cap } => {
            settings(oracle, threads, group_cap).and_then(|s| iso(kind.into(), &file_a, &file_b, &s))
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hfcanon: {}", e);
            match e {
                Error::BudgetExceeded(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
