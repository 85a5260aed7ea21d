use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use nullcert::certify::{CertFamily, FactorMode, SearchConfig, SeqMode};
use nullcert::sequencing::{Subset, SweepConfig, TypeVector, DEFAULT_ORACLE_CAP};
use nullcert_cli::commands::{self, parse_family, parse_group, parse_range, sample_subsets, OracleTarget};
use nullcert_cli::tables::{self, data_dir, load_tail_store, tail_files, write_json, TABLES};
use nullcert_cli::report::canonical;
use nullcert_cli::{RunReport, Verdict};

#[derive(Parser)]
#[command(name = "nullcert", version, about = "Polynomial-method sequenceability certificates for Z_p ⋊ H")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Keep per-subset verdicts in oracle reports.
    #[arg(long, global = true)]
    verbose: bool,
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Record wall time in the report (makes it run-dependent).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// dihedral (d2p), g3p, direct (prod), or a group descriptor .json
    #[arg(long)]
    family: String,
    /// |H| for the direct family.
    #[arg(long)]
    e: Option<usize>,
}

#[derive(Args, Clone)]
struct GroupArgs {
    /// d2p, g3p, direct, or a group descriptor .json
    #[arg(long, visible_alias = "family")]
    group: String,
    #[arg(long)]
    p: Option<u64>,
    /// Cube root of unity for g3p (default: the smaller one).
    #[arg(long)]
    r: Option<u64>,
    #[arg(long)]
    e: Option<usize>,
}

#[derive(Args, Clone)]
struct SearchArgs {
    /// linear or sequencing
    #[arg(long, default_value = "linear")]
    mode: String,
    /// raw, deduped or reduced
    #[arg(long = "factor-mode", default_value = "reduced")]
    factor_mode: String,
    /// Node budget per coefficient extraction.
    #[arg(long)]
    budget: Option<u64>,
    /// Arrangements tried per type.
    #[arg(long = "max-arrangements")]
    max_arrangements: Option<usize>,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        let mut cfg = SearchConfig::default();
        if let Some(b) = self.budget {
            cfg.node_budget = Some(b);
        }
        if let Some(m) = self.max_arrangements {
            cfg.max_arrangements = m;
        }
        cfg
    }

    fn modes(&self) -> Result<(SeqMode, FactorMode)> {
        Ok((SeqMode::parse(&self.mode)?, FactorMode::parse(&self.factor_mode)?))
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Search a certificate for one subset type.
    Certify {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        lambda: String,
        #[command(flatten)]
        search: SearchArgs,
        /// Certificate output file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute certificate files.
    Verify {
        #[arg(long, required = true, num_args = 1..)]
        cert: Vec<PathBuf>,
        /// Do not search a replacement for an invalid certificate.
        #[arg(long = "no-search")]
        no_search: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Check a table data file row by row.
    Reproduce {
        /// Table id, or `all`.
        #[arg(long)]
        table: String,
    },
    /// Certify every type of the given sizes.
    Sweep {
        #[command(flatten)]
        family: FamilyArgs,
        /// Sizes: `12`, `2..10` or `6,7`.
        #[arg(long)]
        k: String,
        #[command(flatten)]
        search: SearchArgs,
        /// Write the certificates as a derived table.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Table id written into the output file.
        #[arg(long)]
        table: Option<String>,
    },
    /// Brute-force ordering search.
    Oracle {
        #[command(flatten)]
        group: GroupArgs,
        /// Elements `x.a`, separated by commas or spaces.
        #[arg(long)]
        subset: Option<String>,
        /// Check every subset of this type.
        #[arg(long)]
        lambda: Option<String>,
        /// Check every type of this size (or sample with --samples).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// any, linear (or a window via --t)
        #[arg(long, default_value = "any")]
        mode: String,
        #[arg(long)]
        t: Option<usize>,
        /// Maximum number of subsets per type.
        #[arg(long)]
        budget: Option<u64>,
        /// Largest subset the oracle accepts.
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        cap: usize,
        /// One subset per orbit of the scaling and shift automorphisms.
        #[arg(long)]
        reduce: bool,
        /// Certificates to cross-reference.
        #[arg(long, num_args = 1..)]
        cert: Vec<PathBuf>,
    },
    /// Search tail certificates for the t-weak pipeline.
    WeakCertify {
        #[command(flatten)]
        family: FamilyArgs,
        /// Window, or a range `2..6`.
        #[arg(long)]
        t: String,
        /// Tail type; all admissible types when omitted.
        #[arg(long = "tail-lambda")]
        tail_lambda: Option<String>,
        #[arg(long)]
        abar: Option<usize>,
        #[arg(long = "factor-mode", default_value = "reduced")]
        factor_mode: String,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        table: Option<String>,
    },
    /// Build t-weak sequencings of concrete subsets.
    WeakRun {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        subset: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tail certificate files (default: derived weak tables in the data directory).
        #[arg(long, num_args = 1..)]
        cert: Vec<PathBuf>,
    },
    /// Whether prime-order results transfer to Z_m ⋊ H.
    TransferCheck {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, num_args = 1..)]
        cert: Vec<PathBuf>,
    },
}

fn lambda_arg(text: &str) -> Result<TypeVector> {
    Ok(TypeVector::parse(text)?)
}

fn family_arg(f: &FamilyArgs) -> Result<CertFamily> {
    parse_family(&f.family, f.e)
}

fn run(cli: &Cli, argv: &[String]) -> Result<Vec<RunReport>> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global()?;
    }
    let one = |r: RunReport| Ok(vec![r]);
    match &cli.cmd {
        Cmd::Certify {
            family,
            lambda,
            search,
            out,
        } => {
            let (mode, fm) = search.modes()?;
            one(commands::certify(
                argv,
                &family_arg(family)?,
                &lambda_arg(lambda)?,
                mode,
                fm,
                &search.config(),
                out.as_deref(),
            )?)
        }
        Cmd::Verify { cert, no_search, search } => one(commands::verify(argv, cert, !no_search, &search.config())?),
        Cmd::Reproduce { table } => {
            let dir = data_dir();
            let ids: Vec<&str> = if table == "all" { TABLES.to_vec() } else { vec![table.as_str()] };
            ids.into_iter().map(|id| tables::reproduce(argv, &dir, id)).collect()
        }
        Cmd::Sweep {
            family,
            k,
            search,
            out,
            table,
        } => {
            let (mode, fm) = search.modes()?;
            one(commands::sweep(
                argv,
                &family_arg(family)?,
                &parse_range(k)?,
                mode,
                fm,
                &search.config(),
                out.as_deref(),
                table.as_deref(),
            )?)
        }
        Cmd::Oracle {
            group,
            subset,
            lambda,
            k,
            samples,
            seed,
            mode,
            t,
            budget,
            cap,
            reduce,
            cert,
        } => {
            let g = parse_group(&group.group, group.p, group.r, group.e)?;
            let target = match (subset, lambda, k, samples) {
                (Some(s), None, None, None) => OracleTarget::Subset(Subset::parse(&g, s)?),
                (None, Some(l), None, None) => OracleTarget::Types(vec![lambda_arg(l)?]),
                (None, None, Some(k), None) => OracleTarget::Types(TypeVector::all(g.h().order(), *k)),
                (None, None, Some(k), Some(n)) => OracleTarget::Sample {
                    k: *k,
                    count: *n,
                    seed: *seed,
                },
                _ => bail!("give exactly one of --subset, --lambda, --k (optionally with --samples)"),
            };
            let mut sweep = SweepConfig {
                cap: *cap,
                reduce: *reduce,
                verbose: cli.verbose,
                ..SweepConfig::default()
            };
            if let Some(b) = budget {
                sweep.budget = *b;
            }
            one(commands::oracle(argv, &g, target, mode, *t, &sweep, cert)?)
        }
        Cmd::WeakCertify {
            family,
            t,
            tail_lambda,
            abar,
            factor_mode,
            budget,
            out,
            table,
        } => {
            let mut cfg = SearchConfig::default();
            if let Some(b) = budget {
                cfg.node_budget = Some(*b);
            }
            let tl = tail_lambda.as_deref().map(lambda_arg).transpose()?;
            one(commands::weak_certify(
                argv,
                &family_arg(family)?,
                &parse_range(t)?,
                tl.as_ref(),
                *abar,
                FactorMode::parse(factor_mode)?,
                &cfg,
                out.as_deref(),
                table.as_deref(),
            )?)
        }
        Cmd::WeakRun {
            group,
            t,
            subset,
            k,
            samples,
            seed,
            cert,
        } => {
            let g = parse_group(&group.group, group.p, group.r, group.e)?;
            let subsets = match (subset, k) {
                (Some(s), None) => vec![Subset::parse(&g, s)?],
                (None, Some(k)) => sample_subsets(&g, *k, samples.unwrap_or(1), *seed)?,
                _ => bail!("give --subset or --k"),
            };
            let files = if cert.is_empty() { tail_files(&data_dir())? } else { cert.clone() };
            let mut report = RunReport::new(argv, "");
            let store = load_tail_store(&files, Some(&CertFamily::from_group(&g)), Some(*t), &mut report)?;
            let mut r = commands::weak_run(argv, &g, *t, &subsets, &store)?;
            r.digests.extend(report.digests);
            one(r)
        }
        Cmd::TransferCheck { m, k, cert } => one(commands::transfer_check(argv, *m, *k, cert)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let start = Instant::now();
    let reports = match run(&cli, &argv) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let mut code = 0;
    let mut values = Vec::new();
    for mut r in reports {
        if cli.timing {
            r.timing_ms = Some(start.elapsed().as_millis() as u64);
        }
        code = code.max(r.exit_code());
        eprintln!("{}: {}", r.descriptor, summary_line(&r));
        for item in r.items.iter().filter(|i| i.verdict.is_failure()) {
            eprintln!("  {:?}: {}", item.verdict, item.id);
        }
        values.push(r.to_json());
    }
    let out = if values.len() == 1 { values.pop().unwrap() } else { serde_json::Value::Array(values) };
    match &cli.report {
        Some(path) => {
            if let Err(e) = write_json(path, &out) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
        }
        None => print!("{}", canonical(&out)),
    }
    ExitCode::from(code as u8)
}

fn summary_line(r: &RunReport) -> String {
    format!(
        "{} verified, {} mismatch, {} incomplete, {} error, {} skipped",
        r.count(Verdict::Verified),
        r.count(Verdict::Mismatch),
        r.count(Verdict::Incomplete),
        r.count(Verdict::Error),
        r.count(Verdict::Skipped)
    )
}
