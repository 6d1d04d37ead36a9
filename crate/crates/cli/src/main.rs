mod args;

use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};
use combx_core::enumerate::avoiding_extensions;
use combx_core::formulas::FormulaRegistry;
use combx_core::gentree::{
    count_lattice_paths, lattice_profiles, succession_profiles, LevelProfile,
};
use combx_core::series::gf_231_alpha_t2;
use combx_core::{CombSpec, CountQuery, EngineRegistry, Family, PatternSet};
use combx_sequences::{
    build_table, render, Axis, Cache, Lookup, OeisClient, SequenceKey, SequenceRecord,
};
use serde_json::json;

use args::{
    Cli, CombArgs, Command, CountArgs, EnumerateArgs, GentreeArgs, Gf231Args, OeisArgs, PathsArgs,
    RegistryArgs, SequenceArgs, TableArgs, Vary, VerifyArgs,
};

/// Reports a bad flag combination the way clap reports parse errors, exiting with status 2.
fn usage(kind: ErrorKind, msg: impl std::fmt::Display) -> ! {
    Cli::command().error(kind, msg).exit()
}

fn patterns(avoid: &[combx_core::Permutation]) -> PatternSet {
    PatternSet::new(avoid.to_vec()).unwrap_or_else(|e| usage(ErrorKind::ValueValidation, e))
}

fn comb(args: &CombArgs) -> CombSpec {
    let spec = match (args.family, args.n, args.s, args.t) {
        (family, None, Some(s), Some(t)) => CombSpec::even(family, s, t),
        (Family::Alpha, Some(n), Some(s), None) => CombSpec::uneven_alpha(s, n),
        (Family::Beta, Some(n), None, Some(t)) => CombSpec::uneven_beta(t, n),
        (_, None, _, _) => usage(
            ErrorKind::MissingRequiredArgument,
            "both --s and --t are required",
        ),
        (Family::Alpha, Some(_), _, _) => usage(
            ErrorKind::ArgumentConflict,
            "an uneven alpha comb takes --n and --s only",
        ),
        (Family::Beta, Some(_), _, _) => usage(
            ErrorKind::ArgumentConflict,
            "an uneven beta comb takes --n and --t only",
        ),
    };
    spec.unwrap_or_else(|e| usage(ErrorKind::ValueValidation, e))
}

fn sequence_key(args: &SequenceArgs) -> SequenceKey {
    let axis = match args.vary {
        Vary::S => Axis::VaryS { t: args.fixed },
        Vary::T => Axis::VaryT { s: args.fixed },
    };
    SequenceKey::new(args.family, patterns(&args.avoid), axis, args.range)
        .unwrap_or_else(|e| usage(ErrorKind::ValueValidation, e))
}

fn count(args: &CountArgs, out: &mut impl Write) -> Result<ExitCode> {
    let spec = comb(&args.comb);
    let ps = patterns(&args.comb.avoid);
    let engines = EngineRegistry::standard(args.brute_limit);
    let query = CountQuery::new(spec, ps.clone());
    let method = match args.method {
        combx_sequences::MethodChoice::Auto => None,
        combx_sequences::MethodChoice::Exact(m) => Some(m),
    };
    let counted = engines.count(&query, method)?;
    if args.json {
        let v = json!({
            "comb": spec.to_string(),
            "family": spec.family(),
            "shape": spec.shape(),
            "patterns": ps,
            "count": counted.value.to_string(),
            "method": counted.method,
        });
        writeln!(out, "{v}")?;
    } else {
        writeln!(out, "{}", counted.value)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn enumerate(args: &EnumerateArgs, out: &mut impl Write) -> Result<ExitCode> {
    let spec = comb(&args.comb);
    let ps = patterns(&args.comb.avoid);
    let poset = spec.build();
    let iter = avoiding_extensions(&poset, &ps)?;
    for v in iter.take(args.limit.unwrap_or(usize::MAX)) {
        writeln!(out, "{}", v.to_spaced())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cached_table(key: &SequenceKey, args: &SequenceArgs, use_cache: bool) -> Result<SequenceRecord> {
    let cache = if use_cache {
        Cache::from_env()
            .map_err(|e| tracing::warn!("cache disabled: {e}"))
            .ok()
    } else {
        None
    };
    if let Some(hit) = cache.as_ref().and_then(|c| c.get(key, args.method)) {
        tracing::debug!(key = %key, "cache hit");
        return Ok(hit);
    }
    let record = build_table(key, args.method).with_context(|| format!("building {key}"))?;
    if let Some(c) = &cache {
        if let Err(e) = c.put(&record) {
            tracing::warn!("could not write cache: {e}");
        }
    }
    Ok(record)
}

fn table(args: &TableArgs, out: &mut impl Write) -> Result<ExitCode> {
    let key = sequence_key(&args.seq);
    let record = cached_table(&key, &args.seq, !args.no_cache)?;
    write!(out, "{}", render(&[record], args.format))?;
    Ok(ExitCode::SUCCESS)
}

fn verify(args: &VerifyArgs, out: &mut impl Write) -> Result<ExitCode> {
    let report = combx_sequences::verify_all(args.max_n);
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    } else {
        for line in &report.lines {
            let notable = !matches!(
                line.outcome,
                combx_sequences::Outcome::Pass | combx_sequences::Outcome::Skipped
            );
            if args.verbose || notable {
                writeln!(out, "{line}")?;
            }
        }
        writeln!(out, "{}", report.summary())?;
    }
    Ok(if report.is_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn profile_json(p: &LevelProfile) -> serde_json::Value {
    let counts: serde_json::Map<String, serde_json::Value> = p
        .counts
        .iter()
        .map(|(l, c)| (l.to_string(), json!(c.to_string())))
        .collect();
    json!({ "level": p.level, "total": p.total().to_string(), "counts": counts })
}

fn gentree(args: &GentreeArgs, out: &mut impl Write) -> Result<ExitCode> {
    let succession = succession_profiles(args.t, args.levels)?;
    if args.compare {
        let lattice = lattice_profiles(args.t, args.levels)?;
        let mut same = true;
        for (a, b) in succession.iter().zip(&lattice) {
            let ok = a == b;
            same &= ok;
            writeln!(
                out,
                "{} {} {}",
                a.level,
                if ok { "ok" } else { "MISMATCH" },
                a
            )?;
            if !ok {
                writeln!(out, "  lattice: {b}")?;
            }
        }
        return Ok(if same {
            ExitCode::SUCCESS
        } else {
            ExitCode::FAILURE
        });
    }
    let profiles = if args.lattice {
        lattice_profiles(args.t, args.levels)?
    } else {
        succession
    };
    if args.json {
        let v: Vec<_> = profiles.iter().map(profile_json).collect();
        writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
    } else {
        for p in &profiles {
            writeln!(out, "{p}")?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn paths(args: &PathsArgs, out: &mut impl Write) -> Result<ExitCode> {
    writeln!(out, "{}", count_lattice_paths(args.t, args.s))?;
    Ok(ExitCode::SUCCESS)
}

fn gf231(args: &Gf231Args, out: &mut impl Write) -> Result<ExitCode> {
    let Some(coeffs) = gf_231_alpha_t2(args.terms as usize).count_coeffs() else {
        bail!("series has a non-integral coefficient");
    };
    let coeffs: Vec<String> = coeffs.iter().map(ToString::to_string).collect();
    if args.json {
        writeln!(out, "{}", json!(coeffs))?;
    } else {
        writeln!(out, "{}", coeffs.join(","))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn oeis(args: &OeisArgs, out: &mut impl Write) -> Result<ExitCode> {
    let key = sequence_key(&args.seq);
    let record = cached_table(&key, &args.seq, true)?;
    let terms: Vec<String> = record.terms.iter().map(ToString::to_string).collect();
    let lookup = OeisClient::from_env()
        .lookup(&record.terms)
        .context("OEIS lookup")?;
    if args.json {
        writeln!(out, "{}", json!({ "terms": terms, "lookup": lookup }))?;
        return Ok(ExitCode::SUCCESS);
    }
    writeln!(out, "terms: {}", terms.join(","))?;
    match lookup {
        Lookup::Offline => writeln!(out, "offline: lookup skipped")?,
        Lookup::Found(m) if m.is_empty() => writeln!(out, "no match")?,
        Lookup::Found(m) => {
            for x in m {
                writeln!(
                    out,
                    "{} offset={} {}",
                    x.sequence_id, x.matched_offset, x.name
                )?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn registry(args: &RegistryArgs, out: &mut impl Write) -> Result<ExitCode> {
    let reg = FormulaRegistry::standard();
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&reg.infos())?)?;
    } else {
        for e in reg.entries() {
            writeln!(
                out,
                "{:<18} {:<11} {:<34} {}",
                e.id,
                e.status.to_string(),
                e.domain.describe(),
                e.statement
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Command::Count(a) => count(a, &mut out),
        Command::Enumerate(a) => enumerate(a, &mut out),
        Command::Table(a) => table(a, &mut out),
        Command::Verify(a) => verify(a, &mut out),
        Command::Gentree(a) => gentree(a, &mut out),
        Command::Paths(a) => paths(a, &mut out),
        Command::Gf231(a) => gf231(a, &mut out),
        Command::Oeis(a) => oeis(a, &mut out),
        Command::Registry(a) => registry(a, &mut out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "warn".into()),
        )
        .with_writer(io::stderr)
        .init();
    if let Some(n) = cli.threads {
        if n == 0 {
            usage(ErrorKind::ValueValidation, "--threads must be at least 1");
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            tracing::warn!("could not size the worker pool: {e}");
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            if e.downcast_ref::<io::Error>()
                .is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
            {
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
