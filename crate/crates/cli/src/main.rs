use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::Parser;

mod args;
mod experiments;
mod report;
mod source;

use args::{Cli, Command, SourceArgs};
use report::{Report, Verdict};
use source::{Ctx, UsageError};

fn out_dir(args: &SourceArgs) -> PathBuf {
    match std::env::var_os("TREESHIFT_OUT") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => args.out.clone(),
    }
}

fn finish(report: &Report, args: &SourceArgs, extra: &[(&str, String)]) -> Result<Verdict> {
    let dir = out_dir(args);
    report.write(&dir)?;
    for (name, text) in extra {
        let path = dir.join(name);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    println!(
        "{}: {} ({})",
        report.experiment,
        report.verdict.as_str(),
        dir.join("report.json").display()
    );
    for note in &report.notes {
        println!("  note: {note}");
    }
    Ok(report.verdict)
}

fn list() {
    let width = experiments::REGISTRY
        .iter()
        .map(|(n, _)| n.len())
        .max()
        .unwrap_or(0);
    for (name, claim) in experiments::REGISTRY {
        println!("{name:<width$}  {claim}");
    }
}

fn run(cli: Cli) -> Result<Verdict> {
    match cli.command {
        Command::List => {
            list();
            Ok(Verdict::Pass)
        }
        Command::Norms(a) => {
            let ctx = Ctx::load(&a.source)?;
            finish(&experiments::norms(&ctx, a.max_power)?, &a.source, &[])
        }
        Command::Radius(a) => {
            let ctx = Ctx::load(&a.source)?;
            finish(
                &experiments::radius(&ctx, a.max_power, a.paths)?,
                &a.source,
                &[],
            )
        }
        Command::Approx(a) => {
            let ctx = Ctx::load(&a.source)?;
            let report = experiments::approx(&ctx, &a.phi, &a.ns, a.max_probes)?;
            finish(&report, &a.source, &[])
        }
        Command::Integral(a) => {
            let ctx = Ctx::load(&a.source)?;
            let report = experiments::integral(&ctx, a.phi.as_deref(), a.cases, a.degree)?;
            finish(&report, &a.source, &[])
        }
        Command::Wold(a) => {
            let ctx = Ctx::load(&a.source)?;
            finish(&experiments::wold(&ctx)?, &a.source, &[])
        }
        Command::Peel(a) => {
            let ctx = Ctx::load(&a.source)?;
            finish(&experiments::peel(&ctx)?, &a.source, &[])
        }
        Command::Balanced(a) => {
            let ctx = Ctx::load(&a.source)?;
            finish(&experiments::balanced(&ctx, a.max_power)?, &a.source, &[])
        }
        Command::Gram(a) => {
            let ctx = Ctx::load(&a.source)?;
            finish(&experiments::gram(&ctx, a.max_power)?, &a.source, &[])
        }
        Command::Gallery(a) => {
            let ctx = Ctx::load(&a)?;
            let (report, tree) = experiments::gallery(&ctx)?;
            finish(&report, &a, &[("tree.json", tree)])
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    match run(cli) {
        Ok(Verdict::Fail) => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(err) if err.downcast_ref::<UsageError>().is_some() => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
