use std::fs;
use std::io::Write;
use std::net::TcpListener;
use std::path::Path;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use birkhoff_core::assembly::{ehrhart_degree, StructuralReport};
use birkhoff_core::golden::golden_volume;
use birkhoff_core::{
    assemble, composition_count, count_dp, count_naive, ct_count, format_rational, parse_rational,
    required_value_count, structural_checks, volume_from_polynomial, AssemblyError, BigInt, EhrhartInstance, Engine,
    Rational, ResultDocument, ValueSet,
};
use birkhoff_dist::aggregate::aggregate;
use birkhoff_dist::coordinator::{coordinate, CoordinatorConfig};
use birkhoff_dist::manifest::{generate_manifest, Manifest};
use birkhoff_dist::results::read_records;
use birkhoff_dist::status::status;
use birkhoff_dist::worker::{work_local, work_remote, WorkerConfig};
use birkhoff_dist::{verify_golden, EXIT_COMPLETE, EXIT_INCOMPLETE, EXIT_INTEGRITY};
use rayon::prelude::*;

use crate::{Command, EngineArg, PipelineOpts, WorkerOpts};

const EXIT_CHECK_FAILED: i32 = 1;

pub fn run(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Count { n, t, t_max, engine, lo, hi, out } => {
            let n = n as usize;
            let engine = engine.resolve(n);
            let range = lo.zip(hi);
            if range.is_some() && engine != EngineArg::Ct {
                bail!("--lo/--hi only apply to --engine ct");
            }
            let ts: Vec<u32> = match (t, t_max) {
                (Some(t), _) => vec![t],
                (None, Some(m)) => (0..=m).collect(),
                (None, None) => unreachable!("clap requires one of --t/--t-max"),
            };
            let values = ts.par_iter().map(|&t| count_with(engine, n, t, range)).collect::<Result<Vec<_>>>()?;
            let mut machine = String::new();
            for (t, v) in ts.iter().zip(&values) {
                if ts.len() == 1 {
                    println!("{v}");
                } else {
                    println!("{t} {v}");
                }
                let rec = serde_json::json!({"n": n, "t": t, "engine": engine_name(engine), "value": v.to_string()});
                machine.push_str(&format!("{rec}\n"));
            }
            write_out(out.as_deref(), &machine)?;
            Ok(EXIT_COMPLETE)
        }
        Command::Ehrhart(opts) => pipeline(opts, false),
        Command::Volume(opts) => pipeline(opts, true),
        Command::Tasks { n, ts, t_max, chunk, out } => {
            let n = n as usize;
            let ts = match (ts.is_empty(), t_max) {
                (false, _) => ts,
                (true, Some(m)) => (1..=m).collect(),
                (true, None) => (1..=required_value_count(n) as u32).collect(),
            };
            let manifest = generate_manifest(n, &ts, chunk)?;
            match out {
                Some(path) => {
                    fs::write(&path, manifest.to_text()).with_context(|| format!("writing {}", path.display()))?;
                    println!(
                        "{} chunks for n={n}, t={ts:?} ({} compositions each) -> {}",
                        manifest.len(),
                        manifest.composition_count(),
                        path.display()
                    );
                }
                None => print!("{}", manifest.to_text()),
            }
            Ok(EXIT_COMPLETE)
        }
        Command::Coordinate { manifest, results, listen, lease_timeout, addr_file } => {
            let manifest = Manifest::load(&manifest).with_context(|| format!("loading {}", manifest.display()))?;
            let listener = TcpListener::bind(listen).with_context(|| format!("binding {listen}"))?;
            let addr = listener.local_addr()?;
            println!("listening on {addr}");
            std::io::stdout().flush()?;
            if let Some(path) = addr_file {
                fs::write(path, format!("{addr}\n"))?;
            }
            let cfg = CoordinatorConfig { lease_timeout: secs(lease_timeout)?, ..Default::default() };
            match coordinate(&manifest, &results, listener, cfg) {
                Ok(s) => {
                    println!(
                        "complete: {} tasks ({} from log, {} new, {} assigned, {} duplicate, {} expired, {} released)",
                        s.tasks, s.replayed, s.completed, s.assigned, s.duplicates, s.expired, s.released
                    );
                    Ok(EXIT_COMPLETE)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    Ok(e.exit_code())
                }
            }
        }
        Command::Worker(opts) => worker(opts),
        Command::Aggregate { manifest, results, out } => {
            let manifest = Manifest::load(&manifest).with_context(|| format!("loading {}", manifest.display()))?;
            let records = read_records(&results)?;
            let sums = match aggregate(&manifest, &records) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(e.exit_code());
                }
            };
            let n = manifest.header.n;
            for ((n, t), v) in &sums {
                println!("H_{n}({t}) = {v}");
            }
            let big_t = required_value_count(n) as u32;
            let covered = (1..=big_t).all(|t| sums.contains_key(&(n, t)));
            if !covered {
                let text: String = sums
                    .iter()
                    .map(|((n, t), v)| format!("{}\n", serde_json::json!({"n": n, "t": t, "value": v.to_string()})))
                    .collect();
                write_out(out.as_deref(), &text)?;
                return Ok(EXIT_COMPLETE);
            }
            let values: Vec<BigInt> = (1..=big_t).map(|t| sums[&(n, t)].clone()).collect();
            let extra: Vec<BigInt> = (big_t + 1..).map_while(|t| sums.get(&(n, t)).cloned()).collect();
            let all: Vec<BigInt> = values.into_iter().chain(extra).collect();
            let task_count = manifest.composition_count() * manifest.header.ts.len() as u64;
            match assemble_checked(n, &all, Engine::Ct, task_count) {
                Ok(doc) => {
                    println!("volume {} (leading {})", doc.volume, doc.leading);
                    write_out(out.as_deref(), &doc.to_line())?;
                    Ok(EXIT_COMPLETE)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    Ok(EXIT_INTEGRITY)
                }
            }
        }
        Command::Verify { golden, volume_file, result_file } => {
            let mut code = EXIT_COMPLETE;
            if let Some(name) = golden {
                let golden = match golden_volume(&name) {
                    Some(v) => v?,
                    None => parse_rational(&name).map_err(|_| anyhow!("unknown golden value {name:?}"))?,
                };
                let path = volume_file.expect("clap enforces --volume-file");
                let volume = read_volume(&path)?;
                if verify_golden(&volume, golden.numer().clone(), golden.denom().clone()) {
                    println!("golden {name}: match");
                } else {
                    println!(
                        "golden {name}: MISMATCH (have {}, expected {})",
                        format_rational(&volume),
                        format_rational(&golden)
                    );
                    code = EXIT_CHECK_FAILED;
                }
            }
            if let Some(path) = result_file {
                let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                let doc = ResultDocument::parse(&text)?;
                match check_document(&doc) {
                    Ok(r) => println!(
                        "structure ok: n={}, {} reciprocity zeros, functional equation at {} points",
                        doc.n, r.zeros_checked, r.functional_points_checked
                    ),
                    Err(e) => {
                        println!("structure FAILED: {e}");
                        code = EXIT_CHECK_FAILED;
                    }
                }
            }
            Ok(code)
        }
        Command::Status { manifest, results, lock_dir, lease_timeout } => {
            let report = (|| -> Result<_> {
                let manifest = Manifest::load(&manifest).with_context(|| format!("reading {}", manifest.display()))?;
                if !results.exists() {
                    bail!("{} does not exist", results.display());
                }
                let records = read_records(&results)?;
                let locks = lock_dir.as_deref().map(|d| (d, Duration::from_secs_f64(lease_timeout)));
                Ok(status(&manifest, &records, locks)?)
            })();
            match report {
                Ok(r) => {
                    println!("{r}");
                    Ok(EXIT_COMPLETE)
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    Ok(EXIT_INCOMPLETE)
                }
            }
        }
    }
}

fn engine_name(e: EngineArg) -> &'static str {
    match e {
        EngineArg::Dp => "dp",
        EngineArg::Ct => "ct",
        EngineArg::Naive => "naive",
    }
}

fn count_with(engine: EngineArg, n: usize, t: u32, range: Option<(u64, u64)>) -> Result<BigInt> {
    Ok(match engine {
        EngineArg::Dp => count_dp(EhrhartInstance::new(n, t)),
        EngineArg::Naive => count_naive(EhrhartInstance::new(n, t)),
        EngineArg::Ct => ct_count(n, t, range)?,
    })
}

fn secs(s: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(s).map_err(|_| anyhow!("invalid duration {s}"))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    if let Some(path) = path {
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn assemble_checked(
    n: usize,
    values: &[BigInt],
    engine: Engine,
    task_count: u64,
) -> Result<ResultDocument, AssemblyError> {
    let vs = ValueSet::from_slice(n, values)?;
    let res = assemble(&vs, engine)?;
    structural_checks(&res)?;
    let vol = volume_from_polynomial(&res)?;
    Ok(ResultDocument::new(&res, &vol, task_count))
}

fn check_document(doc: &ResultDocument) -> Result<StructuralReport, AssemblyError> {
    let res = doc.result()?;
    if doc.degree != ehrhart_degree(doc.n) {
        return Err(AssemblyError::DegreeMismatch { expected: ehrhart_degree(doc.n), found: res.poly.degree() });
    }
    let report = structural_checks(&res)?;
    let vol = volume_from_polynomial(&res)?;
    if format_rational(&vol.volume) != doc.volume || format_rational(&vol.leading) != doc.leading {
        return Err(AssemblyError::BadDocument("volume/leading disagree with the coefficients".into()));
    }
    Ok(report)
}

fn read_volume(path: &Path) -> Result<Rational> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if let Ok(doc) = ResultDocument::parse(&text) {
        return Ok(doc.volume()?);
    }
    parse_rational(text.trim()).with_context(|| format!("{} holds neither a result document nor p/q", path.display()))
}

fn pipeline(opts: PipelineOpts, volume_view: bool) -> Result<i32> {
    let n = opts.n as usize;
    let engine = opts.engine.resolve(n);
    let started = Instant::now();
    let big_t = required_value_count(n) as u32;
    let values = (1..=big_t).into_par_iter().map(|t| count_with(engine, n, t, None)).collect::<Result<Vec<_>>>()?;
    let (source, task_count) = match engine {
        EngineArg::Ct => (Engine::Ct, composition_count(n) * big_t as u64),
        EngineArg::Dp | EngineArg::Naive => (Engine::Oracle, big_t as u64),
    };
    let mut doc = match assemble_checked(n, &values, source, task_count) {
        Ok(doc) => doc,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_INTEGRITY);
        }
    };
    let elapsed = started.elapsed();
    if opts.wall_time {
        doc.wall_time = Some(format!("{:.3}", elapsed.as_secs_f64()));
    }
    if volume_view {
        println!(
            "n={n} leading={} volume={} ({}, {:.3}s)",
            doc.leading,
            doc.volume,
            engine_name(engine),
            elapsed.as_secs_f64()
        );
    } else {
        println!("H_{n}(t), degree {}, from {} value(s) via {}:", doc.degree, big_t, engine_name(engine));
        for (k, c) in doc.coefficients.iter().enumerate() {
            println!("  t^{k}: {c}");
        }
        println!("wall time {:.3}s", elapsed.as_secs_f64());
    }
    write_out(opts.out.as_deref(), &doc.to_line())?;
    Ok(EXIT_COMPLETE)
}

fn worker(opts: WorkerOpts) -> Result<i32> {
    let cfg = WorkerConfig {
        worker_id: opts.worker_id.unwrap_or_else(|| WorkerConfig::default().worker_id),
        retries: opts.retries,
        backoff: Duration::from_millis(opts.backoff_ms),
        heartbeat: secs(opts.heartbeat)?,
        lease_timeout: secs(opts.lease_timeout)?,
        throttle: Duration::from_millis(opts.throttle_ms),
        max_tasks: opts.max_tasks,
    };
    let outcome = match (&opts.connect, &opts.local_dir) {
        (Some(addr), _) => work_remote(addr, &cfg),
        (None, Some(dir)) => {
            let manifest_path = opts.manifest.as_ref().expect("clap requires --manifest");
            let manifest =
                Manifest::load(manifest_path).with_context(|| format!("loading {}", manifest_path.display()))?;
            work_local(&manifest, opts.results.as_ref().expect("clap requires --results"), dir, &cfg)
        }
        (None, None) => unreachable!("clap requires --connect or --local-dir"),
    };
    match outcome {
        Ok(s) => {
            println!("{}: evaluated {} chunk(s)", cfg.worker_id, s.evaluated);
            Ok(EXIT_COMPLETE)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Ok(e.exit_code())
        }
    }
}
