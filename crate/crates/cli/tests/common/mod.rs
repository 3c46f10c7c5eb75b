#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};
use std::thread::sleep;
use std::time::{Duration, Instant};

pub fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_birkhoff"));
    cmd.env_remove("BIRKHOFF_LOG");
    cmd
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn birkhoff")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 temp path")
}

/// A coordinator child process together with the address it bound.
pub struct Coordinator {
    pub child: Child,
    pub addr: String,
}

impl Coordinator {
    pub fn start(dir: &Path, manifest: &Path, results: &Path, lease_timeout: &str) -> Coordinator {
        let addr_file = dir.join(format!("addr-{}", fastrand_suffix()));
        let child = bin()
            .args(["coordinate", "--manifest", p(manifest), "--results", p(results)])
            .args(["--listen", "127.0.0.1:0", "--lease-timeout", lease_timeout])
            .args(["--addr-file", p(&addr_file)])
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .spawn()
            .expect("spawn coordinator");
        let addr = wait_for(Duration::from_secs(20), || {
            fs::read_to_string(&addr_file).ok().filter(|s| s.ends_with('\n')).map(|s| s.trim().to_string())
        })
        .expect("coordinator never wrote its address");
        Coordinator { child, addr }
    }

    pub fn wait_code(mut self, limit: Duration) -> Option<i32> {
        let code = wait_for(limit, || self.child.try_wait().ok().flatten().map(|s| s.code().unwrap_or(-1)));
        if code.is_none() {
            let _ = self.child.kill();
            let _ = self.child.wait();
        }
        code
    }
}

pub fn spawn_worker(addr: &str, extra: &[&str]) -> Child {
    bin()
        .args(["--jobs", "1", "worker", "--connect", addr, "--backoff-ms", "50"])
        .args(extra)
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .expect("spawn worker")
}

pub fn wait_for<T>(limit: Duration, mut f: impl FnMut() -> Option<T>) -> Option<T> {
    let start = Instant::now();
    while start.elapsed() < limit {
        if let Some(v) = f() {
            return Some(v);
        }
        sleep(Duration::from_millis(20));
    }
    None
}

fn fastrand_suffix() -> u128 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).unwrap().as_nanos()
}

pub fn line_count(path: &Path) -> usize {
    fs::read_to_string(path).map(|s| s.lines().count()).unwrap_or(0)
}

/// Generates a manifest, runs a coordinator plus `workers` TCP workers and
/// aggregates into `out`. Returns the aggregate exit code.
pub fn distributed_run(dir: &Path, n: usize, ts: &str, chunk: u64, workers: usize, out: &Path) -> i32 {
    let manifest = dir.join("manifest.jsonl");
    let results = dir.join("results.jsonl");
    assert!(run(&["tasks", "--n", &n.to_string(), "--ts", ts, "--chunk", &chunk.to_string(), "--out", p(&manifest)])
        .status
        .success());
    let coord = Coordinator::start(dir, &manifest, &results, "30");
    let mut kids: Vec<Child> = (0..workers).map(|_| spawn_worker(&coord.addr, &[])).collect();
    let code = coord.wait_code(Duration::from_secs(300));
    for k in &mut kids {
        let _ = k.wait();
    }
    assert_eq!(code, Some(0), "coordinator exit");
    run(&["aggregate", "--manifest", p(&manifest), "--results", p(&results), "--out", p(out)])
        .status
        .code()
        .unwrap_or(-1)
}

pub fn tempdir() -> tempfile::TempDir {
    tempfile::tempdir().expect("tempdir")
}

pub fn path(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}
