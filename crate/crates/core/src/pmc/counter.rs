use std::io::Read;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use thiserror::Error;

use crate::frontend::CnfDocument;

/// Environment variable overriding the counter binary.
pub const COUNTER_ENV: &str = "IMPVALS_COUNTER";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CounterError {
    #[error("could not launch counter {path:?}: {reason}")]
    Launch { path: String, reason: String },
    #[error("counter output has no count line; stderr: {stderr}")]
    Unparsable { stderr: String },
    #[error("counter exceeded {seconds}s timeout")]
    Timeout { seconds: u64 },
    #[error("counter i/o failure: {0}")]
    Io(String),
}

/// Which output line carries the count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputDialect {
    /// `c s exact ... N` or `s ... N`, first match wins.
    #[default]
    Auto,
    /// Only `c s exact ... N`.
    ExactComment,
    /// Only `s ... N`.
    SolutionLine,
}

/// Subprocess invocation `[binary, file]` of an external projected counter.
#[derive(Clone, Debug)]
pub struct CounterAdapter {
    pub binary_path: PathBuf,
    pub timeout: Duration,
    pub dialect: OutputDialect,
}

impl CounterAdapter {
    pub fn new(binary_path: impl Into<PathBuf>, timeout: Duration) -> Self {
        Self {
            binary_path: binary_path.into(),
            timeout,
            dialect: OutputDialect::Auto,
        }
    }

    /// Adapter for `$IMPVALS_COUNTER`, if set.
    pub fn from_env(timeout: Duration) -> Option<Self> {
        std::env::var_os(COUNTER_ENV).map(|p| Self::new(p, timeout))
    }

    pub fn count(&self, doc: &CnfDocument) -> Result<BigUint, CounterError> {
        let mut file = tempfile::Builder::new()
            .suffix(".cnf")
            .tempfile()
            .map_err(|e| CounterError::Io(e.to_string()))?;
        std::io::Write::write_all(&mut file, doc.to_dimacs().as_bytes())
            .map_err(|e| CounterError::Io(e.to_string()))?;
        let launch_err = |e: std::io::Error| CounterError::Launch {
            path: self.binary_path.display().to_string(),
            reason: e.to_string(),
        };
        let mut child = Command::new(&self.binary_path)
            .arg(file.path())
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(launch_err)?;
        let mut out = child.stdout.take().expect("piped stdout");
        let mut err = child.stderr.take().expect("piped stderr");
        let out_reader = std::thread::spawn(move || {
            let mut s = String::new();
            let _ = out.read_to_string(&mut s);
            s
        });
        let err_reader = std::thread::spawn(move || {
            let mut s = String::new();
            let _ = err.read_to_string(&mut s);
            s
        });
        let start = Instant::now();
        loop {
            match child.try_wait() {
                Ok(Some(_)) => break,
                Ok(None) if start.elapsed() >= self.timeout => {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Err(CounterError::Timeout {
                        seconds: self.timeout.as_secs(),
                    });
                }
                Ok(None) => std::thread::sleep(Duration::from_millis(5)),
                Err(e) => return Err(CounterError::Io(e.to_string())),
            }
        }
        let stdout = out_reader.join().unwrap_or_default();
        let stderr = err_reader.join().unwrap_or_default();
        parse_counter_output(&stdout, self.dialect).ok_or_else(|| CounterError::Unparsable {
            stderr: excerpt(&stderr),
        })
    }
}

fn excerpt(s: &str) -> String {
    const MAX: usize = 400;
    let t = s.trim();
    if t.len() <= MAX {
        t.to_string()
    } else {
        let cut = (0..=MAX).rev().find(|&i| t.is_char_boundary(i)).unwrap_or(0);
        format!("{}...", &t[..cut])
    }
}

/// Extracts the model count from counter output.
pub fn parse_counter_output(stdout: &str, dialect: OutputDialect) -> Option<BigUint> {
    stdout.lines().find_map(|line| {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let exact = toks.len() >= 4 && toks[..3] == ["c", "s", "exact"];
        let solution = toks.len() >= 2 && toks[0] == "s";
        let accepted = match dialect {
            OutputDialect::Auto => exact || solution,
            OutputDialect::ExactComment => exact,
            OutputDialect::SolutionLine => solution,
        };
        if !accepted {
            return None;
        }
        toks.last()?.parse().ok()
    })
}
