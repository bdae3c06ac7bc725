//! Predictions produced by an outside system.
//!
//! The adapter reads instance records and writes `id<TAB>1|2|both|none`
//! lines (an optional third column carries the first-candidate score).

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::process::{Command, Stdio};

use crate::error::{Error, Result};
use crate::model::{serialize_instance, Prediction, ProblemInstance};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExternalPredictions {
    by_id: HashMap<String, Prediction>,
}

impl ExternalPredictions {
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut by_id = HashMap::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let p = Prediction::parse_line(&line).map_err(|message| Error::AdapterProtocol {
                line: n + 1,
                message,
            })?;
            if by_id.insert(p.instance_id.clone(), p).is_some() {
                return Err(Error::AdapterProtocol {
                    line: n + 1,
                    message: "duplicate instance id".into(),
                });
            }
        }
        Ok(Self { by_id })
    }

    /// Runs `program`, feeding instance records on stdin and reading
    /// prediction lines from stdout.
    pub fn from_command(program: &str, args: &[String], instances: &[ProblemInstance]) -> Result<Self> {
        let mut input = String::new();
        for inst in instances {
            input.push_str(&serialize_instance(inst)?);
            input.push('\n');
        }
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        let writer = std::thread::spawn(move || stdin.write_all(input.as_bytes()));
        let stdout = child.stdout.take().expect("piped stdout");
        let parsed = Self::from_reader(BufReader::new(stdout));
        let status = child.wait()?;
        writer
            .join()
            .map_err(|_| Error::AdapterProtocol {
                line: 0,
                message: "writer thread panicked".into(),
            })?
            .or_else(|e| {
                // The adapter may legitimately stop reading early.
                if e.kind() == std::io::ErrorKind::BrokenPipe {
                    Ok(())
                } else {
                    Err(e)
                }
            })?;
        if !status.success() {
            return Err(Error::AdapterProtocol {
                line: 0,
                message: format!("adapter exited with {status}"),
            });
        }
        parsed
    }

    pub fn get(&self, id: &str) -> Option<&Prediction> {
        self.by_id.get(id)
    }

    pub fn len(&self) -> usize {
        self.by_id.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_id.is_empty()
    }
}
