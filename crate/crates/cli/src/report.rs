use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// What a subcommand produced, before it is wrapped into a [`Report`].
pub struct Outcome {
    pub results: Value,
    pub pass: bool,
    pub checks: u64,
    pub failures: u64,
    pub seed: Option<u64>,
    /// Human-readable rendering.
    pub text: String,
    /// Level tables only.
    pub csv: Option<String>,
}

impl Outcome {
    /// A computation with no pass/fail content.
    pub fn info(results: Value, text: String) -> Self {
        Outcome {
            results,
            pass: true,
            checks: 0,
            failures: 0,
            seed: None,
            text,
            csv: None,
        }
    }

    pub fn checked(results: Value, text: String, checks: u64, failures: u64) -> Self {
        Outcome {
            pass: failures == 0,
            checks,
            failures,
            ..Self::info(results, text)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: bool,
    pub checks: u64,
    pub failures: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Vec<String>,
    pub inputs_digest: String,
    pub mode: String,
    pub seed: Option<u64>,
    pub results: Value,
    pub summary: Summary,
    pub versions: BTreeMap<String, String>,
}

impl Report {
    pub fn new(command: Vec<String>, digest: String, mode: String, outcome: &Outcome) -> Self {
        let versions = BTreeMap::from([
            ("noise-lattice".to_string(), noise_lattice::VERSION.to_string()),
            (
                "noise-lattice-cli".to_string(),
                env!("CARGO_PKG_VERSION").to_string(),
            ),
        ]);
        Report {
            command,
            inputs_digest: digest,
            mode,
            seed: outcome.seed,
            results: outcome.results.clone(),
            summary: Summary {
                pass: outcome.pass,
                checks: outcome.checks,
                failures: outcome.failures,
            },
            versions,
        }
    }
}

/// SHA-256 over the command line, the numeric mode and every input file.
pub fn digest(command: &[String], mode: &str, inputs: &[Vec<u8>]) -> String {
    let mut h = Sha256::new();
    for part in command {
        h.update(part.as_bytes());
        h.update([0]);
    }
    h.update(mode.as_bytes());
    for input in inputs {
        h.update((input.len() as u64).to_le_bytes());
        h.update(input);
    }
    h.finalize().iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Left-aligned columns separated by two spaces.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let padded: Vec<String> = cells
            .zip(&widths)
            .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(&mut headers.iter().copied());
    for row in rows {
        out += &line(&mut row.iter().map(String::as_str));
    }
    out
}
