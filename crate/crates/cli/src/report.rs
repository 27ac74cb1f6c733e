//! Report payloads and their text, CSV and JSON renderings.

use std::fmt::Write;

use dga_core::kraines::session::KrainesSession;
use dga_core::DGAlgebra;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub degree: usize,
    pub rank: usize,
    /// Orders of the cyclic summands.
    pub torsion: Vec<String>,
}

impl Group {
    fn describe(&self) -> String {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Report {
    Betti {
        source: String,
        target: String,
        ring: String,
        /// Highest degree built into the complex.
        truncation: usize,
        /// Highest degree reported; every value through it is exact.
        window: usize,
        dims: Vec<usize>,
        running_max: Vec<usize>,
    },
    Groups {
        source: String,
        ring: String,
        window: usize,
        groups: Vec<Group>,
    },
    Kraines {
        session: Box<KrainesSession>,
    },
    Check {
        source: String,
        window: usize,
        checks: Vec<CheckRow>,
        skipped: Vec<String>,
    },
}

impl Report {
    pub fn passed(&self) -> bool {
        match self {
            Report::Kraines { session } => session.all_pass(),
            Report::Check { checks, .. } => checks.iter().all(|c| c.passed),
            _ => true,
        }
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn csv(&self) -> String {
        let mut s = String::new();
        match self {
            Report::Betti { dims, running_max, .. } => {
                s.push_str("degree,dimension,running_max\n");
                for (n, (d, m)) in dims.iter().zip(running_max).enumerate() {
                    let _ = writeln!(s, "{n},{d},{m}");
                }
            }
            Report::Groups { groups, .. } => {
                s.push_str("degree,rank,torsion,group\n");
                for g in groups {
                    let _ = writeln!(s, "{},{},{},{}", g.degree, g.rank, g.torsion.join(" "), g.describe());
                }
            }
            Report::Kraines { session } => {
                s.push_str("item,passed\n");
                let items = [
                    ("a_family", session.a_family.as_ref().map(|a| a.family.identities_hold() && a.family.all_nonzero())),
                    ("b_sequence", session.b_sequence.as_ref().map(|b| b.all_pass())),
                    ("y_family", session.y_family.as_ref().map(|y| y.all_pass())),
                    ("correction", session.correction.as_ref().map(|c| c.all_pass())),
                    ("z_cycles", session.z_cycles.as_ref().map(|z| z.all_cycles())),
                ];
                for (name, v) in items {
                    let _ = writeln!(s, "{name},{}", v.map_or("skipped".into(), |b| b.to_string()));
                }
            }
            Report::Check { checks, .. } => {
                s.push_str("check,passed,checked\n");
                for c in checks {
                    let _ = writeln!(s, "{},{},{}", c.name, c.passed, c.checked);
                }
            }
        }
        s
    }

    pub fn text(&self, a: &DGAlgebra) -> String {
        let mut s = String::new();
        match self {
            Report::Betti { source, target, ring, truncation, window, dims, running_max } => {
                let _ = writeln!(s, "# {target} cohomology of {source} over {ring}");
                let _ = writeln!(s, "# truncation {truncation}, exact through degree {window}");
                let _ = writeln!(s, "{:>6} {:>10} {:>12}", "degree", "dimension", "running max");
                for (n, (d, m)) in dims.iter().zip(running_max).enumerate() {
                    let _ = writeln!(s, "{n:>6} {d:>10} {m:>12}");
                }
            }
            Report::Groups { source, ring, window, groups } => {
                let _ = writeln!(s, "# cohomology of {source} with {ring} coefficients through degree {window}");
                for g in groups {
                    let _ = writeln!(s, "H^{:<3} = {}", g.degree, g.describe());
                }
            }
            Report::Kraines { session } => s.push_str(&session.to_text(a)),
            Report::Check { source, window, checks, skipped } => {
                let _ = writeln!(s, "# invariant suite for {source}, window {window}");
                for c in checks {
                    let verdict = if c.passed { "PASS" } else { "FAIL" };
                    let _ = write!(s, "{verdict}  {} ({} checked)", c.name, c.checked);
                    if let Some(d) = &c.detail {
                        let _ = write!(s, ": {d}");
                    }
                    s.push('\n');
                }
                for k in skipped {
                    let _ = writeln!(s, "SKIP  {k}");
                }
                let _ = writeln!(s, "verdict: {}", if self.passed() { "PASS" } else { "FAIL" });
            }
        }
        s
    }
}
