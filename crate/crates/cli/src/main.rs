//! `stringtop`: command-line front end for the exact string-topology engine.
//!
//! Every subcommand prints a deterministic text result, or with
//! `--format json` a single JSON document of the form
//! `{"command": …, "status": "ok" | "failed", "result": …}` described by
//! `schema/output.schema.json`.
//!
//! Exit codes: 0 on success, 1 on bad input or a domain error (one line on
//! stderr), 2 when a verification ran and found a failure; in that case the
//! JSON report is printed whatever the format.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use stringtop_core::goldman::{
    derived_membership, generation_witness, lcs_member_witness, parse_torus_chain, z_bracket_reachable, AnyTorusChain,
    BracketExpr, TorusClass,
};
use stringtop_core::group::{check_exact, ExactnessReport, GroupMorphism};
use stringtop_core::loops::{loop_bracket, LoopChain, Space};
use stringtop_core::strings::gysin::{consistency_audit, verify_gysin};
use stringtop_core::strings::{string_bracket, string_homology, CircleWindow, StringChain};
use stringtop_core::surfaces::sigma::{sigma_g_string_bracket, sigma_g_string_homology, GoldmanOracle, SigmaStringChain};
use stringtop_core::surfaces::torus::{torus_center_witness, verify_torus_blocks};
use stringtop_core::surfaces::{torus_string_bracket, torus_string_homology, SurfaceWindow, TorusStringChain, TorusWindow};
use stringtop_core::text::Cursor;
use stringtop_core::{Error, Int, Result, ZTorusChain};

const MAX_DEGREE_VAR: &str = "STRINGTOP_MAX_DEGREE";

#[derive(Parser)]
#[command(name = "stringtop", version, about = "Exact Goldman brackets, loop and string homology, and exactness checks")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Goldman bracket on the torus, or the loop bracket on a sphere with `--space`.
    Bracket {
        #[arg(allow_hyphen_values = true)]
        left: String,
        #[arg(allow_hyphen_values = true)]
        right: String,
        /// Coefficient ring for Goldman chains.
        #[arg(long, default_value = "Z")]
        ring: String,
        #[command(flatten)]
        target: Target,
    },
    /// Bracket expression in a, b, a⁻¹, b⁻¹ for a class (over Q), or whether
    /// `COEFFICIENT·aⁿ` is a single bracket over Z.
    Witness {
        class: String,
        #[arg(long, default_value = "Q")]
        ring: String,
        /// With `--ring Z`: the multiple of the axis class to reach.
        #[arg(long, allow_negative_numbers = true)]
        coefficient: Option<Int>,
    },
    /// Membership of an integer chain in the derived subalgebra.
    Derived {
        #[arg(allow_hyphen_values = true)]
        element: String,
    },
    /// Nested bracket of a given depth evaluating to an element of the derived subalgebra.
    Lcs {
        #[arg(allow_hyphen_values = true)]
        element: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// String homology in one degree.
    Homology {
        #[arg(long, allow_negative_numbers = true)]
        degree: i64,
        #[command(flatten)]
        target: Target,
    },
    /// String bracket of two string homology classes.
    StringBracket {
        #[arg(allow_hyphen_values = true)]
        left: String,
        #[arg(allow_hyphen_values = true)]
        right: String,
        #[command(flatten)]
        target: Target,
    },
    /// Exactness of a Gysin sequence, of the torus block sequences, or of a
    /// sequence of morphisms read from JSON.
    Verify {
        /// Sphere whose Gysin sequence to check (S1 or S3).
        #[arg(long, conflicts_with = "sequence")]
        gysin: Option<Space>,
        /// JSON file holding a list of group morphisms.
        #[arg(long)]
        sequence: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        max_degree: i64,
        #[command(flatten)]
        target: Target,
    },
    /// Rank and torsion audit of a sphere's string homology table.
    Audit {
        #[arg(long)]
        space: Space,
        #[arg(long, default_value_t = 60)]
        max_degree: i64,
    },
    /// Whether a torus string homology class is central for the string bracket.
    Center {
        #[arg(allow_hyphen_values = true)]
        element: String,
        #[command(flatten)]
        target: Target,
    },
}

/// Where a computation takes place.
#[derive(Args, Clone, Default)]
struct Target {
    /// Sphere or torus: S1, S3, S4, T2, …
    #[arg(long)]
    space: Option<Space>,
    /// Surface: `torus` or `sigma<g>` for genus g ≥ 2.
    #[arg(long)]
    surface: Option<Surface>,
    /// `lo:hi` exponents on S1, `n0:n1,m0:m1` blocks on the torus.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// Conjugacy classes of Σ_g as `token:l,…` (`token:id` for the identity).
    #[arg(long)]
    classes: Option<String>,
    /// Goldman bracket table for Σ_g (JSON, or CSV together with `--classes`).
    #[arg(long)]
    oracle: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Surface {
    Torus,
    Sigma(u32),
}

impl FromStr for Surface {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_lowercase();
        if matches!(t.as_str(), "torus" | "t" | "t2" | "t^2" | "sigma1" | "sigma_1") {
            return Ok(Surface::Torus);
        }
        let genus = ["sigma_", "sigma", "σ_", "σ"].iter().find_map(|p| t.strip_prefix(p)).and_then(|g| g.parse().ok());
        match genus {
            Some(g) if g >= 2 => Ok(Surface::Sigma(g)),
            _ => Err(Error::Invalid(format!("unknown surface {s:?}; expected torus or sigma<g> with g ≥ 2"))),
        }
    }
}

enum Ambient {
    Sphere(Space),
    Torus,
    Sigma(u32),
}

impl Target {
    fn ambient(&self, default: Option<Ambient>) -> Result<Ambient> {
        let from_space = self.space.map(|s| if s == Space::Torus { Ambient::Torus } else { Ambient::Sphere(s) });
        let from_surface = self.surface.map(|s| match s {
            Surface::Torus => Ambient::Torus,
            Surface::Sigma(g) => Ambient::Sigma(g),
        });
        match (from_space, from_surface) {
            (Some(Ambient::Torus), Some(Ambient::Torus)) => Ok(Ambient::Torus),
            (Some(_), Some(_)) => Err(Error::Invalid("give either --space or --surface, not both".into())),
            (Some(a), None) | (None, Some(a)) => Ok(a),
            (None, None) => default.ok_or_else(|| Error::Invalid("choose a space with --space or --surface".into())),
        }
    }

    fn circle_window(&self) -> Result<CircleWindow> {
        let Some(w) = &self.window else { return Ok(CircleWindow::default()) };
        let mut cur = Cursor::new(w);
        let lo = cur.parse_int()?;
        cur.expect(":")?;
        let hi = cur.parse_int()?;
        cur.finish()?;
        if lo > hi {
            return Err(Error::Invalid(format!("empty window {w}")));
        }
        Ok(CircleWindow { lo, hi })
    }

    fn torus_window(&self) -> Result<TorusWindow> {
        self.window.as_deref().map_or(Ok(TorusWindow::default()), str::parse)
    }

    fn surface_window(&self, genus: u32) -> Result<SurfaceWindow> {
        match (&self.classes, &self.oracle) {
            (Some(c), _) => SurfaceWindow::parse(genus, c),
            (None, Some(_)) => Ok(self.oracle(genus)?.window),
            (None, None) => Err(Error::Invalid("Σ_g needs its conjugacy classes via --classes or --oracle".into())),
        }
    }

    fn oracle(&self, genus: u32) -> Result<GoldmanOracle> {
        let path = self.oracle.as_deref().ok_or_else(|| Error::Invalid("Σ_g brackets need a table via --oracle".into()))?;
        let text = read(path)?;
        let oracle = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            let classes = self.classes.as_deref().ok_or_else(|| Error::Invalid("a CSV table needs --classes".into()))?;
            GoldmanOracle::from_csv(SurfaceWindow::parse(genus, classes)?, text.as_bytes())?
        } else {
            GoldmanOracle::from_json(&text)?
        };
        if oracle.window.genus != genus {
            return Err(Error::Invalid(format!("table {} is for genus {}, not {genus}", path.display(), oracle.window.genus)));
        }
        Ok(oracle)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

/// Result of a subcommand.
struct Outcome {
    text: String,
    result: Value,
    failed: bool,
}

impl Outcome {
    fn ok(text: impl Into<String>, result: Value) -> Self {
        Self { text: text.into(), result, failed: false }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Bracket { .. } => "bracket",
        Command::Witness { .. } => "witness",
        Command::Derived { .. } => "derived",
        Command::Lcs { .. } => "lcs",
        Command::Homology { .. } => "homology",
        Command::StringBracket { .. } => "string-bracket",
        Command::Verify { .. } => "verify",
        Command::Audit { .. } => "audit",
        Command::Center { .. } => "center",
    }
}

fn degree_cap(max_degree: i64) -> Result<()> {
    let Ok(raw) = std::env::var(MAX_DEGREE_VAR) else { return Ok(()) };
    let cap: i64 = raw.trim().parse().map_err(|_| Error::Invalid(format!("{MAX_DEGREE_VAR}={raw:?} is not an integer")))?;
    if max_degree > cap {
        return Err(Error::Invalid(format!("--max-degree {max_degree} exceeds {MAX_DEGREE_VAR}={cap}")));
    }
    Ok(())
}

/// The `chain` field of a serialized wrapper, or the value itself.
fn chain_json<T: serde::Serialize>(x: &T) -> Value {
    let v = serde_json::to_value(x).expect("chains serialize");
    v.get("chain").cloned().unwrap_or(v)
}

fn chain_result(left: &str, right: &str, value: String, chain: Value) -> Value {
    json!({ "left": left, "right": right, "value": value, "chain": chain })
}

fn expression_result<R: stringtop_core::scalar::Ring>(target: String, e: &BracketExpr<R>) -> Value {
    json!({
        "target": target,
        "infix": e.to_infix(),
        "sexpr": e.to_string(),
        "depth": e.depth(),
        "expression": e,
    })
}

fn report_result(report: &ExactnessReport) -> Value {
    json!({
        "all_exact": report.all_exact(),
        "checked": report.checked_count(),
        "failures": report.failures().count(),
        "nodes": report.nodes,
    })
}

fn report_summary(report: &ExactnessReport) -> String {
    let failures = report.failures().count();
    if failures == 0 {
        format!("{} interior nodes checked, all exact", report.checked_count())
    } else {
        format!("{} interior nodes checked, {failures} not exact", report.checked_count())
    }
}

fn run(command: &Command) -> Result<Outcome> {
    match command {
        Command::Bracket { left, right, ring, target } => match target.ambient(Some(Ambient::Torus))? {
            Ambient::Torus => {
                let x = AnyTorusChain::parse(ring, left)?;
                let y = AnyTorusChain::parse(ring, right)?;
                let b = x.bracket(&y)?;
                let mut result = chain_result(left, right, b.to_string(), b.to_json());
                result["ring"] = json!(b.ring());
                Ok(Outcome::ok(b.to_string(), result))
            }
            Ambient::Sphere(space) => {
                let b = loop_bracket(&LoopChain::parse(space, left)?, &LoopChain::parse(space, right)?)?;
                let mut result = chain_result(left, right, b.to_string(), chain_json(&b));
                result["space"] = json!(space.to_string());
                Ok(Outcome::ok(b.to_string(), result))
            }
            Ambient::Sigma(g) => Err(Error::UnsupportedSpace {
                space: format!("Σ_{g}"),
                reason: "only degree-0 string brackets from a table are available; use string-bracket".into(),
            }),
        },
        Command::Witness { class, ring, coefficient } => {
            let class: TorusClass = class.parse()?;
            match (ring.as_str(), coefficient) {
                ("Q" | "q", None) => {
                    let e = generation_witness(class)?;
                    Ok(Outcome::ok(format!("{class} = {}", e.to_infix()), expression_result(class.to_string(), &e)))
                }
                ("Z" | "z", Some(m)) => {
                    let reachable = z_bracket_reachable(*m, class)?;
                    let text = if reachable {
                        format!("{m}·{class} is a single bracket over Z")
                    } else {
                        format!("{m}·{class} is not a single bracket over Z")
                    };
                    Ok(Outcome::ok(text, json!({ "target": class.to_string(), "coefficient": m, "reachable": reachable })))
                }
                ("Z" | "z", None) => Err(Error::Invalid("--ring Z needs --coefficient".into())),
                ("Q" | "q", Some(_)) => Err(Error::Invalid("--coefficient applies only with --ring Z".into())),
                (other, _) => Err(Error::Invalid(format!("unknown ring {other:?}; expected Z or Q"))),
            }
        }
        Command::Derived { element } => {
            let x: ZTorusChain = parse_torus_chain(element)?;
            let terms: Vec<Value> = x
                .iter()
                .map(|(class, c)| json!({ "class": class.to_string(), "coefficient": c, "member": derived_membership(*c, *class) }))
                .collect();
            let outside: Vec<String> =
                x.iter().filter(|(class, c)| !derived_membership(**c, **class)).map(|(class, c)| format!("{c}·{class}")).collect();
            let member = outside.is_empty();
            let text = if member {
                format!("{x} lies in the derived subalgebra")
            } else {
                format!("{x} is not in the derived subalgebra: {} outside", outside.join(", "))
            };
            Ok(Outcome::ok(text, json!({ "element": x.to_string(), "member": member, "terms": terms })))
        }
        Command::Lcs { element, depth } => {
            let x: ZTorusChain = parse_torus_chain(element)?;
            let terms: Vec<(TorusClass, Int)> = x.iter().map(|(k, c)| (*k, *c)).collect();
            let e = match terms.as_slice() {
                [] => lcs_member_witness(0, TorusClass::new(0, 0), *depth)?,
                [(class, c)] => lcs_member_witness(*c, *class, *depth)?,
                _ => BracketExpr::Sum(
                    terms.iter().map(|(class, c)| lcs_member_witness(*c, *class, *depth)).collect::<Result<_>>()?,
                ),
            };
            Ok(Outcome::ok(format!("{x} = {}", e.to_infix()), expression_result(x.to_string(), &e)))
        }
        Command::Homology { degree, target } => match target.ambient(None)? {
            Ambient::Sphere(space) => {
                let h = string_homology(space, *degree, target.circle_window()?)?;
                Ok(Outcome::ok(h.to_string(), serde_json::to_value(&h).expect("homology serializes")))
            }
            Ambient::Torus => {
                let h = torus_string_homology(*degree, target.torus_window()?)?;
                Ok(Outcome::ok(h.to_string(), serde_json::to_value(&h).expect("homology serializes")))
            }
            Ambient::Sigma(g) => {
                let h = sigma_g_string_homology(&target.surface_window(g)?, *degree)?;
                Ok(Outcome::ok(h.to_string(), serde_json::to_value(&h).expect("homology serializes")))
            }
        },
        Command::StringBracket { left, right, target } => {
            let (value, chain) = match target.ambient(None)? {
                Ambient::Sphere(space) => {
                    let b = string_bracket(&StringChain::parse(space, left)?, &StringChain::parse(space, right)?)?;
                    (b.to_string(), chain_json(&b))
                }
                Ambient::Torus => {
                    let b = torus_string_bracket(&TorusStringChain::parse(left)?, &TorusStringChain::parse(right)?)?;
                    (b.to_string(), chain_json(&b))
                }
                Ambient::Sigma(g) => {
                    let oracle = target.oracle(g)?;
                    let x = SigmaStringChain::parse(&oracle.window, left)?;
                    let y = SigmaStringChain::parse(&oracle.window, right)?;
                    let b = sigma_g_string_bracket(&x, &y, &oracle)?;
                    (b.to_string(), chain_json(&b))
                }
            };
            Ok(Outcome::ok(value.clone(), chain_result(left, right, value, chain)))
        }
        Command::Verify { gysin, sequence, max_degree, target } => {
            degree_cap(*max_degree)?;
            if let Some(space) = gysin {
                if target.space.is_some() || target.surface.is_some() {
                    return Err(Error::Invalid("--gysin already names the space".into()));
                }
                let report = verify_gysin(*space, *max_degree, target.circle_window()?)?;
                let text = format!("Gysin sequence of L{space} through degree {max_degree}\n{report}{}", report_summary(&report));
                let mut result = report_result(&report);
                result["space"] = json!(space.to_string());
                result["max_degree"] = json!(max_degree);
                return Ok(Outcome { text, result, failed: !report.all_exact() });
            }
            if let Some(path) = sequence {
                let raw: Value = serde_json::from_str(&read(path)?).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
                let list = raw.get("morphisms").cloned().unwrap_or(raw);
                let seq: Vec<GroupMorphism> =
                    serde_json::from_value(list).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
                let report = check_exact(&seq)?;
                let text = format!("{report}{}", report_summary(&report));
                return Ok(Outcome { text, result: report_result(&report), failed: !report.all_exact() });
            }
            match target.ambient(None)? {
                Ambient::Torus => {
                    let window = target.torus_window()?;
                    let reports = verify_torus_blocks(window, *max_degree)?;
                    let mut lines = Vec::new();
                    let mut blocks = Vec::new();
                    let mut failed = false;
                    for ((n, m), r) in &reports {
                        failed |= !r.all_exact();
                        lines.push(format!("[{n},{m}]  {}", report_summary(r)));
                        if !r.all_exact() {
                            lines.push(r.to_string().trim_end().to_string());
                        }
                        blocks.push(json!({ "n": n, "m": m, "report": report_result(r) }));
                    }
                    let text = format!(
                        "torus block sequences through degree {max_degree}\n{}\n{} blocks, {}",
                        lines.join("\n"),
                        reports.len(),
                        if failed { "some not exact" } else { "all exact" }
                    );
                    let result = json!({ "window": window, "max_degree": max_degree, "all_exact": !failed, "blocks": blocks });
                    Ok(Outcome { text, result, failed })
                }
                Ambient::Sphere(space) => Err(Error::Invalid(format!("use --gysin {space} for spheres"))),
                Ambient::Sigma(g) => Err(Error::UnsupportedSpace {
                    space: format!("Σ_{g}"),
                    reason: "no Gysin sequence model is available".into(),
                }),
            }
        }
        Command::Audit { space, max_degree } => {
            degree_cap(*max_degree)?;
            let report = consistency_audit(*space, *max_degree)?;
            let result = serde_json::to_value(&report).expect("audit serializes");
            Ok(Outcome { text: report.to_string(), result, failed: !report.passed })
        }
        Command::Center { element, target } => match target.ambient(Some(Ambient::Torus))? {
            Ambient::Torus => {
                let x = TorusStringChain::parse(element)?;
                let (text, result) = match torus_center_witness(&x)? {
                    None => (format!("{x} is central"), json!({ "element": x.to_string(), "central": true })),
                    Some((g, b)) => (
                        format!("{x} is not central: [{x}, {g}] = {b}"),
                        json!({ "element": x.to_string(), "central": false, "witness": g.to_string(), "bracket": b.to_string() }),
                    ),
                };
                Ok(Outcome::ok(text, result))
            }
            _ => Err(Error::UnsupportedSpace { space: "non-torus".into(), reason: "center is implemented for the torus".into() }),
        },
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let name = command_name(&cli.command);
    match run(&cli.command) {
        Ok(out) => {
            let status = if out.failed { "failed" } else { "ok" };
            if cli.format == Format::Json || out.failed {
                let doc = json!({ "command": name, "status": status, "result": out.result });
                emit(&serde_json::to_string_pretty(&doc).expect("output serializes"));
            } else {
                emit(out.text.trim_end());
            }
            ExitCode::from(if out.failed { 2 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
