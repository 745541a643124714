//! Command-line surface: reproducible experiments over the library modules.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on capacity or arithmetic
//! errors. Outputs carry no timestamps, so identical invocations produce
//! identical files.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::densities::{self, GROWTH_EXPONENT};
use crate::enumerate::{self, TraversalOptions};
use crate::error::{invalid_argument, Error, Result};
use crate::histogram::CurvatureHistogram;
use crate::localglobal;
use crate::numfmt::sig12;
use crate::orbits;
use crate::primestats;
use crate::quadruple::PackingDescriptor;
use crate::render::{self, SvgStyle};

#[derive(Parser)]
#[command(
    name = "apollonian",
    version,
    about = "Curvature statistics for bounded integral Apollonian circle packings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for tree traversals
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Memory budget such as "2GiB", "512MiB" or a byte count
    #[arg(long, global = true, default_value = "2GiB")]
    memory_budget: String,

    /// Assert Descartes and primitivity invariants at every traversal node
    #[arg(long, global = true)]
    check: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Cumulative prime statistics at geometric checkpoints (CSV)
    Stats {
        /// Packing root: "bugeye", "coins" or a quadruple like "-1,2,2,3"
        #[arg(long, allow_hyphen_values = true)]
        root: String,
        /// Count curvatures strictly below this bound
        #[arg(long)]
        bound: u64,
        #[arg(long, default_value_t = 24)]
        checkpoints: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Orbit of the root quadruple modulo d (JSON)
    Orbit {
        #[arg(long, allow_hyphen_values = true)]
        root: String,
        #[arg(long = "mod")]
        modulus: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Residue proportions mod 24 and the admissible set (JSON)
    Residues {
        #[arg(long, allow_hyphen_values = true)]
        root: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Admissible integers without occurrences in [lo, hi) (JSON)
    Exceptions {
        #[arg(long, allow_hyphen_values = true)]
        root: String,
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        /// Restrict the scan to one residue class mod 24
        #[arg(long)]
        residue: Option<u8>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact multiplicity histogram over [lo, hi) (binary ACPH)
    Hist {
        #[arg(long, allow_hyphen_values = true)]
        root: String,
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Frequency distribution of one residue class of a stored histogram (CSV)
    HistSummary {
        /// Path to an ACPH histogram file
        file: PathBuf,
        #[arg(long)]
        residue: u8,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numerical limit constants (JSON)
    Constants {
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 1_000_000)]
        prime_bound: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw the packing as SVG
    Render {
        #[arg(long, allow_hyphen_values = true)]
        root: String,
        /// Draw circles of curvature below this value
        #[arg(long)]
        max: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1024)]
        canvas: u32,
        #[arg(long, default_value = "#202020")]
        stroke: String,
        #[arg(long, default_value_t = 1.0)]
        stroke_width: f64,
        #[arg(long, default_value = "none")]
        fill: String,
        /// Label circles large enough to hold their curvature
        #[arg(long)]
        labels: bool,
    },
    /// Fit the growth law N(x) ~ c * x^delta from measured counts (JSON)
    Fit {
        #[arg(long, allow_hyphen_values = true)]
        root: String,
        /// Comma-separated bounds to measure, e.g. "10000,100000,1000000"
        #[arg(long, default_value = "10000,100000,1000000")]
        samples: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses argv, runs the selected subcommand, and maps errors to exit codes.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Capacity { .. } | Error::ArithmeticOverflow => 2,
                _ => 1,
            }
        }
    }
}

fn parse_memory_budget(text: &str) -> Result<u64> {
    let t = text.trim();
    let (digits, factor) = if let Some(rest) = t
        .strip_suffix("GiB")
        .or_else(|| t.strip_suffix("gib"))
        .or_else(|| t.strip_suffix("G"))
    {
        (rest, 1u64 << 30)
    } else if let Some(rest) = t
        .strip_suffix("MiB")
        .or_else(|| t.strip_suffix("mib"))
        .or_else(|| t.strip_suffix("M"))
    {
        (rest, 1 << 20)
    } else if let Some(rest) = t
        .strip_suffix("KiB")
        .or_else(|| t.strip_suffix("kib"))
        .or_else(|| t.strip_suffix("K"))
    {
        (rest, 1 << 10)
    } else if let Some(rest) = t.strip_suffix('B') {
        (rest, 1)
    } else {
        (t, 1)
    };
    let value: u64 = digits
        .trim()
        .parse()
        .map_err(|e| invalid_argument(format!("bad memory budget {text:?}: {e}")))?;
    value
        .checked_mul(factor)
        .ok_or_else(|| invalid_argument(format!("memory budget {text:?} overflows")))
}

fn write_text(out: Option<&PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            f.write_all(content.as_bytes())?;
            f.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(content.as_bytes())?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn gamma_json(pairs: &[(u32, num_rational::Ratio<i64>)]) -> serde_json::Value {
    let map: serde_json::Map<String, serde_json::Value> = pairs
        .iter()
        .map(|(n, value)| (n.to_string(), json!(value.to_string())))
        .collect();
    serde_json::Value::Object(map)
}

fn dispatch(cli: Cli) -> Result<()> {
    let opts = TraversalOptions {
        threads: cli.threads.max(1),
        memory_budget: parse_memory_budget(&cli.memory_budget)?,
        check_invariants: cli.check,
    };
    match cli.command {
        Command::Stats {
            root,
            bound,
            checkpoints,
            out,
        } => {
            let packing = PackingDescriptor::parse(&root)?;
            let series = primestats::ratio_series(&packing, bound, checkpoints, &opts)?;
            let mut buf = Vec::new();
            series.write_csv(&mut buf)?;
            write_text(out.as_ref(), std::str::from_utf8(&buf).expect("ascii csv"))
        }
        Command::Orbit { root, modulus, out } => {
            let packing = PackingDescriptor::parse(&root)?;
            let orbit = orbits::orbit_mod(&packing, modulus)?;
            let proportions = orbit.coordinate_residue_proportions();
            let value = json!({
                "modulus": orbit.modulus(),
                "size": orbit.size(),
                "states": orbit.states(),
                "gamma": gamma_json(&proportions),
                "admissible": proportions.iter().map(|(n, _)| *n).collect::<Vec<_>>(),
            });
            write_text(out.as_ref(), &format!("{}\n", serde_json::to_string_pretty(&value)?))
        }
        Command::Residues { root, out } => {
            let packing = PackingDescriptor::parse(&root)?;
            let orbit = orbits::orbit_mod(&packing, 24)?;
            let proportions = orbit.coordinate_residue_proportions();
            let value = json!({
                "root": packing.root().entries(),
                "modulus": 24,
                "gamma": gamma_json(&proportions),
                "admissible": orbits::admissible_residues(&packing)?,
            });
            write_text(out.as_ref(), &format!("{}\n", serde_json::to_string_pretty(&value)?))
        }
        Command::Exceptions {
            root,
            lo,
            hi,
            residue,
            out,
        } => {
            let packing = PackingDescriptor::parse(&root)?;
            let report = localglobal::find_exceptions(&packing, lo, hi, residue, &opts)?;
            let by_residue: serde_json::Map<String, serde_json::Value> = report
                .by_residue
                .iter()
                .map(|(r, values)| (r.to_string(), json!(values)))
                .collect();
            let value = json!({
                "root": report.root.entries(),
                "lo": report.lo,
                "hi": report.hi,
                "exceptions": report.exceptions,
                "by_residue": by_residue,
            });
            write_text(out.as_ref(), &format!("{}\n", serde_json::to_string_pretty(&value)?))
        }
        Command::Hist { root, lo, hi, out } => {
            let packing = PackingDescriptor::parse(&root)?;
            let hist = enumerate::histogram(&packing, lo, hi, &opts)?;
            hist.save(&out)
        }
        Command::HistSummary { file, residue, out } => {
            let hist = CurvatureHistogram::load(&file)?;
            let dist = localglobal::frequency_distribution(&hist, residue)?;
            let packing = PackingDescriptor::new(hist.root(), None)?;
            let predicted = localglobal::predicted_mean(
                &packing,
                residue,
                hist.lo(),
                hist.hi(),
                localglobal::MeanMode::Measured {
                    circles_lo: 0,
                    circles_hi: hist.total(),
                },
            )?;
            let mut text = String::from("m,count\n");
            for (m, count) in &dist.delta {
                text.push_str(&format!("{m},{count}\n"));
            }
            text.push_str("mean,variance,predicted_mean\n");
            text.push_str(&format!(
                "{},{},{}\n",
                sig12(dist.mean),
                sig12(dist.variance),
                sig12(predicted)
            ));
            write_text(out.as_ref(), &text)
        }
        Command::Constants {
            tol,
            prime_bound,
            out,
        } => {
            let l = densities::catalan_l2chi4(tol)?;
            let c = densities::kissing_constant_c(prime_bound)?;
            let value = json!({
                "L2chi4": l,
                "c": c.value(),
                "c_error": c.half_width(),
                "alpha": c.value() * l * l / 3.0,
                "delta": GROWTH_EXPONENT,
            });
            write_text(out.as_ref(), &format!("{}\n", serde_json::to_string_pretty(&value)?))
        }
        Command::Render {
            root,
            max,
            out,
            canvas,
            stroke,
            stroke_width,
            fill,
            labels,
        } => {
            let packing = PackingDescriptor::parse(&root)?;
            let style = SvgStyle {
                stroke,
                stroke_width,
                fill,
                labels,
                ..SvgStyle::default()
            };
            let file = BufWriter::new(File::create(&out)?);
            render::render_svg(&packing, max, canvas, &style, file)?;
            Ok(())
        }
        Command::Fit { root, samples, out } => {
            let packing = PackingDescriptor::parse(&root)?;
            let bounds: Vec<u64> = samples
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|e| invalid_argument(format!("bad sample bound {s:?}: {e}")))
                })
                .collect::<Result<_>>()?;
            let measured = localglobal::growth_samples(&packing, &bounds, &opts)?;
            let fit = localglobal::fit_growth(&measured)?;
            let value = json!({
                "delta_hat": fit.delta_hat,
                "c_hat": fit.c_hat,
                "samples": measured,
            });
            write_text(out.as_ref(), &format!("{}\n", serde_json::to_string_pretty(&value)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn memory_budget_parsing() {
        assert_eq!(parse_memory_budget("2GiB").unwrap(), 2 << 30);
        assert_eq!(parse_memory_budget("512MiB").unwrap(), 512 << 20);
        assert_eq!(parse_memory_budget("1024").unwrap(), 1024);
        assert_eq!(parse_memory_budget("64KiB").unwrap(), 64 << 10);
        assert!(parse_memory_budget("lots").is_err());
    }
}
