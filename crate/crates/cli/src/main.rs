use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use fatpoint_core::config::{dynkin_catalog, neg_from_nodal, anticanonical_nef, DistinctSpec, PointConfiguration};
use fatpoint_core::cones::nef_generators;
use fatpoint_core::murank::{verify_all_frames, Verifier, DEFAULT_DEPTH};
use fatpoint_core::oracle::{compare, fixture, mu_rank_direct, ideal_dim};
use fatpoint_core::resolution::{betti_with_profile, hilbert, shift_notation, FatPointScheme};
use fatpoint_core::weyl::orbit;
use fatpoint_core::DivisorClass;

#[derive(Parser, Debug)]
#[command(name = "fatpoints", version, about = "Fat point ideals on six points of the plane")]
struct Cli {
    /// Emit JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Negative curves of a configuration.
    Neg {
        #[arg(long)]
        config: PathBuf,
    },
    /// Generators of the nef cone.
    Nefgens {
        #[arg(long)]
        config: PathBuf,
        /// Print the list before paring.
        #[arg(long)]
        raw: bool,
    },
    /// Weyl group orbit of a class, e.g. `1,-1,0,0,0,0,0` or `E0-E1`.
    Orbit {
        #[arg(allow_hyphen_values = true)]
        class: String,
    },
    /// The twenty types of configurations with nef anticanonical class.
    Catalog,
    /// Hilbert function of a fat point scheme.
    Hilbert {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        mult: String,
        #[arg(long, default_value_t = 0)]
        deg: i64,
    },
    /// Hilbert function and graded Betti numbers.
    Resolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        mult: String,
    },
    /// Maximal-rank certificates for every generator and chain member.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Repeat in every plane model of the surface.
        #[arg(long)]
        all_e0: bool,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
    },
    /// Direct linear algebra on explicit points.
    Oracle {
        /// One of i, ii, iii, iv, general, conic.
        #[arg(long)]
        case: String,
        #[arg(long)]
        mult: String,
        #[arg(long)]
        deg: i64,
        /// Compare with the lattice computation in every degree.
        #[arg(long)]
        compare: bool,
    },
}

struct Output {
    text: String,
    inconclusive: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, inconclusive: false }
    }
}

fn parse_mult(s: &str) -> Result<[i64; 6]> {
    let v: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>().with_context(|| format!("bad multiplicity {t:?}")))
        .collect::<Result<_>>()?;
    let m: [i64; 6] = v
        .try_into()
        .map_err(|v: Vec<i64>| anyhow::anyhow!("expected 6 multiplicities, found {}", v.len()))?;
    if m.iter().any(|&x| x < 0) {
        bail!("multiplicities must be nonnegative");
    }
    Ok(m)
}

fn load_config(path: &Path) -> Result<PointConfiguration> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(PointConfiguration::from_json(&text)?)
}

fn row(c: &DivisorClass) -> String {
    c.to_display().iter().map(|x| format!("{x:>3}")).collect::<Vec<_>>().join(" ")
}

fn class_table(classes: &[DivisorClass]) -> String {
    let mut out = String::new();
    for c in classes {
        let _ = writeln!(out, "{}", row(c));
    }
    out
}

fn pretty(v: Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

fn run(cli: Cli) -> Result<Output> {
    let json = cli.json;
    match cli.command {
        Command::Neg { config } => {
            let neg = load_config(&config)?.neg()?;
            let classes = neg.classes();
            if json {
                return Ok(Output::ok(pretty(json!({ "neg": classes }))?));
            }
            Ok(Output::ok(class_table(classes)))
        }
        Command::Nefgens { config, raw } => {
            let neg = load_config(&config)?.neg()?;
            let gens = nef_generators(&neg)?;
            let list = if raw { &gens.raw } else { &gens.pared };
            if json {
                return Ok(Output::ok(pretty(json!({ "generators": list }))?));
            }
            Ok(Output::ok(class_table(list)))
        }
        Command::Orbit { class } => {
            let c: DivisorClass = class.parse()?;
            let o = orbit(c)?;
            let mut list = o.elements;
            list.sort_by_key(|c| std::cmp::Reverse(c.to_display()));
            if json {
                return Ok(Output::ok(pretty(json!({ "orbit": list }))?));
            }
            Ok(Output::ok(class_table(&list)))
        }
        Command::Catalog => {
            let mut rows = Vec::new();
            for e in dynkin_catalog() {
                let neg = neg_from_nodal(&e.roots)?;
                rows.push((e.name, e.roots, neg.len(), anticanonical_nef(&neg)));
            }
            if json {
                let v: Vec<Value> = rows
                    .iter()
                    .map(|(n, r, k, a)| json!({ "type": n, "roots": r, "neg": k, "anticanonical_nef": a }))
                    .collect();
                return Ok(Output::ok(pretty(json!({ "catalog": v }))?));
            }
            let mut out = String::new();
            for (n, r, k, _) in rows {
                let roots: Vec<String> = r.iter().map(DivisorClass::algebraic).collect();
                let _ = writeln!(out, "{n:<6} {k:>3}  {}", roots.join(", "));
            }
            Ok(Output::ok(out))
        }
        Command::Hilbert { config, mult, deg } => {
            let z = FatPointScheme::new(load_config(&config)?, parse_mult(&mult)?)?;
            let p = hilbert(&z, deg)?;
            if json {
                return Ok(Output::ok(pretty(json!(p))?));
            }
            let mut out = String::new();
            for (t, h) in &p.values {
                let _ = writeln!(out, "{t:>4} {h:>8}");
            }
            let _ = writeln!(out, "alpha {} tau {} sigma {}", p.alpha, p.tau, p.sigma);
            Ok(Output::ok(out))
        }
        Command::Resolve { config, mult } => {
            let z = FatPointScheme::new(load_config(&config)?, parse_mult(&mult)?)?;
            let (b, p) = betti_with_profile(&z)?;
            let f0 = shift_notation(&b.t);
            let f1 = shift_notation(&b.s);
            if json {
                return Ok(Output::ok(pretty(json!({
                    "hilbert": p.values,
                    "alpha": p.alpha,
                    "sigma": p.sigma,
                    "t": b.t,
                    "s": b.s,
                    "F0": f0,
                    "F1": f1,
                }))?));
            }
            let mut out = String::from("degree      h      t      s\n");
            for (&d, h) in &p.values {
                let t = b.t.get(&d).copied().unwrap_or(0);
                let s = b.s.get(&d).copied().unwrap_or(0);
                let _ = writeln!(out, "{d:>6} {h:>6} {t:>6} {s:>6}");
            }
            let _ = writeln!(out, "F0 = {f0}");
            let _ = writeln!(out, "F1 = {f1}");
            Ok(Output::ok(out))
        }
        Command::Verify { config, all_e0, depth } => {
            let neg = load_config(&config)?.neg()?;
            if all_e0 {
                let reports = verify_all_frames(&neg, depth)?;
                let inconclusive = reports.iter().any(|r| r.inconclusive > 0);
                let text = if json {
                    pretty(json!({ "frames": reports }))?
                } else {
                    let mut out = String::new();
                    for r in &reports {
                        let st = r.stabilization.map_or("none".to_string(), |(j, k)| format!("({j},{k})"));
                        let _ = writeln!(
                            out,
                            "{}  sizes {:?}  stabilization {st}  certified {}  inconclusive {}  restricted {}  external {}  oracle {}",
                            row(&r.h),
                            r.chain_sizes,
                            r.certified,
                            r.inconclusive,
                            r.restricted_steps,
                            r.external,
                            r.oracle
                        );
                    }
                    let _ = writeln!(out, "frames {}", reports.len());
                    out
                };
                return Ok(Output { text, inconclusive });
            }
            let report = Verifier::new(neg)?.verify(depth)?;
            let inconclusive = !report.is_verified();
            if json {
                return Ok(Output { text: pretty(json!(report))?, inconclusive });
            }
            let mut out = String::new();
            for c in &report.generators {
                let _ = writeln!(out, "gen {}  {}  {}", row(&c.class), c.status, c.reason);
            }
            for (i, c) in &report.members {
                let _ = writeln!(out, "S{i}  {}  {}  {}", row(&c.class), c.status, c.reason);
            }
            match &report.stabilization.found {
                Some(s) => {
                    let _ = writeln!(out, "stabilization j={} k={}", s.j, s.k);
                }
                None => {
                    let _ = writeln!(out, "stabilization not found");
                }
            }
            for f in &report.families {
                let _ = writeln!(
                    out,
                    "family {} + i*({}) for i>={}  {}  {:?}",
                    f.base.algebraic(),
                    f.step.algebraic(),
                    f.from,
                    f.status,
                    f.reason
                );
            }
            let _ = writeln!(
                out,
                "chain {:?}  inconclusive {}  restricted {}  external {}  oracle {}",
                report.chain_sizes,
                report.inconclusive(),
                report.restricted_steps,
                report.external,
                report.oracle
            );
            Ok(Output { text: out, inconclusive })
        }
        Command::Oracle { case, mult, deg, compare: cmp } => {
            let m = parse_mult(&mult)?;
            let r = fixture(&case)?;
            if cmp {
                let cfg = PointConfiguration::distinct(DistinctSpec::case(&case)?)?;
                let z = FatPointScheme::new(cfg, m)?;
                let rows = compare(&z, &r, deg)?;
                let mismatch = rows.iter().any(|c| !c.agrees());
                if json {
                    return Ok(Output::ok(pretty(json!({ "degrees": rows, "agree": !mismatch }))?));
                }
                let mut out = String::from("     t  h_lat  h_dir   ker   cok  cok_lat  nef  agree\n");
                for c in &rows {
                    let _ = writeln!(
                        out,
                        "{:>6} {:>6} {:>6} {:>5} {:>5} {:>8} {:>4} {:>6}",
                        c.t,
                        c.h_pipeline,
                        c.h_oracle,
                        c.mu.ker,
                        c.mu.cok,
                        c.cok_pipeline,
                        if c.nef { "yes" } else { "no" },
                        if c.agrees() { "yes" } else { "NO" }
                    );
                }
                let _ = writeln!(out, "{}", if mismatch { "mismatch" } else { "agree" });
                if mismatch {
                    bail!("{out}oracle and lattice computation disagree");
                }
                return Ok(Output::ok(out));
            }
            let dim = ideal_dim(&r, &m, deg);
            let mu = mu_rank_direct(&r, &m, deg);
            if json {
                return Ok(Output::ok(pretty(json!({ "deg": deg, "dim": dim, "mu": mu }))?));
            }
            Ok(Output::ok(format!(
                "dim {dim}\ndim_next {}\nrank {}\nker {}\ncok {}\n",
                mu.dim_next, mu.rank, mu.ker, mu.cok
            )))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            if out.inconclusive {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
