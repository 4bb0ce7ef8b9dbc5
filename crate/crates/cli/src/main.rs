use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use symmetroid::brauer::{
    certify_wa_failure, evaluate_with_cross_check, lift_to_y, HPoint,
    RealSearch, Strategy, WAOptions, ENGINE, REGULARITY_PRIMES,
};
use symmetroid::density;
use symmetroid::exact::{Int, Rat};
use symmetroid::localfields::Place;
use symmetroid::nullstellensatz::empty_all_primes;
use symmetroid::pencil::{
    alpha_symbol, regularity_certificate, v3_ideal, v3_minor_ideal, x_point_from_singular_member, Pencil,
    RegularityOptions,
};
use symmetroid::quadform::{Field, LocalField};
use symmetroid::Error;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "symmetroid", version, about = "Brauer classes on double quintic symmetroids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// compact JSON on stdout
    #[arg(long, global = true)]
    json: bool,
    /// indented JSON on stdout
    #[arg(long, global = true, conflicts_with = "json")]
    pretty: bool,
    /// also write the JSON report to this file
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// worker threads for the parallel scans
    #[arg(long, global = true, env = "SYMMETROID_WORKERS")]
    workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rank, signature and smooth points of the generators or of one member
    Classify {
        pencil: PathBuf,
        /// member coordinates t0,..,t4
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Option<Vec<i64>>,
        /// place for the smooth-point test: inf or a prime
        #[arg(long, default_value = "inf")]
        place: String,
    },
    /// Quaternion symbol (M2/M1^2, M3/(M2 M1)) of the Brauer class
    AlphaSymbol {
        pencil: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Lift a rational point of H to Y and evaluate the local invariant
    Evaluate {
        pencil: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        point: Vec<i64>,
        #[arg(long, default_value = "inf")]
        place: String,
    },
    /// Certificate that weak approximation fails
    CertifyWa {
        pencil: PathBuf,
        /// `real` or a prime
        #[arg(long, default_value = "real")]
        strategy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// coefficient height of the real search lines
        #[arg(long, default_value_t = 5)]
        height: i64,
        #[arg(long, default_value_t = 400)]
        budget: usize,
    },
    /// Regularity of the pencil on a special fibre
    Regularity {
        pencil: PathBuf,
        /// try only this prime instead of 3, 5, 7, 11, 13
        #[arg(long)]
        prime: Option<u64>,
        /// largest λ-degree for the singular-locus test
        #[arg(long, default_value_t = 10)]
        dmax: u32,
    },
    /// Whether the pencil meets the rank <= 2 locus over any prime
    V3Test {
        pencil: PathBuf,
        #[arg(long, default_value_t = 6)]
        dmax: u32,
        /// use the unsaturated 3x3 minors of the restricted Gram matrix
        #[arg(long)]
        raw_minors: bool,
    },
    /// Membership of the reduction in S_p
    SpScan {
        pencil: PathBuf,
        #[arg(long, conflicts_with = "cutoff")]
        prime: Option<u64>,
        /// scan every prime up to this bound
        #[arg(long)]
        cutoff: Option<u64>,
    },
    /// Certified lower bound for the density of locally soluble pencils
    DensityBound {
        #[arg(long, default_value_t = 100)]
        cutoff: u64,
    },
    /// Pass fraction of random integral frames
    MonteCarlo {
        #[arg(long, default_value_t = 10)]
        height: i64,
        #[arg(long, default_value_t = 20)]
        cutoff: u64,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exhaustive count of quadrics over F_p without smooth points
    Census {
        #[arg(long = "p", alias = "prime")]
        p: u64,
    },
    /// Rational point of X_P from a singular member
    XPoint {
        pencil: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        point: Vec<i64>,
        /// kernel vector of the member; computed when omitted
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        kernel: Option<Vec<i64>>,
    },
}

enum Status {
    Ok,
    Inconclusive,
}

struct Report {
    command: &'static str,
    status: Status,
    summary: String,
    result: Value,
}

impl Report {
    fn ok(command: &'static str, summary: String, result: Value) -> Self {
        Report {
            command,
            status: Status::Ok,
            summary,
            result,
        }
    }

    fn inconclusive(command: &'static str, summary: String, result: Value) -> Self {
        Report {
            command,
            status: Status::Inconclusive,
            summary,
            result,
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "schema": format!("symmetroid.{}/{}", self.command, SCHEMA_VERSION),
            "engine": ENGINE,
            "command": self.command,
            "status": match self.status {
                Status::Ok => "ok",
                Status::Inconclusive => "inconclusive",
            },
            "summary": self.summary,
            "result": self.result,
        })
    }
}

fn read_pencil(path: &Path) -> anyhow::Result<Pencil> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Pencil::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn ints(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

fn to_value<T: serde::Serialize>(x: &T) -> anyhow::Result<Value> {
    Ok(serde_json::to_value(x)?)
}

fn parse_place(s: &str) -> anyhow::Result<Place> {
    Ok(Place::parse(s)?)
}

fn run(cmd: Command) -> anyhow::Result<Report> {
    match cmd {
        Command::Classify { pencil, point, place } => {
            let pencil = read_pencil(&pencil)?;
            let v = parse_place(&place)?;
            let members: Vec<(String, _)> = match point {
                Some(t) => {
                    if t.len() != 5 {
                        bail!("--point needs 5 coordinates");
                    }
                    vec![(format!("{t:?}"), pencil.member(&ints(&t)))]
                }
                None => pencil
                    .quadrics()
                    .iter()
                    .enumerate()
                    .map(|(i, q)| (format!("Q{i}"), q.clone()))
                    .collect(),
            };
            let mut out = Vec::new();
            let mut lines = Vec::new();
            for (label, q) in members {
                let c = q.classify(Field::Rationals)?;
                let smooth = if q.is_zero() {
                    None
                } else {
                    Some(q.has_smooth_point(LocalField::from_place(v))?)
                };
                lines.push(format!(
                    "{label}: rank {}, smooth point over Q_{v}: {}",
                    c.rank,
                    smooth.map_or("-".to_string(), |b| b.to_string())
                ));
                out.push(json!({
                    "member": label,
                    "form": q.to_string(),
                    "classification": to_value(&c)?,
                    "real_signature": to_value(&q.classify(Field::Reals)?.signature)?,
                    "place": v.to_string(),
                    "smooth_point": smooth,
                }));
            }
            Ok(Report::ok("classify", lines.join("\n"), Value::Array(out)))
        }
        Command::AlphaSymbol { pencil, seed } => {
            let pencil = read_pencil(&pencil)?;
            let a = alpha_symbol(&pencil, seed)?;
            let s = |f: symmetroid::exact::MultiPoly| f.to_canonical_string("t");
            let result = json!({
                "a_numerator": s(a.a_num()),
                "a_denominator": s(a.a_den()),
                "b_numerator": s(a.b_num()),
                "b_denominator": s(a.b_den()),
                "leading_minors": a.minors.iter().map(|m| m.to_canonical_string("t")).collect::<Vec<_>>(),
                "basis_change": to_value(&a.basis_change)?,
                "witness_prime": a.witness_prime,
                "witness": a.witness,
            });
            let summary = format!(
                "alpha = ({} / {}, {} / {})",
                result["a_numerator"].as_str().unwrap_or(""),
                result["a_denominator"].as_str().unwrap_or(""),
                result["b_numerator"].as_str().unwrap_or(""),
                result["b_denominator"].as_str().unwrap_or("")
            );
            Ok(Report::ok("alpha-symbol", summary, result))
        }
        Command::Evaluate { pencil, point, place } => {
            let pencil = read_pencil(&pencil)?;
            let v = parse_place(&place)?;
            let h = HPoint::rational_i64(&point)?;
            let lifts = match lift_to_y(&pencil, &h, v) {
                Ok(l) => l,
                Err(e @ (Error::Rank { .. } | Error::Degenerate(_))) => {
                    return Ok(Report::inconclusive(
                        "evaluate",
                        format!("{h} does not lift to Y(Q_{v}): {e}"),
                        json!({ "point": h.to_string(), "place": v.to_string(), "lifts": [], "reason": e.to_string() }),
                    ))
                }
                Err(e) => return Err(e.into()),
            };
            let mut out = Vec::new();
            let mut lines = Vec::new();
            for y in &lifts {
                let r = evaluate_with_cross_check(&pencil, y)?;
                lines.push(format!("{h} ruling {:?} at {v}: inv = {}", y.ruling, r.invariant));
                out.push(json!({ "lift": to_value(y)?, "invariant": to_value(&r)? }));
            }
            let result = json!({ "point": h.to_string(), "place": v.to_string(), "lifts": out });
            if lifts.is_empty() {
                return Ok(Report::inconclusive(
                    "evaluate",
                    format!("{h}: no ruling is defined over Q_{v}"),
                    result,
                ));
            }
            Ok(Report::ok("evaluate", lines.join("\n"), result))
        }
        Command::CertifyWa {
            pencil,
            strategy,
            seed,
            height,
            budget,
        } => {
            let pencil = read_pencil(&pencil)?;
            let strategy = match strategy.as_str() {
                "real" | "inf" => Strategy::Real,
                p => Strategy::Finite(p.parse().with_context(|| format!("bad strategy `{p}`"))?),
            };
            let opts = WAOptions {
                search: RealSearch { seed, budget, height },
            };
            match certify_wa_failure(&pencil, strategy, opts) {
                Ok(c) => {
                    if !c.validate(&pencil)? {
                        bail!("certificate failed its own validation");
                    }
                    Ok(Report::ok(
                        "certify-wa",
                        format!(
                            "weak approximation fails: invariants {} and {} at {}; regular at {}",
                            c.points[0].invariant, c.points[1].invariant, c.place, c.regularity.prime
                        ),
                        to_value(&c)?,
                    ))
                }
                Err(Error::NotFound(why)) => Ok(Report::inconclusive(
                    "certify-wa",
                    format!("no certificate: {why}"),
                    json!({ "reason": why }),
                )),
                Err(e) => Err(e.into()),
            }
        }
        Command::Regularity { pencil, prime, dmax } => {
            let pencil = read_pencil(&pencil)?;
            let opts = RegularityOptions {
                lambda_degree_max: dmax,
                ..RegularityOptions::default()
            };
            let cert = match prime {
                Some(p) => regularity_certificate(&pencil, p, opts)?,
                None => {
                    let mut last = None;
                    for p in REGULARITY_PRIMES {
                        let c = regularity_certificate(&pencil, p, opts)?;
                        let done = c.regular;
                        last = Some(c);
                        if done {
                            break;
                        }
                    }
                    last.expect("at least one prime")
                }
            };
            let summary = format!(
                "p = {}: {}",
                cert.prime,
                if cert.regular { "regular" } else { "not certified" }
            );
            let v = to_value(&cert)?;
            Ok(if cert.regular {
                Report::ok("regularity", summary, v)
            } else {
                Report::inconclusive("regularity", summary, v)
            })
        }
        Command::V3Test {
            pencil,
            dmax,
            raw_minors,
        } => {
            let pencil = read_pencil(&pencil)?;
            let ideal = if raw_minors { v3_minor_ideal(&pencil)? } else { v3_ideal(&pencil)? };
            let e = empty_all_primes(&ideal, false, dmax)?;
            let v = to_value(&e)?;
            Ok(match e.certificate() {
                Some(c) => Report::ok(
                    "v3-test",
                    format!("no member of rank <= 2 at any prime (degree {:?})", c.degree),
                    v,
                ),
                None => Report::inconclusive("v3-test", format!("no certificate up to degree {dmax}"), v),
            })
        }
        Command::SpScan { pencil, prime, cutoff } => {
            let pencil = read_pencil(&pencil)?;
            let primes = match (prime, cutoff) {
                (Some(p), _) => vec![p],
                (None, Some(m)) => symmetroid::exact::primes_below(m + 1),
                (None, None) => bail!("sp-scan needs --prime or --cutoff"),
            };
            let mut out = Vec::new();
            let mut hits = Vec::new();
            for p in primes {
                let v = density::sp_member(&pencil, p)?;
                if v.is_member() {
                    hits.push(p);
                }
                out.push(json!({ "p": p, "scan": to_value(&v)? }));
            }
            let summary = if hits.is_empty() {
                "no member without a smooth point at the primes scanned".to_string()
            } else {
                format!("in S_p for p in {hits:?}")
            };
            Ok(Report::ok("sp-scan", summary, Value::Array(out)))
        }
        Command::DensityBound { cutoff } => {
            let r = density::product_lower_bound(cutoff)?;
            Ok(Report::ok(
                "density-bound",
                format!(
                    "density >= {:.6} (partial product over p < {cutoff}: {:.6})",
                    r.final_bound_approx, r.partial_product_approx
                ),
                to_value(&r)?,
            ))
        }
        Command::MonteCarlo {
            height,
            cutoff,
            samples,
            seed,
        } => {
            let r = density::monte_carlo_density(height, cutoff, samples, seed)?;
            let summary = match (r.estimate, r.radius95) {
                (Some(e), Some(rad)) => format!(
                    "{} / {} pass: {e:.4} ± {rad:.4} (product {:.4})",
                    r.passes, r.samples, r.product_approx
                ),
                _ => "no samples".to_string(),
            };
            Ok(Report::ok("monte-carlo", summary, to_value(&r)?))
        }
        Command::Census { p } => {
            let r = density::census_bp(p)?;
            Ok(Report::ok(
                "census",
                format!("{} (formula {})", r.without_smooth_point, r.formula),
                to_value(&r)?,
            ))
        }
        Command::XPoint { pencil, point, kernel } => {
            let pencil = read_pencil(&pencil)?;
            if point.len() != 5 {
                bail!("--point needs 5 coordinates");
            }
            let t: Vec<Rat> = point.iter().map(|&x| Rat::from_integer(x.into())).collect();
            let v: Vec<Rat> = match kernel {
                Some(k) => k.iter().map(|&x| Rat::from_integer(x.into())).collect(),
                None => pencil
                    .gram_at(&t)
                    .nullspace()
                    .into_iter()
                    .next()
                    .ok_or_else(|| anyhow::anyhow!("the member at {point:?} is nonsingular"))?,
            };
            let x = x_point_from_singular_member(&pencil, &ints(&point), &v)?;
            let verified = x.verify(&pencil);
            let summary = format!(
                "v = {:?}, w = {:?}, bilinear vanishings {}",
                x.v.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                x.w.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                if verified { "hold" } else { "FAIL" }
            );
            let mut v = to_value(&x)?;
            v["verified"] = json!(verified);
            Ok(Report::ok("x-point", summary, v))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(n) = cli.out.workers {
        if n > 0 {
            // only fails if a pool already exists
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let report = match run(cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let value = report.to_json();
    if let Some(path) = &cli.out.out {
        let text = serde_json::to_string_pretty(&value).expect("json");
        if let Err(e) = std::fs::write(path, text + "\n") {
            eprintln!("error: writing {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    if cli.out.pretty {
        println!("{}", serde_json::to_string_pretty(&value).expect("json"));
    } else if cli.out.json {
        println!("{value}");
    } else {
        println!("{}", report.summary);
    }
    match report.status {
        Status::Ok => ExitCode::SUCCESS,
        Status::Inconclusive => ExitCode::from(2),
    }
}
