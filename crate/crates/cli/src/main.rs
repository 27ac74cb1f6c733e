mod cache;
mod report;
mod source;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use num_integer::Integer;

use dga_core::bar::BarComplex;
use dga_core::coalgebra::DGCoalgebra;
use dga_core::cobar::{counit_alpha, CobarComplex};
use dga_core::dga::InvariantCheck;
use dga_core::hochschild::HochschildComplex;
use dga_core::io::dga_to_json;
use dga_core::kraines::families::YVariant;
use dga_core::kraines::session::{run_session, SessionConfig};
use dga_core::reduction::base_change;
use dga_core::ring::is_prime;
use dga_core::uct::{integral_cohomology, uct_split};
use dga_core::{DGAlgebra, Error, RingTag};

use cache::Cache;
use report::{CheckRow, Group, Report};
use source::{Kind, Loaded};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RingMode {
    /// The prime field F_p.
    Fp,
    /// The integers.
    Z,
    /// Z/p^e with e from --exponent.
    Zpe,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Target {
    /// Cohomology of the algebra itself.
    Space,
    /// Loop-space Betti numbers from the reduced bar construction.
    Loop,
    /// Free-loop-space Betti numbers from the Hochschild complex.
    Freeloop,
    /// Kraines session: sequence growth, lifts, families and cycles.
    Kraines,
    /// Full invariant suite.
    Check,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Variant {
    Plus,
    Minus,
}

/// Exact cohomology of finite DG algebras, their loop and free-loop spaces,
/// and Kraines sequence reports.
#[derive(Parser, Debug)]
#[command(name = "dga", version)]
struct Cli {
    /// Preset expression such as `moore(3,2)`, `moore_space(p)`, a `.json` DGA file, or a facet file.
    #[arg(long)]
    source: String,

    #[arg(long, default_value_t = 2)]
    prime: u64,

    #[arg(long, value_enum, default_value_t = RingMode::Fp)]
    ring: RingMode,

    /// Exponent e for `--ring zpe`.
    #[arg(long, default_value_t = 2)]
    exponent: u32,

    /// Highest degree reported (family length for `kraines`).
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    max_degree: u64,

    /// Degree through which complexes are built; defaults to --max-degree.
    #[arg(long)]
    truncation: Option<usize>,

    #[arg(long, value_enum, default_value_t = Target::Loop)]
    target: Target,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[arg(long, env = "DGA_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    /// Sign convention for the mixed words of the y-family.
    #[arg(long, value_enum, default_value_t = Variant::Plus)]
    variant: Variant,

    /// Bound on coset representatives tried when a Kraines extension is obstructed.
    #[arg(long)]
    coset_search: Option<usize>,
}

struct Job {
    cli: Cli,
    n: usize,
    truncation: usize,
}

impl Job {
    fn field(&self) -> Result<RingTag> {
        Ok(RingTag::field(self.cli.prime)?)
    }

    fn ring(&self) -> Result<RingTag> {
        Ok(match self.cli.ring {
            RingMode::Fp => RingTag::field(self.cli.prime)?,
            RingMode::Z => RingTag::Integers,
            RingMode::Zpe => RingTag::cyclic(self.cli.prime, self.cli.exponent)?,
        })
    }

    fn cache_params(&self) -> Vec<(&'static str, String)> {
        vec![
            ("target", format!("{:?}", self.cli.target)),
            ("ring", self.ring().map(|r| r.to_string()).unwrap_or_default()),
            ("prime", self.cli.prime.to_string()),
            ("max_degree", self.n.to_string()),
            ("truncation", self.truncation.to_string()),
            ("variant", format!("{:?}", self.cli.variant)),
            ("coset_search", format!("{:?}", self.cli.coset_search)),
            ("source", self.cli.source.clone()),
        ]
    }
}

fn over(a: &DGAlgebra, ring: RingTag) -> Result<DGAlgebra> {
    if a.ring() == ring {
        return Ok(a.clone());
    }
    Ok(base_change(a, ring)?)
}

fn require_integral(a: &DGAlgebra, what: &str) -> Result<()> {
    if a.ring() != RingTag::Integers {
        return Err(Error::Ring(format!("{what} needs a source over Z, got {}", a.ring())).into());
    }
    Ok(())
}

fn pad(mut v: Vec<usize>, n: usize) -> Vec<usize> {
    v.resize(n + 1, 0);
    v
}

fn running_max(v: &[usize]) -> Vec<usize> {
    v.iter()
        .scan(0, |m, &d| {
            *m = (*m).max(d);
            Some(*m)
        })
        .collect()
}

fn betti(job: &Job, target: &str, dims: Vec<usize>, ring: RingTag) -> Report {
    Report::Betti {
        source: job.cli.source.clone(),
        target: target.into(),
        ring: ring.to_string(),
        truncation: job.truncation,
        window: job.n,
        running_max: running_max(&dims),
        dims,
    }
}

fn space(job: &Job, a: &DGAlgebra) -> Result<Report> {
    let ring = job.ring()?;
    let top = a.top_degree();
    if ring.is_field() {
        let f = over(a, ring)?;
        let (t, _) = f.cochain_complex().cohomology(job.n.min(top), "space")?;
        return Ok(betti(job, "space", pad(t.dims, job.n), ring));
    }
    require_integral(a, "integral cohomology")?;
    let through = (job.n + 1).min(top);
    let h = integral_cohomology(a, through)?;
    let empty = |d| dga_core::uct::IntegralGroup { degree: d, rank: 0, torsion: Vec::new() };
    let at = |d: usize| h.get(d).cloned().unwrap_or_else(|| empty(d));
    let groups = (0..=job.n)
        .map(|d| match ring.modulus() {
            None => {
                let g = at(d);
                Group { degree: d, rank: g.rank, torsion: g.torsion.iter().map(ToString::to_string).collect() }
            }
            Some(q) => {
                // H^d(A; Z/q) = H^d ⊗ Z/q ⊕ Tor(H^{d+1}, Z/q)
                let (g, next) = (at(d), at(d + 1));
                let torsion = g
                    .torsion
                    .iter()
                    .chain(&next.torsion)
                    .map(|t| t.gcd(&q))
                    .filter(|o| *o != 1.into())
                    .map(|o| o.to_string());
                let mut torsion: Vec<String> = torsion.collect();
                torsion.extend(std::iter::repeat_n(q.to_string(), g.rank));
                Group { degree: d, rank: 0, torsion }
            }
        })
        .collect();
    Ok(Report::Groups { source: job.cli.source.clone(), ring: ring.to_string(), window: job.n, groups })
}

fn loop_tables(job: &Job, a: &DGAlgebra, free: bool) -> Result<Report> {
    let ring = job.ring()?;
    if !ring.is_field() {
        return Err(Error::Ring("loop and free-loop tables need --ring fp".into()).into());
    }
    let f = over(a, ring)?;
    let dims = if free {
        HochschildComplex::new(&f, job.truncation)?.complex()?.cohomology(job.n, "freeloop")?.0.dims
    } else {
        BarComplex::new(&f, job.truncation)?.complex()?.cohomology(job.n, "loop")?.0.dims
    };
    Ok(betti(job, if free { "free-loop" } else { "loop" }, dims, ring))
}

fn kraines(job: &Job, a: &DGAlgebra) -> Result<Report> {
    require_integral(a, "the kraines target")?;
    let mut config = SessionConfig::new(job.cli.prime, job.n);
    config.variant = match job.cli.variant {
        Variant::Plus => YVariant::Plus,
        Variant::Minus => YVariant::Minus,
    };
    config.coset_bound = job.cli.coset_search;
    Ok(Report::Kraines { session: Box::new(run_session(a, &job.cli.source, &config)?) })
}

fn row(prefix: &str, c: InvariantCheck) -> CheckRow {
    CheckRow { name: format!("{prefix}: {}", c.name), passed: c.passed, checked: c.checked, detail: c.detail }
}

fn check(job: &Job, a: &DGAlgebra) -> Result<Report> {
    let n = job.truncation;
    let mut checks: Vec<CheckRow> = a.check_invariants().checks.into_iter().map(|c| row("algebra", c)).collect();
    let mut skipped = Vec::new();
    if !a.has_cup_one() {
        skipped.push("cup-one identities: no cup-one table".to_string());
    }
    let sound = checks.iter().all(|c| c.passed);
    match a.check_bar_ready() {
        _ if !sound => skipped.push("bar, cobar and Hochschild complexes: algebra invariants fail".into()),
        Ok(()) => {
            checks.extend(BarComplex::new(a, n)?.check_invariants().checks.into_iter().map(|c| row("bar", c)));
            checks.push(row("cobar", CobarComplex::new(&DGCoalgebra::dual_of(a)?, n)?.check_square_zero()));
            checks.extend(HochschildComplex::new(a, n)?.check_invariants().checks.into_iter().map(|c| row("hochschild", c)));
            let f = over(a, job.field()?)?;
            let alpha = counit_alpha(&f, n)?;
            let mut c = InvariantCheck::new(&format!("counit quasi-isomorphism over {}", f.ring()));
            c.record(alpha.is_quasi_isomorphism(), || format!("cobar {:?} vs algebra {:?}", alpha.cobar_betti, alpha.algebra_betti));
            checks.push(row("cobar", c));
        }
        Err(e) => skipped.push(format!("bar, cobar and Hochschild complexes: {e}")),
    }
    if !sound {
        skipped.push("UCT split: algebra invariants fail".into());
    } else if a.ring() == RingTag::Integers {
        let p = job.cli.prime;
        let split = uct_split(a, p, a.top_degree())?;
        let mut c = InvariantCheck::new(&format!("UCT split mod {p}"));
        c.record(split.consistent(), || "H0 + H1 does not span H(F_p)".into());
        for w in split.degrees.iter().flat_map(|d| &d.h1) {
            let ok = w.verify(a, p)?;
            c.record(ok, || format!("witness in degree {} fails", w.degree));
        }
        checks.push(row("uct", c));
    } else {
        skipped.push(format!("UCT split: source is over {}", a.ring()));
    }
    Ok(Report::Check { source: job.cli.source.clone(), window: n, checks, skipped })
}

fn compute(job: &Job, loaded: &Loaded) -> Result<Report> {
    let a = &loaded.algebra;
    if matches!(job.cli.target, Target::Loop | Target::Freeloop) && loaded.kind == Kind::Simplicial {
        a.check_bar_ready().context("simplicial cochain algebras are not 1-reduced")?;
    }
    match job.cli.target {
        Target::Space => space(job, a),
        Target::Loop => loop_tables(job, a, false),
        Target::Freeloop => loop_tables(job, a, true),
        Target::Kraines => kraines(job, a),
        Target::Check => check(job, a),
    }
}

fn run(cli: Cli) -> Result<bool> {
    if !is_prime(cli.prime) {
        return Err(Error::Ring(format!("{} is not prime", cli.prime)).into());
    }
    let n = usize::try_from(cli.max_degree)?;
    let truncation = cli.truncation.unwrap_or(n);
    if truncation == 0 {
        bail!(Error::Precondition("truncation must be at least 1".into()));
    }
    if cli.target != Target::Kraines && n > truncation {
        return Err(Error::Window { requested: n, limit: truncation }.into());
    }
    let loaded = source::load(&cli.source)?;
    let job = Job { cli, n, truncation };

    let cache = match (&job.cli.cache_dir, job.cli.target) {
        (Some(dir), t) if t != Target::Check => Some(Cache::open(dir)?),
        _ => None,
    };
    let key = Cache::key(&dga_to_json(&loaded.algebra), &job.cache_params());
    let cached = cache.as_ref().and_then(|c| c.get(&key)).and_then(|s| serde_json::from_str::<Report>(&s).ok());
    let report = match cached {
        Some(r) => {
            eprintln!("cache hit {key}");
            r
        }
        None => {
            let r = compute(&job, &loaded)?;
            if let Some(c) = &cache {
                c.put(&key, &r.json())?;
                eprintln!("cache store {key}");
            }
            r
        }
    };
    let out = match job.cli.format {
        Format::Text => report.text(&loaded.algebra),
        Format::Csv => report.csv(),
        Format::Json => report.json(),
    };
    print!("{out}");
    Ok(report.passed())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(Error::Window { .. }) => 4,
        Some(Error::Invariant(_) | Error::Inconsistent { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("invariant failure");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
