use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use covering::asymcover::{
    banded_value, classify_minimal_asym, lift_banded, puncture_to_banded, solve_asym, BandedDecomposition,
    CoverSource, KnownValues, SideConstraint,
};
use covering::covdesign::{cover_number, enumerate_minimal, natural_max_size, DesignConfig};
use covering::designfile::{emit_design, parse_design, DesignFile, Format};
use covering::isocanon::canonical_form;
use covering::registry::{self, BoundTarget};
use covering::repro::{run_repro, Profile, ReproOptions, TableId};
use covering::search::{Budget, ProofStatus, SolveOptions};
use covering::setsys::{is_asym_cover, is_cover_design, parse_bitstring, weight_counts, Mask, SetSystem};

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INCOMPLETE: u8 = 3;

/// Asymmetric coverings, covering numbers and design census.
///
/// Commands that produce a set system print it as a design file on stdout,
/// with results in `#` comment lines, so the output can be fed to `verify`.
#[derive(Parser)]
#[command(name = "covering", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Search procedure: greedy, lp_guided or auto.
    #[arg(long, global = true, default_value = "auto")]
    procedure: String,
    /// Stop a search after this many nodes.
    #[arg(long, global = true)]
    budget_nodes: Option<u64>,
    /// Stop a search after this many seconds.
    #[arg(long, global = true)]
    budget_seconds: Option<f64>,
    /// Worker threads (0 = one per core). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output format for set systems: bitstring or hex.
    #[arg(long, global = true, default_value = "bitstring")]
    format: Format,
    /// Table of known covering numbers (tab-separated: n k t value source).
    #[arg(long, global = true)]
    known_values: Option<PathBuf>,
    /// Seed for the randomized relabeling check of `verify`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Exit with status 3 when a budget runs out or a result is incomplete.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Minimum asymmetric covering D(n,1), with optional side constraints.
    SolveAsym {
        #[arg(long)]
        n: usize,
        /// Force a vector (bitstring) into the covering.
        #[arg(long, value_name = "BITS")]
        fix_in: Vec<String>,
        /// Forbid a vector (bitstring).
        #[arg(long, value_name = "BITS")]
        fix_out: Vec<String>,
        /// At most LIMIT vectors of weight W.
        #[arg(long, value_name = "W:LIMIT")]
        weight_max: Vec<String>,
        /// At least LIMIT vectors of weight W.
        #[arg(long, value_name = "W:LIMIT")]
        weight_min: Vec<String>,
    },
    /// Covering number C(n,k,k-1).
    SolveCover {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Census of minimal C(n,k,k-1) up to isomorphism.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Largest design size (default: the largest possible minimal size).
        #[arg(long)]
        max_size: Option<usize>,
        /// Census strategy: direct or extension.
        #[arg(long, default_value = "extension")]
        strategy: String,
        /// Print one representative per class.
        #[arg(long)]
        witnesses: bool,
    },
    /// Minimal asymmetric coverings of one size, up to isomorphism.
    Classify {
        #[arg(long)]
        n: usize,
        /// Size of the coverings to classify.
        #[arg(long)]
        max_size: usize,
    },
    /// Lift a banded asymmetric covering to a union of covering designs.
    Lift { file: PathBuf },
    /// Puncture a union of covering designs (on n+1 points) to an asymmetric covering.
    Puncture {
        file: PathBuf,
        /// 1-based coordinate to delete (default: the last).
        #[arg(long)]
        coordinate: Option<usize>,
    },
    /// Lower bound: greedy, lemma, lp (C(n,k,k-1) or D(n,1)) or E (D(n,1) only).
    Bound {
        strategy: String,
        #[arg(long)]
        n: usize,
        /// Block size; omit for the asymmetric instance.
        #[arg(long)]
        k: Option<usize>,
    },
    /// C(n) as a sum of covering numbers one length up, with provenance.
    ComposeBanded {
        #[arg(long)]
        n: usize,
        /// Compute the summands instead of looking them up.
        #[arg(long)]
        computed: bool,
    },
    /// Check a design file: C(n,k,t) if the header gives k, else D(n,1).
    Verify {
        file: PathBuf,
        /// Covered subset size (default k-1).
        #[arg(long)]
        t: Option<usize>,
    },
    /// Reproduce a published table: T1, T4 or T5.
    Repro {
        table: TableId,
        /// quick or full.
        #[arg(long, default_value = "quick")]
        profile: Profile,
        /// Print tab-separated lines instead of the aligned table.
        #[arg(long)]
        machine: bool,
    },
}

impl Global {
    fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            budget: Budget {
                max_nodes: self.budget_nodes,
                max_time: self.budget_seconds.map(Duration::from_secs_f64),
            },
            threads: self.threads,
        }
    }

    fn known(&self) -> anyhow::Result<KnownValues> {
        Ok(match &self.known_values {
            Some(p) => KnownValues::load(p)?,
            None => KnownValues::bundled(),
        })
    }

    fn incomplete(&self) -> u8 {
        if self.strict {
            EXIT_INCOMPLETE
        } else {
            0
        }
    }
}

fn read_design(path: &Path) -> anyhow::Result<DesignFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_design(&text).with_context(|| path.display().to_string())
}

fn weight_limit(spec: &str) -> anyhow::Result<(u32, u32)> {
    let (w, l) = spec
        .split_once(':')
        .ok_or_else(|| anyhow!("expected W:LIMIT, got {spec:?}"))?;
    Ok((w.trim().parse()?, l.trim().parse()?))
}

fn status_text(status: &ProofStatus) -> String {
    match status {
        ProofStatus::Optimal => "optimal".into(),
        ProofStatus::Infeasible => "infeasible".into(),
        ProofStatus::Bounds { lo, hi: Some(hi) } => format!("bounds {lo}..{hi}"),
        ProofStatus::Bounds { lo, hi: None } => format!("bounds >= {lo}"),
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let g = &cli.global;
    match cli.cmd {
        Cmd::SolveAsym {
            n,
            fix_in,
            fix_out,
            weight_max,
            weight_min,
        } => {
            let mut cons = Vec::new();
            for b in &fix_in {
                cons.push(SideConstraint::FixIn(parse_bitstring(n, b).map_err(|e| anyhow!(e))?));
            }
            for b in &fix_out {
                cons.push(SideConstraint::FixOut(parse_bitstring(n, b).map_err(|e| anyhow!(e))?));
            }
            for s in &weight_max {
                let (w, limit) = weight_limit(s)?;
                cons.push(SideConstraint::WeightClassMax { w, limit });
            }
            for s in &weight_min {
                let (w, limit) = weight_limit(s)?;
                cons.push(SideConstraint::WeightClassMin { w, limit });
            }
            let solver = registry::solver(&g.procedure)?;
            let r = solve_asym(n, &cons, solver, &g.solve_options())?;
            match &r.lp_bound {
                Some(b) => println!("# symmetrized LP bound {}", covering::exactlp::mixed(b)),
                None => println!("# symmetrized LP infeasible"),
            }
            match r.value {
                Some(v) => println!("# D({n},1) = {v} ({})", status_text(&r.status)),
                None => println!("# D({n},1): {}", status_text(&r.status)),
            }
            eprintln!("nodes {}", r.nodes);
            if let Some(w) = &r.witness {
                print!("{}", emit_design(w, None, g.format));
            }
            Ok(match r.status {
                ProofStatus::Bounds { .. } => g.incomplete(),
                _ => 0,
            })
        }
        Cmd::SolveCover { n, k } => {
            let cfg = DesignConfig {
                opts: g.solve_options(),
                ..DesignConfig::default()
            };
            let r = cover_number(n, k, registry::solver(&g.procedure)?, &cfg)?;
            println!("# C({n},{k},{}) = {} ({})", k - 1, r.value, status_text(&r.status));
            println!("# root bound {}", r.root_bound);
            eprintln!("nodes {}", r.nodes);
            print!("{}", emit_design(&r.witness, Some(k), g.format));
            Ok(if r.is_optimal() { 0 } else { g.incomplete() })
        }
        Cmd::Enumerate {
            n,
            k,
            max_size,
            strategy,
            witnesses,
        } => {
            if k < 2 || k > n {
                bail!(covering::Error::Parameter("need 2 <= k <= n".into()));
            }
            let max_size = max_size.unwrap_or_else(|| natural_max_size(n, k));
            let strat = registry::census_strategy(&strategy)?;
            let c = enumerate_minimal(n, k, max_size, strat, &g.solve_options())?;
            println!("# minimal C({n},{k},{}) up to size {max_size}", k - 1);
            for e in &c.entries {
                println!("# size {} count {}", e.size, e.count);
            }
            println!("# {}", if c.complete { "complete" } else { "incomplete (budget)" });
            eprintln!("nodes {}", c.nodes);
            if witnesses {
                for e in &c.entries {
                    for w in &e.witnesses {
                        print!("{}", emit_design(w, Some(k), g.format));
                    }
                }
            }
            Ok(if c.complete { 0 } else { g.incomplete() })
        }
        Cmd::Classify { n, max_size } => {
            let c = classify_minimal_asym(n, max_size, &g.solve_options())?;
            let banded = c.classes.iter().filter(|c| c.1).count();
            println!(
                "# {} classes of minimal D({n},1) coverings of size {max_size}, {banded} banded{}",
                c.classes.len(),
                if c.complete { "" } else { " (incomplete)" }
            );
            println!("# banded classes lift to {} classes of unions of designs", c.lifted_classes);
            for (i, (d, b)) in c.classes.iter().enumerate() {
                println!("# class {} {}", i + 1, if *b { "banded" } else { "not banded" });
                print!("{}", emit_design(d, None, g.format));
            }
            Ok(if c.complete { 0 } else { g.incomplete() })
        }
        Cmd::Lift { file } => {
            let d = read_design(&file)?.system;
            let lifted = lift_banded(&d)?;
            for (i, l) in lifted.layers.iter().enumerate() {
                let k = d.n() + 1 - 2 * i;
                println!("# layer {i}: {} blocks of C({},{k},{})", l.len(), d.n() + 1, k - 1);
            }
            print!("{}", emit_design(&lifted.blocks(), None, g.format));
            Ok(0)
        }
        Cmd::Puncture { file, coordinate } => {
            let u = read_design(&file)?.system;
            if u.n() < 2 {
                bail!(covering::Error::Parameter("need at least 2 points".into()));
            }
            let dec = BandedDecomposition::from_blocks(u.n() - 1, &u)?;
            let d = puncture_to_banded(&dec, coordinate.unwrap_or(u.n()))?;
            println!("# D({},1) covering with {} blocks", d.n(), d.len());
            print!("{}", emit_design(&d, None, g.format));
            Ok(0)
        }
        Cmd::Bound { strategy, n, k } => {
            let target = match k {
                Some(k) => BoundTarget::Design { n, k },
                None => BoundTarget::Asym { n },
            };
            let r = registry::bound_strategy(&strategy)?.bound(target)?;
            match r.fractional {
                Some(f) => println!("{} (from {})", r.value, covering::exactlp::mixed(&f)),
                None => println!("{}", r.value),
            }
            Ok(0)
        }
        Cmd::ComposeBanded { n, computed } => {
            let known = g.known()?;
            let cfg = DesignConfig {
                opts: g.solve_options(),
                ..DesignConfig::default()
            };
            let source = if computed {
                CoverSource::Computed {
                    solver: registry::solver(&g.procedure)?,
                    cfg: &cfg,
                }
            } else {
                CoverSource::Known(&known)
            };
            let bv = banded_value(n, source)?;
            for s in &bv.summands {
                let v = s.value.map_or("?".to_string(), |v| v.to_string());
                let p = s.provenance.as_ref().map_or("unknown".to_string(), |p| p.to_string());
                println!("C({},{},{}) = {v}  [{p}]", s.n, s.k, s.k - 1);
            }
            match bv.value {
                Some(v) => {
                    println!("C({n}) = {v}");
                    Ok(0)
                }
                None => {
                    println!("C({n}) unknown: missing {:?}", bv.missing());
                    Ok(g.incomplete())
                }
            }
        }
        Cmd::Verify { file, t } => {
            let f = read_design(&file)?;
            let d = &f.system;
            let ok = match f.k {
                Some(k) => {
                    let t = t.unwrap_or(k.saturating_sub(1));
                    let ok = is_cover_design(d, k, t)?;
                    println!("C({},{k},{t}) covering: {}", d.n(), if ok { "yes" } else { "no" });
                    ok
                }
                None => {
                    let ok = is_asym_cover(d, 1)?;
                    println!("D({},1) covering: {}", d.n(), if ok { "yes" } else { "no" });
                    ok
                }
            };
            println!("blocks {}", d.len());
            println!("weights {:?}", weight_counts(d).counts);
            let canon = canonical_form(d);
            if let Ok(c) = &canon {
                println!("automorphism group order {}", c.aut_order);
            }
            if let Some(seed) = g.seed {
                relabel_check(d, f.k, seed, canon.ok().map(|c| c.canonical_blocks))?;
                println!("random relabeling (seed {seed}): consistent");
            }
            Ok(if ok { 0 } else { EXIT_MISMATCH })
        }
        Cmd::Repro {
            table,
            profile,
            machine,
        } => {
            let opts = ReproOptions {
                profile,
                threads: g.threads,
                known: g.known()?,
            };
            let r = run_repro(table, &opts)?;
            if machine {
                print!("{}", r.machine_lines());
            } else {
                print!("{}", r.render_text());
            }
            Ok(r.exit_code(g.strict) as u8)
        }
    }
}

/// Relabels the points at random and checks the verdict and canonical form
/// do not change.
fn relabel_check(d: &SetSystem, k: Option<usize>, seed: u64, canon: Option<Vec<Mask>>) -> anyhow::Result<()> {
    let mut perm: Vec<usize> = (0..d.n()).collect();
    perm.shuffle(&mut StdRng::seed_from_u64(seed));
    let p = d.permuted(&perm);
    let same = match k {
        Some(k) => is_cover_design(&p, k, k.saturating_sub(1))? == is_cover_design(d, k, k.saturating_sub(1))?,
        None => is_asym_cover(&p, 1)? == is_asym_cover(d, 1)?,
    };
    let same_canon = canon.map_or(true, |c| canonical_form(&p).map(|pc| pc.canonical_blocks) == Ok(c));
    if !(same && same_canon) {
        bail!(covering::Error::Internal(format!("relabeling {perm:?} changed the result")));
    }
    Ok(())
}

fn exit_for(e: &anyhow::Error) -> u8 {
    use covering::Error as E;
    match e.downcast_ref::<E>() {
        Some(E::Parameter(_) | E::Parse { .. } | E::Size(_) | E::Capability(_)) => EXIT_USAGE,
        Some(_) => EXIT_MISMATCH,
        None => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_for(&e))
        }
    }
}
