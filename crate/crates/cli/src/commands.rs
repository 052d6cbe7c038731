use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use fmtlab::compose::sum_theory;
use fmtlab::distorted::{bth, uth};
use fmtlab::logic::{catalog, eval_sentence, parse, Formula};
use fmtlab::rand_lab::{
    coupling_check, estimate_prob, exact_zeta, order_alphabet, parse_rational, ramsey_upper, sample_graph_order,
    vw_sweep, xi_37, xi_38, zeta_lower, CouplingMode, DrunkardParams, EstimationResult, PSeq,
};
use fmtlab::rand_lab::in_pool;
use fmtlab::theory::sentence_theory;
use fmtlab::verify::{run_one, VerifyConfig};
use fmtlab::{ordered_sum, th, FGrowth, LiftMode, Structure, System, Vocabulary};
use serde_json::Value;

use crate::args::{Cli, Command, FormulaArgs, Kind, Lift, Mode, NRange, RandomArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

fn usage(e: impl Display) -> CliError {
    CliError::Usage(e.to_string())
}

type Result<T> = std::result::Result<T, CliError>;

/// Defaults read from `--config`; explicit flags win.
fn apply_config(path: &Path, formula: Option<&mut FormulaArgs>, random: Option<&mut RandomArgs>) -> Result<()> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let obj = v.as_object().ok_or_else(|| usage("config must be a JSON object"))?;
    for key in obj.keys() {
        if !["pseq", "formula", "formula_name", "n", "samples", "seed"].contains(&key.as_str()) {
            return Err(usage(format!("unknown config key `{key}`")));
        }
    }
    let text_of = |k: &str| -> Result<Option<String>> {
        match obj.get(k) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(Value::Number(x)) => Ok(Some(x.to_string())),
            Some(other) => Err(usage(format!("config `{k}` has unexpected value {other}"))),
        }
    };
    if let Some(f) = formula {
        f.formula = f.formula.take().or(text_of("formula")?);
        f.formula_name = f.formula_name.take().or(text_of("formula_name")?);
    }
    if let Some(r) = random {
        r.pseq = r.pseq.take().or(text_of("pseq")?);
        if r.n.is_none() {
            r.n = text_of("n")?.map(|s| s.parse()).transpose().map_err(usage)?;
        }
        if r.samples.is_none() {
            r.samples = text_of("samples")?.map(|s| s.parse()).transpose().map_err(usage)?;
        }
        if r.seed.is_none() {
            r.seed = text_of("seed")?.map(|s| s.parse()).transpose().map_err(usage)?;
        }
    }
    Ok(())
}

fn read_structure(path: &Path) -> Result<Structure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Structure::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// The formula and the name used for it in CSV output.
fn formula(args: &FormulaArgs, vocab: &Vocabulary) -> Result<(String, Formula)> {
    match (&args.formula, &args.formula_name) {
        (Some(_), Some(_)) => Err(usage("give --formula or --formula-name, not both")),
        (Some(text), None) => Ok(("formula".into(), parse(text, vocab).map_err(usage)?)),
        (None, Some(name)) => {
            let f = catalog::lookup(name).ok_or_else(|| {
                usage(format!("unknown sentence `{name}`; known: {}", catalog::names().join(", ")))
            })?;
            Ok((name.clone(), f))
        }
        (None, None) => Err(usage("missing --formula or --formula-name")),
    }
}

fn list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| usage(format!("bad {what} `{s}`"))))
        .collect()
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

struct Random {
    p: PSeq,
    n: NRange,
    samples: usize,
    seed: u64,
}

fn random(r: &RandomArgs, default_samples: Option<usize>) -> Result<Random> {
    let p = r.pseq.as_deref().ok_or_else(|| usage("missing --pseq"))?.parse().map_err(usage)?;
    let n = r.n.ok_or_else(|| usage("missing --n"))?;
    let samples = r.samples.or(default_samples).ok_or_else(|| usage("missing --samples"))?;
    if samples == 0 {
        return Err(usage("--samples must be positive"));
    }
    let seed = r.seed.ok_or_else(|| usage("missing --seed; randomized commands need an explicit seed"))?;
    Ok(Random { p, n, samples, seed })
}

fn single(n: NRange) -> Result<usize> {
    if n.lo != n.hi {
        return Err(usage("this command takes a single --n"));
    }
    Ok(n.lo)
}

pub fn run(mut cli: Cli) -> Result<()> {
    if let Some(path) = cli.config.clone() {
        match &mut cli.command {
            Command::Check { formula, .. } => apply_config(&path, Some(formula), None)?,
            Command::Estimate { formula, random } | Command::Vwlaw { formula, random } => {
                apply_config(&path, Some(formula), Some(random))?
            }
            Command::Sample { random } | Command::Coupling { random, .. } => apply_config(&path, None, Some(random))?,
            _ => return Err(usage("--config applies to check, sample, estimate, vwlaw and coupling")),
        }
    }
    eprintln!("# fmtlab workers={} {:?}", cli.workers, cli.command);
    let workers = cli.workers;
    in_pool(workers, move || dispatch(cli.command))
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Check { structure, formula: fa } => {
            let m = read_structure(&structure)?;
            let (_, f) = formula(&fa, m.vocab())?;
            println!("{}", eval_sentence(&m, &f).map_err(usage)?);
        }
        Command::Theory { structure, tuple, depth, radius, radii, kind, lift } => {
            let m = read_structure(&structure)?;
            let tuple: Vec<usize> = list(&tuple, "element")?;
            if let Some(&x) = tuple.iter().find(|&&x| x >= m.size()) {
                return Err(usage(format!("element {x} out of range for a structure of size {}", m.size())));
            }
            let mode = match lift {
                Lift::Sim => LiftMode::Sim,
                Lift::Dis => LiftMode::Dis,
            };
            let f = FGrowth::default();
            let t = match kind {
                Kind::Th => th(&m, &tuple, depth, radius).map_err(usage)?,
                Kind::Bth => bth(&System::lift(&m, mode), &tuple, depth, radius, &f).map_err(usage)?,
                Kind::Uth => {
                    let s = System::lift(&m, mode);
                    let radii: Vec<u32> = match radii {
                        Some(text) => list(&text, "radius")?,
                        None => vec![radius; tuple.len()],
                    };
                    if radii.len() != tuple.len() {
                        return Err(usage("--radii needs one entry per tuple element"));
                    }
                    let flat: Vec<usize> = tuple.iter().map(|&x| s.i_elem(x)).collect();
                    uth(&s, &flat, depth, &radii, &f).map_err(usage)?
                }
            };
            println!("{}", t.encode());
            eprintln!("# digest {}", t.digest());
        }
        Command::Compose { structure, depth } => {
            let parts = structure.iter().map(|p| read_structure(p)).collect::<Result<Vec<_>>>()?;
            let theories: Vec<_> = parts.iter().map(|m| sentence_theory(m, depth)).collect();
            let folded = sum_theory(&theories).map_err(usage)?;
            let direct = sentence_theory(&ordered_sum(&parts).map_err(usage)?, depth);
            println!("composed {}", folded.digest());
            println!("direct   {}", direct.digest());
            println!("{}", folded.encode());
            if folded != direct {
                return Err(CliError::Failed("composed theory differs from the direct computation".into()));
            }
        }
        Command::Sample { random: ra } => {
            let r = random(&ra, Some(1))?;
            let m = sample_graph_order(&r.p, single(r.n)?, r.seed);
            emit(&ra.out, &format!("{}\n", m.to_json()))?;
        }
        Command::Estimate { formula: fa, random: ra } => {
            let r = random(&ra, None)?;
            let (name, f) = formula(&fa, &Vocabulary::graph_order())?;
            let mut out = format!("{}\n", EstimationResult::CSV_HEADER);
            for n in r.n.lo..=r.n.hi {
                let row = estimate_prob(&r.p, n, &name, &f, r.samples, r.seed).map_err(usage)?;
                out.push_str(&row.csv_row());
                out.push('\n');
            }
            emit(&ra.out, &out)?;
        }
        Command::Vwlaw { formula: fa, random: ra } => {
            let r = random(&ra, None)?;
            let (name, f) = formula(&fa, &Vocabulary::graph_order())?;
            let sweep = vw_sweep(&r.p, &name, &f, r.n.lo..=r.n.hi, r.samples, r.seed).map_err(usage)?;
            emit(&ra.out, &sweep.to_csv())?;
        }
        Command::Coupling { random: ra, mode, k_star, d_theta, stride, cutpoints, epsilon, layout } => {
            let (mode, default_samples) = match mode {
                Mode::Exact => (CouplingMode::Exact, Some(1)),
                Mode::Chisq => (CouplingMode::Chisq, Some(100_000)),
            };
            let mut ra = ra;
            if mode == CouplingMode::Exact {
                ra.seed = ra.seed.or(Some(0));
            }
            let r = random(&ra, default_samples)?;
            let mut params = DrunkardParams::new(r.p, single(r.n)?, k_star);
            params.d_theta = d_theta;
            params.stride = stride;
            params.epsilon = epsilon;
            params.cutpoints = cutpoints.map(|c| list(&c, "cutpoint")).transpose()?;
            params.layout = layout.parse().map_err(usage)?;
            let report = coupling_check(&params, mode, r.samples, r.seed).map_err(usage)?;
            println!("{report}");
            if let Some(path) = &ra.out {
                emit(&Some(path.clone()), &report.to_csv())?;
            }
            if !report.passed() {
                return Err(CliError::Failed("coupled laws differ from the ordinary laws".into()));
            }
        }
        Command::Bounds { zeta_lower: k0, xi_k, ell, xi_table, j0, xi_j0, ramsey_c, exact_zeta: zk, depth } => {
            let mut any = false;
            if let Some(k0) = k0 {
                println!("{}", zeta_lower(k0).map_err(usage)?);
                any = true;
            }
            if let Some(table) = xi_table {
                let xi = parse_rational(xi_k.as_deref().ok_or_else(|| usage("--xi-table needs --xi-k"))?).map_err(usage)?;
                let table = table.split(',').map(parse_rational).collect::<std::result::Result<Vec<_>, _>>().map_err(usage)?;
                println!("{}", xi_37(&xi, ell.unwrap_or(table.len()), &table).map_err(usage)?);
                any = true;
            }
            if let Some(j0) = j0 {
                let xi = parse_rational(xi_k.as_deref().ok_or_else(|| usage("--j0 needs --xi-k"))?).map_err(usage)?;
                let xj = parse_rational(xi_j0.as_deref().ok_or_else(|| usage("--j0 needs --xi-j0"))?).map_err(usage)?;
                let l = ell.ok_or_else(|| usage("--j0 needs --ell"))?;
                println!("{}", xi_38(&xi, l, j0, &xj).map_err(usage)?);
                any = true;
            }
            if let Some(c) = ramsey_c {
                println!("{}", ramsey_upper(c, depth).map_err(usage)?);
                any = true;
            }
            if let Some(k) = zk {
                let z = exact_zeta(k, &order_alphabet(depth)).map_err(usage)?;
                println!("{} {}", z.zeta, z.zeta_scaled);
                any = true;
            }
            if !any {
                return Err(usage("bounds needs at least one of --zeta-lower, --xi-table, --j0, --ramsey-c, --exact-zeta"));
            }
        }
        Command::Verify { seed, only, quick } => {
            let mut cfg = VerifyConfig { seed, ..VerifyConfig::default() };
            if quick {
                cfg.coupling_samples = 20_000;
                cfg.sweep_samples = 2_000;
                cfg.cutpoint_samples = 2_000;
            }
            let ids: Vec<u8> = match only {
                Some(text) => list(&text, "suite number")?,
                None => (1..=10).collect(),
            };
            let mut failed = Vec::new();
            for id in ids {
                let c = run_one(id, &cfg).ok_or_else(|| usage(format!("no suite {id}; suites are 1 to 10")))?;
                println!("{c}");
                if !c.passed {
                    failed.push(id);
                }
            }
            if !failed.is_empty() {
                return Err(CliError::Failed(format!("suites {failed:?}")));
            }
        }
    }
    Ok(())
}
