use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use essimg::dynamics::HullKind;
use essimg::images;
use essimg::markov::{build_cylinder_system, verify_markov_formulas};
use essimg::oracle::{self, OracleAnswer, OracleMode, OracleRequest};
use essimg::tail;
use essimg::{DynSystem, InvarianceKind, MSet, MarkovModel, Modulus, Orbit, Rat, Space};
use thiserror::Error;

use crate::fixtures;
use crate::parse::{self, parse_rat, resolve_set, ParseError, SystemFile, SystemSpec};
use crate::report::Report;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: {source}")]
    Parse {
        file: String,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Lib(#[from] essimg::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 1 for a failed internal cross-check, 2 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(essimg::Error::CrossCheck(_)) => 1,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Usage(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Forward,
    Invariant,
    Tail,
}

/// Essential images and ergodic properties of finite non-invertible systems.
#[derive(Debug, Parser)]
#[command(name = "essimg", version)]
pub struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a system or model file.
    Validate { file: String },
    /// Classification, nonsingular part, tail algebra and exactness.
    Analyze {
        file: String,
        #[arg(long)]
        normalize: bool,
        /// Invariant probability as `atom: mass` lines.
        #[arg(long)]
        mu: Option<PathBuf>,
    },
    /// Set image and essential image of a set.
    Image {
        file: String,
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 1)]
        power: usize,
    },
    /// Forward invariant, invariant or tail hull of a set.
    Hull {
        file: String,
        #[arg(long)]
        set: String,
        #[arg(long, value_enum)]
        kind: Kind,
    },
    /// Whether two sets remain separated.
    Separated {
        file: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Smallest and largest corridor of a tail set, or check given terms.
    Corridor {
        file: String,
        #[arg(long)]
        set: String,
        /// Terms as `pre:` and `period:` lines of `;`-separated sets.
        #[arg(long)]
        verify: Option<PathBuf>,
    },
    /// Compile a Markov model into its cylinder system.
    Markov {
        file: String,
        #[arg(long)]
        depth: usize,
        /// Comma-separated state prefix.
        #[arg(long)]
        cylinder: Option<String>,
        #[arg(long)]
        verify_formulas: bool,
    },
    /// Brute-force answer compared with the fast path.
    Oracle {
        file: String,
        #[arg(long)]
        mode: String,
        #[arg(long)]
        set: Option<String>,
    },
    /// Smallest complement size that forces a large image.
    Modulus {
        file: String,
        #[arg(long)]
        epsilon: String,
        #[arg(long)]
        normalize: bool,
    },
    /// Print a shipped fixture, or list them.
    Fixture { name: Option<String> },
}

/// What a command produced: a report, raw text, and whether every
/// property check passed.
pub enum Output {
    Report(Report, bool),
    Raw(String),
}

fn load(file: &str) -> Result<SystemFile> {
    let path = Path::new(file);
    let (name, text) = if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: file.to_string(),
            source,
        })?;
        let stem = path.file_stem().map_or(file.to_string(), |s| s.to_string_lossy().into_owned());
        (stem, text)
    } else if let Some((name, _, text)) = fixtures::lookup(file) {
        (name, text)
    } else {
        return Err(CliError::Io {
            path: file.to_string(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or fixture"),
        });
    };
    parse::parse_system_file(&name, &text).map_err(|source| CliError::Parse {
        file: file.to_string(),
        source,
    })
}

fn load_system(file: &str) -> Result<SystemSpec> {
    match load(file)? {
        SystemFile::System(s) => Ok(s),
        SystemFile::Markov { .. } => usage(format!("{file} is a Markov model; use `markov`")),
    }
}

fn load_model(file: &str) -> Result<(String, MarkovModel)> {
    match load(file)? {
        SystemFile::Markov { name, model } => Ok((name, model)),
        SystemFile::System(_) => usage(format!("{file} is not a Markov model")),
    }
}

fn dyn_system(spec: &SystemSpec) -> Result<DynSystem> {
    Ok(DynSystem::new(spec.map.clone())?)
}

/// A named set of the file, or atom and point names separated by commas
/// or spaces.
fn set_arg(spec: &SystemSpec, space: &Space, arg: &str) -> Result<MSet> {
    if let Some(a) = spec.sets.get(arg) {
        return Ok(space.transport(a));
    }
    if arg == space.name() && space.atom_index(arg).is_none() && space.point_index(arg).is_none() {
        return Ok(space.full());
    }
    let toks: Vec<String> = arg
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect();
    resolve_set(space, &toks, 0, arg).or_else(|e| match e {
        ParseError::UnknownIdentifier { ident, .. } => usage(format!("unknown set, atom or point {ident:?}")),
        e => usage(e.to_string()),
    })
}

fn point_names(space: &Space, pts: &fixedbitset::FixedBitSet) -> String {
    pts.ones().map(|p| space.point_name(p)).collect::<Vec<_>>().join(" ")
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// `atom: mass` lines; unlisted atoms get mass 0.
fn parse_mu(space: &Space, text: &str) -> Result<Vec<Rat>> {
    let mut mu = vec![Rat::from_integer(0.into()); space.num_atoms()];
    for (i, l) in text.lines().enumerate() {
        let l = l.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let err = |source| CliError::Parse {
            file: "--mu".into(),
            source,
        };
        let Some((a, m)) = l.rsplit_once(':') else {
            return Err(err(ParseError::Syntax {
                line: i + 1,
                msg: "expected `<atom>: <mass>`".into(),
            }));
        };
        let Some(a) = space.atom_index(a.trim()) else {
            return Err(err(ParseError::UnknownIdentifier {
                line: i + 1,
                ident: a.trim().into(),
            }));
        };
        mu[a] = parse_rat(m.trim(), i + 1).map_err(err)?;
    }
    Ok(mu)
}

/// Corridor terms: `pre:` and `period:` lines of `;`-separated sets.
fn parse_terms(spec: &SystemSpec, space: &Space, text: &str) -> Result<Orbit<MSet>> {
    let mut pre = None;
    let mut period = None;
    for l in text.lines() {
        let l = l.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let (slot, rest) = if let Some(r) = l.strip_prefix("pre:") {
            (&mut pre, r)
        } else if let Some(r) = l.strip_prefix("period:") {
            (&mut period, r)
        } else {
            return usage(format!("corridor terms: unexpected line {l:?}"));
        };
        let sets = rest
            .split(';')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| set_arg(spec, space, t))
            .collect::<Result<Vec<_>>>()?;
        *slot = Some(sets);
    }
    let period = period.unwrap_or_default();
    if period.is_empty() {
        return usage("corridor terms need a nonempty `period:` line");
    }
    Ok(Orbit::new(pre.unwrap_or_default(), period))
}

pub fn execute(command: Command) -> Result<Output> {
    match command {
        Command::Validate { file } => validate(&file),
        Command::Analyze { file, normalize, mu } => analyze(&file, normalize, mu.as_deref()),
        Command::Image { file, set, power } => image(&file, &set, power),
        Command::Hull { file, set, kind } => hull(&file, &set, kind),
        Command::Separated { file, a, b } => separated(&file, &a, &b),
        Command::Corridor { file, set, verify } => corridor(&file, &set, verify.as_deref()),
        Command::Markov {
            file,
            depth,
            cylinder,
            verify_formulas,
        } => markov_cmd(&file, depth, cylinder.as_deref(), verify_formulas),
        Command::Oracle { file, mode, set } => oracle_cmd(&file, &mode, set.as_deref()),
        Command::Modulus {
            file,
            epsilon,
            normalize,
        } => modulus(&file, &epsilon, normalize),
        Command::Fixture { name } => fixture(name.as_deref()),
    }
}

fn validate(file: &str) -> Result<Output> {
    match load(file)? {
        SystemFile::System(spec) => {
            let x = spec.map.domain();
            let y = spec.map.codomain();
            let mut r = Report::new(&spec.name);
            r.value("points", x.num_points())
                .value("atoms", x.num_atoms())
                .value("measure", x.total())
                .property("endomap", spec.map.is_endomap());
            if !spec.map.is_endomap() {
                r.value("codomain_points", y.num_points())
                    .value("codomain_atoms", y.num_atoms())
                    .value("codomain_measure", y.total());
            }
            r.property("null_preserving", true);
            for (id, a) in &spec.sets {
                r.set(&format!("set[{id}]"), x, a);
            }
            Ok(Output::Report(r, true))
        }
        SystemFile::Markov { name, model } => {
            let mut r = Report::new(name);
            r.value("states", model.states().join(" "))
                .property("stationary", model.is_stationary())
                .property("irreducible", model.is_irreducible());
            if let Some(p) = MarkovModel::stationary_distribution(model.trans()) {
                r.value(
                    "stationary_distribution",
                    p.iter().map(Rat::to_string).collect::<Vec<_>>().join(" "),
                );
            }
            Ok(Output::Report(r, true))
        }
    }
}

fn analyze(file: &str, normalize: bool, mu: Option<&Path>) -> Result<Output> {
    let spec = load_system(file)?;
    let mut s = dyn_system(&spec)?;
    if normalize {
        s = s.normalized()?;
    }
    let x = s.space().clone();
    let mu = match mu {
        Some(p) => Some(parse_mu(&x, &read(p)?)?),
        None => None,
    };
    let class = s.classify()?;
    let ex = tail::exactness_report(&s, mu.as_deref())?;
    let part = s.nonsingular_part();
    let last = part.chain.len() - 1;
    let chain = Orbit::new(part.chain[..last].to_vec(), vec![part.chain[last].clone()]);

    let mut r = Report::new(&spec.name);
    r.property("nonsingular", class.nonsingular)
        .property("conservative", class.conservative)
        .property("ergodic", class.ergodic)
        .property("exact", ex.exact)
        .property("limsup_full", ex.limsup_full)
        .set("nonsingular_part", &x, &part.set)
        .chain("nonsingular_chain", &x, &chain)
        .maybe_set("singular_witness", &x, class.singular_witness.as_ref())
        .maybe_set("wandering_witness", &x, class.wandering_witness.as_ref())
        .maybe_set("invariant_witness", &x, class.invariant_witness.as_ref())
        .sets("tail_blocks", &x, &ex.tail.blocks)
        .value("tail_depth", ex.tail.depth);
    match ex.separated_pair {
        Some((a, b)) => r.sets("separated_pair", &x, &[x.atom(a), x.atom(b)]),
        None => r.maybe_set("separated_pair", &x, None),
    };
    r.maybe_set("limsup_witness", &x, ex.limsup_witness.map(|a| x.atom(a)).as_ref())
        .property("separation_criterion", ex.criterion.holds)
        .maybe_set("self_separated", &x, ex.criterion.self_separated.as_ref());
    if let Some(growth) = &ex.image_growth {
        for (a, limit) in growth {
            r.value(&format!("image_growth[{}]", x.atom_name(*a)), limit);
        }
    }
    Ok(Output::Report(r, true))
}

fn image(file: &str, set: &str, power: usize) -> Result<Output> {
    let spec = load_system(file)?;
    let map = &spec.map;
    let x = map.domain();
    let y = map.codomain();
    let a = set_arg(&spec, x, set)?;
    let mut r = Report::new(&spec.name);
    r.set("set", x, &a).value("measure", x.measure(&a));
    if power == 1 {
        let rep = images::set_image_report(map, &a)?;
        r.value(
            "set_image",
            format!(
                "{{{}}} (measure {})",
                point_names(y, &rep.set_image_points),
                y.outer_measure(&rep.set_image_points)
            ),
        )
        .property("set_image_measurable", rep.is_measurable)
        .set("measurable_hull", y, &rep.measurable_hull)
        .set("essential_image", y, &rep.essential_image)
        .set("normal_version", x, &rep.normal_version);
    } else {
        let s = dyn_system(&spec)?;
        r.value("power", power)
            .set("essential_image", x, &s.image_power(&a, power))
            .chain("image_orbit", x, &s.image_orbit(&a));
    }
    Ok(Output::Report(r, true))
}

fn hull(file: &str, set: &str, kind: Kind) -> Result<Output> {
    let spec = load_system(file)?;
    let s = dyn_system(&spec)?;
    let x = s.space();
    let a = set_arg(&spec, x, set)?;
    let (h, name) = match kind {
        Kind::Forward => (s.hull(&a, HullKind::Forward)?, "forward"),
        Kind::Invariant => (s.hull(&a, HullKind::Invariant)?, "invariant"),
        Kind::Tail => (tail::tail_hull(&s, &a)?, "tail"),
    };
    let mut r = Report::new(&spec.name);
    r.set("set", x, &a).value("kind", name).set("hull", x, &h);
    if kind == Kind::Tail {
        r.property("is_tail_set", tail::is_tail_set(&s, &a)?);
    }
    Ok(Output::Report(r, true))
}

fn separated(file: &str, a: &str, b: &str) -> Result<Output> {
    let spec = load_system(file)?;
    let s = dyn_system(&spec)?;
    let x = s.space();
    let (sa, sb) = (set_arg(&spec, x, a)?, set_arg(&spec, x, b)?);
    let sep = tail::remain_separated(&s, &sa, &sb)?;
    let mut r = Report::new(&spec.name);
    r.set("a", x, &sa)
        .set("b", x, &sb)
        .property("remain_separated", sep)
        .set("tail_hull_a", x, &tail::tail_hull(&s, &sa)?)
        .set("tail_hull_b", x, &tail::tail_hull(&s, &sb)?);
    Ok(Output::Report(r, true))
}

fn corridor(file: &str, set: &str, verify: Option<&Path>) -> Result<Output> {
    let spec = load_system(file)?;
    let s = dyn_system(&spec)?;
    let x = s.space();
    let a = set_arg(&spec, x, set)?;
    let mut r = Report::new(&spec.name);
    r.set("entrance", x, &a);
    match verify {
        None => {
            let b = tail::corridor_bounds(&s, &a)?;
            r.chain("smallest", x, &b.smallest.terms)
                .chain("largest", x, &b.largest.terms);
            let image = s.image(&a);
            let image_tail = tail::is_tail_set(&s, &image)?;
            r.set("image", x, &image).property("image_is_tail", image_tail);
            let shifted = b.smallest.terms.shifted();
            let shift_ok = image_tail && tail::verify_corridor(&s, &image, &shifted)?;
            r.chain("shifted", x, &shifted).property("shift_is_corridor", shift_ok);
        }
        Some(p) => {
            let terms = parse_terms(&spec, x, &read(p)?)?;
            let ok = tail::verify_corridor(&s, &a, &terms)?;
            r.chain("terms", x, &terms).property("corridor", ok);
        }
    }
    Ok(Output::Report(r, true))
}

fn markov_cmd(file: &str, depth: usize, cylinder: Option<&str>, verify: bool) -> Result<Output> {
    let (name, model) = load_model(file)?;
    let sys = build_cylinder_system(&model, depth)?;
    let map = sys.map();
    let x = map.domain();
    let y = map.codomain();
    let full_image = images::essential_image(map, &x.full())?;
    let mut r = Report::new(&name);
    r.value("depth", depth)
        .property("null_preserving", true)
        .property("measure_preserving", sys.preserves_measure())
        .property("nonsingular", y.ae_eq(&full_image, &y.full()));
    match images::singular_atom(map) {
        Some(b) => {
            r.set("singular_witness", y, &y.atom(b))
                .value("singular_witness_measure", y.atom_weight(b));
        }
        None => {
            r.maybe_set("singular_witness", y, None);
        }
    }
    match sys.invariant_cylinder() {
        Some(i) => r.set("invariant_cylinder", x, &sys.cylinder(&[i])),
        None => r.maybe_set("invariant_cylinder", x, None),
    };
    let mut ok = true;
    if let Some(c) = cylinder {
        let prefix = c
            .split(',')
            .map(|t| {
                model
                    .state_index(t.trim())
                    .map_or_else(|| usage(format!("unknown state {t:?}")), Ok)
            })
            .collect::<Result<Vec<usize>>>()?;
        if prefix.is_empty() || prefix.len() > depth {
            return usage(format!("cylinder prefix must have 1 to {depth} states"));
        }
        let a = sys.cylinder(&prefix);
        let img = sys.cylinder_image(&a)?;
        r.set("cylinder", x, &a)
            .value("cylinder_measure", x.measure(&a))
            .set("essential_image", y, &img);
        if let [i] = prefix[..] {
            let predicted = sys.predicted_image(i);
            r.set("predicted_image", y, &predicted);
            if model.is_stationary() && model.is_irreducible() {
                r.property("support_formula", img == predicted);
                ok &= img == predicted;
            }
        }
    }
    if verify {
        let rep = verify_markov_formulas(&model, depth)?;
        for st in &rep.states {
            let s = &model.states()[st.state];
            r.property(&format!("support[{s}]"), st.support_ok);
            for c in &st.coefficients {
                let t = &model.states()[c.target];
                r.value(&format!("density[{s}->{t}]"), &c.density)
                    .value(&format!("naive[{s}->{t}]"), &c.naive)
                    .value(&format!("corrected[{s}->{t}]"), &c.corrected);
            }
            r.property(&format!("proportional[{s}]"), st.proportional);
        }
        r.property("formulas_hold", rep.holds);
        ok &= rep.holds;
    }
    Ok(Output::Report(r, ok))
}

/// Tail hull masks of every set, from the hulls of atoms.
fn hull_masks(s: &DynSystem) -> Result<Vec<u64>> {
    let x = s.space();
    let n = x.num_atoms();
    let mut atoms = Vec::with_capacity(n);
    for a in 0..n {
        atoms.push(tail::tail_hull(s, &x.atom(a))?.mask());
    }
    Ok((0..1u64 << n)
        .map(|m| (0..n).filter(|&a| m >> a & 1 == 1).fold(0, |u, a| u | atoms[a]))
        .collect())
}

fn oracle_cmd(file: &str, mode: &str, set: Option<&str>) -> Result<Output> {
    let Some(mode) = OracleMode::from_name(mode) else {
        let all: Vec<_> = OracleMode::ALL.iter().map(|m| m.name()).collect();
        return usage(format!("unknown mode {mode:?}; expected one of {}", all.join(", ")));
    };
    let spec = load_system(file)?;
    let map = &spec.map;
    let x = map.domain().clone();
    let payload = set.map(|a| set_arg(&spec, &x, a)).transpose()?;
    let answer = oracle::brute_force(&OracleRequest {
        map,
        mode,
        payload: payload.clone(),
    })?;
    let all_sets = || (0..1u64 << x.num_atoms()).map(|m| x.from_mask(m));
    let mut r = Report::new(&spec.name);
    r.value("mode", mode.name());
    let agrees = match (&answer, mode) {
        (OracleAnswer::Set(a), OracleMode::MinimalSupport) => {
            let target = payload.unwrap_or_else(|| x.full());
            r.set("answer", map.codomain(), a);
            a == &images::essential_image(map, &target)?
        }
        (OracleAnswer::Set(a), _) => {
            r.set("answer", &x, a);
            a == &dyn_system(&spec)?.nonsingular_part().set
        }
        (OracleAnswer::MaybeSet(w), _) => {
            r.maybe_set("answer", &x, w.as_ref());
            let s = dyn_system(&spec)?;
            let conservative = s.classify()?.conservative;
            conservative == w.is_none() && w.as_ref().is_none_or(|w| s.is_wandering_by_images(w))
        }
        (OracleAnswer::Sets(v), _) => {
            r.value("count", v.len()).sets("answer", &x, v);
            let s = dyn_system(&spec)?;
            let fast: Vec<MSet> = match mode {
                OracleMode::InvariantSets => all_sets()
                    .filter(|a| s.invariance_check(a, InvarianceKind::Full).unwrap_or(false))
                    .collect(),
                OracleMode::ForwardInvariantSets => all_sets()
                    .filter(|a| s.invariance_check(a, InvarianceKind::Forward).unwrap_or(false))
                    .collect(),
                OracleMode::TailSets => {
                    let alg = tail::tail_algebra(&s);
                    all_sets().filter(|a| alg.contains_mod_null(&s, a)).collect()
                }
                _ => {
                    let hulls = hull_masks(&s)?;
                    let positive = x.positive_part().mask();
                    let a = payload.as_ref().expect("separated_from has a payload").mask();
                    all_sets()
                        .filter(|b| hulls[a as usize] & hulls[b.mask() as usize] & positive == 0)
                        .collect()
                }
            };
            &fast == v
        }
        (OracleAnswer::Pairs(v), _) => {
            r.value("count", v.len());
            if let Some((a, b)) = v.first() {
                r.sets("first_pair", &x, [a, b]);
            }
            let s = dyn_system(&spec)?;
            let hulls = hull_masks(&s)?;
            let positive = x.positive_part().mask();
            let n = 1u64 << x.num_atoms();
            let fast = (0..n)
                .filter(|a| a & positive != 0)
                .flat_map(|a| (0..n).filter(|b| b & positive != 0).map(move |b| (a, b)))
                .filter(|&(a, b)| hulls[a as usize] & hulls[b as usize] & positive == 0)
                .count();
            fast == v.len()
                && v.iter()
                    .all(|(a, b)| hulls[a.mask() as usize] & hulls[b.mask() as usize] & positive == 0)
        }
    };
    r.property("agrees_with_fast_path", agrees);
    Ok(Output::Report(r, agrees))
}

fn modulus(file: &str, epsilon: &str, normalize: bool) -> Result<Output> {
    let spec = load_system(file)?;
    let mut s = dyn_system(&spec)?;
    if normalize {
        s = s.normalized()?;
    }
    let eps = parse_rat(epsilon, 0).map_err(|source| CliError::Parse {
        file: "--epsilon".into(),
        source,
    })?;
    let m = s.image_size_modulus(&eps)?;
    let mut r = Report::new(&spec.name);
    r.value("epsilon", &eps);
    match m {
        Modulus::Bounded(d) => r.value("modulus", d),
        Modulus::Unbounded => r.value("modulus", "unbounded"),
    };
    Ok(Output::Report(r, true))
}

fn fixture(name: Option<&str>) -> Result<Output> {
    match name {
        None => Ok(Output::Raw(
            fixtures::names().iter().map(|n| format!("{n}\n")).collect(),
        )),
        Some(n) => match fixtures::lookup(n) {
            Some((_, _, text)) => Ok(Output::Raw(text)),
            None => usage(format!("no fixture named {n:?}")),
        },
    }
}
