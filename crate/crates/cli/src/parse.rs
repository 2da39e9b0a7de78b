//! Line-oriented system and model files.
//!
//! ```text
//! # comment
//! @space X
//! point 0 1
//! point 1 0
//! @partition X
//! atom a: 0 1
//! @map [X -> X]
//! 0 -> 0
//! 1 -> 0
//! @set A1 = 1
//! ```
//!
//! or a `@markov` block with `states`, `init` and `row` lines. Weights are
//! integers or `p/q`; decimals are rejected.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use essimg::{MSet, MarkovModel, MeasurableMap, Rat, Space};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown identifier {ident:?}")]
    UnknownIdentifier { line: usize, ident: String },
    #[error("set {0:?} is not a union of atoms")]
    NotAnAtomUnion(String),
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: essimg::Error,
    },
}

type Result<T> = std::result::Result<T, ParseError>;

fn syntax<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(ParseError::Syntax {
        line,
        msg: msg.into(),
    })
}

fn unknown<T>(line: usize, ident: &str) -> Result<T> {
    Err(ParseError::UnknownIdentifier {
        line,
        ident: ident.to_string(),
    })
}

fn invalid(line: usize) -> impl FnOnce(essimg::Error) -> ParseError {
    move |source| ParseError::Invalid { line, source }
}

/// An exact rational: an integer or `p/q`.
pub fn parse_rat(tok: &str, line: usize) -> Result<Rat> {
    if !tok.chars().all(|c| c.is_ascii_digit() || c == '/' || c == '-') {
        return syntax(line, format!("{tok:?} is not an integer or fraction"));
    }
    tok.parse::<Rat>()
        .or_else(|_| syntax(line, format!("{tok:?} is not an integer or fraction")))
}

/// A parsed map with its named domain sets.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    pub name: String,
    pub map: MeasurableMap,
    pub sets: BTreeMap<String, MSet>,
}

#[derive(Debug, Clone)]
pub enum SystemFile {
    System(SystemSpec),
    Markov { name: String, model: MarkovModel },
}

#[derive(Default)]
struct SpaceDraft {
    line: usize,
    points: Vec<(String, Rat)>,
    atoms: Vec<(String, Vec<String>)>,
}

#[derive(Clone, Copy)]
enum Block {
    None,
    Space(usize),
    Partition(usize),
    Map,
    Markov,
}

/// Strips comments and blank lines, keeping 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

pub fn parse_system_file(name: &str, text: &str) -> Result<SystemFile> {
    let mut spaces: Vec<(String, SpaceDraft)> = Vec::new();
    let mut map_decl: Option<(usize, Option<(String, String)>)> = None;
    let mut arrows: Vec<(usize, String, String)> = Vec::new();
    let mut set_decls: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut markov: Option<(usize, Vec<String>, Option<Vec<Rat>>, Vec<(usize, String, Vec<Rat>)>)> = None;
    let mut block = Block::None;

    let space_index = |spaces: &[(String, SpaceDraft)], n: &str| spaces.iter().position(|(s, _)| s == n);

    for (ln, l) in lines(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if let Some(head) = toks[0].strip_prefix('@') {
            match head {
                "space" => {
                    let [_, n] = toks[..] else {
                        return syntax(ln, "expected `@space <name>`");
                    };
                    if space_index(&spaces, n).is_some() {
                        return syntax(ln, format!("space {n} declared twice"));
                    }
                    spaces.push((n.to_string(), SpaceDraft { line: ln, ..Default::default() }));
                    block = Block::Space(spaces.len() - 1);
                }
                "partition" => {
                    let [_, n] = toks[..] else {
                        return syntax(ln, "expected `@partition <space>`");
                    };
                    let Some(i) = space_index(&spaces, n) else {
                        return unknown(ln, n);
                    };
                    block = Block::Partition(i);
                }
                "map" => {
                    if map_decl.is_some() {
                        return syntax(ln, "more than one @map block");
                    }
                    let rest = l["@map".len()..].trim();
                    let sig = if rest.is_empty() {
                        None
                    } else {
                        let inner = rest
                            .strip_prefix('[')
                            .and_then(|r| r.strip_suffix(']'))
                            .map(|r| r.split("->").map(str::trim).collect::<Vec<_>>());
                        match inner.as_deref() {
                            Some([d, c]) if !d.is_empty() && !c.is_empty() => {
                                Some((d.to_string(), c.to_string()))
                            }
                            _ => return syntax(ln, "expected `@map [<domain> -> <codomain>]`"),
                        }
                    };
                    map_decl = Some((ln, sig));
                    block = Block::Map;
                }
                "set" => {
                    if toks.len() < 3 || toks[2] != "=" {
                        return syntax(ln, "expected `@set <id> = <atom-or-point>…`");
                    }
                    let id = toks[1].to_string();
                    if set_decls.iter().any(|(_, s, _)| s == &id) {
                        return syntax(ln, format!("set {id} defined twice"));
                    }
                    set_decls.push((ln, id, toks[3..].iter().map(|s| s.to_string()).collect()));
                    block = Block::None;
                }
                "markov" => {
                    if markov.is_some() {
                        return syntax(ln, "more than one @markov block");
                    }
                    markov = Some((ln, Vec::new(), None, Vec::new()));
                    block = Block::Markov;
                }
                _ => return syntax(ln, format!("unknown section @{head}")),
            }
            continue;
        }
        match block {
            Block::None => return syntax(ln, "content outside a section"),
            Block::Space(i) => {
                let ["point", p, w] = toks[..] else {
                    return syntax(ln, "expected `point <id> <weight>`");
                };
                let w = parse_rat(w, ln)?;
                spaces[i].1.points.push((p.to_string(), w));
            }
            Block::Partition(i) => {
                let Some(rest) = l.strip_prefix("atom ") else {
                    return syntax(ln, "expected `atom <id>: <point>…`");
                };
                let Some((id, pts)) = rest.split_once(':') else {
                    return syntax(ln, "expected `atom <id>: <point>…`");
                };
                let id = id.trim();
                if id.is_empty() || id.contains(char::is_whitespace) {
                    return syntax(ln, "bad atom id");
                }
                let pts: Vec<String> = pts.split_whitespace().map(str::to_string).collect();
                for p in &pts {
                    if !spaces[i].1.points.iter().any(|(q, _)| q == p) {
                        return unknown(ln, p);
                    }
                }
                spaces[i].1.atoms.push((id.to_string(), pts));
            }
            Block::Map => {
                let [p, "->", q] = toks[..] else {
                    return syntax(ln, "expected `<point> -> <point>`");
                };
                arrows.push((ln, p.to_string(), q.to_string()));
            }
            Block::Markov => {
                let m = markov.as_mut().expect("inside @markov");
                match toks[0] {
                    "states" => {
                        if !m.1.is_empty() {
                            return syntax(ln, "states listed twice");
                        }
                        m.1 = toks[1..].iter().map(|s| s.to_string()).collect();
                    }
                    "init" => {
                        if m.2.is_some() {
                            return syntax(ln, "init listed twice");
                        }
                        m.2 = Some(toks[1..].iter().map(|t| parse_rat(t, ln)).collect::<Result<_>>()?);
                    }
                    "row" => {
                        let Some((s, vals)) = l["row".len()..].split_once(':') else {
                            return syntax(ln, "expected `row <state>: <rat>…`");
                        };
                        let vals = vals
                            .split_whitespace()
                            .map(|t| parse_rat(t, ln))
                            .collect::<Result<_>>()?;
                        m.3.push((ln, s.trim().to_string(), vals));
                    }
                    _ => return syntax(ln, "expected `states`, `init` or `row`"),
                }
            }
        }
    }

    if let Some((ln, states, init, rows)) = markov {
        if !spaces.is_empty() || map_decl.is_some() || !set_decls.is_empty() {
            return syntax(ln, "a @markov file has no other sections");
        }
        return markov_model(name, ln, states, init, rows);
    }

    let Some((map_line, sig)) = map_decl else {
        return syntax(text.lines().count().max(1), "no @map block");
    };
    let mut built: HashMap<String, Arc<Space>> = HashMap::new();
    for (n, draft) in &spaces {
        built.insert(n.clone(), Arc::new(build_space(n, draft)?));
    }
    let (dom, cod) = match sig {
        Some((d, c)) => {
            let d = built.get(&d).cloned().map_or_else(|| unknown(map_line, &d), Ok)?;
            let c = built.get(&c).cloned().map_or_else(|| unknown(map_line, &c), Ok)?;
            (d, c)
        }
        None if spaces.len() == 1 => {
            let s = built[&spaces[0].0].clone();
            (s.clone(), s)
        }
        None => return syntax(map_line, "name the domain and codomain: `@map [<d> -> <c>]`"),
    };
    let mut image_of: Vec<Option<usize>> = vec![None; dom.num_points()];
    for (ln, p, q) in &arrows {
        let Some(i) = dom.point_index(p) else {
            return unknown(*ln, p);
        };
        let Some(j) = cod.point_index(q) else {
            return unknown(*ln, q);
        };
        if image_of[i].replace(j).is_some() {
            return syntax(*ln, format!("point {p} mapped twice"));
        }
    }
    let mut complete = Vec::with_capacity(image_of.len());
    for (i, t) in image_of.iter().enumerate() {
        match t {
            Some(j) => complete.push(*j),
            None => return syntax(map_line, format!("point {} is not mapped", dom.point_name(i))),
        }
    }
    let map = if Arc::ptr_eq(&dom, &cod) {
        MeasurableMap::endomap(dom.clone(), complete)
    } else {
        MeasurableMap::new(dom.clone(), cod, complete)
    }
    .map_err(invalid(map_line))?;

    let mut sets = BTreeMap::new();
    for (ln, id, toks) in set_decls {
        let a = resolve_set(&dom, &toks, ln, &id)?;
        sets.insert(id, a);
    }
    Ok(SystemFile::System(SystemSpec {
        name: name.to_string(),
        map,
        sets,
    }))
}

fn build_space(name: &str, draft: &SpaceDraft) -> Result<Space> {
    let mut atoms = draft.atoms.clone();
    for (p, _) in &draft.points {
        if !atoms.iter().any(|(_, pts)| pts.contains(p)) {
            atoms.push((p.clone(), vec![p.clone()]));
        }
    }
    Space::new(name, draft.points.clone(), atoms).map_err(invalid(draft.line))
}

/// Resolves atom or point names to a set, which must be a union of atoms.
pub fn resolve_set(space: &Space, toks: &[String], line: usize, id: &str) -> Result<MSet> {
    let mut pts = fixedbitset::FixedBitSet::with_capacity(space.num_points());
    for t in toks {
        if t == "∅" {
            continue;
        }
        if let Some(a) = space.atom_index(t) {
            for &p in space.atom_points(a) {
                pts.insert(p);
            }
        } else if let Some(p) = space.point_index(t) {
            pts.insert(p);
        } else {
            return unknown(line, t);
        }
    }
    if !space.is_atom_union(&pts) {
        return Err(ParseError::NotAnAtomUnion(id.to_string()));
    }
    Ok(space.hull_of_points(&pts))
}

#[allow(clippy::type_complexity)]
fn markov_model(
    name: &str,
    ln: usize,
    states: Vec<String>,
    init: Option<Vec<Rat>>,
    rows: Vec<(usize, String, Vec<Rat>)>,
) -> Result<SystemFile> {
    if states.is_empty() {
        return syntax(ln, "no states listed");
    }
    let Some(init) = init else {
        return syntax(ln, "no init line");
    };
    let k = states.len();
    let mut trans = vec![vec![Rat::from_integer(0.into()); k]; k];
    let mut seen = vec![false; k];
    for (rl, s, vals) in rows {
        let Some(i) = states.iter().position(|t| t == &s) else {
            return unknown(rl, &s);
        };
        if std::mem::replace(&mut seen[i], true) {
            return syntax(rl, format!("row {s} given twice"));
        }
        if vals.len() != k {
            return syntax(rl, format!("row {s} has {} entries, expected {k}", vals.len()));
        }
        trans[i] = vals;
    }
    let model = MarkovModel::new(states, init, trans).map_err(invalid(ln))?;
    Ok(SystemFile::Markov {
        name: name.to_string(),
        model,
    })
}
