//! Numeric insertion of replacement tables into linear combinations of
//! integrals, followed by interpolation of each master's coefficient.
//!
//! Expressions are sums of terms `F[i1,...,in]*coefficient` (the integral
//! first) or bare coefficients. Rule files hold `head -> body` entries
//! separated by commas or semicolons, optionally wrapped in braces.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::driver::{reconstruct, DriverError, ExpressionBlackBox, RunConfig};
use crate::parser::{parse, ParseError};

#[derive(Debug, Error)]
pub enum InsertError {
    #[error("missing configuration file {0}")]
    MissingConfig(PathBuf),
    #[error("unknown integral family {0:?}")]
    UnknownFamily(String),
    #[error("family {family} used with {got} indices, elsewhere with {expected}")]
    Arity { family: String, expected: usize, got: usize },
    #[error("{0}")]
    Syntax(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Driver(#[from] DriverError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn read(path: &Path) -> Result<String, InsertError> {
    fs::read_to_string(path).map_err(|source| InsertError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Integral {
    pub family: String,
    pub indices: Vec<i64>,
}

impl fmt::Display for Integral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices.iter().map(i64::to_string).collect();
        write!(f, "{}[{}]", self.family, idx.join(","))
    }
}

impl Integral {
    /// File-name friendly form, `F1_1_0_1_m2`.
    pub fn file_stem(&self) -> String {
        let mut s = self.family.clone();
        for i in &self.indices {
            s.push('_');
            if *i < 0 {
                s.push('m');
            }
            s.push_str(&i.unsigned_abs().to_string());
        }
        s
    }
}

/// Linear combination of integrals; `None` collects integral-free terms.
/// Each key holds the coefficient texts to be summed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearExpr {
    pub terms: BTreeMap<Option<Integral>, Vec<String>>,
}

impl LinearExpr {
    fn push(&mut self, key: Option<Integral>, coef: String) {
        self.terms.entry(key).or_default().push(coef);
    }

    /// Coefficient of `key` as one expression text.
    pub fn coefficient(&self, key: &Option<Integral>) -> Option<String> {
        self.terms.get(key).map(|cs| sum_text(cs))
    }

    pub fn integrals(&self) -> impl Iterator<Item = &Integral> {
        self.terms.keys().flatten()
    }

    /// Sum with every coefficient of `other` multiplied by `factor`.
    pub fn add_scaled(&mut self, other: &LinearExpr, factor: &str) {
        for (k, cs) in &other.terms {
            self.push(k.clone(), format!("({factor})*({})", sum_text(cs)));
        }
    }
}

fn sum_text(cs: &[String]) -> String {
    if cs.len() == 1 {
        return cs[0].clone();
    }
    cs.iter().map(|c| format!("({c})")).collect::<Vec<_>>().join("+")
}

/// Contents of `config/`.
#[derive(Clone, Debug, Default)]
pub struct InsertConfig {
    pub vars: Vec<String>,
    pub families: Vec<String>,
    pub skip: BTreeSet<Integral>,
}

fn lines(s: &str) -> impl Iterator<Item = &str> {
    s.lines().map(str::trim).filter(|l| !l.is_empty())
}

impl InsertConfig {
    pub fn load(dir: &Path) -> Result<Self, InsertError> {
        let file = |name: &str| {
            let p = dir.join(name);
            if p.is_file() {
                read(&p)
            } else {
                Err(InsertError::MissingConfig(p))
            }
        };
        let vars: Vec<String> = lines(&file("vars")?).map(str::to_string).collect();
        let families: Vec<String> = lines(&file("functions")?).map(str::to_string).collect();
        for v in vars.iter().chain(&families) {
            crate::parser::validate_variable(v)?;
        }
        let mut cfg = Self {
            vars,
            families,
            skip: BTreeSet::new(),
        };
        // skip_functions may be absent or empty
        if dir.join("skip_functions").is_file() {
            let mut arity = HashMap::new();
            for l in lines(&file("skip_functions")?) {
                let (i, rest) = cfg.leading_integral(l, &mut arity)?;
                if !rest.trim().is_empty() {
                    return Err(InsertError::Syntax(format!("skip_functions: unexpected {rest:?}")));
                }
                cfg.skip.insert(i);
            }
        }
        Ok(cfg)
    }

    /// Parses `F[...]` at the start of `s`, returning the rest.
    fn leading_integral<'s>(
        &self,
        s: &'s str,
        arity: &mut HashMap<String, usize>,
    ) -> Result<(Integral, &'s str), InsertError> {
        let s = s.trim_start();
        let open = s
            .find('[')
            .ok_or_else(|| InsertError::Syntax(format!("expected an integral in {s:?}")))?;
        let family = s[..open].trim();
        if !self.families.iter().any(|f| f == family) {
            return Err(InsertError::UnknownFamily(family.to_string()));
        }
        let close = s[open..]
            .find(']')
            .map(|c| c + open)
            .ok_or_else(|| InsertError::Syntax(format!("unclosed '[' in {s:?}")))?;
        let indices = s[open + 1..close]
            .split(',')
            .map(|x| x.trim().parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| InsertError::Syntax(format!("non-integer index in {:?}", &s[..=close])))?;
        let expected = *arity.entry(family.to_string()).or_insert(indices.len());
        if expected != indices.len() {
            return Err(InsertError::Arity {
                family: family.to_string(),
                expected,
                got: indices.len(),
            });
        }
        Ok((
            Integral {
                family: family.to_string(),
                indices,
            },
            &s[close + 1..],
        ))
    }

    /// Splits an expression into integral terms and coefficients.
    pub fn parse_linear(&self, src: &str, arity: &mut HashMap<String, usize>) -> Result<LinearExpr, InsertError> {
        let src = src.trim().trim_end_matches(';');
        let mut out = LinearExpr::default();
        for term in split_top(src, |c, prev| (c == '+' || c == '-') && !matches!(prev, None | Some('*' | '/' | '^' | '(' | '+' | '-' | ',')))
        {
            let t = term.trim();
            if t.is_empty() {
                continue;
            }
            let body = t.trim_start_matches(['+', '-', ' ', '\t', '\n', '\r']);
            let negative = t[..t.len() - body.len()].matches('-').count() % 2 == 1;
            let starts_ident = body.chars().next().is_some_and(|c| c.is_ascii_alphabetic());
            let ident_end = body.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(body.len());
            let (key, coef) = if starts_ident && body[ident_end..].trim_start().starts_with('[') {
                let (i, rest) = self.leading_integral(body, arity)?;
                let rest = rest.trim();
                let coef = if rest.is_empty() {
                    "1".to_string()
                } else if let Some(r) = rest.strip_prefix('*') {
                    r.to_string()
                } else if rest.starts_with('/') {
                    format!("1{rest}")
                } else {
                    return Err(InsertError::Syntax(format!("integral {i} must be followed by '*' or '/'")));
                };
                (Some(i), coef)
            } else {
                (None, body.to_string())
            };
            self.check_coefficient(&coef)?;
            out.push(key, if negative { format!("-({coef})") } else { coef });
        }
        Ok(out)
    }

    fn check_coefficient(&self, coef: &str) -> Result<(), InsertError> {
        let b = coef.as_bytes();
        let mut i = 0;
        while i < b.len() {
            if b[i].is_ascii_alphabetic() {
                let start = i;
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                let name = &coef[start..i];
                if coef[i..].trim_start().starts_with('[') {
                    return Err(if self.families.iter().any(|f| f == name) {
                        InsertError::Syntax(format!("integral {name}[...] must come first in its term"))
                    } else {
                        InsertError::UnknownFamily(name.to_string())
                    });
                }
            } else {
                i += 1;
            }
        }
        Ok(())
    }

    /// Reads every rule file in `dir`, keeping only rules whose head is in
    /// `needed`.
    pub fn load_rules(
        &self,
        dir: &Path,
        needed: &BTreeSet<Integral>,
        arity: &mut HashMap<String, usize>,
    ) -> Result<BTreeMap<Integral, LinearExpr>, InsertError> {
        let mut rules = BTreeMap::new();
        if !dir.is_dir() {
            return Ok(rules);
        }
        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|source| InsertError::Io {
                path: dir.to_path_buf(),
                source,
            })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        files.sort();
        for f in files {
            let text = read(&f)?;
            let text = text.trim();
            let text = text.strip_prefix('{').and_then(|t| t.strip_suffix('}')).unwrap_or(text);
            for entry in split_top(text, |c, _| c == ',' || c == ';') {
                if entry.trim().is_empty() {
                    continue;
                }
                let (head, body) = entry
                    .split_once("->")
                    .ok_or_else(|| InsertError::Syntax(format!("{}: rule without '->'", f.display())))?;
                let (head, rest) = self.leading_integral(head, arity)?;
                if !rest.trim().is_empty() {
                    return Err(InsertError::Syntax(format!("rule head {head} followed by {rest:?}")));
                }
                if needed.contains(&head) && !rules.contains_key(&head) {
                    let body = self.parse_linear(body, arity)?;
                    rules.insert(head, body);
                }
            }
        }
        Ok(rules)
    }
}

/// Splits at depth-0 characters accepted by `at(c, previous non-blank)`;
/// the separator starts the next piece unless it is ',' or ';'.
fn split_top(s: &str, at: impl Fn(char, Option<char>) -> bool) -> Vec<&str> {
    let mut out = vec![];
    let (mut depth, mut start) = (0i32, 0usize);
    let mut prev = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            _ => {}
        }
        if depth == 0 && at(c, prev) {
            out.push(&s[start..i]);
            start = if c == ',' || c == ';' { i + 1 } else { i };
        }
        if !c.is_whitespace() {
            prev = Some(c);
        }
    }
    out.push(&s[start..]);
    out
}

/// Replaces every integral with a rule by the rule's body, once.
pub fn substitute(expr: &LinearExpr, rules: &BTreeMap<Integral, LinearExpr>) -> LinearExpr {
    let mut out = LinearExpr::default();
    for (k, cs) in &expr.terms {
        match k.as_ref().and_then(|i| rules.get(i)) {
            Some(body) => out.add_scaled(body, &sum_text(cs)),
            None => {
                for c in cs {
                    out.push(k.clone(), c.clone());
                }
            }
        }
    }
    out
}

/// Reads `path` (or every file of a directory, summed when `merge` is set)
/// and applies the rules; returns one expression per output.
pub fn prepare(
    cfg: &InsertConfig,
    replacements: &Path,
    input: &Path,
    merge: bool,
) -> Result<Vec<(String, LinearExpr)>, InsertError> {
    let name = |p: &Path| p.file_name().map_or("input".into(), |n| n.to_string_lossy().into_owned());
    let mut arity = HashMap::new();
    let mut inputs = vec![];
    if input.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(input)
            .map_err(|source| InsertError::Io {
                path: input.to_path_buf(),
                source,
            })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        files.sort();
        let parsed = files
            .iter()
            .map(|f| Ok((name(f), cfg.parse_linear(&read(f)?, &mut arity)?)))
            .collect::<Result<Vec<_>, InsertError>>()?;
        if merge {
            let mut sum = LinearExpr::default();
            for (_, e) in &parsed {
                sum.add_scaled(e, "1");
            }
            inputs.push((name(input), sum));
        } else {
            inputs = parsed;
        }
    } else {
        inputs.push((name(input), cfg.parse_linear(&read(input)?, &mut arity)?));
    }
    let needed: BTreeSet<Integral> = inputs.iter().flat_map(|(_, e)| e.integrals().cloned()).collect();
    let rules = cfg.load_rules(replacements, &needed, &mut arity)?;
    Ok(inputs.into_iter().map(|(n, e)| (n, substitute(&e, &rules))).collect())
}

/// Master coefficients left after substitution, without skipped masters.
pub fn master_coefficients(cfg: &InsertConfig, expr: &LinearExpr) -> Vec<(Option<Integral>, String)> {
    expr.terms
        .keys()
        .filter(|k| k.as_ref().is_none_or(|i| !cfg.skip.contains(i)))
        .map(|k| (k.clone(), expr.coefficient(k).unwrap()))
        .collect()
}

fn term_text(key: &Option<Integral>, coef: &str) -> String {
    match key {
        Some(i) => format!("{i}*({coef})"),
        None => format!("({coef})"),
    }
}

/// Interpolates each master's coefficient on its own and returns the
/// `out_` file contents. `state_dir` enables per-master checkpoints.
pub fn interpolate_masters(
    cfg: &InsertConfig,
    masters: &[(Option<Integral>, String)],
    run: &RunConfig,
    state_dir: Option<&Path>,
) -> Result<String, InsertError> {
    let mut terms = vec![];
    for (key, coef) in masters {
        let programs = parse(&format!("{coef};"), &cfg.vars)?;
        let bb = ExpressionBlackBox::new(cfg.vars.len(), programs);
        let mut run = run.clone();
        if let Some(dir) = state_dir {
            fs::create_dir_all(dir).map_err(|source| InsertError::Io {
                path: dir.to_path_buf(),
                source,
            })?;
            let stem = key.as_ref().map_or("no_integral".into(), Integral::file_stem);
            let p = dir.join(format!("{stem}.json"));
            run.resume = p.is_file().then(|| p.clone());
            run.save_state = Some(p);
        }
        let (fs, _) = reconstruct(&bb, &run)?;
        if !fs[0].is_zero() {
            terms.push(term_text(key, &fs[0].to_text(&cfg.vars)));
        }
    }
    Ok(file_text(&terms))
}

fn file_text(terms: &[String]) -> String {
    if terms.is_empty() {
        return "0;\n".into();
    }
    format!("{};\n", terms.join("\n+ "))
}

/// Writes each unsimplified coefficient to `dir/<master>`, as insertion input.
pub fn dump_coefficients(masters: &[(Option<Integral>, String)], dir: &Path) -> Result<Vec<PathBuf>, InsertError> {
    fs::create_dir_all(dir).map_err(|source| InsertError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = vec![];
    for (key, coef) in masters {
        let stem = key.as_ref().map_or("no_integral".into(), Integral::file_stem);
        let p = dir.join(stem);
        fs::write(&p, file_text(&[term_text(key, coef)])).map_err(|source| InsertError::Io {
            path: p.clone(),
            source,
        })?;
        written.push(p);
    }
    Ok(written)
}
