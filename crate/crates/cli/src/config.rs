// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

//! Scenario files.
//!
//! ```text
//! [system]
//! preset = dephasing(1.0)        # or: dimension, operator.<name>, rate.<name>, hamiltonian
//!
//! [kernel]
//! spec = k1(A=1, gamma=0.5)
//!
//! [grid]
//! t_max = 10
//! steps = 1001                   # number of time points, t_j = j t_max / (steps - 1)
//!
//! [initial]
//! preset = plus                  # or: matrix = (0.5,0) (0.5,0); (0.5,0) (0.5,0)
//!
//! [options]
//! tol_psd = 1e-9
//! ```
//!
//! Matrices list rows separated by `;`, entries separated by whitespace; an
//! entry is a real number or a complex `(re,im)` pair.

use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;
use pmme_core::estimation::{DEFAULT_RESIDUAL_THRESHOLD, MAX_AUTO_ORDER};
use pmme_core::lindblad::MAX_DIM;
use pmme_core::{build_generator, ComplexMatrix, DensityMatrix, LindbladSpec, MemoryKernel, Superoperator, Tolerances};

use crate::error::{CliError, Result};
use crate::ini::{Entry, Ini, Section};

pub fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("'{}' is not a number", s.trim()))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{}' is not finite", s.trim()))
    }
}

pub fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let s = s.trim();
    match s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        Some(inner) => {
            let (re, im) = inner.split_once(',').ok_or_else(|| format!("'{s}' is not a (re,im) pair"))?;
            Ok(Complex64::new(parse_number(re)?, parse_number(im)?))
        }
        None => Ok(Complex64::new(parse_number(s)?, 0.0)),
    }
}

pub fn parse_matrix(s: &str) -> std::result::Result<ComplexMatrix, String> {
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for row in s.split(';') {
        let mut entries = Vec::new();
        let mut rest = row.trim();
        while !rest.is_empty() {
            let end = if rest.starts_with('(') {
                rest.find(')').ok_or_else(|| format!("unclosed '(' in '{row}'"))? + 1
            } else {
                rest.find(char::is_whitespace).unwrap_or(rest.len())
            };
            entries.push(parse_complex(&rest[..end])?);
            rest = rest[end..].trim_start();
        }
        rows.push(entries);
    }
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(format!("matrix must be square; found {n} rows of lengths {:?}", rows.iter().map(Vec::len).collect::<Vec<_>>()));
    }
    Ok(Array2::from_shape_fn((n, n), |(i, j)| rows[i][j]))
}

/// One argument of a `name(arg, key=arg, ...)` call.
#[derive(Clone, Debug, PartialEq)]
pub enum Arg {
    Number(f64),
    List(Vec<f64>),
}

impl Arg {
    fn number(&self, name: &str) -> std::result::Result<f64, String> {
        match self {
            Self::Number(v) => Ok(*v),
            Self::List(_) => Err(format!("argument '{name}' must be a number")),
        }
    }

    fn list(&self, name: &str) -> std::result::Result<Vec<f64>, String> {
        match self {
            Self::List(v) => Ok(v.clone()),
            Self::Number(_) => Err(format!("argument '{name}' must be a list [c0, c1, ...]")),
        }
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

/// Arguments of a call, each with its optional `key=`.
pub type CallArgs<'a> = Vec<(Option<&'a str>, Arg)>;

/// Splits `name(a, b, key=c)` into the name and its arguments.
pub fn parse_call(s: &str) -> std::result::Result<(&str, CallArgs<'_>), String> {
    let s = s.trim();
    let (name, inner) = match s.find('(') {
        Some(p) => {
            let inner = s[p + 1..].strip_suffix(')').ok_or_else(|| format!("missing ')' in '{s}'"))?;
            (s[..p].trim(), inner.trim())
        }
        None => (s, ""),
    };
    if name.is_empty() {
        return Err(format!("missing name in '{s}'"));
    }
    let mut args = Vec::new();
    if !inner.is_empty() {
        for part in split_top_level(inner) {
            let (key, value) = match part.split_once('=') {
                Some((k, v)) => (Some(k.trim()), v.trim()),
                None => (None, part.trim()),
            };
            let arg = match value.strip_prefix('[') {
                Some(rest) => {
                    let body = rest.strip_suffix(']').ok_or_else(|| format!("missing ']' in '{value}'"))?;
                    let items = body
                        .split(',')
                        .map(str::trim)
                        .filter(|x| !x.is_empty())
                        .map(parse_number)
                        .collect::<std::result::Result<Vec<_>, _>>()?;
                    Arg::List(items)
                }
                None => Arg::Number(parse_number(value)?),
            };
            args.push((key, arg));
        }
    }
    Ok((name, args))
}

fn bind(func: &str, args: CallArgs<'_>, names: &[&str]) -> std::result::Result<Vec<Arg>, String> {
    let mut slots: Vec<Option<Arg>> = vec![None; names.len()];
    let mut next = 0;
    for (key, arg) in args {
        let idx = match key {
            Some(k) => names
                .iter()
                .position(|n| *n == k)
                .ok_or_else(|| format!("{func} has no argument '{k}' (expected {})", names.join(", ")))?,
            None => {
                if next >= names.len() {
                    return Err(format!("{func} takes {} arguments", names.len()));
                }
                next += 1;
                next - 1
            }
        };
        if slots[idx].is_some() {
            return Err(format!("argument '{}' of {func} given twice", names[idx]));
        }
        slots[idx] = Some(arg);
    }
    slots
        .into_iter()
        .zip(names)
        .map(|(s, n)| s.ok_or_else(|| format!("{func} is missing argument '{n}'")))
        .collect()
}

fn numbers(func: &str, args: CallArgs<'_>, names: &[&str]) -> std::result::Result<Vec<f64>, String> {
    bind(func, args, names)?.iter().zip(names).map(|(a, n)| a.number(n)).collect()
}

/// Kernel from its config spelling, e.g. `k2(A=1, gamma=0.5, mu=2, a=1)`.
pub fn parse_kernel(s: &str) -> std::result::Result<MemoryKernel, String> {
    let (name, args) = parse_call(s)?;
    let core = |r: pmme_core::Result<MemoryKernel>| r.map_err(|e| e.to_string());
    match name {
        "delta" => {
            let v = numbers(name, args, &["weight"])?;
            core(MemoryKernel::delta(v[0]))
        }
        "exponential" => {
            let v = numbers(name, args, &["amplitude", "rate"])?;
            core(MemoryKernel::exponential(v[0], v[1]))
        }
        "expcossin" => {
            let v = numbers(name, args, &["c", "b", "mu", "d"])?;
            core(MemoryKernel::exp_cos_sin(v[0], v[1], v[2], v[3]))
        }
        "k1" => {
            let v = numbers(name, args, &["A", "gamma"])?;
            core(MemoryKernel::k1(v[0], v[1]))
        }
        "k2" => {
            let v = numbers(name, args, &["A", "gamma", "mu", "a"])?;
            core(MemoryKernel::k2(v[0], v[1], v[2], v[3]))
        }
        "rational" => {
            let v = bind(name, args, &["num", "den"])?;
            core(MemoryKernel::rational_from_coeffs(&v[0].list("num")?, &v[1].list("den")?))
        }
        other => Err(format!(
            "unknown kernel '{other}' (expected delta, exponential, expcossin, k1, k2 or rational)"
        )),
    }
}

/// Config spelling of a kernel; [`parse_kernel`] reads it back exactly.
pub fn format_kernel(k: &MemoryKernel) -> String {
    match k {
        MemoryKernel::DiracDelta(w) => format!("delta(weight={w})"),
        MemoryKernel::Exponential { amplitude, rate } => format!("exponential(amplitude={amplitude}, rate={rate})"),
        MemoryKernel::ExpCosSin { c, b, mu, d } => format!("expcossin(c={c}, b={b}, mu={mu}, d={d})"),
        MemoryKernel::RationalLaplace(r) => {
            let list = |p: &pmme_core::Polynomial| {
                p.coeffs().iter().map(|z| z.re.to_string()).collect::<Vec<_>>().join(", ")
            };
            let f = r.transform();
            format!("rational(num=[{}], den=[{}])", list(f.numerator()), list(f.denominator()))
        }
    }
}

#[derive(Clone, Debug)]
pub struct System {
    pub dim: usize,
    pub generator: Superoperator,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub t_max: f64,
    /// Number of time points.
    pub steps: usize,
}

impl Grid {
    pub fn step(&self) -> f64 {
        if self.steps > 1 {
            self.t_max / (self.steps - 1) as f64
        } else {
            0.0
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.steps).map(|j| j as f64 * self.step()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub tolerances: Tolerances,
    pub max_order: usize,
    pub residual: f64,
    /// Step of the history integrators in `compare`; chosen automatically when
    /// absent.
    pub oracle_step: Option<f64>,
}

impl Default for Options {
    fn default() -> Self {
        Self { tolerances: Tolerances::default(), max_order: 4, residual: DEFAULT_RESIDUAL_THRESHOLD, oracle_step: None }
    }
}

#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub ini: Ini,
    pub system: System,
    kernel: Option<MemoryKernel>,
    grid: Option<Grid>,
    initial: Option<DensityMatrix>,
    pub options: Options,
}

fn err(e: &Entry, message: impl Into<String>) -> CliError {
    CliError::at(e.line, Some(&e.key), message)
}

fn check_keys(section: &Section, allowed: &[&str]) -> Result<()> {
    for e in &section.entries {
        let base = e.key.split_once('.').map_or(e.key.as_str(), |(b, _)| b);
        let dotted = e.key.contains('.');
        let ok = allowed.iter().any(|a| match a.strip_suffix(".*") {
            Some(prefix) => dotted && base == prefix && e.key.len() > prefix.len() + 1,
            None => !dotted && e.key == *a,
        });
        if !ok {
            return Err(err(e, format!("unknown key in [{}] (allowed: {})", section.name, allowed.join(", "))));
        }
    }
    Ok(())
}

fn number(e: &Entry) -> Result<f64> {
    parse_number(&e.value).map_err(|m| err(e, m))
}

fn positive(e: &Entry) -> Result<f64> {
    let v = number(e)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(err(e, format!("must be positive, got {v}")))
    }
}

fn integer(e: &Entry) -> Result<usize> {
    e.value.trim().parse().map_err(|_| err(e, format!("'{}' is not a nonnegative integer", e.value)))
}

fn parse_system(s: &Section) -> Result<System> {
    check_keys(s, &["dimension", "preset", "hamiltonian", "operator.*", "rate.*"])?;
    let declared = s.get("dimension").map(integer).transpose()?;
    if let (Some(0 | 1), Some(e)) = (declared, s.get("dimension")) {
        return Err(err(e, "dimension must be at least 2"));
    }
    if let (Some(d), Some(e)) = (declared, s.get("dimension")) {
        if d > MAX_DIM {
            return Err(err(e, format!("dimension {d} exceeds the supported maximum {MAX_DIM}")));
        }
    }
    let mut spec = match s.get("preset") {
        Some(e) => {
            let (name, args) = parse_call(&e.value).map_err(|m| err(e, m))?;
            let built = match name {
                "dephasing" => numbers(name, args, &["a"]).map(|v| LindbladSpec::dephasing(v[0])),
                "amplitude_damping" => numbers(name, args, &["rate"]).map(|v| {
                    let mut lower = Array2::zeros((2, 2));
                    lower[[0, 1]] = Complex64::new(1.0, 0.0);
                    LindbladSpec::new(2).and_then(|sp| sp.with_operator(lower, v[0]))
                }),
                other => Err(format!("unknown system preset '{other}' (expected dephasing or amplitude_damping)")),
            }
            .map_err(|m| err(e, m))?
            .map_err(|x| err(e, x.to_string()))?;
            if let (Some(d), Some(de)) = (declared, s.get("dimension")) {
                if d != built.dim() {
                    return Err(err(de, format!("preset '{}' has dimension {}", e.value, built.dim())));
                }
            }
            built
        }
        None => {
            let dim = match declared {
                Some(d) => d,
                None => {
                    return Err(CliError::at(s.line, Some("dimension"), "[system] needs 'dimension' or 'preset'"))
                }
            };
            LindbladSpec::new(dim).map_err(|x| CliError::at(s.line, Some("dimension"), x.to_string()))?
        }
    };
    let dim = spec.dim();
    for e in s.entries.iter().filter(|e| e.key.starts_with("operator.")) {
        let name = &e.key["operator.".len()..];
        let rate_key = format!("rate.{name}");
        let rate_entry = s
            .get(&rate_key)
            .ok_or_else(|| err(e, format!("operator '{name}' has no matching '{rate_key}'")))?;
        let rate = number(rate_entry)?;
        if rate < 0.0 {
            return Err(err(rate_entry, format!("rates must be nonnegative, got {rate}")));
        }
        let op = parse_matrix(&e.value).map_err(|m| err(e, m))?;
        if op.nrows() != dim {
            return Err(err(e, format!("operator is {}x{} but the system has dimension {dim}", op.nrows(), op.ncols())));
        }
        spec.push(op, rate).map_err(|x| err(e, x.to_string()))?;
    }
    for e in s.entries.iter().filter(|e| e.key.starts_with("rate.")) {
        let name = &e.key["rate.".len()..];
        if s.get(&format!("operator.{name}")).is_none() {
            return Err(err(e, format!("rate for undefined operator '{name}'")));
        }
    }
    let mut generator = build_generator(&spec).map_err(|x| CliError::at(s.line, None, x.to_string()))?;
    if let Some(e) = s.get("hamiltonian") {
        let h = parse_matrix(&e.value).map_err(|m| err(e, m))?;
        if h.nrows() != dim {
            return Err(err(e, format!("Hamiltonian is {}x{} but the system has dimension {dim}", h.nrows(), h.ncols())));
        }
        let part = Superoperator::hamiltonian(&h).map_err(|x| err(e, x.to_string()))?;
        generator = generator.add(&part).map_err(|x| err(e, x.to_string()))?;
    }
    if s.get("preset").is_none() && spec.operators().is_empty() && s.get("hamiltonian").is_none() {
        return Err(CliError::at(s.line, None, "[system] defines no dynamics"));
    }
    Ok(System { dim, generator })
}

fn parse_initial(s: &Section, dim: usize, tol: &Tolerances) -> Result<DensityMatrix> {
    check_keys(s, &["preset", "matrix"])?;
    let state = match (s.get("preset"), s.get("matrix")) {
        (Some(e), None) => {
            let (name, args) = parse_call(&e.value).map_err(|m| err(e, m))?;
            let qubit = |x: f64, y: f64, z: f64| {
                if dim != 2 {
                    return Err(format!("preset '{name}' needs a two-level system"));
                }
                DensityMatrix::bloch(x, y, z).map_err(|x| x.to_string())
            };
            let r = match name {
                "plus" => qubit(1.0, 0.0, 0.0),
                "minus" => qubit(-1.0, 0.0, 0.0),
                "plus_y" => qubit(0.0, 1.0, 0.0),
                "minus_y" => qubit(0.0, -1.0, 0.0),
                "bloch" => numbers(name, args, &["x", "y", "z"]).and_then(|v| qubit(v[0], v[1], v[2])),
                "ground" => DensityMatrix::basis_state(dim, 0).map_err(|x| x.to_string()),
                "excited" => DensityMatrix::basis_state(dim, dim - 1).map_err(|x| x.to_string()),
                "mixed" => Ok(DensityMatrix::maximally_mixed(dim)),
                "basis" => numbers(name, args, &["k"]).and_then(|v| {
                    if v[0] < 0.0 || v[0].fract() != 0.0 {
                        return Err(format!("basis index must be a nonnegative integer, got {}", v[0]));
                    }
                    DensityMatrix::basis_state(dim, v[0] as usize).map_err(|x| x.to_string())
                }),
                other => Err(format!(
                    "unknown state preset '{other}' (expected plus, minus, plus_y, minus_y, bloch, ground, excited, mixed or basis)"
                )),
            };
            r.map_err(|m| err(e, m))?
        }
        (None, Some(e)) => {
            let m = parse_matrix(&e.value).map_err(|m| err(e, m))?;
            if m.nrows() != dim {
                return Err(err(e, format!("state is {}x{} but the system has dimension {dim}", m.nrows(), m.ncols())));
            }
            DensityMatrix::with_tolerances(m, tol).map_err(|x| err(e, x.to_string()))?
        }
        (Some(_), Some(e)) => return Err(err(e, "give either 'preset' or 'matrix', not both")),
        (None, None) => return Err(CliError::at(s.line, None, "[initial] needs 'preset' or 'matrix'")),
    };
    Ok(state)
}

fn parse_grid(s: &Section) -> Result<Grid> {
    check_keys(s, &["t_max", "steps"])?;
    let need = |k: &str| s.get(k).ok_or_else(|| CliError::at(s.line, Some(k), format!("[grid] is missing '{k}'")));
    let te = need("t_max")?;
    let t_max = number(te)?;
    if t_max < 0.0 {
        return Err(err(te, "t_max must be nonnegative"));
    }
    let se = need("steps")?;
    let steps = integer(se)?;
    if steps == 0 {
        return Err(err(se, "steps counts time points and must be at least 1"));
    }
    if steps > 1 && t_max == 0.0 {
        return Err(err(te, "t_max must be positive when steps > 1"));
    }
    Ok(Grid { t_max, steps })
}

fn parse_options(s: &Section) -> Result<Options> {
    check_keys(s, &["tol_herm", "tol_trace", "tol_psd", "max_order", "residual", "oracle_step"])?;
    let mut o = Options::default();
    for e in &s.entries {
        match e.key.as_str() {
            "tol_herm" => o.tolerances.hermiticity = positive(e)?,
            "tol_trace" => o.tolerances.trace = positive(e)?,
            "tol_psd" => o.tolerances.positivity = positive(e)?,
            "residual" => o.residual = positive(e)?,
            "oracle_step" => o.oracle_step = Some(positive(e)?),
            "max_order" => {
                let v = integer(e)?;
                if v == 0 || v > MAX_AUTO_ORDER {
                    return Err(err(e, format!("max_order must be in 1..={MAX_AUTO_ORDER}")));
                }
                o.max_order = v;
            }
            _ => unreachable!("keys checked above"),
        }
    }
    Ok(o)
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let ini = Ini::parse(text)?;
        for s in &ini.sections {
            if !["system", "kernel", "grid", "initial", "options"].contains(&s.name.as_str()) {
                return Err(CliError::at(s.line, None, format!("unknown section [{}]", s.name)));
            }
        }
        let options = ini.section("options").map(parse_options).transpose()?.unwrap_or_default();
        let system = parse_system(
            ini.section("system").ok_or_else(|| CliError::config("missing [system] section"))?,
        )?;
        let kernel = match ini.section("kernel") {
            Some(s) => {
                check_keys(s, &["spec"])?;
                let e = s.get("spec").ok_or_else(|| CliError::at(s.line, Some("spec"), "[kernel] is missing 'spec'"))?;
                Some(parse_kernel(&e.value).map_err(|m| err(e, m))?)
            }
            None => None,
        };
        let grid = ini.section("grid").map(parse_grid).transpose()?;
        let initial = ini
            .section("initial")
            .map(|s| parse_initial(s, system.dim, &options.tolerances))
            .transpose()?;
        Ok(Self { ini, system, kernel, grid, initial, options })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| e.in_file(path))
    }

    pub fn kernel(&self) -> Result<&MemoryKernel> {
        self.kernel.as_ref().ok_or_else(|| CliError::config("missing [kernel] section"))
    }

    pub fn grid(&self) -> Result<Grid> {
        self.grid.ok_or_else(|| CliError::config("missing [grid] section"))
    }

    pub fn initial(&self) -> Result<&DensityMatrix> {
        self.initial.as_ref().ok_or_else(|| CliError::config("missing [initial] section"))
    }
}
