//! Symbols `φ̂ : ℕ₀ → ℂ`, the coefficient maps `Γ_φ̂` and multiplication
//! operators `M_φ̂ = Σ φ̂(k) Sᵏ`, rotations `f ↦ f_w`, circle integrals
//! against trigonometric polynomials, and Fejér (Cesàro) approximation.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ops::TruncatedShift;
use crate::tree::{DirectedTree, VertexId};
use crate::vector::TreeVector;

const UNIT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolRule {
    /// `φ̂(0) = 0`, `φ̂(k) = k^exponent` for `k ≥ 1`.
    PowerLaw { exponent: f64 },
    /// `φ̂ ≡ 1`.
    Ones,
    /// `χ_{k}`.
    Indicator { k: usize },
}

impl SymbolRule {
    fn eval(&self, k: usize) -> Complex64 {
        let re = match *self {
            SymbolRule::PowerLaw { exponent } => {
                if k == 0 {
                    0.0
                } else {
                    (k as f64).powf(exponent)
                }
            }
            SymbolRule::Ones => 1.0,
            SymbolRule::Indicator { k: j } => f64::from(u8::from(j == k)),
        };
        Complex64::new(re, 0.0)
    }

    fn name(&self) -> &'static str {
        match self {
            SymbolRule::PowerLaw { .. } => "power_law",
            SymbolRule::Ones => "ones",
            SymbolRule::Indicator { .. } => "indicator",
        }
    }

    fn has_infinite_support(&self) -> bool {
        !matches!(self, SymbolRule::Indicator { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SymbolKind {
    Finite,
    /// Evaluated from a rule on `[0, K]` and never beyond.
    Rule(SymbolRule),
}

/// A symbol stored by its values on `[0, degree]`; zero beyond.
#[derive(Clone, Debug)]
pub struct Symbol {
    coeffs: Vec<Complex64>,
    kind: SymbolKind,
}

impl PartialEq for Symbol {
    /// Values compared on `[0, max(K, K')]`.
    fn eq(&self, other: &Self) -> bool {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).all(|k| self.value(k) == other.value(k))
    }
}

impl Symbol {
    pub fn zero() -> Self {
        Self::from_coeffs(Vec::new())
    }

    /// Finitely supported symbol from its coefficient list `φ̂(0), φ̂(1), …`.
    pub fn from_coeffs(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last() == Some(&Complex64::default()) {
            coeffs.pop();
        }
        Self {
            coeffs,
            kind: SymbolKind::Finite,
        }
    }

    pub fn finite(entries: impl IntoIterator<Item = (usize, Complex64)>) -> Self {
        let mut coeffs = Vec::new();
        for (k, c) in entries {
            if coeffs.len() <= k {
                coeffs.resize(k + 1, Complex64::default());
            }
            coeffs[k] += c;
        }
        Self::from_coeffs(coeffs)
    }

    pub fn indicator(k: usize) -> Self {
        Self::finite([(k, Complex64::new(1.0, 0.0))])
    }

    /// Rule symbol truncated at degree `k_max`.
    pub fn rule(rule: SymbolRule, k_max: usize) -> Self {
        let coeffs = (0..=k_max).map(|k| rule.eval(k)).collect();
        if rule.has_infinite_support() {
            Self {
                coeffs,
                kind: SymbolKind::Rule(rule),
            }
        } else {
            let mut s = Self::from_coeffs(coeffs);
            s.kind = SymbolKind::Rule(rule);
            s
        }
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    pub fn value(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Declared degree `K`: values beyond it are never used.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Largest `k` with `φ̂(k) ≠ 0`.
    pub fn support_bound(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != Complex64::default())
    }

    /// The underlying sequence has support beyond the stored degree.
    pub fn is_truncated(&self) -> bool {
        matches!(&self.kind, SymbolKind::Rule(r) if r.has_infinite_support())
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Parses `{"support":[[k,re,im],...]}` or `{"rule": name, "K": degree, ...}`.
    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Spec("symbol must be a JSON object".into()))?;
        let allowed: &[&str] = if obj.contains_key("support") {
            &["support"]
        } else {
            match obj.get("rule").and_then(Value::as_str) {
                Some("power_law") => &["rule", "K", "exponent"],
                Some("indicator") => &["rule", "K", "k"],
                Some("ones") => &["rule", "K"],
                Some(other) => return Err(Error::Spec(format!("unknown symbol rule `{other}`"))),
                None => {
                    return Err(Error::Spec(
                        "symbol needs either `support` or `rule`".into(),
                    ))
                }
            }
        };
        if let Some(key) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::Spec(format!("unknown symbol key `{key}`")));
        }
        if let Some(support) = obj.get("support") {
            let triples: Vec<(usize, f64, f64)> = serde_json::from_value(support.clone())?;
            return Ok(Self::finite(
                triples
                    .into_iter()
                    .map(|(k, re, im)| (k, Complex64::new(re, im))),
            ));
        }
        let get_usize = |key: &str| -> Result<usize> {
            obj.get(key)
                .and_then(Value::as_u64)
                .map(|v| v as usize)
                .ok_or_else(|| Error::Spec(format!("symbol rule needs integer `{key}`")))
        };
        let rule = match obj["rule"].as_str().unwrap() {
            "power_law" => SymbolRule::PowerLaw {
                exponent: obj
                    .get("exponent")
                    .map(|e| {
                        e.as_f64()
                            .ok_or_else(|| Error::Spec("`exponent` must be a number".into()))
                    })
                    .transpose()?
                    .unwrap_or(-1.5),
            },
            "indicator" => SymbolRule::Indicator { k: get_usize("k")? },
            _ => SymbolRule::Ones,
        };
        let k_max = match (&rule, obj.get("K")) {
            (SymbolRule::Indicator { k }, None) => *k,
            _ => get_usize("K")?,
        };
        Ok(Self::rule(rule, k_max))
    }

    pub fn to_json(&self) -> Value {
        match &self.kind {
            SymbolKind::Rule(rule) => {
                let mut v = json!({ "rule": rule.name(), "K": self.degree() });
                match rule {
                    SymbolRule::PowerLaw { exponent } => v["exponent"] = json!(exponent),
                    SymbolRule::Indicator { k } => v["k"] = json!(k),
                    SymbolRule::Ones => {}
                }
                v
            }
            SymbolKind::Finite => {
                let support: Vec<Value> = self
                    .coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c != Complex64::default())
                    .map(|(k, c)| json!([k, c.re, c.im]))
                    .collect();
                json!({ "support": support })
            }
        }
    }
}

/// Shorthand accepted on the command line: `ones:K`, `indicator:k`,
/// `power_law:K[:exponent]`, or a JSON object.
impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return Self::from_json(&serde_json::from_str(s)?);
        }
        let parts: Vec<&str> = s.split(':').collect();
        let int = |i: usize| -> Result<usize> {
            parts
                .get(i)
                .ok_or_else(|| Error::Spec(format!("symbol `{s}` is missing a field")))?
                .parse()
                .map_err(|_| Error::Spec(format!("bad integer in symbol `{s}`")))
        };
        match (parts[0], parts.len()) {
            ("ones", 2) => Ok(Self::rule(SymbolRule::Ones, int(1)?)),
            ("indicator", 2) => {
                let k = int(1)?;
                Ok(Self::rule(SymbolRule::Indicator { k }, k))
            }
            ("power_law", 2 | 3) => {
                let exponent = match parts.get(2) {
                    Some(e) => e
                        .parse()
                        .map_err(|_| Error::Spec(format!("bad exponent in symbol `{s}`")))?,
                    None => -1.5,
                };
                Ok(Self::rule(SymbolRule::PowerLaw { exponent }, int(1)?))
            }
            _ => Err(Error::Spec(format!("unrecognised symbol `{s}`"))),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

/// Trigonometric polynomial `p(z) = Σ_{k=-n}^{n} p_k z^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    pub fn new(entries: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let entries: Vec<_> = entries.into_iter().collect();
        let degree = entries
            .iter()
            .map(|(k, _)| k.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        let mut coeffs = vec![Complex64::default(); 2 * degree + 1];
        for (k, c) in entries {
            coeffs[(k + degree as i64) as usize] += c;
        }
        Self { degree, coeffs }
    }

    pub fn monomial(k: i64) -> Self {
        Self::new([(k, Complex64::new(1.0, 0.0))])
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new([(0, c)])
    }

    /// Fejér kernel `p_n(w) = Σ_{|k|≤n} (1 − |k|/(n+1)) w^k`.
    pub fn fejer(n: usize) -> Self {
        let scale = (n + 1) as f64;
        Self::new((-(n as i64)..=n as i64).map(|k| {
            (
                k,
                Complex64::new(1.0 - k.unsigned_abs() as f64 / scale, 0.0),
            )
        }))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.degree {
            Complex64::default()
        } else {
            self.coeffs[(k + self.degree as i64) as usize]
        }
    }

    /// `p̂(k) = p_k` for `0 ≤ k ≤ n`, zero beyond.
    pub fn hat(&self, k: usize) -> Complex64 {
        if k > self.degree {
            Complex64::default()
        } else {
            self.coeff(k as i64)
        }
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        let n = self.degree as i64;
        let inv = w.inv();
        let mut acc = self.coeff(0);
        let (mut pos, mut neg) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        for k in 1..=n {
            pos *= w;
            neg *= inv;
            acc += self.coeff(k) * pos + self.coeff(-k) * neg;
        }
        acc
    }

    /// `q(w) = p(w̄)`, so `q_k = p_{−k}`.
    pub fn reflect(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self {
            degree: self.degree,
            coeffs,
        }
    }

    /// `∫_𝕋 |p(w)| dw` (normalized measure) by an `nodes`-point rule.
    /// Exact for nonnegative `p` once `nodes > degree`.
    pub fn l1_norm(&self, nodes: usize) -> f64 {
        roots_of_unity(nodes)
            .map(|w| self.eval(w).norm())
            .sum::<f64>()
            / nodes as f64
    }
}

fn roots_of_unity(n: usize) -> impl Iterator<Item = Complex64> {
    (0..n).map(move |j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64))
}

fn check_unit(w: Complex64) -> Result<()> {
    if (w.norm() - 1.0).abs() > UNIT_TOL {
        Err(Error::NotUnitModulus(w.norm()))
    } else {
        Ok(())
    }
}

/// `(Γ_φ̂ f)(v) = Σ_{k=0}^{|v|} λ_{par^k(v)|v} φ̂(k) f(par^k(v))`.
///
/// The sum only looks upward, so every output value is exact on the truncation.
pub fn gamma_apply(s: &TruncatedShift, phi: &Symbol, f: &TreeVector) -> Result<TreeVector> {
    let tree = s.tree();
    f.ensure_on(tree)?;
    let k_max = phi.degree();
    let mut out = f.zeros_like();
    for v in tree.vertices() {
        let mut acc = phi.value(0) * f.get(v);
        let mut prod = 1.0;
        let mut cur = v;
        for k in 1..=k_max.min(tree.depth(v)) {
            prod *= s.lambda(cur);
            cur = tree.parent(cur).unwrap();
            acc += prod * phi.value(k) * f.get(cur);
        }
        out.set(v, acc);
    }
    Ok(out)
}

/// Adjoint of [`gamma_apply`] on the truncation:
/// `(Γ* g)(u) = Σ_{v ∈ Des(u)} conj(λ_{u|v} φ̂(|v|−|u|)) g(v)`.
pub fn gamma_adjoint_apply(s: &TruncatedShift, phi: &Symbol, g: &TreeVector) -> Result<TreeVector> {
    let tree = s.tree();
    g.ensure_on(tree)?;
    let k_max = phi.degree();
    let mut out = g.zeros_like();
    for (v, c) in g.iter() {
        out.add_at(v, phi.value(0).conj() * c);
        let mut prod = 1.0;
        let mut cur = v;
        for k in 1..=k_max.min(tree.depth(v)) {
            prod *= s.lambda(cur);
            cur = tree.parent(cur).unwrap();
            out.add_at(cur, (prod * phi.value(k)).conj() * c);
        }
    }
    out.prune();
    Ok(out)
}

/// `M_φ̂ e_u = Σ_{v ∈ Des(u)} λ_{u|v} φ̂(|v|−|u|) e_v`, built by walking down from `u`.
pub fn mult_column(s: &TruncatedShift, phi: &Symbol, u: VertexId) -> Result<TreeVector> {
    let tree = s.tree();
    tree.check(u)?;
    let mut out = TreeVector::zeros(tree);
    let mut frontier = vec![(u, 1.0)];
    for n in 0..=phi.degree() {
        let coeff = phi.value(n);
        for &(v, prod) in &frontier {
            out.set(v, prod * coeff);
        }
        if n == phi.degree() {
            break;
        }
        frontier = frontier
            .iter()
            .flat_map(|&(v, prod)| {
                tree.children(v)
                    .iter()
                    .map(move |&c| (c, prod * s.lambda(c)))
            })
            .collect();
        if frontier.is_empty() {
            break;
        }
    }
    out.prune();
    Ok(out)
}

/// `f_w(u) = w^{|u|} f(u)`.
pub fn rotate_vector(tree: &DirectedTree, f: &TreeVector, w: Complex64) -> Result<TreeVector> {
    check_unit(w)?;
    f.ensure_on(tree)?;
    let mut out = f.zeros_like();
    for (v, c) in f.iter() {
        out.set(v, w.powu(tree.depth(v) as u32) * c);
    }
    Ok(out)
}

/// `φ̂_w(n) = wⁿ φ̂(n)`; degree and provenance are kept.
pub fn rotate_symbol(phi: &Symbol, w: Complex64) -> Result<Symbol> {
    check_unit(w)?;
    let mut power = Complex64::new(1.0, 0.0);
    let coeffs = phi
        .coeffs()
        .iter()
        .map(|c| {
            let v = power * c;
            power *= w;
            v
        })
        .collect();
    Ok(Symbol {
        coeffs,
        kind: phi.kind.clone(),
    })
}

pub fn fejer_symbol(n: usize) -> TrigPoly {
    TrigPoly::fejer(n)
}

/// Pointwise product `p̂ · φ̂`, a finitely supported symbol.
pub fn hadamard(p: &TrigPoly, phi: &Symbol) -> Symbol {
    let top = p.degree().min(phi.degree());
    if phi.coeffs().is_empty() {
        return Symbol::zero();
    }
    Symbol::from_coeffs((0..=top).map(|k| p.hat(k) * phi.value(k)).collect())
}

/// Default node count for [`circle_pair_integral`]: `2·(deg q + K + D) + 1`.
pub fn default_quadrature_nodes(s: &TruncatedShift, q: &TrigPoly, phi: &Symbol) -> usize {
    2 * (q.degree() + phi.degree() + s.max_depth()) + 1
}

/// `∫_𝕋 q(w) ⟨M_{φ̂_w} f, g⟩ dw` over the normalized circle measure, by the
/// roots-of-unity rule with the default node count.
pub fn circle_pair_integral(
    s: &TruncatedShift,
    q: &TrigPoly,
    phi: &Symbol,
    f: &TreeVector,
    g: &TreeVector,
) -> Result<Complex64> {
    let nodes = default_quadrature_nodes(s, q, phi);
    circle_pair_integral_with_nodes(s, q, phi, f, g, nodes)
}

/// As [`circle_pair_integral`] with an explicit node count. The integrand is a
/// trigonometric polynomial with frequencies in `[−deg q, deg q + K]`, so the
/// rule is exact (up to roundoff) iff `nodes > deg q + K`.
pub fn circle_pair_integral_with_nodes(
    s: &TruncatedShift,
    q: &TrigPoly,
    phi: &Symbol,
    f: &TreeVector,
    g: &TreeVector,
    nodes: usize,
) -> Result<Complex64> {
    let degree = q.degree() + phi.degree();
    if nodes <= degree {
        return Err(Error::QuadratureTooSmall { nodes, degree });
    }
    f.ensure_on(s.tree())?;
    g.ensure_on(s.tree())?;
    let mut acc = Complex64::default();
    for w in roots_of_unity(nodes) {
        let rotated = rotate_symbol(phi, w)?;
        let image = gamma_apply(s, &rotated, f)?;
        acc += q.eval(w) * image.inner(g)?;
    }
    Ok(acc / nodes as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorRow {
    /// Fejér index.
    pub n: usize,
    /// Index into the probe list.
    pub probe: usize,
    /// `‖M_{p̂_n φ̂} f − M_φ̂ f‖`.
    pub error: f64,
    /// `Σ_u |f(u)| · min(1, K/(n+1)) · ‖M_φ̂ e_u‖`.
    pub bound: f64,
    pub within_bound: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorProfile {
    pub rows: Vec<ErrorRow>,
    /// Largest `k` with `φ̂(k) ≠ 0` (0 for the zero symbol).
    pub support_bound: usize,
    /// Per probe, errors are nonincreasing in `n` (1e-12 slack).
    pub monotone: bool,
    /// `sup_n ∫|p_n|`; the Fejér kernels are nonnegative with mean one.
    pub beta: f64,
}

/// Strong-operator convergence `M_{p̂_n φ̂} → M_φ̂` measured on a finite probe set.
pub fn sot_error_profile(
    s: &TruncatedShift,
    phi: &Symbol,
    approximants: &[usize],
    probes: &[TreeVector],
) -> Result<ErrorProfile> {
    for (i, f) in probes.iter().enumerate() {
        f.ensure_on(s.tree())?;
        if (f.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "probe {i} has norm {}, expected 1",
                f.norm()
            )));
        }
    }
    let k_sup = phi.support_bound().unwrap_or(0);
    let mut ns = approximants.to_vec();
    ns.sort_unstable();
    ns.dedup();

    let mut column_norms = vec![None; s.tree().n_vertices()];
    let mut rows = Vec::new();
    let mut monotone = true;
    let mut beta: f64 = 0.0;
    for (i, f) in probes.iter().enumerate() {
        let target = gamma_apply(s, phi, f)?;
        let mut weighted = 0.0;
        for (u, c) in f.iter() {
            let col = match column_norms[u.0] {
                Some(x) => x,
                None => {
                    let x = mult_column(s, phi, u)?.norm();
                    column_norms[u.0] = Some(x);
                    x
                }
            };
            weighted += c.norm() * col;
        }
        let mut prev = f64::INFINITY;
        for &n in &ns {
            let kernel = fejer_symbol(n);
            if i == 0 {
                beta = beta.max(kernel.l1_norm(2 * n + 2));
            }
            let approx = gamma_apply(s, &hadamard(&kernel, phi), f)?;
            let error = approx.sub(&target)?.norm();
            let factor = (k_sup as f64 / (n + 1) as f64).min(1.0);
            let bound = factor * weighted;
            if error > prev + 1e-12 {
                monotone = false;
            }
            prev = error;
            rows.push(ErrorRow {
                n,
                probe: i,
                error,
                bound,
                within_bound: error <= bound + 1e-12,
            });
        }
    }
    Ok(ErrorProfile {
        rows,
        support_bound: k_sup,
        monotone,
        beta,
    })
}

/// Lower bound for `‖M_φ̂‖` on the truncation: power iteration on `M*M`
/// started from `start`, reporting the best `‖M x‖/‖x‖` seen.
pub fn multiplier_norm_lower_bound(
    s: &TruncatedShift,
    phi: &Symbol,
    start: &TreeVector,
    iterations: usize,
) -> Result<f64> {
    let mut x = start.clone();
    let mut best: f64 = 0.0;
    for _ in 0..=iterations {
        let nx = x.norm();
        if nx == 0.0 {
            break;
        }
        x = x.scale(Complex64::new(1.0 / nx, 0.0));
        let mx = gamma_apply(s, phi, &x)?;
        best = best.max(mx.norm());
        x = gamma_adjoint_apply(s, phi, &mx)?;
    }
    Ok(best)
}
