//! Constructors for the catalog of nonclassical states.
//!
//! Closed-form families (coherent, cat, photon-added, pair coherent,
//! Caves-Schumaker) are evaluated in log space. Squeezed, Yuen and
//! isospectral coherent states are built by exponentiating their truncated
//! generators on an enlarged basis that grows until the edge of the basis is
//! empty. Every constructor returns a normalized, certified state: either the
//! requested `n_cut` passes the tail-mass certificate, or the truncation is
//! chosen as the certified support edge plus [`TRUNCATION_BUFFER`].

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fock::{adaptive_cut, SingleModeState, TwoModeState};
use crate::linalg::{expm, unitarity_defect, CMatrix};
use crate::{Error, Result, TAIL_TOLERANCE, TRUNCATION_BUFFER};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
// Relative mass allowed at the edge of an enlarged construction basis.
const EDGE_MASS: f64 = 1e-22;
const MAX_BASIS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatKind {
    Even,
    Odd,
    YurkeStoler,
}

/// The state S(ξ) acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SqueezeBase {
    /// squeezed vacuum
    Vacuum,
    /// Yuen state
    One,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwoModeKind {
    PairCoherent,
    CavesSchumaker,
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// e^{−|α|²/2} αⁿ/√(n!) for n < len.
fn coherent_amplitudes(alpha: Complex64, len: usize) -> Vec<Complex64> {
    if alpha.norm() == 0.0 {
        let mut v = vec![ZERO; len];
        v[0] = Complex64::new(1.0, 0.0);
        return v;
    }
    let (r, phase) = alpha.to_polar();
    let mut ln_fact = 0.0;
    (0..len)
        .map(|n| {
            if n > 0 {
                ln_fact += (n as f64).ln();
            }
            let ln_mag = -0.5 * r * r + n as f64 * r.ln() - 0.5 * ln_fact;
            Complex64::from_polar(ln_mag.exp(), n as f64 * phase)
        })
        .collect()
}

/// Generous basis size for a Poisson-like distribution of mean `mean`.
fn poisson_span(mean: f64) -> usize {
    (mean + 14.0 * mean.sqrt() + 60.0).ceil() as usize
}

/// Normalizes raw amplitudes and applies the truncation policy.
fn finalize(raw: Vec<Complex64>, n_cut: Option<usize>, context: &str) -> Result<SingleModeState> {
    let state = SingleModeState::from_amplitudes(raw).normalized()?;
    let masses = state.photon_distribution();
    let n_cut = match n_cut {
        Some(n_cut) => {
            let tail = state.tail_mass(n_cut.saturating_sub(TRUNCATION_BUFFER));
            if tail >= TAIL_TOLERANCE {
                return Err(Error::TruncationOverflow {
                    context: context.to_string(),
                    n_cut,
                    tail_mass: tail,
                    tolerance: TAIL_TOLERANCE,
                });
            }
            n_cut
        }
        None => adaptive_cut(&masses),
    };
    let out = state.resized(n_cut).normalized()?;
    out.certify()?;
    Ok(out)
}

fn finalize_two_mode(raw: TwoModeState, n_cut: Option<usize>, context: &str) -> Result<TwoModeState> {
    let state = raw.normalized()?;
    let n_cut = match n_cut {
        Some(n_cut) => {
            let tail = state.tail_mass(n_cut.saturating_sub(TRUNCATION_BUFFER));
            if tail >= TAIL_TOLERANCE {
                return Err(Error::TruncationOverflow {
                    context: context.to_string(),
                    n_cut,
                    tail_mass: tail,
                    tolerance: TAIL_TOLERANCE,
                });
            }
            n_cut
        }
        None => adaptive_cut(&state.mode_masses()),
    };
    let out = state.resized(n_cut).normalized()?;
    out.certify()?;
    Ok(out)
}

/// |α⟩ = e^{−|α|²/2} Σ αⁿ/√(n!) |n⟩
pub fn make_coherent(alpha: Complex64, n_cut: Option<usize>) -> Result<SingleModeState> {
    let len = poisson_span(alpha.norm_sqr()).max(n_cut.map_or(0, |n| n + 1));
    finalize(coherent_amplitudes(alpha, len), n_cut, "coherent state")
}

pub fn make_fock(n: usize, n_cut: Option<usize>) -> Result<SingleModeState> {
    let n_cut = n_cut.unwrap_or(n + TRUNCATION_BUFFER);
    let s = SingleModeState::fock(n, n_cut)?;
    s.certify()?;
    Ok(s)
}

/// Even and odd coherent states N±(|α⟩ ± |−α⟩) and the Yurke-Stoler state
/// (|α⟩ + i|−α⟩)/√2, summed termwise so the parity zeros are exact.
pub fn make_cat(alpha: Complex64, kind: CatKind, n_cut: Option<usize>) -> Result<SingleModeState> {
    if kind == CatKind::Odd && alpha.norm() == 0.0 {
        return Err(Error::DegenerateParameter("odd coherent state is undefined at alpha = 0".into()));
    }
    let len = poisson_span(alpha.norm_sqr()).max(n_cut.map_or(0, |n| n + 1));
    let base = coherent_amplitudes(alpha, len);
    let raw = base
        .into_iter()
        .enumerate()
        .map(|(n, c)| {
            let even = n % 2 == 0;
            match kind {
                CatKind::Even if even => c * 2.0,
                CatKind::Odd if !even => c * 2.0,
                CatKind::Even | CatKind::Odd => ZERO,
                CatKind::YurkeStoler => {
                    let sign = if even { 1.0 } else { -1.0 };
                    c * Complex64::new(1.0, sign)
                }
            }
        })
        .collect();
    let context = match kind {
        CatKind::Even => "even coherent state",
        CatKind::Odd => "odd coherent state",
        CatKind::YurkeStoler => "Yurke-Stoler state",
    };
    finalize(raw, n_cut, context)
}

/// Normalized a†ᵐ|α⟩: amplitudes ∝ αᵏ √((k+m)!)/k! at level k+m.
pub fn make_pacs(alpha: Complex64, m: usize, n_cut: Option<usize>) -> Result<SingleModeState> {
    let lambda = alpha.norm_sqr();
    let span = poisson_span(lambda + m as f64 * (1.0 + 2.0 * alpha.norm())) + m;
    let len = span.max(n_cut.map_or(0, |n| n + 1));
    let (r, phase) = alpha.to_polar();
    let raw = (0..len)
        .map(|n| {
            if n < m {
                return ZERO;
            }
            let k = n - m;
            if r == 0.0 {
                return if k == 0 { Complex64::new(1.0, 0.0) } else { ZERO };
            }
            let ln_mag = -0.5 * lambda + k as f64 * r.ln() + 0.5 * ln_factorial(n) - ln_factorial(k);
            Complex64::from_polar(ln_mag.exp(), k as f64 * phase)
        })
        .collect();
    finalize(raw, n_cut, "photon-added coherent state")
}

/// Generator matrix on a sector basis and the seed index; exponentiated and
/// applied to the seed, growing the sector until its edge is empty.
fn exponentiate_on_sector(
    initial_size: usize,
    context: &str,
    generator: impl Fn(usize) -> CMatrix,
) -> Result<Vec<Complex64>> {
    let mut size = initial_size.max(2 * TRUNCATION_BUFFER + 8);
    loop {
        let g = generator(size);
        let u = expm(&g);
        let defect = unitarity_defect(&u);
        if defect > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "{context}: truncated exponential not unitary (defect {defect:.2e})"
            )));
        }
        let column: Vec<Complex64> = u.column(0).iter().copied().collect();
        let total: f64 = column.iter().map(|c| c.norm_sqr()).sum();
        let edge: f64 = column[size - 2 * TRUNCATION_BUFFER..].iter().map(|c| c.norm_sqr()).sum();
        if edge < EDGE_MASS * total {
            return Ok(column);
        }
        if size >= MAX_BASIS {
            return Err(Error::TruncationOverflow {
                context: format!("{context}: construction basis"),
                n_cut: size,
                tail_mass: edge / total,
                tolerance: EDGE_MASS,
            });
        }
        size *= 2;
    }
}

/// S(ξ)|0⟩ (squeezed vacuum) or S(ξ)|1⟩ (Yuen state) with
/// S(ξ) = exp[½(ξ* a² − ξ a†²)].
///
/// The generator only connects levels of equal parity, so it is
/// exponentiated on the parity sector {base, base+2, ...}.
pub fn make_squeezed(xi: Complex64, base: SqueezeBase, n_cut: Option<usize>) -> Result<SingleModeState> {
    let first = match base {
        SqueezeBase::Vacuum => 0usize,
        SqueezeBase::One => 1usize,
    };
    let r = xi.norm();
    let mean = (1 + 2 * first) as f64 * r.sinh().powi(2) + first as f64;
    let initial = (2.0 * mean + 40.0) as usize;
    let sector = exponentiate_on_sector(initial, "squeeze operator", |size| {
        let mut g = CMatrix::zeros(size, size);
        for j in 0..size {
            let n = (first + 2 * j) as f64;
            if j + 1 < size {
                // ½ξ* a² : |n+2⟩ → √((n+2)(n+1)) |n⟩
                g[(j, j + 1)] = 0.5 * xi.conj() * ((n + 2.0) * (n + 1.0)).sqrt();
                // −½ξ a†² : |n⟩ → √((n+1)(n+2)) |n+2⟩
                g[(j + 1, j)] = -0.5 * xi * ((n + 1.0) * (n + 2.0)).sqrt();
            }
        }
        g
    })?;
    let len = first + 2 * sector.len();
    let mut raw = vec![ZERO; len.max(n_cut.map_or(0, |n| n + 1))];
    for (j, c) in sector.into_iter().enumerate() {
        raw[first + 2 * j] = c;
    }
    let context = match base {
        SqueezeBase::Vacuum => "squeezed vacuum",
        SqueezeBase::One => "Yuen state",
    };
    finalize(raw, n_cut, context)
}

/// Matrix of the deformed lowering operator a_i on |0⟩..|n_cut⟩:
/// a_i|n⟩ = √(n−i)|n−1⟩ for n > i, zero otherwise. For i = 1 this is
/// a†(1+a†a)^{−1/2} a (1+a†a)^{−1/2} a.
pub fn isospectral_lowering(i: usize, n_cut: usize) -> DMatrix<Complex64> {
    let dim = n_cut + 1;
    let mut a = DMatrix::zeros(dim, dim);
    for n in (i + 1)..dim {
        a[(n - 1, n)] = Complex64::new(((n - i) as f64).sqrt(), 0.0);
    }
    a
}

/// exp(ζ a_i† − ζ* a_i)|i⟩ on the restricted space spanned by |n ≥ i⟩.
pub fn make_isospectral(zeta: Complex64, i: usize, n_cut: Option<usize>) -> Result<SingleModeState> {
    if i == 0 {
        return Err(Error::InvalidParameter("isospectral coherent state needs i >= 1".into()));
    }
    let initial = poisson_span(zeta.norm_sqr());
    let sector = exponentiate_on_sector(initial, "isospectral displacement", |size| {
        // sector index j ↔ level i + j; a_i acts as √j |j−1⟩ there
        let a = isospectral_lowering(i, i + size - 1);
        let block = a.view((i, i), (size, size)).into_owned();
        &block.adjoint() * zeta - &block * zeta.conj()
    })?;
    let mut raw = vec![ZERO; (i + sector.len()).max(n_cut.map_or(0, |n| n + 1))];
    for (j, c) in sector.into_iter().enumerate() {
        raw[i + j] = c;
    }
    finalize(raw, n_cut, "isospectral coherent state")
}

/// Caves-Schumaker: sech r Σ e^{inθ}(−tanh r)ⁿ |n,n⟩.
/// Pair coherent: N₀ Σ rⁿe^{inθ}/n! |n,n⟩ with N₀ = I₀(2r)^{−1/2}.
pub fn make_two_mode(kind: TwoModeKind, r: f64, theta: f64, n_cut: Option<usize>) -> Result<TwoModeState> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("two-mode squeeze magnitude r = {r} must be >= 0")));
    }
    let ln_weight = |n: usize| -> f64 {
        match kind {
            TwoModeKind::CavesSchumaker => {
                if n == 0 {
                    -r.cosh().ln()
                } else {
                    -r.cosh().ln() + n as f64 * r.tanh().ln()
                }
            }
            TwoModeKind::PairCoherent => {
                if n == 0 {
                    0.0
                } else {
                    n as f64 * r.ln() - ln_factorial(n)
                }
            }
        }
    };
    // diagonal support: grow until the weights are negligible
    let mut len = 1usize;
    if r > 0.0 {
        while len < MAX_BASIS && 2.0 * ln_weight(len) > EDGE_MASS.ln() + 2.0 * ln_weight(0).min(0.0) {
            len += 1;
        }
        len += 1;
    }
    let dim = len.max(n_cut.map_or(0, |n| n + 1));
    let sign = match kind {
        TwoModeKind::CavesSchumaker => -1.0,
        TwoModeKind::PairCoherent => 1.0,
    };
    let diag: Vec<Complex64> = (0..dim)
        .map(|n| {
            if n >= len {
                return ZERO;
            }
            let s = if n % 2 == 1 { sign } else { 1.0 };
            Complex64::from_polar(s * ln_weight(n).exp(), n as f64 * theta)
        })
        .collect();
    let raw = TwoModeState::from_fn(dim - 1, |n, m| if n == m { diag[n] } else { ZERO });
    let context = match kind {
        TwoModeKind::PairCoherent => "pair coherent state",
        TwoModeKind::CavesSchumaker => "Caves-Schumaker state",
    };
    finalize_two_mode(raw, n_cut, context)
}

pub fn make_product(a: &SingleModeState, b: &SingleModeState) -> TwoModeState {
    TwoModeState::product(a, b)
}

/// Complex parameter accepted as a bare real, `[re, im]`, or `{ re, im }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "ComplexRepr", into = "ComplexRepr")]
pub struct ComplexParam(pub Complex64);

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
enum ComplexRepr {
    Real(f64),
    Pair([f64; 2]),
    Parts { re: f64, im: f64 },
}

impl From<ComplexRepr> for ComplexParam {
    fn from(r: ComplexRepr) -> Self {
        match r {
            ComplexRepr::Real(re) => ComplexParam(Complex64::new(re, 0.0)),
            ComplexRepr::Pair([re, im]) | ComplexRepr::Parts { re, im } => ComplexParam(Complex64::new(re, im)),
        }
    }
}

impl From<ComplexParam> for ComplexRepr {
    fn from(c: ComplexParam) -> Self {
        if c.0.im == 0.0 {
            ComplexRepr::Real(c.0.re)
        } else {
            ComplexRepr::Parts { re: c.0.re, im: c.0.im }
        }
    }
}

impl From<f64> for ComplexParam {
    fn from(re: f64) -> Self {
        ComplexParam(Complex64::new(re, 0.0))
    }
}

impl From<Complex64> for ComplexParam {
    fn from(z: Complex64) -> Self {
        ComplexParam(z)
    }
}

/// A state family and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Coherent { alpha: ComplexParam },
    Ecs { alpha: ComplexParam },
    Ocs { alpha: ComplexParam },
    YurkeStoler { alpha: ComplexParam },
    SqueezedVacuum { xi: ComplexParam },
    Yuen { xi: ComplexParam },
    Pacs { alpha: ComplexParam, m: usize },
    Isospectral { zeta: ComplexParam, i: usize },
    PairCoherent { r: f64, #[serde(default)] theta: f64 },
    CavesSchumaker { r: f64, #[serde(default)] theta: f64 },
    Fock { n: usize },
    Product { a: Box<StateSpec>, b: Box<StateSpec> },
}

/// Declarative description of a catalog state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_cut: Option<usize>,
}

/// A constructed state.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Single(SingleModeState),
    Two(TwoModeState),
}

impl State {
    pub fn single(self) -> Option<SingleModeState> {
        match self {
            State::Single(s) => Some(s),
            State::Two(_) => None,
        }
    }

    pub fn two(self) -> Option<TwoModeState> {
        match self {
            State::Two(s) => Some(s),
            State::Single(_) => None,
        }
    }
}

impl StateSpec {
    pub fn new(family: Family) -> Self {
        Self { family, n_cut: None }
    }

    pub fn with_n_cut(mut self, n_cut: usize) -> Self {
        self.n_cut = Some(n_cut);
        self
    }

    pub fn is_two_mode(&self) -> bool {
        matches!(
            self.family,
            Family::PairCoherent { .. } | Family::CavesSchumaker { .. } | Family::Product { .. }
        )
    }

    /// Short label used in reports, e.g. `ecs(alpha=0.7071)`.
    pub fn label(&self) -> String {
        fn c(z: &ComplexParam) -> String {
            if z.0.im == 0.0 {
                format!("{}", z.0.re)
            } else {
                format!("{}{:+}i", z.0.re, z.0.im)
            }
        }
        match &self.family {
            Family::Coherent { alpha } => format!("coherent(alpha={})", c(alpha)),
            Family::Ecs { alpha } => format!("ecs(alpha={})", c(alpha)),
            Family::Ocs { alpha } => format!("ocs(alpha={})", c(alpha)),
            Family::YurkeStoler { alpha } => format!("yurke_stoler(alpha={})", c(alpha)),
            Family::SqueezedVacuum { xi } => format!("squeezed_vacuum(xi={})", c(xi)),
            Family::Yuen { xi } => format!("yuen(xi={})", c(xi)),
            Family::Pacs { alpha, m } => format!("pacs(alpha={},m={m})", c(alpha)),
            Family::Isospectral { zeta, i } => format!("isospectral(zeta={},i={i})", c(zeta)),
            Family::PairCoherent { r, theta } => format!("pair_coherent(r={r},theta={theta})"),
            Family::CavesSchumaker { r, theta } => format!("caves_schumaker(r={r},theta={theta})"),
            Family::Fock { n } => format!("fock(n={n})"),
            Family::Product { a, b } => format!("product({},{})", a.label(), b.label()),
        }
    }

    pub fn build(&self) -> Result<State> {
        let n_cut = self.n_cut;
        Ok(match &self.family {
            Family::Coherent { alpha } => State::Single(make_coherent(alpha.0, n_cut)?),
            Family::Ecs { alpha } => State::Single(make_cat(alpha.0, CatKind::Even, n_cut)?),
            Family::Ocs { alpha } => State::Single(make_cat(alpha.0, CatKind::Odd, n_cut)?),
            Family::YurkeStoler { alpha } => State::Single(make_cat(alpha.0, CatKind::YurkeStoler, n_cut)?),
            Family::SqueezedVacuum { xi } => State::Single(make_squeezed(xi.0, SqueezeBase::Vacuum, n_cut)?),
            Family::Yuen { xi } => State::Single(make_squeezed(xi.0, SqueezeBase::One, n_cut)?),
            Family::Pacs { alpha, m } => State::Single(make_pacs(alpha.0, *m, n_cut)?),
            Family::Isospectral { zeta, i } => State::Single(make_isospectral(zeta.0, *i, n_cut)?),
            Family::Fock { n } => State::Single(make_fock(*n, n_cut)?),
            Family::PairCoherent { r, theta } => {
                State::Two(make_two_mode(TwoModeKind::PairCoherent, *r, *theta, n_cut)?)
            }
            Family::CavesSchumaker { r, theta } => {
                State::Two(make_two_mode(TwoModeKind::CavesSchumaker, *r, *theta, n_cut)?)
            }
            Family::Product { a, b } => {
                let a = a.build()?.single().ok_or_else(|| {
                    Error::InvalidParameter("product factors must be single-mode states".into())
                })?;
                let b = b.build()?.single().ok_or_else(|| {
                    Error::InvalidParameter("product factors must be single-mode states".into())
                })?;
                let p = make_product(&a, &b);
                match n_cut {
                    Some(n) => finalize_two_mode(p, Some(n), "product state")?,
                    None => p,
                }
                .pipe(State::Two)
            }
        })
    }
}

trait Pipe: Sized {
    fn pipe<T>(self, f: impl FnOnce(Self) -> T) -> T {
        f(self)
    }
}

impl<T> Pipe for T {}
