//! Theta-function eigenbasis of the magnetic Laplacian.
//!
//! States live in adapted coordinates (pairs `(x^j, y^j = x^{r+j})`, free
//! coordinates `x^a`, `a ≥ 2r`) in the gauge where
//! `p_j = -i∂_j + 2b̃_j y^j + α̃_j`, `p_{r+j} = -i∂_{r+j} + α̃_{r+j}`,
//! `p_a = -i∂_a + α̃_a`, and `ψ(x + 2πl) = exp(-2i Σ ν̃_j l_{r+j} x^j) ψ(x)`.
//!
//! Each pair factor is a lattice series
//! `Σ_k e^{iθk} e^{i(κ₀+k)x} e^{iλy} P(u_k) exp(-u_k²/4b̃)`, `u_k = 2b̃y + μ₀ + k`.
//! The ladder operators, momenta and magnetic translations all map such a
//! series to another one, so every operation below is exact up to the
//! truncation of the `k` sum.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use crate::error::{check_dim, Error, Result};
use crate::gauge::{make_quasifactor, unit};
use crate::quadrature::{pairwise_sum, Quadrature};
use crate::weyl::{GroupContext, RepLabel, WeylElement};

/// Relative weight below which lattice terms are dropped.
pub const THETA_CUTOFF: f64 = 1e-18;
/// Quadrature-backed operations support at most this many dimensions.
pub const MAX_QUADRATURE_DIM: usize = 4;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Quantum numbers `(n_j, h_j, l_a)` of a basis state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex {
    pub landau: Vec<u32>,
    pub sector: Vec<i64>,
    pub momentum: Vec<i64>,
}

impl BasisIndex {
    pub fn ground(ctx: &GroupContext) -> Self {
        let r = ctx.half_rank();
        BasisIndex { landau: vec![0; r], sector: vec![0; r], momentum: vec![0; ctx.n - 2 * r] }
    }
}

/// Range of `y` (per pair) over which the lattice sum is kept complete.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Truncation {
    pub y_min: f64,
    pub y_max: f64,
    pub cutoff: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { y_min: -3.0 * TAU, y_max: 4.0 * TAU, cutoff: THETA_CUTOFF }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct LatticeSeries {
    b: f64,
    theta: f64,
    kappa0: f64,
    lambda: f64,
    mu0: Complex64,
    poly: Vec<Complex64>,
    margin: i64,
    k_lo: i64,
    k_hi: i64,
}

fn poly_eval(p: &[Complex64], u: Complex64) -> Complex64 {
    p.iter().rev().fold(ZERO, |acc, c| acc * u + c)
}

fn poly_derivative(p: &[Complex64]) -> Vec<Complex64> {
    p.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect()
}

/// `(s·u + t)·P + w·P'`.
fn poly_affine(p: &[Complex64], s: Complex64, t: Complex64, w: Complex64) -> Vec<Complex64> {
    let mut out = vec![ZERO; p.len() + 1];
    for (i, c) in p.iter().enumerate() {
        out[i + 1] += s * c;
        out[i] += t * c;
    }
    for (i, c) in poly_derivative(p).iter().enumerate() {
        out[i] += w * c;
    }
    while out.len() > 1 && out.last().is_some_and(|c| c.norm() == 0.0) {
        out.pop();
    }
    out
}

impl LatticeSeries {
    fn ground(b: f64, alpha_x: f64, alpha_y: f64, trunc: &Truncation) -> Self {
        let mut s = LatticeSeries {
            b,
            theta: 0.0,
            kappa0: 0.0,
            lambda: 0.0,
            mu0: Complex64::new(alpha_x, alpha_y),
            poly: vec![ONE],
            margin: 0,
            k_lo: 0,
            k_hi: 0,
        };
        s.refresh(trunc);
        s
    }

    /// Recomputes the Gaussian margin and the `k` range covering the window.
    fn refresh(&mut self, trunc: &Truncation) {
        let c = self.mu0.im.abs();
        let weight = |d: f64| -> f64 {
            let poly: f64 = self.poly.iter().enumerate().map(|(i, p)| p.norm() * (d + c).powi(i as i32)).sum();
            (-d * d / (4.0 * self.b)).exp() * poly
        };
        let mut peak: f64 = 0.0;
        let mut d = 0.0;
        let margin = loop {
            let w = weight(d);
            peak = peak.max(w);
            if (d > 1.0 && w < trunc.cutoff * peak && weight(d + 0.5) < w) || d > 1e4 {
                break d;
            }
            d += 0.25;
        };
        self.margin = margin.ceil() as i64 + 1;
        let m = self.margin as f64;
        self.k_lo = (-m - 2.0 * self.b * trunc.y_max - self.mu0.re).floor() as i64;
        self.k_hi = (m - 2.0 * self.b * trunc.y_min - self.mu0.re).ceil() as i64;
    }

    fn term_range(&self, y: f64) -> (i64, i64) {
        let center = -(2.0 * self.b * y + self.mu0.re).round() as i64;
        ((center - self.margin).max(self.k_lo), (center + self.margin).min(self.k_hi))
    }

    fn term(&self, k: i64, x: f64, y: f64) -> Complex64 {
        let u = Complex64::new(2.0 * self.b * y + k as f64, 0.0) + self.mu0;
        let expo = -u * u / (4.0 * self.b) + I * (self.theta * k as f64 + (self.kappa0 + k as f64) * x + self.lambda * y);
        poly_eval(&self.poly, u) * expo.exp()
    }

    fn eval(&self, x: f64, y: f64) -> Complex64 {
        let (lo, hi) = self.term_range(y);
        (lo..=hi).map(|k| self.term(k, x, y)).fold(ZERO, |a, t| a + t)
    }

    fn translate(&mut self, sx: f64, sy: f64) {
        let factor = unit(self.kappa0 * sx + self.lambda * sy);
        for c in self.poly.iter_mut() {
            *c *= factor;
        }
        self.theta = (self.theta + sx).rem_euclid(TAU);
        self.mu0 += 2.0 * self.b * sy;
    }

    /// `κ₀ − μ₀`, the `k`-independent part of `-i∂_x − 2b̃y`.
    fn offset(&self) -> Complex64 {
        Complex64::new(self.kappa0, 0.0) - self.mu0
    }

    fn creation(&self, ax: f64, ay: f64) -> Vec<Complex64> {
        let t = self.offset() + Complex64::new(ax, -ay) - I * self.lambda;
        let norm = 1.0 / (4.0 * self.b).sqrt();
        poly_affine(&self.poly, Complex64::new(2.0 * norm, 0.0), t * norm, Complex64::new(-2.0 * self.b * norm, 0.0))
    }

    fn annihilation(&self, ax: f64, ay: f64) -> Vec<Complex64> {
        let t = self.offset() + Complex64::new(ax, ay) + I * self.lambda;
        let norm = 1.0 / (4.0 * self.b).sqrt();
        poly_affine(&self.poly, ZERO, t * norm, Complex64::new(2.0 * self.b * norm, 0.0))
    }

    fn momentum_x(&self, ax: f64) -> Vec<Complex64> {
        poly_affine(&self.poly, ONE, self.offset() + ax, ZERO)
    }

    fn momentum_y(&self, ay: f64) -> Vec<Complex64> {
        poly_affine(&self.poly, I, Complex64::new(self.lambda + ay, 0.0), Complex64::new(0.0, -2.0 * self.b))
    }

    /// The Fourier coefficient in `x` at integer frequency `f`, as a function of `y`.
    fn slice(&self, f: i64, y: f64) -> Complex64 {
        let k = f - self.kappa0.round() as i64;
        let u = Complex64::new(2.0 * self.b * y + k as f64, 0.0) + self.mu0;
        let expo = -u * u / (4.0 * self.b) + I * (self.theta * k as f64 + self.lambda * y);
        poly_eval(&self.poly, u) * expo.exp()
    }

    /// Center of the Gaussian envelope of the slice at frequency `f`.
    fn slice_center(&self, f: i64) -> f64 {
        let k = f - self.kappa0.round() as i64;
        -(k as f64 + self.mu0.re) / (2.0 * self.b)
    }
}

/// An element of the representation space: `c · Π_j (pair series) · Π_a e^{i m_a x^a}`.
#[derive(Clone, Debug)]
pub struct ThetaState {
    ctx: Arc<GroupContext>,
    alpha: Vec<f64>,
    index: Option<BasisIndex>,
    coeff: Complex64,
    pairs: Vec<LatticeSeries>,
    free: Vec<i64>,
    truncation: Truncation,
}

/// `|N'| = (2π)^{-n/2} Π_j ν̃_j^{-1/4} exp(-π α̃²_{r+j} / 2ν̃_j)`; the phase is fixed to zero.
pub fn normalization(ctx: &GroupContext, alpha: &[f64]) -> f64 {
    let r = ctx.half_rank();
    let mut v = TAU.powf(-(ctx.n as f64) / 2.0);
    for j in 0..r {
        let nt = ctx.nu_tilde()[j] as f64;
        v *= nt.powf(-0.25) * (-PI * alpha[r + j] * alpha[r + j] / (2.0 * nt)).exp();
    }
    v
}

pub fn build_basis_state(ctx: &Arc<GroupContext>, alpha: &RepLabel, idx: &BasisIndex) -> Result<ThetaState> {
    build_basis_state_truncated(ctx, alpha, idx, Truncation::default())
}

pub fn build_basis_state_truncated(
    ctx: &Arc<GroupContext>,
    alpha: &RepLabel,
    idx: &BasisIndex,
    truncation: Truncation,
) -> Result<ThetaState> {
    let n = ctx.n;
    let r = ctx.half_rank();
    check_dim(n, alpha.0.len())?;
    check_dim(r, idx.landau.len())?;
    check_dim(r, idx.sector.len())?;
    check_dim(n - 2 * r, idx.momentum.len())?;
    if alpha.0.iter().any(|a| !a.is_finite()) {
        return Err(Error::InvalidInput("non-finite representation label".into()));
    }
    for (j, &h) in idx.sector.iter().enumerate() {
        let count = 2 * ctx.nu_tilde()[j];
        if h < 0 || h >= count {
            return Err(Error::InvalidInput(format!("sector index h_{j} = {h} outside 0..{count}")));
        }
    }
    let a = &alpha.0;
    let pairs = (0..r).map(|j| LatticeSeries::ground(ctx.b_tilde(j), a[j], a[r + j], &truncation)).collect();
    let mut state = ThetaState {
        ctx: Arc::clone(ctx),
        alpha: a.clone(),
        index: None,
        coeff: Complex64::new(normalization(ctx, a), 0.0),
        pairs,
        free: idx.momentum.clone(),
        truncation,
    };
    let gens = crate::weyl::magnetic_generators(ctx);
    for (j, &h) in idx.sector.iter().enumerate() {
        if h != 0 {
            state = apply_weyl(&state, &gens[j].pow(h))?;
        }
    }
    for (j, &nj) in idx.landau.iter().enumerate() {
        for m in 0..nj {
            state = state.creation(j).scaled(Complex64::new(1.0 / ((m + 1) as f64).sqrt(), 0.0));
        }
    }
    state.index = Some(idx.clone());
    Ok(state)
}

impl ThetaState {
    pub fn context(&self) -> &Arc<GroupContext> {
        &self.ctx
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn index(&self) -> Option<&BasisIndex> {
        self.index.as_ref()
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    /// Per-pair lattice ranges `(k_lo, k_hi)` currently kept.
    pub fn lattice_ranges(&self) -> Vec<(i64, i64)> {
        self.pairs.iter().map(|p| (p.k_lo, p.k_hi)).collect()
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let r = self.pairs.len();
        let mut v = self.coeff;
        for (j, p) in self.pairs.iter().enumerate() {
            v *= p.eval(x[j], x[r + j]);
        }
        for (i, &m) in self.free.iter().enumerate() {
            v *= unit(m as f64 * x[2 * r + i]);
        }
        v
    }

    pub fn scaled(mut self, c: Complex64) -> Self {
        self.coeff *= c;
        self.index = None;
        self
    }

    fn with_pair(&self, j: usize, poly: Vec<Complex64>) -> Self {
        let mut out = self.clone();
        out.pairs[j].poly = poly;
        out.pairs[j].refresh(&self.truncation);
        out.index = None;
        out
    }

    /// `a*_j = (p_j − i p_{r+j}) / √(4b̃_j)`.
    pub fn creation(&self, j: usize) -> Self {
        let r = self.pairs.len();
        self.with_pair(j, self.pairs[j].creation(self.alpha[j], self.alpha[r + j]))
    }

    /// `a_j = (p_j + i p_{r+j}) / √(4b̃_j)`.
    pub fn annihilation(&self, j: usize) -> Self {
        let r = self.pairs.len();
        self.with_pair(j, self.pairs[j].annihilation(self.alpha[j], self.alpha[r + j]))
    }

    /// `p_a ψ` for any coordinate `a`.
    pub fn momentum(&self, a: usize) -> Self {
        let r = self.pairs.len();
        if a < r {
            self.with_pair(a, self.pairs[a].momentum_x(self.alpha[a]))
        } else if a < 2 * r {
            self.with_pair(a - r, self.pairs[a - r].momentum_y(self.alpha[a]))
        } else {
            let m = self.free[a - 2 * r] as f64 + self.alpha[a];
            self.clone().scaled(Complex64::new(m, 0.0))
        }
    }

    fn check_compatible(&self, other: &ThetaState) -> Result<()> {
        if !(Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx) {
            return Err(Error::ContextMismatch);
        }
        if self.alpha != other.alpha {
            return Err(Error::RepLabelMismatch);
        }
        Ok(())
    }
}

/// `a*_j ψ / √(n_j + 1)` for a labelled basis state, relabelled to `n_j + 1`.
pub fn raise(state: &ThetaState, j: usize) -> Result<ThetaState> {
    let idx = state
        .index
        .clone()
        .ok_or_else(|| Error::InvalidInput("raise needs a labelled basis state".into()))?;
    if j >= idx.landau.len() {
        return Err(Error::InvalidInput(format!("pair index {j} out of range")));
    }
    let nj = idx.landau[j];
    let mut out = state.creation(j).scaled(Complex64::new(1.0 / ((nj + 1) as f64).sqrt(), 0.0));
    let mut idx = idx;
    idx.landau[j] += 1;
    out.index = Some(idx);
    Ok(out)
}

/// Action `[gψ](x) = e^{iφ + i l·z/2} e^{il·x} [e^{ip·z}ψ](x)`, with
/// `[e^{ip·z}ψ](x) = exp(i[α̃·z + Σ_j 2b̃_j z^j (y^j + z^{r+j}/2)]) ψ(x + z)`.
pub fn apply_weyl(state: &ThetaState, g: &WeylElement) -> Result<ThetaState> {
    let ctx = g.context();
    if !(Arc::ptr_eq(ctx, &state.ctx) || **ctx == *state.ctx) {
        return Err(Error::ContextMismatch);
    }
    let r = state.pairs.len();
    let z = &g.z;
    let l = &g.l;
    let mut out = state.clone();
    out.index = None;
    let mut phase = g.phase;
    for a in 0..ctx.n {
        phase += state.alpha[a] * z[a] + 0.5 * l[a] as f64 * z[a];
    }
    for (j, p) in out.pairs.iter_mut().enumerate() {
        p.translate(z[j], z[r + j]);
        phase += p.b * z[j] * z[r + j];
        p.lambda += 2.0 * p.b * z[j] + l[r + j] as f64;
        p.kappa0 += l[j] as f64;
        p.refresh(&state.truncation);
    }
    for (i, m) in out.free.iter_mut().enumerate() {
        let a = 2 * r + i;
        phase += *m as f64 * z[a];
        *m += l[a];
    }
    out.coeff *= unit(phase);
    Ok(out)
}

/// Grid values of one block (a pair or a free coordinate) of a state.
#[derive(Clone, Debug)]
enum BlockTable {
    Pair(Vec<Complex64>),
    Free(i64),
}

/// Cached grid values of a state, for repeated quadrature.
#[derive(Clone, Debug)]
pub struct StateTables {
    coeff: Complex64,
    blocks: Vec<BlockTable>,
    alpha: Vec<f64>,
}

fn check_quadrature(ctx: &GroupContext, quad: &Quadrature) -> Result<()> {
    if ctx.n > MAX_QUADRATURE_DIM {
        return Err(Error::Unsupported(format!(
            "quadrature over dimension {} exceeds the supported maximum {MAX_QUADRATURE_DIM}",
            ctx.n
        )));
    }
    check_dim(ctx.n, quad.base.len())?;
    if quad.points < 2 {
        return Err(Error::InvalidInput("quadrature needs at least two points per axis".into()));
    }
    Ok(())
}

impl ThetaState {
    pub fn tables(&self, quad: &Quadrature) -> Result<StateTables> {
        check_quadrature(&self.ctx, quad)?;
        let r = self.pairs.len();
        let mut blocks = Vec::with_capacity(r + self.free.len());
        for (j, p) in self.pairs.iter().enumerate() {
            let xs = quad.nodes(j);
            let ys = quad.nodes(r + j);
            let mut t = Vec::with_capacity(xs.len() * ys.len());
            for &x in &xs {
                for &y in &ys {
                    t.push(p.eval(x, y));
                }
            }
            blocks.push(BlockTable::Pair(t));
        }
        blocks.extend(self.free.iter().map(|&m| BlockTable::Free(m)));
        Ok(StateTables { coeff: self.coeff, blocks, alpha: self.alpha.clone() })
    }
}

impl StateTables {
    /// `∫_cell conj(ψ₁) e^{il·x} ψ₂` on the grid the tables were built with.
    pub fn element(&self, other: &StateTables, l: &[i64], quad: &Quadrature) -> Result<Complex64> {
        if self.alpha != other.alpha {
            return Err(Error::RepLabelMismatch);
        }
        let r = self.blocks.iter().filter(|b| matches!(b, BlockTable::Pair(_))).count();
        let w = quad.weight();
        let mut total = self.coeff.conj() * other.coeff;
        for (bi, (b1, b2)) in self.blocks.iter().zip(&other.blocks).enumerate() {
            match (b1, b2) {
                (BlockTable::Pair(t1), BlockTable::Pair(t2)) => {
                    let xs = quad.nodes(bi);
                    let ys = quad.nodes(r + bi);
                    let (lx, ly) = (l[bi] as f64, l[r + bi] as f64);
                    let wy: Vec<Complex64> = ys.iter().map(|&y| unit(ly * y)).collect();
                    let mut vals = Vec::with_capacity(t1.len());
                    for (ix, &x) in xs.iter().enumerate() {
                        let wx = unit(lx * x);
                        for iy in 0..ys.len() {
                            let k = ix * ys.len() + iy;
                            vals.push(t1[k].conj() * t2[k] * wx * wy[iy]);
                        }
                    }
                    total *= pairwise_sum(&vals) * w * w;
                }
                (BlockTable::Free(m1), BlockTable::Free(m2)) => {
                    let a = 2 * r + (bi - r);
                    let f = (m2 - m1 + l[a]) as f64;
                    let vals: Vec<Complex64> = quad.nodes(a).iter().map(|&x| unit(f * x)).collect();
                    total *= pairwise_sum(&vals) * w;
                }
                _ => return Err(Error::ContextMismatch),
            }
        }
        Ok(total)
    }
}

/// `∫_cell conj(ψ₁) ψ₂` by the trapezoidal rule.
pub fn inner_product_with(s1: &ThetaState, s2: &ThetaState, quad: &Quadrature) -> Result<Complex64> {
    matrix_element(s1, s2, &vec![0; s1.ctx.n], quad)
}

pub fn inner_product(s1: &ThetaState, s2: &ThetaState) -> Result<Complex64> {
    inner_product_with(s1, s2, &Quadrature::standard(s1.ctx.n))
}

/// `∫_cell conj(ψ₁) e^{il·x} ψ₂`.
pub fn matrix_element(s1: &ThetaState, s2: &ThetaState, l: &[i64], quad: &Quadrature) -> Result<Complex64> {
    s1.check_compatible(s2)?;
    check_dim(s1.ctx.n, l.len())?;
    s1.tables(quad)?.element(&s2.tables(quad)?, l, quad)
}

/// Inner product through the unfolded Fourier-slice form
/// `(2π)^r Σ_{f ∈ K} ∫_ℝ conj(ψ₁_f) ψ₂_f dy` per pair, `K = {0, …, 2ν̃_j − 1}`,
/// with free coordinates integrated exactly.
pub fn slice_inner_product(s1: &ThetaState, s2: &ThetaState) -> Result<Complex64> {
    s1.check_compatible(s2)?;
    let mut total = s1.coeff.conj() * s2.coeff;
    for (j, (p1, p2)) in s1.pairs.iter().zip(&s2.pairs).enumerate() {
        let count = 2 * s1.ctx.nu_tilde()[j];
        let b = p1.b;
        let h = 0.05 / (1.0 + b.sqrt());
        let half_width = (60.0 / b).sqrt() + 4.0;
        let mut pair = ZERO;
        for f in 0..count {
            let c1 = p1.slice_center(f);
            let c2 = p2.slice_center(f);
            let lo = c1.min(c2) - half_width;
            let hi = c1.max(c2) + half_width;
            let steps = ((hi - lo) / h).ceil() as usize;
            let vals: Vec<Complex64> = (0..=steps)
                .map(|i| {
                    let y = lo + i as f64 * h;
                    p1.slice(f, y).conj() * p2.slice(f, y)
                })
                .collect();
            pair += pairwise_sum(&vals) * h;
        }
        total *= pair * TAU;
    }
    for (m1, m2) in s1.free.iter().zip(&s2.free) {
        total *= if m1 == m2 { Complex64::new(TAU, 0.0) } else { ZERO };
    }
    Ok(total)
}

/// `max |ψ(x + 2πl) − V(l,x) ψ(x)| / max |ψ(x)|` over the given points and lattice vectors.
pub fn quasiperiodicity_residual(state: &ThetaState, lattice: &[Vec<i64>], points: &[Vec<f64>]) -> Result<f64> {
    let ctx = &state.ctx;
    let v = make_quasifactor(&ctx.triangular_gauge(&state.alpha)?);
    let mut scale: f64 = 0.0;
    let mut worst: f64 = 0.0;
    for x in points {
        check_dim(ctx.n, x.len())?;
        let base = state.eval(x);
        scale = scale.max(base.norm());
        for l in lattice {
            check_dim(ctx.n, l.len())?;
            let shifted: Vec<f64> = x.iter().zip(l).map(|(xi, &li)| xi + TAU * li as f64).collect();
            worst = worst.max((state.eval(&shifted) - v.value(l, x) * base).norm());
        }
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

/// `ψ' = ψ / G` with `G(x) = N' Π_j exp(-(2b̃_j y^j + α̃_j + iα̃_{r+j})² / 4b̃_j)`.
/// Lowest-Landau-level states become holomorphic in `z^j = (x^j + i y^j)/2π`.
#[derive(Clone, Debug)]
pub struct HolomorphicState {
    state: ThetaState,
    gauss_norm: f64,
}

pub fn holomorphic_transform(state: &ThetaState) -> HolomorphicState {
    HolomorphicState { gauss_norm: normalization(&state.ctx, &state.alpha), state: state.clone() }
}

impl HolomorphicState {
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let s = &self.state;
        let r = s.pairs.len();
        let mut v = s.coeff / self.gauss_norm;
        for (j, p) in s.pairs.iter().enumerate() {
            let (xj, y) = (x[j], x[r + j]);
            let uc = Complex64::new(2.0 * p.b * y + s.alpha[j], s.alpha[r + j]);
            let (lo, hi) = p.term_range(y);
            let mut acc = ZERO;
            for k in lo..=hi {
                let u = Complex64::new(2.0 * p.b * y + k as f64, 0.0) + p.mu0;
                let expo = -(u * u - uc * uc) / (4.0 * p.b)
                    + I * (p.theta * k as f64 + (p.kappa0 + k as f64) * xj + p.lambda * y);
                acc += poly_eval(&p.poly, u) * expo.exp();
            }
            v *= acc;
        }
        for (i, &m) in s.free.iter().enumerate() {
            v *= unit(m as f64 * x[2 * r + i]);
        }
        v
    }

    /// Largest relative `|∂_z̄ ψ'| / (π(|∂_x ψ'| + |∂_y ψ'|))` over pairs and
    /// sample points, with fourth-order central differences.
    pub fn cauchy_riemann_residual(&self, points: &[Vec<f64>], step: f64) -> f64 {
        let r = self.state.pairs.len();
        let mut worst: f64 = 0.0;
        for x in points {
            for j in 0..r {
                let dx = self.central_difference(x, j, step);
                let dy = self.central_difference(x, r + j, step);
                let dzbar = PI * (dx + I * dy);
                let scale = PI * (dx.norm() + dy.norm());
                if scale > 0.0 {
                    worst = worst.max(dzbar.norm() / scale);
                }
            }
        }
        worst
    }

    fn central_difference(&self, x: &[f64], a: usize, h: f64) -> Complex64 {
        let at = |s: f64| {
            let mut p = x.to_vec();
            p[a] += s;
            self.eval(&p)
        };
        (at(-2.0 * h) - at(-h) * 8.0 + at(h) * 8.0 - at(2.0 * h)) / (12.0 * h)
    }
}

/// The argument `z_{h,α̃}` of the theta function representing the
/// lowest-Landau-level state with sector `h` at point `x`.
pub fn theta_argument(ctx: &GroupContext, alpha: &[f64], sector: &[i64], x: &[f64]) -> Vec<Complex64> {
    let r = ctx.half_rank();
    (0..r)
        .map(|j| {
            let nt = ctx.nu_tilde()[j] as f64;
            Complex64::new(x[j], x[r + j]) / TAU
                + Complex64::new(sector[j] as f64 - alpha[r + j], alpha[j]) / (2.0 * nt)
        })
        .collect()
}

/// Jacobi theta `ϑ(z, τ) = Σ_k e^{iπk(2z + kτ)}`, `Im τ > 0`.
pub fn jacobi_theta(z: Complex64, tau: Complex64) -> Result<Complex64> {
    if !(tau.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() || !tau.re.is_finite() {
        return Err(Error::InvalidInput(format!("jacobi_theta needs Im τ > 0, got τ = {tau}")));
    }
    let term = |k: i64| -> Complex64 {
        let kf = k as f64;
        (I * PI * kf * (2.0 * z + kf * tau)).exp()
    };
    let center = (-z.im / tau.im).round() as i64;
    let mut sum = term(center);
    let mut m = 1i64;
    loop {
        let up = term(center + m);
        let down = term(center - m);
        sum += up + down;
        if up.norm().max(down.norm()) < 1e-17 * sum.norm() || m > 1_000_000 {
            break;
        }
        m += 1;
    }
    Ok(sum)
}

/// Riemann theta `θ(z, τ) = Σ_{k∈ℤʳ} e^{iπ(2kᵗz + kᵗτk)}` for symmetric `τ`
/// with positive-definite imaginary part.
pub fn riemann_theta(z: &[Complex64], tau: &[Vec<Complex64>]) -> Result<Complex64> {
    let r = z.len();
    check_dim(r, tau.len())?;
    for (a, row) in tau.iter().enumerate() {
        check_dim(r, row.len())?;
        for b in 0..r {
            if (row[b] - tau[b][a]).norm() > 1e-12 {
                return Err(Error::InvalidInput("τ must be symmetric".into()));
            }
        }
    }
    if r == 0 {
        return Ok(ONE);
    }
    let im = nalgebra::DMatrix::from_fn(r, r, |a, b| tau[a][b].im);
    let chol = im
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidInput("Im τ must be positive definite".into()))?;
    let lambda_min = im.symmetric_eigenvalues().min();
    let zim = nalgebra::DVector::from_fn(r, |a, _| z[a].im);
    let center = -chol.solve(&zim);
    let radius = ((THETA_CUTOFF.recip().ln() + 2.0) / (PI * lambda_min)).sqrt().ceil() as i64 + 1;
    let lo: Vec<i64> = (0..r).map(|a| center[a].round() as i64 - radius).collect();
    let width = (2 * radius + 1) as usize;
    let total = width.pow(r as u32);
    let mut terms = Vec::with_capacity(total);
    let mut k = vec![0i64; r];
    for flat in 0..total {
        let mut rem = flat;
        for a in (0..r).rev() {
            k[a] = lo[a] + (rem % width) as i64;
            rem /= width;
        }
        let mut e = ZERO;
        for a in 0..r {
            e += 2.0 * k[a] as f64 * z[a];
            for b in 0..r {
                e += k[a] as f64 * tau[a][b] * k[b] as f64;
            }
        }
        terms.push((I * PI * e).exp());
    }
    Ok(pairwise_sum(&terms))
}
