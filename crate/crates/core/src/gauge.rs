//! Constant-curvature U(1) connections on the torus `ℝⁿ / 2πℤⁿ`.
//!
//! A configuration is the connection `A_a(x) = x^b β_ba + α_a + A'_a(x)` with
//! `β = ν/2π + S̄` (`S̄` symmetric) and `A'` a real trigonometric polynomial.
//! Sections obey `ψ(x + 2πl) = V(l,x) ψ(x)` with
//! `V(l,x) = exp(-i q 2π lᵗβ(x + πl))`.
//!
//! A gauge transform by a real phase function `φ` acts as
//! `ψ ↦ e^{-iqφ} ψ`, `A ↦ A + ∇φ`.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use crate::error::{check_dim, Error, Result};
use crate::quadrature::{pairwise_sum_real, Quadrature};
use crate::skewform::{pfaffian_minor, SkewIntMatrix};

const HERMITIAN_TOL: f64 = 1e-12;

/// Real scalar trigonometric polynomial `Σ c_l e^{il·x}` with `c_{-l} = conj(c_l)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FourierScalar {
    pub modes: BTreeMap<Vec<i64>, Complex64>,
}

/// Real vector-valued trigonometric polynomial, one coefficient per component.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FourierVector {
    pub modes: BTreeMap<Vec<i64>, Vec<Complex64>>,
}

fn plane_wave(l: &[i64], x: &[f64]) -> Complex64 {
    let arg: f64 = l.iter().zip(x).map(|(&li, &xi)| li as f64 * xi).sum();
    Complex64::from_polar(1.0, arg)
}

fn negated(l: &[i64]) -> Vec<i64> {
    l.iter().map(|v| -v).collect()
}

impl FourierScalar {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, l: Vec<i64>, c: Complex64) {
        *self.modes.entry(l).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    pub fn cosine(l: Vec<i64>, amplitude: f64) -> Self {
        let mut f = Self::new();
        f.insert(negated(&l), Complex64::new(amplitude, 0.0));
        f.insert(l, Complex64::new(amplitude, 0.0));
        f
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for (l, c) in &self.modes {
            check_dim(n, l.len())?;
            let partner = self.modes.get(&negated(l)).copied().unwrap_or_default();
            if (partner - c.conj()).norm() > HERMITIAN_TOL {
                return Err(Error::InvalidInput(format!(
                    "Fourier mode {l:?} lacks its conjugate partner; the function would not be real"
                )));
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.modes.iter().map(|(l, c)| (c * plane_wave(l, x)).re).sum()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        for (l, c) in &self.modes {
            let w = c * plane_wave(l, x) * Complex64::i();
            for (a, ga) in g.iter_mut().enumerate() {
                *ga += (w * l[a] as f64).re;
            }
        }
        g
    }
}

impl FourierVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, l: Vec<i64>, c: Vec<Complex64>) {
        let n = c.len();
        let slot = self.modes.entry(l).or_insert_with(|| vec![Complex64::new(0.0, 0.0); n]);
        for (s, v) in slot.iter_mut().zip(c) {
            *s += v;
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for (l, c) in &self.modes {
            check_dim(n, l.len())?;
            check_dim(n, c.len())?;
            let partner = self.modes.get(&negated(l));
            for a in 0..n {
                let p = partner.map(|p| p[a]).unwrap_or_default();
                if (p - c[a].conj()).norm() > HERMITIAN_TOL {
                    return Err(Error::InvalidInput(format!(
                        "vector Fourier mode {l:?} lacks its conjugate partner"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        for (l, c) in &self.modes {
            let w = plane_wave(l, x);
            for (o, ca) in out.iter_mut().zip(c) {
                *o += (ca * w).re;
            }
        }
        out
    }

    /// `B'_ab = ½(∂_a A'_b − ∂_b A'_a)`.
    pub fn curvature(&self, a: usize, b: usize, x: &[f64]) -> f64 {
        self.modes
            .iter()
            .map(|(l, c)| {
                let w = plane_wave(l, x) * Complex64::i();
                (w * (c[b] * l[a] as f64 - c[a] * l[b] as f64)).re * 0.5
            })
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }
}

/// Connection data for one charge sector.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeConfig {
    pub n: usize,
    pub q: i64,
    pub nu: SkewIntMatrix,
    pub shift: Vec<Vec<f64>>,
    pub alpha: Vec<f64>,
    pub a_prime: FourierVector,
    pub v_prime: FourierScalar,
}

impl GaugeConfig {
    /// Canonical gauge: zero shift, no periodic perturbation.
    pub fn canonical(q: i64, nu: SkewIntMatrix, alpha: Vec<f64>) -> Result<Self> {
        let n = nu.dim();
        let cfg = GaugeConfig {
            n,
            q,
            nu,
            shift: vec![vec![0.0; n]; n],
            alpha,
            a_prime: FourierVector::new(),
            v_prime: FourierScalar::new(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// The gauge in which `β` is block lower-triangular, for a matrix already
    /// in canonical block form.
    pub fn triangular(q: i64, canonical_nu: SkewIntMatrix, alpha: Vec<f64>) -> Result<Self> {
        let mut cfg = Self::canonical(q, canonical_nu, alpha)?;
        let n = cfg.n;
        let nu = cfg.nu.to_f64_rows();
        for a in 0..n {
            for b in 0..n {
                if a > b && nu[a][b] != 0.0 {
                    let v = nu[a][b] / TAU;
                    cfg.shift[a][b] = v;
                    cfg.shift[b][a] = v;
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        check_dim(n, self.nu.dim())?;
        check_dim(n, self.alpha.len())?;
        check_dim(n, self.shift.len())?;
        for (a, row) in self.shift.iter().enumerate() {
            check_dim(n, row.len())?;
            for b in 0..n {
                if (row[b] - self.shift[b][a]).abs() > HERMITIAN_TOL {
                    return Err(Error::InvalidInput(format!("shift matrix is not symmetric at ({a},{b})")));
                }
            }
        }
        if self.shift.iter().flatten().chain(&self.alpha).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite gauge data".into()));
        }
        self.a_prime.validate(n)?;
        self.v_prime.validate(n)
    }

    /// `β = ν/2π + S̄`.
    pub fn beta(&self) -> Vec<Vec<f64>> {
        let nu = self.nu.to_f64_rows();
        (0..self.n)
            .map(|a| (0..self.n).map(|b| nu[a][b] / TAU + self.shift[a][b]).collect())
            .collect()
    }

    pub fn connection(&self, x: &[f64]) -> Vec<f64> {
        let beta = self.beta();
        let periodic = self.a_prime.eval(x);
        (0..self.n)
            .map(|a| (0..self.n).map(|b| x[b] * beta[b][a]).sum::<f64>() + self.alpha[a] + periodic[a])
            .collect()
    }

    /// Curvature component `B_ab(x)` including the periodic part.
    pub fn curvature(&self, a: usize, b: usize, x: &[f64]) -> f64 {
        let beta = self.beta();
        0.5 * (beta[a][b] - beta[b][a]) + self.a_prime.curvature(a, b, x)
    }
}

/// The quasi-periodicity factor `V(l,x)`, stored through its real exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiFactor {
    n: usize,
    q: f64,
    beta: Vec<Vec<f64>>,
    sign_flip: bool,
}

impl QuasiFactor {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn charge(&self) -> f64 {
        self.q
    }

    /// `β = ν/2π + S̄`.
    pub fn beta(&self) -> &[Vec<f64>] {
        &self.beta
    }

    /// Real exponent `θ` with `V(l,x) = e^{iθ}`.
    pub fn phase(&self, l: &[i64], x: &[f64]) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for a in 0..n {
            if l[a] == 0 {
                continue;
            }
            let mut row = 0.0;
            for b in 0..n {
                row += self.beta[a][b] * (x[b] + PI * l[b] as f64);
            }
            s += l[a] as f64 * row;
        }
        let mut theta = -self.q * TAU * s;
        if self.sign_flip && l.iter().any(|&v| v != 0) {
            theta += PI;
        }
        theta
    }

    pub fn value(&self, l: &[i64], x: &[f64]) -> Complex64 {
        unit(self.phase(l, x))
    }

    /// Builds a factor from an arbitrary real flux matrix, bypassing quantization.
    /// Intended for diagnostics of non-integral inputs.
    pub fn from_real_flux_unchecked(q: f64, nu: &[Vec<f64>], shift: &[Vec<f64>]) -> Self {
        let n = nu.len();
        let beta = (0..n).map(|a| (0..n).map(|b| nu[a][b] / TAU + shift[a][b]).collect()).collect();
        QuasiFactor { n, q, beta, sign_flip: false }
    }

    /// Copy whose value is negated for every nonzero `l`; breaks the cocycle identity.
    pub fn with_sign_flip(&self) -> Self {
        QuasiFactor { sign_flip: true, ..self.clone() }
    }
}

pub(crate) fn unit(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta.rem_euclid(TAU))
}

pub fn make_quasifactor(cfg: &GaugeConfig) -> QuasiFactor {
    QuasiFactor { n: cfg.n, q: cfg.q as f64, beta: cfg.beta(), sign_flip: false }
}

fn shifted(x: &[f64], l: &[i64]) -> Vec<f64> {
    x.iter().zip(l).map(|(xi, &li)| xi + TAU * li as f64).collect()
}

/// `V(l+l',x)⁻¹ V(l, x+2πl') V(l',x)`; equals 1 for a consistent factor.
pub fn cocycle_defect(v: &QuasiFactor, l: &[i64], lp: &[i64], x: &[f64]) -> Result<Complex64> {
    check_dim(v.n, l.len())?;
    check_dim(v.n, lp.len())?;
    check_dim(v.n, x.len())?;
    let sum: Vec<i64> = l.iter().zip(lp).map(|(a, b)| a + b).collect();
    let theta = v.phase(l, &shifted(x, lp)) + v.phase(lp, x) - v.phase(&sum, x);
    Ok(unit(theta))
}

/// Spread allowed between the flux estimates at different base points.
pub const RECOVER_SPREAD_TOL: f64 = 1e-9;

/// `q lᵗνl'` read off the commutator of the lattice translations `l`, `l'`:
/// `-[θ(l, x+2πl') + θ(l', x) - θ(l', x+2πl) - θ(l, x)] / 4π` with `V = e^{iθ}`.
/// Real exponents are used because the commutator itself is always 1.
pub fn recover_flux(v: &QuasiFactor, l: &[i64], lp: &[i64], points: &[Vec<f64>]) -> Result<i64> {
    let n = v.n;
    check_dim(n, l.len())?;
    check_dim(n, lp.len())?;
    if points.is_empty() {
        return Err(Error::InvalidInput("recover_flux needs at least one base point".into()));
    }
    let mut estimates = Vec::with_capacity(points.len());
    for x in points {
        check_dim(n, x.len())?;
        let theta = v.phase(l, &shifted(x, lp)) + v.phase(lp, x) - v.phase(lp, &shifted(x, l)) - v.phase(l, x);
        estimates.push(-theta / (4.0 * PI));
    }
    let lo = estimates.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = estimates.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo > RECOVER_SPREAD_TOL {
        return Err(Error::NumericalMismatch(format!(
            "commutator phase of {l:?}, {lp:?} depends on the base point (spread {:e})",
            hi - lo
        )));
    }
    let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
    let rounded = mean.round();
    if (mean - rounded).abs() > RECOVER_SPREAD_TOL {
        return Err(Error::NotQuantized(format!("flux of {l:?}, {lp:?} evaluates to {mean}")));
    }
    Ok(rounded as i64)
}

/// Recovers the whole matrix `q·ν` with [`recover_flux`] on unit vectors.
pub fn recover_nu(v: &QuasiFactor, points: &[Vec<f64>]) -> Result<SkewIntMatrix> {
    let n = v.n;
    let unit_vec = |a: usize| {
        let mut e = vec![0i64; n];
        e[a] = 1;
        e
    };
    let mut out = vec![vec![0i64; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let f = recover_flux(v, &unit_vec(a), &unit_vec(b), points)?;
            out[a][b] = f;
            out[b][a] = -f;
        }
    }
    SkewIntMatrix::from_rows(&out)
}

/// A flux value computed in closed form and by quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Flux {
    pub closed_form: f64,
    pub quadrature: f64,
}

pub const FLUX_AGREEMENT_TOL: f64 = 1e-9;

fn check_axes(n: usize, axes: &[usize]) -> Result<()> {
    for (i, &a) in axes.iter().enumerate() {
        if a >= n {
            return Err(Error::InvalidInput(format!("axis {a} out of range for dimension {n}")));
        }
        if axes[..i].contains(&a) {
            return Err(Error::InvalidInput(format!("axis {a} repeated")));
        }
    }
    Ok(())
}

/// Flux through the 2-cell spanned by axes `a`, `b` at base point `quad.base`:
/// `∫ B_ab dx^a dx^b = 2π ν_ab`.
pub fn flux(cfg: &GaugeConfig, a: usize, b: usize, quad: &Quadrature) -> Result<Flux> {
    check_axes(cfg.n, &[a, b])?;
    check_dim(cfg.n, quad.base.len())?;
    let closed_form = TAU * cfg.nu.get(a, b).to_f64().unwrap_or(f64::NAN);
    let xa = quad.nodes(a);
    let xb = quad.nodes(b);
    let mut vals = Vec::with_capacity(xa.len() * xb.len());
    let mut x = quad.base.clone();
    for &va in &xa {
        for &vb in &xb {
            x[a] = va;
            x[b] = vb;
            vals.push(cfg.curvature(a, b, &x));
        }
    }
    let quadrature = pairwise_sum_real(&vals) * quad.weight() * quad.weight();
    finish_flux(closed_form, quadrature)
}

fn finish_flux(closed_form: f64, quadrature: f64) -> Result<Flux> {
    if (closed_form - quadrature).abs() > FLUX_AGREEMENT_TOL * closed_form.abs().max(1.0) {
        return Err(Error::NumericalMismatch(format!(
            "flux closed form {closed_form} vs quadrature {quadrature}"
        )));
    }
    Ok(Flux { closed_form, quadrature })
}

/// `∫ B^m` over the 2m-cell on `axes`, with `B = Σ_{a<b} B_ab dx^a∧dx^b`.
///
/// The quadrature integrates the top-form coefficient of `B^m`, formed by an
/// explicit sum over permutations. The closed form is `m! (2π)^m Pf(ν|axes)`.
pub fn higher_flux(cfg: &GaugeConfig, axes: &[usize], quad: &Quadrature) -> Result<Flux> {
    check_axes(cfg.n, axes)?;
    check_dim(cfg.n, quad.base.len())?;
    if axes.is_empty() || axes.len() % 2 != 0 {
        return Err(Error::InvalidInput(format!("need an even, nonzero number of axes, got {}", axes.len())));
    }
    if axes.len() > 4 {
        return Err(Error::Unsupported("higher flux quadrature is limited to 4-cells".into()));
    }
    let m = axes.len() / 2;
    let pf = pfaffian_minor(&cfg.nu, axes)?.to_f64().unwrap_or(f64::NAN);
    let factorial: f64 = (1..=m).map(|k| k as f64).product();
    let closed_form = factorial * TAU.powi(m as i32) * pf;

    let perms = permutations(axes.len());
    let nodes: Vec<Vec<f64>> = axes.iter().map(|&a| quad.nodes(a)).collect();
    let total_points = quad.points.pow(axes.len() as u32);
    let mut vals = Vec::with_capacity(total_points);
    let mut x = quad.base.clone();
    let mut idx = vec![0usize; axes.len()];
    for _ in 0..total_points {
        for (k, &a) in axes.iter().enumerate() {
            x[a] = nodes[k][idx[k]];
        }
        let mut bmat = vec![vec![0.0; axes.len()]; axes.len()];
        for (i, &ai) in axes.iter().enumerate() {
            for (j, &aj) in axes.iter().enumerate() {
                if i < j {
                    let v = cfg.curvature(ai, aj, &x);
                    bmat[i][j] = v;
                    bmat[j][i] = -v;
                }
            }
        }
        let mut coeff = 0.0;
        for (perm, sign) in &perms {
            let mut prod = *sign;
            for pair in perm.chunks(2) {
                prod *= bmat[pair[0]][pair[1]];
            }
            coeff += prod;
        }
        vals.push(coeff / 2f64.powi(m as i32));
        for k in (0..axes.len()).rev() {
            idx[k] += 1;
            if idx[k] < quad.points {
                break;
            }
            idx[k] = 0;
        }
    }
    let quadrature = pairwise_sum_real(&vals) * quad.weight().powi(axes.len() as i32);
    finish_flux(closed_form, quadrature)
}

fn permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, sign: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        if rest.is_empty() {
            out.push((prefix.clone(), sign));
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            prefix.push(v);
            rec(prefix, rest, if i % 2 == 0 { sign } else { -sign }, out);
            prefix.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..k).collect(), 1.0, &mut out);
    out
}

/// Gauge function `φ = ½ xᵗ S̄' x + φ_p(x)` with `φ_p` periodic.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhaseDescriptor {
    pub quadratic: Vec<Vec<f64>>,
    pub periodic: FourierScalar,
}

impl PhaseDescriptor {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for (a, row) in self.quadratic.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                s += 0.5 * x[a] * v * x[b];
            }
        }
        s + self.periodic.eval(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.periodic.gradient(x);
        for (a, row) in self.quadratic.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                g[a] += v * x[b];
            }
        }
        g
    }

    /// The pointwise multiplier `U(x) = e^{-iqφ(x)}`.
    pub fn unitary(&self, q: i64, x: &[f64]) -> Complex64 {
        unit(-(q as f64) * self.eval(x))
    }
}

/// Applies `U = e^{-iqφ}`: `S̄ ← S̄ + S̄'`, `A' ← A' + ∇φ_p`.
pub fn gauge_transform(cfg: &GaugeConfig, phi: &PhaseDescriptor) -> Result<GaugeConfig> {
    let n = cfg.n;
    check_dim(n, phi.quadratic.len())?;
    phi.periodic.validate(n)?;
    let mut out = cfg.clone();
    for a in 0..n {
        check_dim(n, phi.quadratic[a].len())?;
        for b in 0..n {
            if (phi.quadratic[a][b] - phi.quadratic[b][a]).abs() > HERMITIAN_TOL {
                return Err(Error::InvalidInput("quadratic gauge part must be symmetric".into()));
            }
            out.shift[a][b] += phi.quadratic[a][b];
        }
    }
    for (l, c) in &phi.periodic.modes {
        let grad: Vec<Complex64> = l.iter().map(|&la| Complex64::i() * la as f64 * c).collect();
        if grad.iter().any(|g| g.norm() > 0.0) {
            out.a_prime.insert(l.clone(), grad);
        }
    }
    out.a_prime.modes.retain(|_, c| c.iter().any(|v| v.norm() > 0.0));
    out.validate()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nu2(v: i64) -> SkewIntMatrix {
        SkewIntMatrix::from_rows(&[vec![0, -v], vec![v, 0]]).unwrap()
    }

    #[test]
    fn canonical_gauge_factor_has_closed_form() {
        let cfg = GaugeConfig::canonical(1, nu2(1), vec![0.0, 0.0]).unwrap();
        let v = make_quasifactor(&cfg);
        let x = [0.3, -1.2];
        // V(e2, x) = exp(-i q ν21 x1) with ν21 = 1
        let expect = Complex64::from_polar(1.0, -0.3);
        assert!((v.value(&[0, 1], &x) - expect).norm() < 1e-14);
        assert!((v.value(&[0, 0], &x) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn triangular_gauge_matches_reduced_form() {
        let cfg = GaugeConfig::triangular(2, nu2(3), vec![0.0, 0.0]).unwrap();
        let v = make_quasifactor(&cfg);
        let x = [0.7, 2.1];
        for l in [[1i64, 2], [-1, 1], [2, -3]] {
            let expect = Complex64::from_polar(1.0, -2.0 * 2.0 * 3.0 * l[1] as f64 * x[0]);
            assert!((v.value(&l, &x) - expect).norm() < 1e-12, "{l:?}");
        }
    }

    #[test]
    fn half_integer_flux_breaks_cocycle() {
        let v = QuasiFactor::from_real_flux_unchecked(1.0, &[vec![0.0, 0.5], vec![-0.5, 0.0]], &vec![vec![0.0; 2]; 2]);
        let d = cocycle_defect(&v, &[1, 0], &[0, 1], &[0.4, 0.9]).unwrap();
        assert!((d + Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn recover_nu_reads_charge_times_flux() {
        let cfg = GaugeConfig::canonical(3, nu2(2), vec![0.1, 0.2]).unwrap();
        let rec = recover_nu(&make_quasifactor(&cfg), &[vec![0.1, 0.2], vec![1.5, -2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(rec, nu2(6));
    }

    #[test]
    fn flux_of_unit_generator() {
        let cfg = GaugeConfig::canonical(1, nu2(1), vec![0.0, 0.0]).unwrap();
        let f = flux(&cfg, 0, 1, &Quadrature::standard(2)).unwrap();
        assert!((f.closed_form + TAU).abs() < 1e-15);
        assert!((f.quadrature + TAU).abs() < 1e-9);
    }

    #[test]
    fn non_hermitian_perturbation_rejected() {
        let mut cfg = GaugeConfig::canonical(1, nu2(1), vec![0.0, 0.0]).unwrap();
        cfg.v_prime.insert(vec![1, 0], Complex64::new(1.0, 0.0));
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn permutation_signs() {
        let perms = permutations(3);
        assert_eq!(perms.len(), 6);
        assert_eq!(perms.iter().map(|p| p.1).sum::<f64>(), 0.0);
        let id = perms.iter().find(|p| p.0 == vec![0, 1, 2]).unwrap();
        assert_eq!(id.1, 1.0);
        let swap = perms.iter().find(|p| p.0 == vec![1, 0, 2]).unwrap();
        assert_eq!(swap.1, -1.0);
    }
}
