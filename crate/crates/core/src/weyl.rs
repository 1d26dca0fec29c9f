//! The group generated by plane waves `u^l = e^{il·x}` and magnetic
//! translations `e^{ip·z}` on a torus with constant field.
//!
//! Elements are `e^{iφ} e^{i(l·x + p·z)}` with `l ∈ ℤⁿ`, `z ∈ ℝⁿ`, written in
//! the Frobenius-adapted basis of `q·ν`. With `Ã = C/2π` (`C` the canonical
//! form of `q·ν`) the commutators are `[p_a, p_b] = -2i Ã_ab`,
//! `[p_a, x^b] = -i δ_ab`, and the product is
//!
//! `(l, y, φ)(k, z, χ) = (l + k, y + z, φ + χ + ½[k·y − l·z + 2 yᵗÃz])`.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use crate::error::{check_dim, Error, Result};
use crate::gauge::GaugeConfig;
use crate::skewform::{frobenius_normal_form, FrobeniusForm, SkewIntMatrix};

pub const PHASE_TOL: f64 = 1e-12;

/// Distance between two phases on the circle.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Flux data shared by all elements of one group.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupContext {
    pub n: usize,
    pub q: i64,
    pub nu: SkewIntMatrix,
    pub frobenius: FrobeniusForm,
    nu_tilde: Vec<i64>,
    adapted: Vec<Vec<f64>>,
    adapted_int: Vec<Vec<i64>>,
}

impl GroupContext {
    pub fn new(q: i64, nu: SkewIntMatrix) -> Result<Arc<Self>> {
        let n = nu.dim();
        let frobenius = frobenius_normal_form(&nu.scaled(q));
        let nu_tilde = frobenius
            .divisors_i64()
            .ok_or_else(|| Error::Unsupported("flux divisors exceed 64-bit range".into()))?;
        let adapted_int = frobenius
            .canonical
            .to_i64_rows()
            .ok_or_else(|| Error::Unsupported("flux entries exceed 64-bit range".into()))?;
        let adapted = adapted_int.iter().map(|r| r.iter().map(|&v| v as f64 / TAU).collect()).collect();
        Ok(Arc::new(GroupContext { n, q, nu, frobenius, nu_tilde, adapted, adapted_int }))
    }

    pub fn half_rank(&self) -> usize {
        self.nu_tilde.len()
    }

    /// `ν̃_j = q ν_j`, positive.
    pub fn nu_tilde(&self) -> &[i64] {
        &self.nu_tilde
    }

    /// `b̃_j = ν̃_j / 2π`.
    pub fn b_tilde(&self, j: usize) -> f64 {
        self.nu_tilde[j] as f64 / TAU
    }

    /// `Ã` in the adapted basis.
    pub fn adapted_field(&self) -> &[Vec<f64>] {
        &self.adapted
    }

    /// `C`, the canonical form of `q·ν`.
    pub fn adapted_flux(&self) -> &[Vec<i64>] {
        &self.adapted_int
    }

    /// Number of states per Landau level, `Π 2ν̃_j`.
    pub fn degeneracy(&self) -> u64 {
        self.nu_tilde.iter().map(|&v| 2 * v as u64).product()
    }

    /// Gauge configuration (adapted coordinates, block lower-triangular `β`)
    /// in which the theta-function basis is written.
    pub fn triangular_gauge(&self, alpha_tilde: &[f64]) -> Result<GaugeConfig> {
        check_dim(self.n, alpha_tilde.len())?;
        if self.q == 0 {
            return GaugeConfig::canonical(0, SkewIntMatrix::zeros(self.n), vec![0.0; self.n]);
        }
        let rows: Vec<Vec<i64>> = self.adapted_int.iter().map(|r| r.iter().map(|v| v / self.q).collect()).collect();
        let alpha = alpha_tilde.iter().map(|a| a / self.q as f64).collect();
        GaugeConfig::triangular(self.q, SkewIntMatrix::from_rows(&rows)?, alpha)
    }

    fn element(self: &Arc<Self>, l: Vec<i64>, z: Vec<f64>, phase: f64) -> WeylElement {
        WeylElement { ctx: Arc::clone(self), l, z, phase: phase.rem_euclid(TAU) }
    }

    pub fn identity(self: &Arc<Self>) -> WeylElement {
        self.element(vec![0; self.n], vec![0.0; self.n], 0.0)
    }

    pub fn make(self: &Arc<Self>, l: Vec<i64>, z: Vec<f64>, phase: f64) -> Result<WeylElement> {
        check_dim(self.n, l.len())?;
        check_dim(self.n, z.len())?;
        if z.iter().any(|v| !v.is_finite()) || !phase.is_finite() {
            return Err(Error::InvalidInput("non-finite group element".into()));
        }
        Ok(self.element(l, z, phase))
    }

    /// `u^{e_a} = e^{i x^a}`.
    pub fn plane_wave(self: &Arc<Self>, a: usize) -> WeylElement {
        let mut l = vec![0; self.n];
        l[a] = 1;
        self.element(l, vec![0.0; self.n], 0.0)
    }

    /// `e^{i s p_a}`.
    pub fn translation(self: &Arc<Self>, a: usize, s: f64) -> WeylElement {
        let mut z = vec![0.0; self.n];
        z[a] = s;
        self.element(vec![0; self.n], z, 0.0)
    }

    pub fn central(self: &Arc<Self>, phase: f64) -> WeylElement {
        self.element(vec![0; self.n], vec![0.0; self.n], phase)
    }

    /// Converts raw-basis data: `l ↦ S⁻ᵗ l`, `z ↦ S z`.
    pub fn from_raw(self: &Arc<Self>, l: &[i64], z: &[f64], phase: f64) -> Result<WeylElement> {
        check_dim(self.n, z.len())?;
        let l_new = self.index_to_adapted(l)?;
        let s = &self.frobenius.basis_change;
        let z_new: Vec<f64> = (0..self.n)
            .map(|a| (0..self.n).map(|b| s.get(a, b).to_f64().unwrap_or(f64::NAN) * z[b]).sum())
            .collect();
        self.make(l_new, z_new, phase)
    }

    /// Integer covector (plane-wave index) in adapted coordinates, `S⁻ᵗ l`.
    pub fn index_to_adapted(&self, l: &[i64]) -> Result<Vec<i64>> {
        check_dim(self.n, l.len())?;
        self.frobenius
            .basis_change_inverse
            .transpose()
            .mul_vec(l)
            .iter()
            .map(|v| v.to_i64().ok_or_else(|| Error::Unsupported("plane-wave index overflow".into())))
            .collect()
    }

    /// Real covector in adapted coordinates, `S⁻ᵗ v`.
    pub fn covector_to_adapted<T>(&self, v: &[T]) -> Result<Vec<T>>
    where
        T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        check_dim(self.n, v.len())?;
        let sinv = &self.frobenius.basis_change_inverse;
        Ok((0..self.n)
            .map(|a| {
                (0..self.n).fold(T::default(), |acc, b| acc + v[b] * sinv.get(b, a).to_f64().unwrap_or(f64::NAN))
            })
            .collect())
    }

    fn same(&self, other: &GroupContext) -> bool {
        self.n == other.n && self.q == other.q && self.nu == other.nu
    }
}

/// `e^{iφ} e^{i(l·x + p·z)}` in the adapted basis.
#[derive(Clone, Debug)]
pub struct WeylElement {
    ctx: Arc<GroupContext>,
    pub l: Vec<i64>,
    pub z: Vec<f64>,
    pub phase: f64,
}

impl WeylElement {
    pub fn context(&self) -> &Arc<GroupContext> {
        &self.ctx
    }

    pub fn approx_eq(&self, other: &WeylElement, tol: f64) -> bool {
        self.l == other.l
            && self.z.iter().zip(&other.z).all(|(a, b)| (a - b).abs() <= tol)
            && phase_distance(self.phase, other.phase) <= tol
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.l.iter().all(|&v| v == 0) && self.z.iter().all(|v| v.abs() <= tol) && phase_distance(self.phase, 0.0) <= tol
    }

    /// `g^k`; an element commutes with itself, so exponents simply scale.
    pub fn pow(&self, k: i64) -> WeylElement {
        self.ctx.element(
            self.l.iter().map(|v| v * k).collect(),
            self.z.iter().map(|v| v * k as f64).collect(),
            self.phase * k as f64,
        )
    }
}

fn check_context(g: &WeylElement, h: &WeylElement) -> Result<()> {
    if Arc::ptr_eq(&g.ctx, &h.ctx) || g.ctx.same(&h.ctx) {
        Ok(())
    } else {
        Err(Error::ContextMismatch)
    }
}

/// Phase picked up by `(l, y)(k, z)` beyond the sum of exponents.
fn cocycle(ctx: &GroupContext, l: &[i64], y: &[f64], k: &[i64], z: &[f64]) -> f64 {
    let mut s = 0.0;
    for a in 0..ctx.n {
        s += k[a] as f64 * y[a] - l[a] as f64 * z[a];
        if y[a] != 0.0 {
            let row: f64 = (0..ctx.n).map(|b| ctx.adapted[a][b] * z[b]).sum();
            s += 2.0 * y[a] * row;
        }
    }
    0.5 * s
}

pub fn multiply(g: &WeylElement, h: &WeylElement) -> Result<WeylElement> {
    check_context(g, h)?;
    let extra = cocycle(&g.ctx, &g.l, &g.z, &h.l, &h.z);
    Ok(g.ctx.element(
        g.l.iter().zip(&h.l).map(|(a, b)| a + b).collect(),
        g.z.iter().zip(&h.z).map(|(a, b)| a + b).collect(),
        g.phase + h.phase + extra,
    ))
}

pub fn inverse(g: &WeylElement) -> WeylElement {
    g.pow(-1)
}

/// `g h g⁻¹ h⁻¹`.
pub fn commutator(g: &WeylElement, h: &WeylElement) -> Result<WeylElement> {
    let gh = multiply(g, h)?;
    multiply(&multiply(&gh, &inverse(g))?, &inverse(h))
}

/// `m_j = (u^{r+j})⁻¹ e^{iπ p_j/ν̃_j}` and `m_{r+j} = u^j e^{iπ p_{r+j}/ν̃_j}`,
/// returned as `[m_1, …, m_r, m_{r+1}, …, m_{2r}]`.
pub fn magnetic_generators(ctx: &Arc<GroupContext>) -> Vec<WeylElement> {
    let r = ctx.half_rank();
    let mut out = Vec::with_capacity(2 * r);
    for j in 0..r {
        let s = PI / ctx.nu_tilde[j] as f64;
        let mut l = vec![0; ctx.n];
        l[r + j] = -1;
        let mut z = vec![0.0; ctx.n];
        z[j] = s;
        out.push(ctx.element(l, z, 0.0));
    }
    for j in 0..r {
        let s = PI / ctx.nu_tilde[j] as f64;
        let mut l = vec![0; ctx.n];
        l[j] = 1;
        let mut z = vec![0.0; ctx.n];
        z[r + j] = s;
        out.push(ctx.element(l, z, 0.0));
    }
    out
}

/// `ζ_a = e^{i2π(p_a + 2Ã_ab x^b)}`.
pub fn casimirs(ctx: &Arc<GroupContext>) -> Vec<WeylElement> {
    (0..ctx.n)
        .map(|a| {
            let l = (0..ctx.n).map(|b| 2 * ctx.adapted_int[a][b]).collect();
            let mut z = vec![0.0; ctx.n];
            z[a] = TAU;
            ctx.element(l, z, 0.0)
        })
        .collect()
}

/// Factorization of an element into magnetic, Heisenberg and free parts.
#[derive(Clone, Debug)]
pub struct Decomposition {
    /// Per pair `j`: exponents of `m_j`, `m_{r+j}` and the correction phase.
    pub magnetic_exponents: Vec<(i64, i64, f64)>,
    pub magnetic: Vec<WeylElement>,
    pub heisenberg: Vec<WeylElement>,
    pub central_phase: f64,
    pub free: Vec<WeylElement>,
}

impl Decomposition {
    /// Factors in product order: magnetic, Heisenberg (with the central phase), free.
    pub fn factors(&self) -> Vec<WeylElement> {
        let ctx = self
            .magnetic
            .first()
            .or(self.heisenberg.first())
            .or(self.free.first())
            .expect("decomposition has factors")
            .context()
            .clone();
        let mut out = self.magnetic.clone();
        out.push(ctx.central(self.central_phase));
        out.extend(self.heisenberg.iter().cloned());
        out.extend(self.free.iter().cloned());
        out
    }

    pub fn product(&self) -> WeylElement {
        let f = self.factors();
        f[1..].iter().fold(f[0].clone(), |acc, x| multiply(&acc, x).expect("same context"))
    }
}

pub fn decompose(g: &WeylElement) -> Decomposition {
    let ctx = &g.ctx;
    let r = ctx.half_rank();
    let gens = magnetic_generators(ctx);
    let mut magnetic_exponents = Vec::with_capacity(r);
    let mut magnetic = Vec::with_capacity(r);
    let mut heisenberg = Vec::with_capacity(r);
    for j in 0..r {
        let nt = ctx.nu_tilde[j] as f64;
        let bt = ctx.b_tilde(j);
        let (lj, lrj) = (g.l[j], g.l[r + j]);
        let correction = PI * (lj * lrj) as f64 / (2.0 * nt);
        let mj = multiply(&gens[j].pow(-lrj), &gens[r + j].pow(lj)).expect("same context");
        magnetic.push(multiply(&mj, &ctx.central(correction)).expect("same context"));
        magnetic_exponents.push((-lrj, lj, correction));
        let mut z = vec![0.0; ctx.n];
        z[j] = g.z[j] + lrj as f64 / (2.0 * bt);
        z[r + j] = g.z[r + j] - lj as f64 / (2.0 * bt);
        heisenberg.push(ctx.element(vec![0; ctx.n], z, 0.0));
    }
    let free = (2 * r..ctx.n)
        .map(|a| {
            let mut l = vec![0; ctx.n];
            l[a] = g.l[a];
            let mut z = vec![0.0; ctx.n];
            z[a] = g.z[a];
            ctx.element(l, z, 0.0)
        })
        .collect();
    Decomposition { magnetic_exponents, magnetic, heisenberg, central_phase: g.phase, free }
}

/// Whether `g` commutes with every `u^{e_a}` and every `e^{isp_a}`.
pub fn is_central(g: &WeylElement) -> bool {
    let ctx = &g.ctx;
    let amax = ctx.adapted.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let lsum: f64 = g.l.iter().map(|v| v.unsigned_abs() as f64).sum();
    let zsum: f64 = g.z.iter().map(|v| v.abs()).sum();
    // keeps |s·(commutator coefficient)| < π, so a zero phase mod 2π is a true zero
    let s = 0.5 / (1.0 + lsum + 2.0 * amax * zsum);
    (0..ctx.n).all(|a| {
        let c1 = commutator(g, &ctx.plane_wave(a)).expect("same context");
        let c2 = commutator(g, &ctx.translation(a, s)).expect("same context");
        c1.is_identity(PHASE_TOL) && c2.is_identity(PHASE_TOL)
    })
}

/// Label `α̃ ∈ [0,1)ⁿ` of an irreducible representation.
#[derive(Clone, Debug, PartialEq)]
pub struct RepLabel(pub Vec<f64>);

impl RepLabel {
    pub fn reduced(&self) -> RepLabel {
        RepLabel(self.0.iter().map(|&a| reduce_unit(a)).collect())
    }

    pub fn equivalent(&self, other: &RepLabel, tol: f64) -> bool {
        self.0.len() == other.0.len()
            && self.0.iter().zip(&other.0).all(|(a, b)| phase_distance(TAU * a, TAU * b) <= TAU * tol)
    }
}

fn reduce_unit(a: f64) -> f64 {
    let v = a.rem_euclid(1.0);
    if v >= 1.0 {
        0.0
    } else {
        v
    }
}

/// `α̃_a = arg(ζ_a)/2π mod 1` from the Casimir eigenvalues.
pub fn rep_label_from_casimirs(eigenvalues: &[Complex64]) -> Result<RepLabel> {
    for (a, v) in eigenvalues.iter().enumerate() {
        if !v.norm().is_finite() || (v.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("Casimir eigenvalue {a} is not unimodular: {v}")));
        }
    }
    Ok(RepLabel(eigenvalues.iter().map(|v| reduce_unit(v.arg() / TAU)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(nu: i64) -> Arc<GroupContext> {
        GroupContext::new(1, SkewIntMatrix::from_rows(&[vec![0, -nu], vec![nu, 0]]).unwrap()).unwrap()
    }

    #[test]
    fn magnetic_generators_commute_up_to_phase() {
        for nu in 1..=4 {
            let c = ctx(nu);
            let m = magnetic_generators(&c);
            let comm = commutator(&m[0], &m[1]).unwrap();
            assert!(comm.l.iter().all(|&v| v == 0));
            assert!(phase_distance(comm.phase, PI / nu as f64) < 1e-14);
        }
    }

    #[test]
    fn casimir_is_power_of_generator() {
        let c = ctx(3);
        let m = magnetic_generators(&c);
        let zeta = casimirs(&c);
        let p = m[0].pow(6);
        assert_eq!(p.l, zeta[0].l);
        assert!(p.z.iter().zip(&zeta[0].z).all(|(a, b)| (a - b).abs() < 1e-12));
        assert!(is_central(&zeta[0]) && is_central(&zeta[1]));
        assert!(!is_central(&m[0]));
    }

    #[test]
    fn plane_wave_and_translation_commutator() {
        let c = ctx(1);
        let comm = commutator(&c.plane_wave(0), &c.translation(0, 0.3)).unwrap();
        // u e^{isp} u⁻¹ = e^{is(p-1)}
        assert!(phase_distance(comm.phase, -0.3) < 1e-14);
    }

    #[test]
    fn label_reduction() {
        let v = [Complex64::from_polar(1.0, TAU * 0.25), Complex64::from_polar(1.0, -TAU * 0.25)];
        let lab = rep_label_from_casimirs(&v).unwrap();
        assert!((lab.0[0] - 0.25).abs() < 1e-15 && (lab.0[1] - 0.75).abs() < 1e-15);
        assert!(rep_label_from_casimirs(&[Complex64::new(2.0, 0.0)]).is_err());
    }

    #[test]
    fn context_mismatch_is_reported() {
        let a = ctx(1);
        let b = ctx(2);
        assert!(matches!(multiply(&a.identity(), &b.identity()), Err(Error::ContextMismatch)));
    }
}
