//! Spectrum of `H = (1/2m) Σ_a ∇_a∇_a + V'` in the theta-function basis.
//!
//! With `∇_a = p_a + qA'_a` the matrix elements are
//! `(1/2m) Σ_a ⟨∇_aψ_i, ∇_aψ_j⟩ + ⟨ψ_i, V'ψ_j⟩`, each reduced to products of
//! per-block trapezoidal sums. The unperturbed operator is diagonal with
//! `E = (1/2m)[Σ_j (2ν̃_j/π)(n_j + ½) + Σ_a (l_a + α̃_a)²]`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{check_dim, Error, Result};
use crate::gauge::{gauge_transform, FourierScalar, FourierVector, GaugeConfig, PhaseDescriptor};
use crate::quadrature::{pairwise_sum, Quadrature, DEFAULT_POINTS};
use crate::theta::{build_basis_state, BasisIndex, StateTables, ThetaState};
use crate::weyl::{GroupContext, RepLabel};

/// Eigenvalues closer than this are one level.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Largest tolerated change of a matrix element under grid refinement.
pub const REFINEMENT_TOL: f64 = 1e-6;
/// `m = ½` makes the kinetic term `Σ p_a²`.
pub const DEFAULT_MASS: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelTruncation {
    pub n_max: u32,
    pub l_max: i64,
}

impl Default for LevelTruncation {
    fn default() -> Self {
        LevelTruncation { n_max: 8, l_max: 6 }
    }
}

#[derive(Clone, Debug)]
pub struct HamiltonianSpec {
    pub context: Arc<GroupContext>,
    pub label: RepLabel,
    pub mass: f64,
    /// `V'` in adapted coordinates.
    pub potential: FourierScalar,
    /// `A'` in adapted coordinates.
    pub vector_potential: FourierVector,
    pub truncation: LevelTruncation,
    pub points: usize,
    /// Re-assemble on a doubled grid and fail if elements move by more than [`REFINEMENT_TOL`].
    pub check_refinement: bool,
}

impl HamiltonianSpec {
    pub fn free(context: Arc<GroupContext>, label: RepLabel) -> Self {
        HamiltonianSpec {
            context,
            label,
            mass: DEFAULT_MASS,
            potential: FourierScalar::new(),
            vector_potential: FourierVector::new(),
            truncation: LevelTruncation::default(),
            points: DEFAULT_POINTS,
            check_refinement: false,
        }
    }

    /// Spectrum problem of a gauge configuration given in the original
    /// coordinates. The label is `qα` carried to adapted coordinates (`α` itself
    /// when `q = 0`), and the periodic perturbations are rewritten there too.
    pub fn from_gauge(cfg: &GaugeConfig) -> Result<Self> {
        cfg.validate()?;
        let context = GroupContext::new(cfg.q, cfg.nu.clone())?;
        let charge = if cfg.q == 0 { 1.0 } else { cfg.q as f64 };
        let alpha: Vec<f64> = context.covector_to_adapted(&cfg.alpha)?.iter().map(|a| a * charge).collect();
        let mut potential = FourierScalar::new();
        for (l, c) in &cfg.v_prime.modes {
            potential.insert(context.index_to_adapted(l)?, *c);
        }
        let mut vector_potential = FourierVector::new();
        for (l, c) in &cfg.a_prime.modes {
            vector_potential.insert(context.index_to_adapted(l)?, context.covector_to_adapted(c)?);
        }
        let mut spec = HamiltonianSpec::free(context, RepLabel(alpha));
        spec.potential = potential;
        spec.vector_potential = vector_potential;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let n = self.context.n;
        check_dim(n, self.label.0.len())?;
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::InvalidInput(format!("mass must be positive, got {}", self.mass)));
        }
        self.potential.validate(n)?;
        self.vector_potential.validate(n)
    }
}

/// Closed-form eigenvalue of the unperturbed operator.
pub fn landau_energy(ctx: &GroupContext, alpha: &RepLabel, idx: &BasisIndex, mass: f64) -> f64 {
    let r = ctx.half_rank();
    let landau: f64 = (0..r)
        .map(|j| 2.0 * ctx.nu_tilde()[j] as f64 / PI * (idx.landau[j] as f64 + 0.5))
        .sum();
    let free: f64 = idx
        .momentum
        .iter()
        .enumerate()
        .map(|(i, &l)| (l as f64 + alpha.0[2 * r + i]).powi(2))
        .sum();
    (landau + free) / (2.0 * mass)
}

/// All basis indices with `n_j ≤ n_max` and `|l_a| ≤ l_max`, in lexicographic order.
pub fn basis_indices(ctx: &GroupContext, trunc: LevelTruncation) -> Vec<BasisIndex> {
    let r = ctx.half_rank();
    let mut ranges: Vec<(i64, i64)> = Vec::new();
    ranges.extend((0..r).map(|_| (0, trunc.n_max as i64)));
    ranges.extend((0..r).map(|j| (0, 2 * ctx.nu_tilde()[j] - 1)));
    ranges.extend((2 * r..ctx.n).map(|_| (-trunc.l_max, trunc.l_max)));
    let mut out = Vec::new();
    let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        out.push(BasisIndex {
            landau: cur[..r].iter().map(|&v| v as u32).collect(),
            sector: cur[r..2 * r].to_vec(),
            momentum: cur[2 * r..].to_vec(),
        });
        let mut k = cur.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < ranges[k].1 {
                cur[k] += 1;
                break;
            }
            cur[k] = ranges[k].0;
        }
    }
}

/// One energy level of the closed-form spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub energy: f64,
    pub members: Vec<BasisIndex>,
}

impl Level {
    pub fn degeneracy(&self) -> usize {
        self.members.len()
    }
}

/// Closed-form levels with `E ≤ cutoff`.
pub fn enumerate_levels(ctx: &GroupContext, alpha: &RepLabel, mass: f64, cutoff: f64) -> Result<Vec<Level>> {
    check_dim(ctx.n, alpha.0.len())?;
    let r = ctx.half_rank();
    let scale = 1.0 / (2.0 * mass);
    let lowest_gap: f64 = (0..r).map(|j| 2.0 * ctx.nu_tilde()[j] as f64 / PI).fold(f64::INFINITY, f64::min);
    let n_max = if r == 0 { 0 } else { ((cutoff / scale) / lowest_gap).ceil().max(0.0) as u32 + 1 };
    let l_max = ((cutoff / scale).max(0.0).sqrt() + 2.0).ceil() as i64;
    let mut levels: Vec<Level> = Vec::new();
    let mut all: Vec<(f64, BasisIndex)> = basis_indices(ctx, LevelTruncation { n_max, l_max })
        .into_iter()
        .map(|idx| (landau_energy(ctx, alpha, &idx, mass), idx))
        .filter(|(e, _)| *e <= cutoff)
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    for (e, idx) in all {
        match levels.last_mut() {
            Some(level) if (e - level.energy).abs() <= DEGENERACY_TOL => level.members.push(idx),
            _ => levels.push(Level { energy: e, members: vec![idx] }),
        }
    }
    Ok(levels)
}

/// Assembled Hermitian matrix with its basis.
#[derive(Clone, Debug)]
pub struct Assembled {
    pub matrix: DMatrix<Complex64>,
    pub basis: Vec<BasisIndex>,
    /// `max |M − M†|` before symmetrization.
    pub hermiticity_defect: f64,
    /// Largest element change under grid doubling, when checked.
    pub refinement_error: Option<f64>,
}

/// Largest tolerated `|M − M†|` entry.
pub const HERMITICITY_TOL: f64 = 1e-10;

fn hermitian_part(m: DMatrix<Complex64>) -> (DMatrix<Complex64>, f64) {
    let defect = (&m - m.adjoint()).iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
    ((&m + m.adjoint()) * Complex64::new(0.5, 0.0), defect)
}

struct BasisTables {
    psi: StateTables,
    momenta: Vec<StateTables>,
}

fn build_tables(states: &[ThetaState], quad: &Quadrature) -> Result<Vec<BasisTables>> {
    states
        .par_iter()
        .map(|s| {
            let psi = s.tables(quad)?;
            let momenta = (0..s.context().n).map(|a| s.momentum(a).tables(quad)).collect::<Result<_>>()?;
            Ok(BasisTables { psi, momenta })
        })
        .collect()
}

fn negated(l: &[i64]) -> Vec<i64> {
    l.iter().map(|v| -v).collect()
}

fn assemble_on(spec: &HamiltonianSpec, states: &[ThetaState], points: usize) -> Result<(DMatrix<Complex64>, f64)> {
    let n = spec.context.n;
    let quad = Quadrature::with_points(n, points);
    let tables = build_tables(states, &quad)?;
    let q = spec.context.q as f64;
    let kin = 1.0 / (2.0 * spec.mass);
    let dim = states.len();
    let zero = vec![0i64; n];
    let a_modes: Vec<(&Vec<i64>, &Vec<Complex64>)> = spec.vector_potential.modes.iter().collect();
    let rows: Vec<Vec<Complex64>> = (0..dim)
        .into_par_iter()
        .map(|i| {
            (0..dim)
                .map(|j| -> Result<Complex64> {
                    let (ti, tj) = (&tables[i], &tables[j]);
                    let mut kinetic = Complex64::new(0.0, 0.0);
                    for a in 0..n {
                        kinetic += ti.momenta[a].element(&tj.momenta[a], &zero, &quad)?;
                        for (l, c) in &a_modes {
                            kinetic += q * c[a] * ti.momenta[a].element(&tj.psi, l, &quad)?;
                            kinetic += q * c[a].conj() * ti.psi.element(&tj.momenta[a], &negated(l), &quad)?;
                            for (lp, cp) in &a_modes {
                                let diff: Vec<i64> = lp.iter().zip(l.iter()).map(|(x, y)| x - y).collect();
                                kinetic += q * q * c[a].conj() * cp[a] * ti.psi.element(&tj.psi, &diff, &quad)?;
                            }
                        }
                    }
                    let mut potential = Complex64::new(0.0, 0.0);
                    for (l, v) in &spec.potential.modes {
                        potential += v * ti.psi.element(&tj.psi, l, &quad)?;
                    }
                    Ok(kinetic * kin + potential)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(hermitian_part(DMatrix::from_fn(dim, dim, |i, j| rows[i][j])))
}

fn basis_states(spec: &HamiltonianSpec) -> Result<(Vec<BasisIndex>, Vec<ThetaState>)> {
    let basis = basis_indices(&spec.context, spec.truncation);
    let states = basis
        .par_iter()
        .map(|idx| build_basis_state(&spec.context, &spec.label, idx))
        .collect::<Result<Vec<_>>>()?;
    Ok((basis, states))
}

pub fn assemble_hamiltonian(spec: &HamiltonianSpec) -> Result<Assembled> {
    spec.validate()?;
    let (basis, states) = basis_states(spec)?;
    let (matrix, hermiticity_defect) = assemble_on(spec, &states, spec.points)?;
    let refinement_error = if spec.check_refinement {
        let (fine, _) = assemble_on(spec, &states, 2 * spec.points)?;
        let err = (&fine - &matrix).iter().fold(0.0f64, |m, v| m.max(v.norm()));
        if err > REFINEMENT_TOL {
            return Err(Error::NonConvergence(format!(
                "matrix elements change by {err:e} under grid refinement"
            )));
        }
        Some(err)
    } else {
        None
    };
    Ok(Assembled { matrix, basis, hermiticity_defect, refinement_error })
}

/// Assembles the same operator in the gauge reached by `phi`, working
/// pointwise on the full grid: states become `e^{-iqφ}ψ` and the covariant
/// derivative uses the connection of the transformed configuration.
pub fn assemble_in_gauge(spec: &HamiltonianSpec, phi: &PhaseDescriptor) -> Result<Assembled> {
    spec.validate()?;
    let ctx = &spec.context;
    let n = ctx.n;
    let mut base_cfg = ctx.triangular_gauge(&spec.label.0)?;
    base_cfg.a_prime = spec.vector_potential.clone();
    let target = gauge_transform(&base_cfg, phi)?;
    let (basis, states) = basis_states(spec)?;
    let quad = Quadrature::with_points(n, spec.points);
    let nodes: Vec<Vec<f64>> = (0..n).map(|a| quad.nodes(a)).collect();
    let total = spec.points.pow(n as u32);
    let q = ctx.q as f64;
    let points: Vec<Vec<f64>> = (0..total)
        .map(|flat| {
            let mut rem = flat;
            let mut x = vec![0.0; n];
            for a in (0..n).rev() {
                x[a] = nodes[a][rem % spec.points];
                rem /= spec.points;
            }
            x
        })
        .collect();
    // values[s][p] = U ψ_s at point p; derivs[s][a][p] = ∇'_a (Uψ_s)
    let per_state: Vec<(Vec<Complex64>, Vec<Vec<Complex64>>)> = states
        .par_iter()
        .map(|s| {
            let moms: Vec<ThetaState> = (0..n).map(|a| s.momentum(a)).collect();
            let mut vals = Vec::with_capacity(total);
            let mut ders = vec![Vec::with_capacity(total); n];
            for x in &points {
                let u = phi.unitary(ctx.q, x);
                let grad_phi = phi.gradient(x);
                let psi = s.eval(x);
                let base_periodic = base_cfg.a_prime.eval(x);
                let target_conn = target.connection(x);
                let base_conn = base_cfg.connection(x);
                vals.push(u * psi);
                for a in 0..n {
                    // the charge-independent part α̃ is carried separately so that q = 0 works
                    let tri = spec.label.0[a] + q * (base_conn[a] - base_cfg.alpha[a] - base_periodic[a]);
                    let new = spec.label.0[a] + q * (target_conn[a] - target.alpha[a]);
                    // -i∂_a ψ is p_a ψ minus the triangular connection term
                    let minus_i_d_psi = moms[a].eval(x) - psi * tri;
                    let minus_i_d = u * minus_i_d_psi - u * psi * (q * grad_phi[a]);
                    ders[a].push(minus_i_d + u * psi * new);
                }
            }
            (vals, ders)
        })
        .collect();
    let w = quad.weight().powi(n as i32);
    let kin = 1.0 / (2.0 * spec.mass);
    let vpot: Vec<f64> = points.iter().map(|x| spec.potential.eval(x)).collect();
    let dim = states.len();
    let rows: Vec<Vec<Complex64>> = (0..dim)
        .into_par_iter()
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for a in 0..n {
                        let prods: Vec<Complex64> =
                            per_state[i].1[a].iter().zip(&per_state[j].1[a]).map(|(u, v)| u.conj() * v).collect();
                        acc += pairwise_sum(&prods) * kin;
                    }
                    let prods: Vec<Complex64> = per_state[i]
                        .0
                        .iter()
                        .zip(&per_state[j].0)
                        .zip(&vpot)
                        .map(|((u, v), p)| u.conj() * v * *p)
                        .collect();
                    (acc + pairwise_sum(&prods)) * w
                })
                .collect()
        })
        .collect();
    let (matrix, hermiticity_defect) = hermitian_part(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]));
    Ok(Assembled { matrix, basis, hermiticity_defect, refinement_error: None })
}

/// Eigen-decomposition with levels grouped at [`DEGENERACY_TOL`].
#[derive(Clone, Debug)]
pub struct SpectralResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<Complex64>,
    pub basis: Vec<BasisIndex>,
    /// `(energy, multiplicity)` per distinct level.
    pub degeneracies: Vec<(f64, usize)>,
    /// Label and dominant sector `h` of each eigenvector.
    pub sector_labels: Vec<(RepLabel, Vec<i64>)>,
}

pub fn diagonalize(assembled: &Assembled, label: &RepLabel) -> Result<SpectralResult> {
    let m = &assembled.matrix;
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidInput("matrix is not square".into()));
    }
    let dim = m.nrows();
    let defect = (m - m.adjoint()).iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
    if defect > HERMITICITY_TOL {
        return Err(Error::InvalidInput(format!("matrix is not Hermitian (defect {defect:e})")));
    }
    if assembled.basis.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: assembled.basis.len() });
    }
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = DMatrix::from_fn(dim, dim, |i, j| eig.eigenvectors[(i, order[j])]);
    let mut degeneracies: Vec<(f64, usize)> = Vec::new();
    for &e in &eigenvalues {
        match degeneracies.last_mut() {
            Some((e0, c)) if (e - *e0).abs() <= DEGENERACY_TOL => *c += 1,
            _ => degeneracies.push((e, 1)),
        }
    }
    let sector_labels = (0..dim)
        .map(|j| {
            let mut weights: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
            for i in 0..dim {
                *weights.entry(assembled.basis[i].sector.clone()).or_default() += eigenvectors[(i, j)].norm_sqr();
            }
            let dominant = weights
                .into_iter()
                .fold((Vec::new(), -1.0), |best, (h, w)| if w > best.1 { (h, w) } else { best })
                .0;
            (label.clone(), dominant)
        })
        .collect();
    Ok(SpectralResult { eigenvalues, eigenvectors, basis: assembled.basis.clone(), degeneracies, sector_labels })
}

/// Eigenvalues over a set of labels, each reduced to `[0,1)ⁿ` first.
pub fn band_sweep(spec: &HamiltonianSpec, labels: &[RepLabel]) -> Result<Vec<Vec<f64>>> {
    labels
        .par_iter()
        .map(|label| {
            let mut s = spec.clone();
            s.label = label.reduced();
            let assembled = assemble_hamiltonian(&s)?;
            Ok(diagonalize(&assembled, &s.label)?.eigenvalues)
        })
        .collect()
}
