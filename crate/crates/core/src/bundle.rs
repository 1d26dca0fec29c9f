//! The quotient line bundle `E = (ℝⁿ×ℂ)/∼_V` in local trivializations over
//! a cover of the torus by axis-aligned boxes.
//!
//! A piece `X_i` is described by its lift `W_i ⊂ ℝⁿ`, an open box of side
//! below `2π`, so `P_i⁻¹` picks the unique representative of a torus point
//! inside `W_i`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

use crate::error::{check_dim, Error, Result};
use crate::gauge::{make_quasifactor, recover_nu, GaugeConfig, QuasiFactor};
use crate::quadrature::pairwise_sum;
use crate::skewform::SkewIntMatrix;
use crate::theta::ThetaState;
use crate::weyl::{GroupContext, WeylElement};

/// Samples drawn per requested point before giving up on an overlap region.
const MAX_DRAWS_PER_SAMPLE: usize = 10_000;

/// Lift `W_i = Π_a (lower_a, upper_a)` of one piece.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Piece {
    /// `P_i⁻¹(u)`, or `None` if `[u]` is not in the piece.
    pub fn lift(&self, u: &[f64]) -> Option<Vec<f64>> {
        u.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&ua, (&lo, &hi))| {
                let t = (ua - lo).rem_euclid(TAU);
                (t > 0.0 && lo + t < hi).then_some(lo + t)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cover {
    n: usize,
    pieces: Vec<Piece>,
}

impl Cover {
    pub fn new(n: usize, pieces: Vec<Piece>) -> Result<Self> {
        for p in &pieces {
            check_dim(n, p.lower.len())?;
            check_dim(n, p.upper.len())?;
            for a in 0..n {
                let w = p.upper[a] - p.lower[a];
                if !(w > 0.0 && w < TAU) {
                    return Err(Error::InvalidInput(format!("piece side {w} must lie in (0, 2π)")));
                }
            }
        }
        Ok(Cover { n, pieces })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Indices of the pieces containing `[u]`.
    pub fn containing(&self, u: &[f64]) -> Vec<usize> {
        (0..self.pieces.len()).filter(|&i| self.pieces[i].lift(u).is_some()).collect()
    }

    pub fn lift(&self, i: usize, u: &[f64]) -> Result<Vec<f64>> {
        let piece = self
            .pieces
            .get(i)
            .ok_or_else(|| Error::InvalidInput(format!("no piece {i}")))?;
        check_dim(self.n, u.len())?;
        piece
            .lift(u)
            .ok_or_else(|| Error::InvalidInput(format!("point {u:?} is outside piece {i}")))
    }

    /// Same pieces with lifts `W_i + 2π l_i`.
    pub fn with_lift_shifts(&self, shifts: &[Vec<i64>]) -> Result<Cover> {
        check_dim(self.pieces.len(), shifts.len())?;
        let pieces = self
            .pieces
            .iter()
            .zip(shifts)
            .map(|(p, l)| {
                check_dim(self.n, l.len())?;
                let move_by = |v: &[f64]| v.iter().zip(l).map(|(x, &k)| x + TAU * k as f64).collect();
                Ok(Piece { lower: move_by(&p.lower), upper: move_by(&p.upper) })
            })
            .collect::<Result<_>>()?;
        Ok(Cover { n: self.n, pieces })
    }

    /// Number of uniform random points of the torus not covered by any piece.
    pub fn uncovered_samples(&self, samples: usize, seed: u64) -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .filter(|_| {
                let u: Vec<f64> = (0..self.n).map(|_| rng.gen_range(0.0..TAU)).collect();
                self.containing(&u).is_empty()
            })
            .count()
    }
}

/// `2ⁿ` boxes with sides `π + overlap`, starting at `b_a π − overlap/2` for
/// each bit pattern `b`; neighbours overlap in strips of width `overlap`.
pub fn standard_cover(n: usize, overlap: f64) -> Result<Cover> {
    if !(overlap > 0.0 && overlap < PI) {
        return Err(Error::InvalidInput(format!("overlap must lie in (0, π), got {overlap}")));
    }
    if n >= usize::BITS as usize {
        return Err(Error::Unsupported(format!("cover of dimension {n}")));
    }
    let pieces = (0..1usize << n)
        .map(|bits| {
            let lower: Vec<f64> =
                (0..n).map(|a| ((bits >> a) & 1) as f64 * PI - 0.5 * overlap).collect();
            let upper = lower.iter().map(|lo| lo + PI + overlap).collect();
            Piece { lower, upper }
        })
        .collect();
    Cover::new(n, pieces)
}

/// Transition functions `t_ij(u) = V((P_i⁻¹u − P_j⁻¹u)/2π, P_j⁻¹u)` together
/// with the data needed to act with translations on sections.
#[derive(Clone, Debug)]
pub struct TransitionData {
    pub cover: Cover,
    pub quasifactor: QuasiFactor,
    /// `qα`, the constant part of `q·A`.
    pub alpha_tilde: Vec<f64>,
}

impl TransitionData {
    pub fn new(cover: Cover, cfg: &GaugeConfig) -> Result<Self> {
        cfg.validate()?;
        check_dim(cover.dim(), cfg.n)?;
        let alpha_tilde = cfg.alpha.iter().map(|a| cfg.q as f64 * a).collect();
        Ok(TransitionData { cover, quasifactor: make_quasifactor(cfg), alpha_tilde })
    }

    /// Bundle in which theta-basis states of `ctx` with label `α̃` live.
    pub fn for_context(cover: Cover, ctx: &GroupContext, alpha_tilde: &[f64]) -> Result<Self> {
        let cfg = ctx.triangular_gauge(alpha_tilde)?;
        check_dim(cover.dim(), ctx.n)?;
        Ok(TransitionData { cover, quasifactor: make_quasifactor(&cfg), alpha_tilde: alpha_tilde.to_vec() })
    }

    pub fn with_quasifactor(&self, v: QuasiFactor) -> Self {
        TransitionData { quasifactor: v, ..self.clone() }
    }

    pub fn with_cover(&self, cover: Cover) -> Result<Self> {
        check_dim(self.cover.dim(), cover.dim())?;
        Ok(TransitionData { cover, ..self.clone() })
    }
}

fn lattice_offset(from: &[f64], to: &[f64]) -> Vec<i64> {
    from.iter().zip(to).map(|(a, b)| ((a - b) / TAU).round() as i64).collect()
}

pub fn transition(td: &TransitionData, i: usize, j: usize, u: &[f64]) -> Result<Complex64> {
    let xi = td.cover.lift(i, u)?;
    let xj = td.cover.lift(j, u)?;
    Ok(td.quasifactor.value(&lattice_offset(&xi, &xj), &xj))
}

/// Random points lying in at least `min_pieces` pieces, with those pieces.
fn overlap_samples(cover: &Cover, count: usize, min_pieces: usize, seed: u64) -> Result<Vec<(Vec<f64>, Vec<usize>)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut draws = 0usize;
    while out.len() < count {
        draws += 1;
        if draws > count.max(1) * MAX_DRAWS_PER_SAMPLE {
            return Err(Error::InvalidInput(format!("cover has no region covered {min_pieces} times")));
        }
        let u: Vec<f64> = (0..cover.dim()).map(|_| rng.gen_range(0.0..TAU)).collect();
        let pieces = cover.containing(&u);
        if pieces.len() >= min_pieces {
            out.push((u, pieces));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CocycleReport {
    /// `max |t_ik − t_ij t_jk|`.
    pub max_defect: f64,
    pub points: usize,
    pub triples: usize,
}

/// Checks `t_ik = t_ij t_jk` for all ordered triples of pieces at `samples`
/// random points covered by at least three pieces (two when there are only two).
pub fn cocycle_check(td: &TransitionData, samples: usize, seed: u64) -> Result<CocycleReport> {
    let min_pieces = td.cover.pieces().len().min(3);
    let points = overlap_samples(&td.cover, samples, min_pieces, seed)?;
    let per_point: Vec<(f64, usize)> = points
        .par_iter()
        .map(|(u, pieces)| {
            let t: Vec<Vec<Complex64>> = pieces
                .iter()
                .map(|&i| pieces.iter().map(|&j| transition(td, i, j, u)).collect::<Result<_>>())
                .collect::<Result<_>>()?;
            let m = pieces.len();
            let mut worst = 0.0f64;
            for i in 0..m {
                for j in 0..m {
                    for k in 0..m {
                        worst = worst.max((t[i][k] - t[i][j] * t[j][k]).norm());
                    }
                }
            }
            Ok((worst, m * m * m))
        })
        .collect::<Result<_>>()?;
    Ok(CocycleReport {
        max_defect: per_point.iter().map(|p| p.0).fold(0.0, f64::max),
        points: per_point.len(),
        triples: per_point.iter().map(|p| p.1).sum(),
    })
}

#[derive(Clone, Debug)]
enum SectionRule {
    State(ThetaState),
    Translated { inner: Box<Section>, z: Vec<f64>, phase: f64 },
}

/// A section of `E` given by a rule for its local representatives `ψ̄_i`.
#[derive(Clone, Debug)]
pub struct Section {
    rule: SectionRule,
}

impl Section {
    /// `ψ̄_i(u)` for `u ∈ X_i`.
    pub fn eval(&self, td: &TransitionData, i: usize, u: &[f64]) -> Result<Complex64> {
        let x = td.cover.lift(i, u)?;
        match &self.rule {
            SectionRule::State(s) => Ok(s.eval(&x)),
            SectionRule::Translated { inner, z, phase } => {
                let moved: Vec<f64> = x.iter().zip(z).map(|(a, b)| a + b).collect();
                let j = *td
                    .cover
                    .containing(&moved)
                    .first()
                    .ok_or_else(|| Error::InvalidInput("cover misses a translated point".into()))?;
                let y = td.cover.lift(j, &moved)?;
                let beta = td.quasifactor.beta();
                let q = td.quasifactor.charge();
                let mut theta = *phase;
                for a in 0..x.len() {
                    theta += td.alpha_tilde[a] * z[a];
                    for b in 0..x.len() {
                        theta += q * (x[a] + 0.5 * z[a]) * beta[a][b] * z[b];
                    }
                }
                // x + z may leave W_j by a lattice vector; V carries ψ̄_j back
                let wrap = td.quasifactor.value(&lattice_offset(&moved, &y), &y);
                Ok(Complex64::from_polar(1.0, theta) * wrap * inner.eval(td, j, &moved)?)
            }
        }
    }
}

/// `ψ̄_i(u) = ψ(P_i⁻¹ u)`.
pub fn section_from_state(td: &TransitionData, s: &ThetaState) -> Result<Section> {
    check_dim(td.cover.dim(), s.context().n)?;
    Ok(Section { rule: SectionRule::State(s.clone()) })
}

/// Action of a projective translation `(0, z, φ)` on a section.
pub fn translate_section(td: &TransitionData, section: &Section, g: &WeylElement) -> Result<Section> {
    check_dim(td.cover.dim(), g.z.len())?;
    if g.l.iter().any(|&v| v != 0) {
        return Err(Error::InvalidInput("only elements with l = 0 act by translation".into()));
    }
    Ok(Section {
        rule: SectionRule::Translated { inner: Box::new(section.clone()), z: g.z.clone(), phase: g.phase },
    })
}

/// `max |ψ̄_i − t_ij ψ̄_j|` over random points covered at least twice.
pub fn consistency_residual(td: &TransitionData, section: &Section, samples: usize, seed: u64) -> Result<f64> {
    let points = overlap_samples(&td.cover, samples, td.cover.pieces().len().min(2), seed)?;
    let worst: Vec<f64> = points
        .par_iter()
        .map(|(u, pieces)| {
            let vals: Vec<Complex64> = pieces.iter().map(|&i| section.eval(td, i, u)).collect::<Result<_>>()?;
            let mut w = 0.0f64;
            for (a, &i) in pieces.iter().enumerate() {
                for (b, &j) in pieces.iter().enumerate() {
                    w = w.max((vals[a] - transition(td, i, j, u)? * vals[b]).norm());
                }
            }
            Ok(w)
        })
        .collect::<Result<_>>()?;
    Ok(worst.into_iter().fold(0.0, f64::max))
}

/// `max |ψ̄_i − ψ̄'_i|` over random points and every piece containing them.
pub fn section_distance(td: &TransitionData, a: &Section, b: &Section, samples: usize, seed: u64) -> Result<f64> {
    let points = overlap_samples(&td.cover, samples, 1, seed)?;
    let worst: Vec<f64> = points
        .par_iter()
        .map(|(u, pieces)| {
            pieces.iter().try_fold(0.0f64, |w, &i| Ok(w.max((a.eval(td, i, u)? - b.eval(td, i, u)?).norm())))
        })
        .collect::<Result<_>>()?;
    Ok(worst.into_iter().fold(0.0, f64::max))
}

/// `(ψ̄', ψ̄)_Γ` on a `pointsⁿ` trapezoid grid, each grid point assigned to
/// the first piece containing it.
pub fn global_pairing(td: &TransitionData, a: &Section, b: &Section, points: usize) -> Result<Complex64> {
    let n = td.cover.dim();
    if points == 0 {
        return Err(Error::InvalidInput("quadrature needs at least one point".into()));
    }
    let total = points
        .checked_pow(n as u32)
        .ok_or_else(|| Error::Unsupported("quadrature grid too large".into()))?;
    let h = TAU / points as f64;
    let values: Vec<Complex64> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut rem = flat;
            let mut u = vec![0.0; n];
            for slot in u.iter_mut().rev() {
                *slot = (rem % points) as f64 * h;
                rem /= points;
            }
            let i = *td
                .cover
                .containing(&u)
                .first()
                .ok_or_else(|| Error::InvalidInput(format!("cover misses {u:?}")))?;
            Ok(a.eval(td, i, &u)?.conj() * b.eval(td, i, &u)?)
        })
        .collect::<Result<_>>()?;
    Ok(pairwise_sum(&values) * h.powi(n as i32))
}

/// Lattice vectors `l_i` with `W̃_i = W_i + 2πl_i`.
fn lift_shifts(old: &Cover, new: &Cover) -> Result<Vec<Vec<i64>>> {
    check_dim(old.pieces().len(), new.pieces().len())?;
    old.pieces()
        .iter()
        .zip(new.pieces())
        .map(|(p, q)| {
            let l = lattice_offset(&q.lower, &p.lower);
            let exact = p.lower.iter().zip(&q.lower).zip(&l).all(|((a, b), &k)| (b - a - TAU * k as f64).abs() < 1e-9);
            exact
                .then_some(l)
                .ok_or_else(|| Error::InvalidInput("covers differ by more than lattice shifts of the lifts".into()))
        })
        .collect()
}

/// `Ũ_i(u) = V(l_i, P_i⁻¹u)`, the gauge transformation induced by moving lifts.
pub fn lift_gauge(old: &TransitionData, new: &TransitionData, i: usize, u: &[f64]) -> Result<Complex64> {
    let shifts = lift_shifts(&old.cover, &new.cover)?;
    let l = shifts.get(i).ok_or_else(|| Error::InvalidInput(format!("no piece {i}")))?;
    Ok(old.quasifactor.value(l, &old.cover.lift(i, u)?))
}

/// `max |t̃_ij − Ũ_i t_ij Ũ_j⁻¹|` after moving lifts.
pub fn coboundary_defect(old: &TransitionData, new: &TransitionData, samples: usize, seed: u64) -> Result<f64> {
    let points = overlap_samples(&old.cover, samples, old.cover.pieces().len().min(2), seed)?;
    let worst: Vec<f64> = points
        .par_iter()
        .map(|(u, pieces)| {
            let mut w = 0.0f64;
            for &i in pieces {
                for &j in pieces {
                    let expected =
                        lift_gauge(old, new, i, u)? * transition(old, i, j, u)? * lift_gauge(old, new, j, u)?.conj();
                    w = w.max((transition(new, i, j, u)? - expected).norm());
                }
            }
            Ok(w)
        })
        .collect::<Result<_>>()?;
    Ok(worst.into_iter().fold(0.0, f64::max))
}

/// Flux integers of the bundle read back from its quasi-periodicity factor.
pub fn chern_numbers(td: &TransitionData, points: &[Vec<f64>]) -> Result<SkewIntMatrix> {
    recover_nu(&td.quasifactor, points)
}
