//! Spectra of the Landau operator and its periodic perturbations.

use magtorus_core::gauge::*;
use magtorus_core::spectra::*;
use magtorus_core::*;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

fn pair_context(nu: i64) -> Arc<GroupContext> {
    GroupContext::new(1, SkewIntMatrix::from_rows(&[vec![0, -nu], vec![nu, 0]]).unwrap()).unwrap()
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn spectrum(spec: &HamiltonianSpec) -> Vec<f64> {
    diagonalize(&assemble_hamiltonian(spec).unwrap(), &spec.label).unwrap().eigenvalues
}

#[test]
fn free_matrix_is_the_closed_form() {
    for nu in 1..=3 {
        let ctx = pair_context(nu);
        let label = RepLabel(vec![0.2, 0.3]);
        let mut spec = HamiltonianSpec::free(ctx.clone(), label.clone());
        spec.mass = 1.0;
        spec.truncation = LevelTruncation { n_max: 4, l_max: 0 };
        let a = assemble_hamiltonian(&spec).unwrap();
        for i in 0..a.basis.len() {
            for j in 0..a.basis.len() {
                let expected = if i == j { landau_energy(&ctx, &label, &a.basis[i], 1.0) } else { 0.0 };
                assert!((a.matrix[(i, j)] - expected).norm() < 1e-10);
            }
        }
        let r = diagonalize(&a, &label).unwrap();
        assert_eq!(r.degeneracies.len(), 5);
        for (k, (e, mult)) in r.degeneracies.iter().enumerate() {
            assert_eq!(*mult, 2 * nu as usize);
            assert!((e - 2.0 * nu as f64 / PI * (k as f64 + 0.5) / 2.0).abs() < 1e-10);
        }
    }
}

#[test]
fn mixed_context_closed_form() {
    // ν̃ = 1 pair plus one free axis
    let ctx = GroupContext::new(1, SkewIntMatrix::from_rows(&[vec![0, -1, 0], vec![1, 0, 0], vec![0, 0, 0]]).unwrap()).unwrap();
    let label = RepLabel(vec![0.4, 0.1, 0.3]);
    let mut spec = HamiltonianSpec::free(ctx.clone(), label.clone());
    spec.truncation = LevelTruncation { n_max: 2, l_max: 2 };
    spec.points = 32;
    let r = diagonalize(&assemble_hamiltonian(&spec).unwrap(), &label).unwrap();
    let closed = sorted(basis_indices(&ctx, spec.truncation).iter().map(|b| landau_energy(&ctx, &label, b, DEFAULT_MASS)).collect());
    assert!(max_gap(&r.eigenvalues, &closed) < 1e-10);
    // lowest level: n = 0, l = 0 in both sectors, E = 1/π + 0.09
    assert!((r.eigenvalues[0] - (1.0 / PI + 0.09)).abs() < 1e-10);
    assert_eq!(r.degeneracies[0].1, 2);
}

#[test]
fn zero_rank_is_a_folded_parabola() {
    let ctx = GroupContext::new(0, SkewIntMatrix::zeros(1)).unwrap();
    let mut spec = HamiltonianSpec::free(ctx, RepLabel(vec![0.25]));
    spec.truncation = LevelTruncation { n_max: 0, l_max: 3 };
    let e = spectrum(&spec);
    let expected = sorted((-3..=3).map(|l: i64| (l as f64 + 0.25).powi(2)).collect());
    assert!(max_gap(&e, &expected) < 1e-12);
    assert!((e[0] - 0.0625).abs() < 1e-12);
}

#[test]
fn weak_potential_stays_within_its_sup_norm() {
    // the compressed perturbation has operator norm at most sup|V|
    let ctx = pair_context(2);
    let label = RepLabel(vec![0.1, 0.6]);
    let mut spec = HamiltonianSpec::free(ctx.clone(), label.clone());
    spec.truncation = LevelTruncation { n_max: 3, l_max: 0 };
    spec.points = 32;
    let free = spectrum(&spec);
    let amp = 0.01;
    spec.potential = FourierScalar::cosine(vec![1, 0], amp);
    let e = spectrum(&spec);
    assert!(max_gap(&e, &free) <= 2.0 * amp + 1e-12);
    // the lowest cluster keeps 2ν̃ members well separated from the next level
    let gap = 2.0 * 2.0 / PI / (2.0 * DEFAULT_MASS);
    assert!(e[3] - e[0] < 4.0 * amp && e[4] - e[3] > gap - 4.0 * amp);
}

#[test]
fn zero_rank_potential_against_finite_differences() {
    // H = (p + α)² + 2c cos x against a second-order grid discretization
    let (alpha, c) = (0.3, 0.4);
    let ctx = GroupContext::new(0, SkewIntMatrix::zeros(1)).unwrap();
    let mut spec = HamiltonianSpec::free(ctx, RepLabel(vec![alpha]));
    spec.truncation = LevelTruncation { n_max: 0, l_max: 12 };
    spec.potential = FourierScalar::cosine(vec![1], c);
    let spectral = spectrum(&spec);
    let m = 800;
    let h = TAU / m as f64;
    // conjugate by e^{iαx}: Bloch boundary twist on a periodic grid
    let twist = Complex64::from_polar(1.0, alpha * TAU);
    let fd = DMatrix::<Complex64>::from_fn(m, m, |i, j| {
        let mut v = Complex64::new(0.0, 0.0);
        if i == j {
            v += 2.0 / (h * h) + 2.0 * c * (i as f64 * h).cos();
        }
        if j == (i + 1) % m {
            v -= if i == m - 1 { twist } else { Complex64::new(1.0, 0.0) } / (h * h);
        }
        if i == (j + 1) % m {
            v -= if j == m - 1 { twist.conj() } else { Complex64::new(1.0, 0.0) } / (h * h);
        }
        v
    });
    let fd_eigs = sorted(SymmetricEigen::new(fd).eigenvalues.iter().copied().collect());
    for k in 0..6 {
        assert!((spectral[k] - fd_eigs[k]).abs() < 2e-3 * (1.0 + spectral[k].abs()), "level {k}");
    }
}

fn perturbed_spec() -> HamiltonianSpec {
    let mut spec = HamiltonianSpec::free(pair_context(1), RepLabel(vec![0.2, 0.3]));
    spec.truncation = LevelTruncation { n_max: 4, l_max: 0 };
    spec.points = 32;
    spec.potential = FourierScalar::cosine(vec![1, 0], 0.3);
    let mut a = FourierVector::new();
    a.insert(vec![0, 1], vec![Complex64::new(0.1, 0.0), Complex64::new(0.05, 0.02)]);
    a.insert(vec![0, -1], vec![Complex64::new(0.1, 0.0), Complex64::new(0.05, -0.02)]);
    spec.vector_potential = a;
    spec
}

#[test]
fn spectrum_is_gauge_invariant() {
    let spec = perturbed_spec();
    let reference = spectrum(&spec);
    let phis = [
        PhaseDescriptor { quadratic: vec![vec![0.0, 0.1], vec![0.1, 0.0]], periodic: FourierScalar::cosine(vec![1, 1], 0.2) },
        PhaseDescriptor { quadratic: vec![vec![0.0; 2]; 2], periodic: FourierScalar::cosine(vec![0, 2], -0.15) },
        PhaseDescriptor { quadratic: vec![vec![0.3, -0.05], vec![-0.05, 0.2]], periodic: FourierScalar::new() },
    ];
    for phi in &phis {
        let moved = diagonalize(&assemble_in_gauge(&spec, phi).unwrap(), &spec.label).unwrap().eigenvalues;
        assert!(max_gap(&moved, &reference) < 1e-8);
    }
}

#[test]
fn band_is_periodic_in_the_label() {
    let spec = perturbed_spec();
    let base = spectrum(&spec);
    for a in 0..2 {
        let mut shifted = spec.clone();
        shifted.label.0[a] += 1.0;
        assert!(max_gap(&spectrum(&shifted), &base) < 1e-8, "axis {a}");
    }
    let swept = band_sweep(&spec, &[RepLabel(vec![1.2, -0.7]), spec.label.clone()]).unwrap();
    assert!(max_gap(&swept[0], &swept[1]) < 1e-12);
}

#[test]
fn refinement_check_passes_on_resolved_data() {
    let mut spec = perturbed_spec();
    spec.check_refinement = true;
    let a = assemble_hamiltonian(&spec).unwrap();
    assert!(a.refinement_error.unwrap() < REFINEMENT_TOL);
    assert!(a.hermiticity_defect < HERMITICITY_TOL);
}

#[test]
fn under_resolved_grid_is_reported() {
    let mut spec = perturbed_spec();
    spec.potential = FourierScalar::cosine(vec![9, 0], 0.3);
    spec.points = 8;
    spec.check_refinement = true;
    assert!(matches!(assemble_hamiltonian(&spec), Err(Error::NonConvergence(_))));
}

#[test]
fn invalid_inputs_are_rejected() {
    let mut spec = perturbed_spec();
    spec.mass = 0.0;
    assert!(assemble_hamiltonian(&spec).is_err());
    let spec = perturbed_spec();
    let mut a = assemble_hamiltonian(&spec).unwrap();
    a.matrix[(0, 1)] += Complex64::new(1e-3, 0.0);
    assert!(diagonalize(&a, &spec.label).is_err());
    let mut b = assemble_hamiltonian(&spec).unwrap();
    b.basis.pop();
    assert!(diagonalize(&b, &spec.label).is_err());
}

#[test]
fn from_gauge_uses_adapted_data() {
    // ν with divisor 2 hidden behind a unimodular change
    let nu = SkewIntMatrix::from_rows(&[vec![0, -2, 2], vec![2, 0, 0], vec![-2, 0, 0]]).unwrap();
    let cfg = GaugeConfig::canonical(1, nu, vec![0.0, 0.1, 0.2]).unwrap();
    let mut spec = HamiltonianSpec::from_gauge(&cfg).unwrap();
    assert_eq!(spec.context.nu_tilde(), &[2]);
    spec.truncation = LevelTruncation { n_max: 1, l_max: 1 };
    spec.points = 16;
    let e = spectrum(&spec);
    let closed = sorted(basis_indices(&spec.context, spec.truncation).iter().map(|b| landau_energy(&spec.context, &spec.label, b, DEFAULT_MASS)).collect());
    assert!(max_gap(&e, &closed) < 1e-10);
    // the constant potential mode survives the coordinate change as a shift
    let mut with_v = cfg.clone();
    with_v.v_prime.insert(vec![0, 0, 0], Complex64::new(0.5, 0.0));
    let mut shifted = HamiltonianSpec::from_gauge(&with_v).unwrap();
    shifted.truncation = spec.truncation;
    shifted.points = 16;
    let e2 = spectrum(&shifted);
    assert!(e.iter().zip(&e2).all(|(a, b)| (b - a - 0.5).abs() < 1e-10));
}

#[test]
fn degenerate_levels_carry_each_sector_once() {
    let ctx = pair_context(3);
    let label = RepLabel(vec![0.0, 0.5]);
    let mut spec = HamiltonianSpec::free(ctx, label.clone());
    spec.truncation = LevelTruncation { n_max: 1, l_max: 0 };
    let r = diagonalize(&assemble_hamiltonian(&spec).unwrap(), &label).unwrap();
    assert_eq!(r.degeneracies[0].1, 6);
    // eigenvectors inside the level mix freely, but their weights per sector add to one
    for h in 0..6 {
        let weight: f64 = (0..6)
            .flat_map(|k| (0..r.basis.len()).map(move |i| (k, i)))
            .filter(|&(_, i)| r.basis[i].sector[0] == h)
            .map(|(k, i)| r.eigenvectors[(i, k)].norm_sqr())
            .sum();
        assert!((weight - 1.0).abs() < 1e-10);
    }
}
