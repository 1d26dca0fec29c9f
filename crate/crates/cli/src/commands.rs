//! The five subcommands. Each appends its findings to a [`Report`].

use crate::config::RunConfig;
use crate::expr;
use crate::report::Report;
use crate::CliError;
use magtorus_core::bundle::{
    chern_numbers, coboundary_defect, cocycle_check, consistency_residual, section_distance, section_from_state,
    standard_cover, translate_section, TransitionData,
};
use magtorus_core::gauge::{cocycle_defect, make_quasifactor, recover_nu};
use magtorus_core::quadrature::Quadrature;
use magtorus_core::skewform::{frobenius_normal_form, validate_divisor_chain};
use magtorus_core::spectra::{
    assemble_hamiltonian, band_sweep, basis_indices, diagonalize, landau_energy, DEGENERACY_TOL,
};
use magtorus_core::theta::{
    apply_weyl, build_basis_state_truncated, inner_product_with, quasiperiodicity_residual, Truncation,
    MAX_QUADRATURE_DIM,
};
use magtorus_core::weyl::{casimirs, commutator, decompose, is_central, magnetic_generators, multiply, phase_distance};
use magtorus_core::{
    BasisIndex, Error, GroupContext, HamiltonianSpec, IntMatrix, LevelTruncation, RepLabel, SkewIntMatrix,
    ThetaState, WeylElement,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::sync::Arc;

const DEFAULT_SAMPLES: usize = 100;
const DEFAULT_SEED: u64 = 20_240_601;
const DEFAULT_OVERLAP: f64 = 0.6;

fn int_json(m: &IntMatrix) -> Value {
    match m.to_i64_rows() {
        Some(rows) => json!(rows),
        None => json!(m.rows().iter().map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()),
    }
}

fn element_json(g: &WeylElement) -> Value {
    json!({ "l": g.l, "z": g.z, "phase": g.phase })
}

/// Distance between two group elements; infinite when their integer parts differ.
fn element_distance(a: &WeylElement, b: &WeylElement) -> f64 {
    if a.l != b.l {
        return f64::INFINITY;
    }
    a.z.iter().zip(&b.z).map(|(x, y)| (x - y).abs()).fold(phase_distance(a.phase, b.phase), f64::max)
}

fn random_element(ctx: &Arc<GroupContext>, rng: &mut ChaCha8Rng) -> WeylElement {
    let n = ctx.n;
    ctx.make(
        (0..n).map(|_| rng.gen_range(-2..=2)).collect(),
        (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect(),
        rng.gen_range(0.0..TAU),
    )
    .expect("finite entries of the right length")
}

fn random_point(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.0..TAU)).collect()
}

fn lattice_box(n: usize, radius: i64) -> Vec<Vec<i64>> {
    let side = (2 * radius + 1) as usize;
    (0..side.pow(n as u32))
        .map(|flat| {
            let mut rem = flat;
            (0..n)
                .map(|_| {
                    let v = (rem % side) as i64 - radius;
                    rem /= side;
                    v
                })
                .collect()
        })
        .collect()
}

fn truncation(cfg: &RunConfig) -> Truncation {
    Truncation { cutoff: cfg.numerics.theta_cutoff, ..Truncation::default() }
}

fn states_for(
    cfg: &RunConfig,
    ctx: &Arc<GroupContext>,
    label: &RepLabel,
    indices: &[BasisIndex],
) -> Result<Vec<ThetaState>, CliError> {
    indices
        .iter()
        .map(|idx| Ok(build_basis_state_truncated(ctx, label, idx, truncation(cfg))?))
        .collect()
}

pub fn normal_form(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let nu = cfg.flux_matrix()?;
    let f = frobenius_normal_form(&nu);
    report.info("divisors", json!(f.divisors.iter().map(|d| d.to_string()).collect::<Vec<_>>()));
    report.info("halfRank", json!(f.half_rank()));
    report.info("basisChange", int_json(&f.basis_change));
    report.info("canonical", int_json(f.canonical.as_matrix()));
    report.check_exact("roundTrip", f.verify(&nu), json!("Sᵗ·canonical·S = input"));
    let det = f.basis_change.determinant();
    report.check_exact("unimodular", det.magnitude() == &1u32.into(), json!(det.to_string()));
    report.check_exact("divisorChain", validate_divisor_chain(&f.divisors).is_ok(), json!(null));
    if let Some(chain) = &cfg.task.chain {
        let big: Vec<_> = chain.iter().map(|&d| d.into()).collect();
        let valid = validate_divisor_chain(&big);
        let rebuilt = valid.is_ok()
            && SkewIntMatrix::canonical(2 * chain.len(), &big)
                .map(|c| frobenius_normal_form(&c).divisors == big)
                .unwrap_or(false);
        report.check_exact("chain", valid.is_ok() && rebuilt, json!(chain));
    }
    Ok(())
}

pub fn verify(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let tol = &cfg.numerics.tolerances;
    let gauge = cfg.gauge()?;
    let n = gauge.n;
    let samples = cfg.task.samples.unwrap_or(DEFAULT_SAMPLES);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.task.seed.unwrap_or(DEFAULT_SEED));
    let spec = HamiltonianSpec::from_gauge(&gauge)?;
    let (ctx, label) = (spec.context.clone(), spec.label.clone());
    report.info("trivialBundle", json!(gauge.q == 0 || ctx.half_rank() == 0));

    let nu = cfg.flux_matrix()?;
    report.check_exact("normalForm.roundTrip", frobenius_normal_form(&nu).verify(&nu), json!(null));

    let v = make_quasifactor(&gauge);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let l: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
        let lp: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
        let x = random_point(n, &mut rng);
        worst = worst.max((cocycle_defect(&v, &l, &lp, &x)? - 1.0).norm());
    }
    report.check("gauge.cocycle", worst, tol.cocycle);
    let points: Vec<Vec<f64>> = (0..4).map(|_| random_point(n, &mut rng)).collect();
    let recovered = recover_nu(&v, &points)?;
    report.check_exact("gauge.recoverFlux", recovered == nu.scaled(gauge.q), int_json(recovered.as_matrix()));

    let mut worst = 0.0f64;
    for _ in 0..samples {
        let (a, b, c) = (random_element(&ctx, &mut rng), random_element(&ctx, &mut rng), random_element(&ctx, &mut rng));
        let left = multiply(&multiply(&a, &b)?, &c)?;
        let right = multiply(&a, &multiply(&b, &c)?)?;
        worst = worst.max(element_distance(&left, &right));
    }
    report.check("group.associativity", worst, tol.phase);
    let gens = magnetic_generators(&ctx);
    let r = ctx.half_rank();
    let mut worst = 0.0f64;
    for j in 0..r {
        let c = commutator(&gens[j], &gens[r + j])?;
        worst = worst.max(element_distance(&c, &ctx.central(PI / ctx.nu_tilde()[j] as f64)));
    }
    report.check("group.magneticCommutation", worst, tol.phase);
    let mut worst = 0.0f64;
    for z in casimirs(&ctx) {
        for _ in 0..samples.min(50) {
            worst = worst.max(element_distance(&commutator(&z, &random_element(&ctx, &mut rng))?, &ctx.identity()));
        }
    }
    report.check("group.casimirCentrality", worst, tol.phase);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let g = random_element(&ctx, &mut rng);
        worst = worst.max(element_distance(&decompose(&g).product(), &g));
    }
    report.check("group.decomposition", worst, tol.phase);

    if n <= MAX_QUADRATURE_DIM {
        let levels = cfg.task.levels.unwrap_or(1);
        let indices = basis_indices(&ctx, LevelTruncation { n_max: levels, l_max: 1 });
        let states = states_for(cfg, &ctx, &label, &indices)?;
        let quad = Quadrature::with_points(n, cfg.numerics.grid);
        let mut worst = 0.0f64;
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate().skip(i) {
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((inner_product_with(a, b, &quad)? - expected).norm());
            }
        }
        report.check("theta.orthonormality", worst, tol.gram);
        let lattice = lattice_box(n, 2);
        let points: Vec<Vec<f64>> = (0..8).map(|_| random_point(n, &mut rng)).collect();
        let mut worst = 0.0f64;
        for s in &states {
            worst = worst.max(quasiperiodicity_residual(s, &lattice, &points)?);
        }
        report.check("theta.quasiperiodicity", worst, tol.quasiperiodicity);
        let mut worst = 0.0f64;
        for s in states.iter().filter(|s| s.index().is_some_and(|i| i.landau.iter().all(|&k| k == 0))) {
            for j in 0..r {
                let lowered = s.annihilation(j);
                for x in &points {
                    worst = worst.max(lowered.eval(x).norm());
                }
            }
            for (a, z) in casimirs(&ctx).iter().enumerate() {
                let moved = apply_weyl(s, z)?;
                let lam = Complex64::from_polar(1.0, TAU * label.0[a]);
                for x in &points {
                    worst = worst.max((moved.eval(x) - lam * s.eval(x)).norm());
                }
            }
        }
        report.check("theta.eigenrelations", worst, tol.eigen);
    } else {
        report.info("theta", json!(format!("skipped: quadrature supports n ≤ {MAX_QUADRATURE_DIM}")));
    }

    let td = TransitionData::new(standard_cover(n, DEFAULT_OVERLAP)?, &gauge)?;
    let cocycle = cocycle_check(&td, samples, rng.gen())?;
    report.check("bundle.cocycle", cocycle.max_defect, tol.bundle);
    Ok(())
}

pub fn group(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let ctx = GroupContext::new(cfg.problem.q, cfg.flux_matrix()?)?;
    let text = cfg.task.expression.clone().unwrap_or_default();
    let factors = expr::parse(&text)?;
    let g = expr::evaluate(&ctx, &factors)?;
    report.info("expression", json!(text));
    report.info("element", element_json(&g));
    report.info("central", json!(is_central(&g)));
    let d = decompose(&g);
    report.info(
        "decomposition",
        json!({
            "magneticExponents": d.magnetic_exponents.iter().map(|&(a, b, c)| json!([a, b, c])).collect::<Vec<_>>(),
            "heisenberg": d.heisenberg.iter().map(|h| h.z.clone()).collect::<Vec<_>>(),
            "centralPhase": d.central_phase,
            "free": d.free.iter().map(element_json).collect::<Vec<_>>(),
        }),
    );
    report.check("decompositionRoundTrip", element_distance(&d.product(), &g), cfg.numerics.tolerances.phase);
    Ok(())
}

fn sweep_labels(cfg: &RunConfig, n: usize, default: &RepLabel) -> Result<Vec<RepLabel>, CliError> {
    if let Some(list) = &cfg.task.sweep {
        return list
            .iter()
            .map(|a| {
                if a.len() == n {
                    Ok(RepLabel(a.clone()))
                } else {
                    Err(CliError::Invalid(format!("sweep label has {} components, expected {n}", a.len())))
                }
            })
            .collect();
    }
    match cfg.task.sweep_grid {
        Some(0) => Err(CliError::Invalid("sweepGrid must be positive".into())),
        Some(k) => Ok((0..k.pow(n as u32))
            .map(|flat| {
                let mut rem = flat;
                RepLabel(
                    (0..n)
                        .map(|_| {
                            let v = (rem % k) as f64 / k as f64;
                            rem /= k;
                            v
                        })
                        .collect(),
                )
            })
            .collect()),
        None => Ok(vec![default.clone()]),
    }
}

/// Energies grouped into `(energy, multiplicity)` at [`DEGENERACY_TOL`].
fn group_levels(sorted: &[f64]) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &e in sorted {
        match out.last_mut() {
            Some((e0, c)) if (e - *e0).abs() <= DEGENERACY_TOL => *c += 1,
            _ => out.push((e, 1)),
        }
    }
    out
}

fn levels_json(levels: &[(f64, usize)]) -> Value {
    json!(levels.iter().map(|(e, m)| json!({ "energy": e, "degeneracy": m })).collect::<Vec<_>>())
}

pub fn spectrum(cfg: &RunConfig, report: &mut Report) -> Result<String, CliError> {
    let tol = &cfg.numerics.tolerances;
    let gauge = cfg.gauge()?;
    let mut spec = HamiltonianSpec::from_gauge(&gauge)?;
    spec.mass = cfg.numerics.mass;
    spec.truncation = LevelTruncation { n_max: cfg.numerics.n_max, l_max: cfg.numerics.l_max };
    spec.points = cfg.numerics.grid;
    spec.check_refinement = true;
    let n = gauge.n;
    report.info("alphaTilde", json!(spec.label.0));
    report.info("nuTilde", json!(spec.context.nu_tilde()));

    let assembled = match assemble_hamiltonian(&spec) {
        Err(Error::NonConvergence(msg)) => {
            report.warn("gridRefinement", msg);
            let mut coarse = spec.clone();
            coarse.check_refinement = false;
            assemble_hamiltonian(&coarse)?
        }
        other => other?,
    };
    let result = diagonalize(&assembled, &spec.label)?;
    let mut analytic: Vec<f64> =
        result.basis.iter().map(|b| landau_energy(&spec.context, &spec.label, b, spec.mass)).collect();
    analytic.sort_by(f64::total_cmp);
    let analytic_levels = group_levels(&analytic);
    report.info("analyticLevels", levels_json(&analytic_levels));
    report.info("eigenvalues", json!(result.eigenvalues));
    report.info("degeneracies", levels_json(&result.degeneracies));
    let unperturbed = gauge.v_prime.modes.is_empty() && gauge.a_prime.is_empty();
    if unperturbed {
        let gap = analytic.iter().zip(&result.eigenvalues).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        report.check("analyticMatch", gap, tol.spectrum);
        let numeric: Vec<usize> = result.degeneracies.iter().map(|&(_, m)| m).collect();
        let expected: Vec<usize> = analytic_levels.iter().map(|&(_, m)| m).collect();
        report.check_exact("degeneracyTable", numeric == expected, json!(expected));
        if n == 2 && spec.context.half_rank() == 1 {
            let per_level = 2 * spec.context.nu_tilde()[0] as usize;
            report.check_exact("landauDegeneracy", numeric.iter().all(|&m| m == per_level), json!(per_level));
        }
    }

    // truncation convergence: two more Landau levels per pair must not move the lower half
    let mut larger = spec.clone();
    larger.truncation.n_max += 2;
    larger.check_refinement = false;
    let bigger = diagonalize(&assemble_hamiltonian(&larger)?, &larger.label)?;
    let keep = result.eigenvalues.len().div_ceil(2);
    let drift =
        result.eigenvalues[..keep].iter().zip(&bigger.eigenvalues).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    report.info("truncationDrift", json!(drift));
    if drift > tol.convergence {
        report.warn("truncation", format!("lowest {keep} eigenvalues moved by {drift:e} under nMax+2"));
    }

    let labels = sweep_labels(cfg, n, &spec.label)?;
    let mut sweep_spec = spec.clone();
    sweep_spec.check_refinement = false;
    let bands = band_sweep(&sweep_spec, &labels)?;
    let mut csv = String::new();
    for a in 0..n {
        let _ = write!(csv, "alphaTilde{a},");
    }
    csv.push_str("index,value\n");
    for (label, values) in labels.iter().zip(&bands) {
        for (k, e) in values.iter().enumerate() {
            for a in &label.0 {
                let _ = write!(csv, "{a},");
            }
            let _ = writeln!(csv, "{k},{e}");
        }
    }
    report.info("sweepRows", json!(bands.iter().map(Vec::len).sum::<usize>()));
    Ok(csv)
}

pub fn bundle_check(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let tol = &cfg.numerics.tolerances;
    let gauge = cfg.gauge()?;
    let n = gauge.n;
    let samples = cfg.task.samples.unwrap_or(1000);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.task.seed.unwrap_or(DEFAULT_SEED));
    let cover = standard_cover(n, cfg.task.overlap.unwrap_or(DEFAULT_OVERLAP))?;
    report.check_exact("coverage", cover.uncovered_samples(samples, rng.gen()) == 0, json!(cover.pieces().len()));

    let td = TransitionData::new(cover.clone(), &gauge)?;
    let cocycle = cocycle_check(&td, samples, rng.gen())?;
    report.info("cocyclePoints", json!(cocycle.points));
    report.check("cocycle", cocycle.max_defect, tol.bundle);
    let points: Vec<Vec<f64>> = (0..4).map(|_| random_point(n, &mut rng)).collect();
    let chern = chern_numbers(&td, &points)?;
    report.check_exact("chernNumbers", chern == cfg.flux_matrix()?.scaled(gauge.q), int_json(chern.as_matrix()));

    if n > MAX_QUADRATURE_DIM {
        report.info("sections", json!(format!("skipped: states supported for n ≤ {MAX_QUADRATURE_DIM}")));
        return Ok(());
    }
    let spec = HamiltonianSpec::from_gauge(&gauge)?;
    let (ctx, label) = (spec.context.clone(), spec.label.clone());
    let adapted = TransitionData::for_context(cover.clone(), &ctx, &label.0)?;
    let indices: Vec<BasisIndex> =
        basis_indices(&ctx, LevelTruncation { n_max: 1, l_max: 1 }).into_iter().take(4).collect();
    let states = states_for(cfg, &ctx, &label, &indices)?;
    let shifts: Vec<Vec<i64>> = cover.pieces().iter().map(|_| (0..n).map(|_| rng.gen_range(-1..=1)).collect()).collect();
    let moved = adapted.with_cover(cover.with_lift_shifts(&shifts)?)?;
    let (mut consistency, mut translation, mut moved_consistency) = (0.0f64, 0.0f64, 0.0f64);
    let per_check = samples.div_ceil(4).max(1);
    for s in &states {
        let sec = section_from_state(&adapted, s)?;
        consistency = consistency.max(consistency_residual(&adapted, &sec, per_check, rng.gen())?);
        let g = ctx.make(vec![0; n], (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect(), rng.gen_range(0.0..TAU))?;
        let by_rule = translate_section(&adapted, &sec, &g)?;
        let by_state = section_from_state(&adapted, &apply_weyl(s, &g)?)?;
        translation = translation.max(section_distance(&adapted, &by_rule, &by_state, per_check, rng.gen())?);
        let resec = section_from_state(&moved, s)?;
        moved_consistency = moved_consistency.max(consistency_residual(&moved, &resec, per_check, rng.gen())?);
    }
    report.check("sectionConsistency", consistency, tol.section);
    report.check("translateSection", translation, tol.section);
    report.check("liftChange.coboundary", coboundary_defect(&adapted, &moved, per_check, rng.gen())?, tol.section);
    report.check("liftChange.consistency", moved_consistency, tol.section);
    Ok(())
}
