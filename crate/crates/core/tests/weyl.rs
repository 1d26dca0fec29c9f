//! Group law, magnetic translations, Casimirs and the decomposition, with an
//! exact rational oracle for the magnetic subgroup.

use magtorus_core::weyl::*;
use magtorus_core::SkewIntMatrix;
use num_complex::Complex64;
use num_rational::Ratio;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

type Q = Ratio<i64>;

fn pair_context(q: i64, nu: i64) -> Arc<GroupContext> {
    GroupContext::new(q, SkewIntMatrix::from_rows(&[vec![0, -nu], vec![nu, 0]]).unwrap()).unwrap()
}

/// n = 5, two pairs with ν̃ = (2, 6) after reduction, one free axis.
fn mixed_context() -> Arc<GroupContext> {
    let nu = SkewIntMatrix::from_rows(&[
        vec![0, 2, 0, 4, 0],
        vec![-2, 0, 6, 0, 0],
        vec![0, -6, 0, 2, 0],
        vec![-4, 0, -2, 0, 0],
        vec![0, 0, 0, 0, 0],
    ])
    .unwrap();
    GroupContext::new(1, nu).unwrap()
}

fn random_element(rng: &mut ChaCha8Rng, ctx: &Arc<GroupContext>) -> WeylElement {
    let n = ctx.n;
    ctx.make(
        (0..n).map(|_| rng.gen_range(-3..=3)).collect(),
        (0..n).map(|_| rng.gen_range(-4.0..4.0)).collect(),
        rng.gen_range(0.0..TAU),
    )
    .unwrap()
}

/// Element with `z` and the phase stored as rational multiples of π.
#[derive(Clone, Debug, PartialEq)]
struct Exact {
    l: Vec<i64>,
    z: Vec<Q>,
    phase: Q,
}

fn reduce_mod_two(p: Q) -> Q {
    let two = Q::from_integer(2);
    let k = (p / two).floor();
    p - two * k
}

/// `(l,y,φ)(k,z,χ) = (l+k, y+z, φ+χ+½[k·y − l·z + 2yᵗÃz])` with `Ã = C/2π`;
/// dividing by π gives `φ/π` increments `½[k·y' − l·z' + y'ᵗCz']`.
fn exact_mul(c: &[Vec<i64>], a: &Exact, b: &Exact) -> Exact {
    let n = a.l.len();
    let mut s = Q::from_integer(0);
    for i in 0..n {
        s += a.z[i] * b.l[i] - b.z[i] * a.l[i];
        for j in 0..n {
            s += a.z[i] * c[i][j] * b.z[j];
        }
    }
    Exact {
        l: (0..n).map(|i| a.l[i] + b.l[i]).collect(),
        z: (0..n).map(|i| a.z[i] + b.z[i]).collect(),
        phase: reduce_mod_two(a.phase + b.phase + s / 2),
    }
}

fn exact_generators(ctx: &GroupContext) -> Vec<Exact> {
    let (n, r) = (ctx.n, ctx.half_rank());
    let zero = || vec![Q::from_integer(0); n];
    let mut out = Vec::new();
    for j in 0..r {
        let mut l = vec![0; n];
        l[r + j] = -1;
        let mut z = zero();
        z[j] = Q::new(1, ctx.nu_tilde()[j]);
        out.push(Exact { l, z, phase: Q::from_integer(0) });
    }
    for j in 0..r {
        let mut l = vec![0; n];
        l[j] = 1;
        let mut z = zero();
        z[r + j] = Q::new(1, ctx.nu_tilde()[j]);
        out.push(Exact { l, z, phase: Q::from_integer(0) });
    }
    out
}

fn exact_inverse(a: &Exact) -> Exact {
    Exact { l: a.l.iter().map(|v| -v).collect(), z: a.z.iter().map(|v| -v).collect(), phase: reduce_mod_two(-a.phase) }
}

fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

fn agrees(g: &WeylElement, e: &Exact) -> bool {
    g.l == e.l
        && g.z.iter().zip(&e.z).all(|(a, b)| (a - PI * to_f64(*b)).abs() < 1e-12)
        && phase_distance(g.phase, PI * to_f64(e.phase)) < 1e-12
}

#[test]
fn magnetic_words_match_rational_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for ctx in [pair_context(1, 1), pair_context(2, 3), mixed_context()] {
        let c = ctx.adapted_flux().to_vec();
        let gens = magnetic_generators(&ctx);
        let exact = exact_generators(&ctx);
        for _ in 0..40 {
            let mut g = ctx.identity();
            let mut e = Exact { l: vec![0; ctx.n], z: vec![Q::from_integer(0); ctx.n], phase: Q::from_integer(0) };
            for _ in 0..rng.gen_range(1..12) {
                let k = rng.gen_range(0..gens.len());
                if rng.gen_bool(0.5) {
                    g = multiply(&g, &gens[k]).unwrap();
                    e = exact_mul(&c, &e, &exact[k]);
                } else {
                    g = multiply(&g, &inverse(&gens[k])).unwrap();
                    e = exact_mul(&c, &e, &exact_inverse(&exact[k]));
                }
            }
            assert!(agrees(&g, &e), "{g:?} vs {e:?}");
        }
    }
}

#[test]
fn magnetic_commutation_relations_are_exact() {
    for ctx in [pair_context(1, 1), pair_context(1, 4), pair_context(3, 2), mixed_context()] {
        let r = ctx.half_rank();
        let c = ctx.adapted_flux().to_vec();
        let exact = exact_generators(&ctx);
        let gens = magnetic_generators(&ctx);
        for a in 0..2 * r {
            for b in 0..2 * r {
                let ex = exact_mul(
                    &c,
                    &exact_mul(&c, &exact_mul(&c, &exact[a], &exact[b]), &exact_inverse(&exact[a])),
                    &exact_inverse(&exact[b]),
                );
                let expected = if a < r && b == a + r {
                    Q::new(1, ctx.nu_tilde()[a])
                } else if b < r && a == b + r {
                    reduce_mod_two(-Q::new(1, ctx.nu_tilde()[b]))
                } else {
                    Q::from_integer(0)
                };
                assert_eq!(ex.phase, expected);
                assert!(ex.l.iter().all(|&v| v == 0) && ex.z.iter().all(|v| *v.numer() == 0));
                let comm = commutator(&gens[a], &gens[b]).unwrap();
                assert!(comm.l.iter().all(|&v| v == 0) && comm.z.iter().all(|v| v.abs() < 1e-15));
                assert!(phase_distance(comm.phase, PI * to_f64(expected)) < 1e-14);
            }
        }
    }
}

#[test]
fn generator_powers_are_casimirs() {
    for ctx in [pair_context(1, 2), mixed_context()] {
        let r = ctx.half_rank();
        let gens = magnetic_generators(&ctx);
        let zetas = casimirs(&ctx);
        for j in 0..2 * r {
            let pair = if j < r { j } else { j - r };
            let p = gens[j].pow(2 * ctx.nu_tilde()[pair]);
            // m_a^{2ν̃} and ζ_a agree up to a constant phase
            let z = &zetas[j];
            assert_eq!(p.l, z.l);
            assert!(p.z.iter().zip(&z.z).all(|(a, b)| (a - b).abs() < 1e-12));
        }
    }
}

#[test]
fn casimirs_are_central() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for ctx in [pair_context(1, 1), pair_context(2, 3), mixed_context()] {
        let zetas = casimirs(&ctx);
        for z in &zetas {
            assert!(is_central(z));
            for _ in 0..50 {
                let g = random_element(&mut rng, &ctx);
                assert!(commutator(z, &g).unwrap().is_identity(1e-12));
            }
        }
        for a in 0..zetas.len() {
            for b in 0..zetas.len() {
                assert!(commutator(&zetas[a], &zetas[b]).unwrap().is_identity(1e-12));
            }
        }
    }
}

#[test]
fn casimir_without_charge_is_a_translation() {
    let ctx = GroupContext::new(0, SkewIntMatrix::zeros(2)).unwrap();
    let z = &casimirs(&ctx)[1];
    assert_eq!(z.l, vec![0, 0]);
    assert_eq!(z.z, vec![0.0, TAU]);
}

#[test]
fn centrality_scan_finds_exactly_the_casimir_lattice() {
    for nu in 1..=2 {
        let ctx = pair_context(1, nu);
        let gens = magnetic_generators(&ctx);
        let bound = 2 * nu;
        for a in -bound..=bound {
            for b in -bound..=bound {
                let g = multiply(&gens[0].pow(a), &gens[1].pow(b)).unwrap();
                let expected = a % (2 * nu) == 0 && b % (2 * nu) == 0;
                assert_eq!(is_central(&g), expected, "m1^{a} m2^{b}");
            }
        }
    }
    let ctx = pair_context(1, 1);
    assert!(is_central(&ctx.identity()));
    assert!(is_central(&ctx.central(1.3)));
    assert!(!is_central(&magnetic_generators(&ctx)[0]));
}

#[test]
fn magnetic_translations_commute_with_momentum_translations() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for ctx in [pair_context(1, 3), mixed_context()] {
        for m in magnetic_generators(&ctx) {
            for a in 0..ctx.n {
                let t = ctx.translation(a, rng.gen_range(-3.0..3.0));
                assert!(commutator(&m, &t).unwrap().is_identity(1e-12));
            }
        }
    }
}

#[test]
fn associativity_and_inverses() {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    for ctx in [pair_context(1, 1), pair_context(2, 3), mixed_context()] {
        for _ in 0..200 {
            let (g, h, k) = (random_element(&mut rng, &ctx), random_element(&mut rng, &ctx), random_element(&mut rng, &ctx));
            let left = multiply(&multiply(&g, &h).unwrap(), &k).unwrap();
            let right = multiply(&g, &multiply(&h, &k).unwrap()).unwrap();
            assert!(left.approx_eq(&right, 1e-12));
            assert!(multiply(&g, &inverse(&g)).unwrap().is_identity(1e-14));
            assert!(multiply(&inverse(&g), &g).unwrap().is_identity(1e-14));
            assert!(inverse(&inverse(&g)).approx_eq(&g, 1e-15));
            assert!(multiply(&g, &ctx.identity()).unwrap().approx_eq(&g, 0.0));
        }
    }
}

#[test]
fn context_mismatch_is_rejected() {
    let (a, b) = (pair_context(1, 1), pair_context(1, 2));
    assert!(multiply(&a.identity(), &b.identity()).is_err());
}

#[test]
fn lattice_translations_commute_up_to_the_flux_phase() {
    // e^{2πip_1} e^{2πip_2} = e^{2πip_2} e^{2πip_1} e^{2i(2π)²Ã₁₂}
    let ctx = pair_context(1, 1);
    let g = ctx.translation(0, TAU);
    let h = ctx.translation(1, TAU);
    let c = commutator(&g, &h).unwrap();
    assert!(c.l.iter().all(|&v| v == 0));
    let a12 = ctx.adapted_field()[0][1];
    assert!(phase_distance(c.phase, 2.0 * TAU * TAU * a12) < 1e-12);
}

#[test]
fn decomposition_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for ctx in [pair_context(1, 1), pair_context(1, 3), mixed_context()] {
        for _ in 0..100 {
            let g = random_element(&mut rng, &ctx);
            let d = decompose(&g);
            assert!(d.product().approx_eq(&g, 1e-12));
            for (j, &(a, b, corr)) in d.magnetic_exponents.iter().enumerate() {
                let r = ctx.half_rank();
                assert_eq!((a, b), (-g.l[r + j], g.l[j]));
                assert!((corr - PI * (g.l[j] * g.l[r + j]) as f64 / (2.0 * ctx.nu_tilde()[j] as f64)).abs() < 1e-15);
            }
        }
        // pure translations have a trivial magnetic part
        let t = ctx.make(vec![0; ctx.n], vec![0.5; ctx.n], 0.0).unwrap();
        assert!(decompose(&t).magnetic.iter().all(|m| m.is_identity(1e-15)));
    }
}

#[test]
fn decomposition_factors_from_different_pairs_commute() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ctx = mixed_context();
    let g = random_element(&mut rng, &ctx);
    let d = decompose(&g);
    let r = ctx.half_rank();
    for j in 0..r {
        for k in 0..r {
            if j != k {
                assert!(commutator(&d.magnetic[j], &d.heisenberg[k]).unwrap().is_identity(1e-12));
                assert!(commutator(&d.heisenberg[j], &d.heisenberg[k]).unwrap().is_identity(1e-12));
            }
            assert!(commutator(&d.magnetic[j], &d.heisenberg[k]).unwrap().is_identity(1e-12));
        }
        for f in &d.free {
            assert!(commutator(&d.magnetic[j], f).unwrap().is_identity(1e-12));
            assert!(commutator(&d.heisenberg[j], f).unwrap().is_identity(1e-12));
        }
    }
}

#[test]
fn rep_labels_reduce_mod_one() {
    assert_eq!(RepLabel(vec![0.0]).reduced(), RepLabel(vec![0.0]));
    assert_eq!(RepLabel(vec![1.25, -0.5]).reduced(), RepLabel(vec![0.25, 0.5]));
    assert!(RepLabel(vec![0.3, 0.1]).equivalent(&RepLabel(vec![1.3, -0.9]), 1e-12));
    let eig: Vec<Complex64> = [0.3, 0.75].iter().map(|a| Complex64::from_polar(1.0, TAU * a)).collect();
    let label = rep_label_from_casimirs(&eig).unwrap();
    assert!(label.equivalent(&RepLabel(vec![0.3, 0.75]), 1e-12));
    assert!(rep_label_from_casimirs(&[Complex64::new(2.0, 0.0)]).is_err());
}

#[test]
fn nu_tilde_follows_two_pi_b_tilde() {
    let ctx = pair_context(2, 3);
    assert_eq!(ctx.nu_tilde(), &[6]);
    assert!((ctx.b_tilde(0) - 6.0 / TAU).abs() < 1e-15);
    assert_eq!(ctx.degeneracy(), 12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_law_is_associative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = if seed % 2 == 0 { pair_context(1, 2) } else { mixed_context() };
        let (g, h, k) = (random_element(&mut rng, &ctx), random_element(&mut rng, &ctx), random_element(&mut rng, &ctx));
        let left = multiply(&multiply(&g, &h).unwrap(), &k).unwrap();
        let right = multiply(&g, &multiply(&h, &k).unwrap()).unwrap();
        prop_assert!(left.approx_eq(&right, 1e-12));
    }

    #[test]
    fn decomposition_is_exact(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = mixed_context();
        let g = random_element(&mut rng, &ctx);
        prop_assert!(decompose(&g).product().approx_eq(&g, 1e-12));
    }
}
