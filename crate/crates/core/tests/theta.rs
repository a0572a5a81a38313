use htheta::kfield::rational::{int, rat, to_f64};
use htheta::kfield::{FieldId, KMatrix, Rational};
use htheta::presets::random_w;
use htheta::relation::random::random_characteristic;
use htheta::theta::{
    in_h1, riemann_theta_z0, theta_general, theta_rank1, CMatrix, Characteristic, Enumeration, ThetaParams,
};
use htheta::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FIELDS: [u64; 4] = [1, 2, 3, 7];

fn params() -> ThetaParams {
    ThetaParams::default()
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

#[test]
fn domain_is_checked() {
    let k = FieldId::new(1).unwrap();
    let w = CMatrix::from_rows(vec![vec![Complex64::new(0.0, -1.0)]]).unwrap();
    let ch = Characteristic::zero(1, 1, k);
    let err = theta_general(&w, &CMatrix::identity(1), &ch, &params()).unwrap_err();
    assert!(matches!(err, Error::NotInDomain { .. }), "{err:?}");
    let (inside, lambda) = in_h1(&CMatrix::i_identity(2), 1e-10).unwrap();
    assert!(inside);
    assert!((lambda - 1.0).abs() < 1e-12);
}

#[test]
fn tail_bound_respects_eps() {
    let k = FieldId::new(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let w = random_w(&mut rng, 2);
    let ch =
        Characteristic::new(random_characteristic(&mut rng, k, 2, 1, 3), random_characteristic(&mut rng, k, 2, 1, 3))
            .unwrap();
    for eps in [1e-6, 1e-10, 1e-14] {
        let p = ThetaParams { eps, ..params() };
        let v = theta_general(&w, &CMatrix::identity(1), &ch, &p).unwrap();
        assert!(v.tail_bound <= eps);
    }
    let coarse = theta_general(&w, &CMatrix::identity(1), &ch, &ThetaParams { eps: 1e-6, ..params() }).unwrap();
    let fine = theta_general(&w, &CMatrix::identity(1), &ch, &ThetaParams { eps: 1e-14, ..params() }).unwrap();
    assert!((coarse.value - fine.value).norm() <= 1e-6 + 1e-14);
}

#[test]
fn ball_enumeration_agrees() {
    let k = FieldId::new(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let w = random_w(&mut rng, 1);
    let p = CMatrix::from_real_rows(&[&[2.0, 0.5], &[0.5, 1.0]]).unwrap();
    let ch =
        Characteristic::new(random_characteristic(&mut rng, k, 1, 2, 3), random_characteristic(&mut rng, k, 1, 2, 3))
            .unwrap();
    let e = theta_general(&w, &p, &ch, &params()).unwrap();
    let b = theta_general(&w, &p, &ch, &ThetaParams { enumeration: Enumeration::Ball, ..params() }).unwrap();
    assert!(close(e.value, b.value, 1e-12));
}

#[test]
fn jacobi_thetas_at_i() {
    let tau = CMatrix::i_identity(1);
    let t = |a: Rational, b: Rational| riemann_theta_z0(&tau, &[a], &[b], &params()).unwrap().value;
    // ϑ00(i) = π^{1/4}/Γ(3/4)
    assert!((t(int(0), int(0)).re - 1.086_434_811_213_308).abs() < 1e-14);
    assert_eq!(t(rat(1, 2), rat(1, 2)), Complex64::new(0.0, 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // diagonal P splits into one rank-one theta per column, each at α_j·W
    #[test]
    fn diagonal_factorization(seed in any::<u64>(), di in 0usize..4, g in 1usize..=2, h in 1usize..=2) {
        let k = FieldId::new(FIELDS[di]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_w(&mut rng, g);
        let alphas: Vec<Rational> = (0..h).map(|_| rat(rng.gen_range(1..=6), 2)).collect();
        let a = random_characteristic(&mut rng, k, g, h, 4);
        let b = random_characteristic(&mut rng, k, g, h, 4);
        let p = CMatrix::diagonal(&alphas.iter().map(to_f64).collect::<Vec<_>>());
        let whole = theta_general(&w, &p, &Characteristic::new(a.clone(), b.clone()).unwrap(), &params()).unwrap();
        let mut prod = Complex64::new(1.0, 0.0);
        for (j, alpha) in alphas.iter().enumerate() {
            prod *= theta_rank1(&w.scale(to_f64(alpha)), &a.column(j), &b.column(j), &params()).unwrap().value;
        }
        prop_assert!(close(whole.value, prod, 1e-10), "{} vs {}", whole.value, prod);
    }

    // Θ[A + N; B] = Θ[A; B] and Θ[A; B + L̂] = e^{2πi Re Tr(Āᵗ L̂)} Θ[A; B] for integral N, L
    #[test]
    fn characteristic_shifts(seed in any::<u64>(), di in 0usize..4) {
        let k = FieldId::new(FIELDS[di]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_w(&mut rng, 1);
        let a = random_characteristic(&mut rng, k, 1, 1, 4);
        let b = random_characteristic(&mut rng, k, 1, 1, 4);
        let n = random_characteristic(&mut rng, k, 1, 1, 1);
        let l = random_characteristic(&mut rng, k, 1, 1, 1).hat();
        let base = theta_rank1(&w, &a, &b, &params()).unwrap().value;
        let shifted_a = theta_rank1(&w, &a.add(&n).unwrap(), &b, &params()).unwrap().value;
        prop_assert!(close(base, shifted_a, 1e-11));
        let phase = to_f64(&KMatrix::re_trace_of_product(&a, &l).unwrap());
        let shifted_b = theta_rank1(&w, &a, &b.add(&l).unwrap(), &params()).unwrap().value;
        prop_assert!(close(shifted_b, base * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase), 1e-11));
    }

    #[test]
    fn negating_the_characteristic(seed in any::<u64>(), di in 0usize..4) {
        let k = FieldId::new(FIELDS[di]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_w(&mut rng, 2);
        let a = random_characteristic(&mut rng, k, 2, 1, 4);
        let b = random_characteristic(&mut rng, k, 2, 1, 4);
        let x = theta_rank1(&w, &a, &b, &params()).unwrap().value;
        let y = theta_rank1(&w, &a.neg(), &b.neg(), &params()).unwrap().value;
        prop_assert!(close(x, y, 1e-11));
    }
}
