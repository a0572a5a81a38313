use htheta::kfield::rational::{int, rat};
use htheta::kfield::{FieldId, KElement, KMatrix};
use htheta::lattice::{
    compute_g1, compute_g2, integral_basis, lattice_image, orthogonality_check, ring_integrality_sides, IntLattice,
    Pairing, DEFAULT_GROUP_CAP,
};
use htheta::relation::random::{random_t, random_t_with_nontrivial_g2};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn field(d: u64) -> FieldId {
    FieldId::new(d).unwrap()
}

fn scalar(x: KElement) -> KMatrix {
    let f = x.field();
    KMatrix::from_rows(f, vec![vec![x]]).unwrap()
}

#[test]
fn identity_gives_trivial_groups() {
    for d in [1, 2, 3, 7] {
        let t = KMatrix::identity(2, field(d));
        assert!(compute_g1(2, &t).unwrap().is_trivial());
        assert!(compute_g2(2, &t).unwrap().is_trivial());
    }
}

#[test]
fn scalar_two_over_gaussian_integers() {
    // Λ·2 ⊂ Λ, so G1 is trivial and G2 = (½O/O)^{g·h}
    let k = field(1);
    let t = KMatrix::identity(1, k).scale_rational(&int(2));
    assert_eq!(compute_g1(1, &t).unwrap().order, 1);
    let g2 = compute_g2(1, &t).unwrap();
    assert_eq!(g2.order, 4);
    assert_eq!(g2.invariant_factors, vec![2, 2]);
}

// [Λ : Λ ∩ Λ·T̄ᵗ] = |G1| · |N(det T)|^g, both sides computed separately
#[test]
fn covolume_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in [1, 2, 3, 7] {
        for g in 1..=2 {
            let t = random_t(&mut rng, field(d), 2, 2);
            let g1 = compute_g1(g, &t).unwrap();
            let image = lattice_image(g, 2, &t.conj_transpose()).unwrap();
            let std = IntLattice::standard(4 * g);
            let index = std.intersect(&image).covolume() / std.covolume();
            let norm = t.det().unwrap().norm();
            let rhs = int(g1.order as i64) * (0..g).fold(int(1), |acc, _| acc * &norm);
            assert_eq!(index, rhs, "d = {d}, g = {g}");
        }
    }
}

#[test]
fn representatives_are_distinct_cosets() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let t = random_t_with_nontrivial_g2(&mut rng, field(3), 1, 2, 200);
    for grp in [compute_g1(1, &t).unwrap(), compute_g2(1, &t).unwrap()] {
        assert_eq!(grp.representatives.len() as u64, grp.order);
        assert_eq!(grp.invariant_factors.iter().product::<u64>(), grp.order);
        for (i, x) in grp.representatives.iter().enumerate() {
            assert!(grp.contains(x));
            assert_eq!(grp.index_of(x), Some(i));
            for y in &grp.representatives[..i] {
                assert!(!grp.same_coset(x, y).unwrap());
            }
        }
    }
}

// If M ∈ O·T̄ then every B ∈ O·T⁻¹ pairs integrally with M, under either pairing.
#[test]
fn integrality_holds_on_the_image() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for d in [1, 2, 3, 7] {
        let f = field(d);
        for _ in 0..4 {
            let t = random_t(&mut rng, f, 1, 2);
            for n in integral_basis(1, 1, f) {
                let m = n.mul(&t.conj_transpose()).unwrap();
                for pairing in [Pairing::Printed, Pairing::Dual] {
                    assert_eq!(ring_integrality_sides(1, &t, &m, pairing).unwrap(), (true, true), "d = {d}");
                }
            }
        }
    }
}

// The converse fails for the B̂ pairing once d ≠ 1: with T = 2/3 − δ/3 over
// Q(√−2), M = 1 pairs integrally with O·T⁻¹ without lying in O·T̄.
#[test]
fn integrality_converse_counterexample() {
    let f = field(2);
    let t = scalar(KElement::new(rat(2, 3), rat(-1, 3), f));
    let m = scalar(KElement::one(f));
    assert_eq!(ring_integrality_sides(1, &t, &m, Pairing::Printed).unwrap(), (true, false));
    assert_eq!(ring_integrality_sides(1, &t, &m, Pairing::Dual).unwrap(), (false, false));
}

#[test]
fn integrality_converse_gaussian() {
    let f = field(1);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..6 {
        let t = random_t(&mut rng, f, 1, 2);
        for (x, y) in [(1, 0), (0, 1), (1, 1), (2, 1)] {
            let m = scalar(KElement::new(rat(x, 2), rat(y, 3), f));
            let (pairs, member) = ring_integrality_sides(1, &t, &m, Pairing::Printed).unwrap();
            assert_eq!(pairs, member);
        }
    }
}

#[test]
fn orthogonality_printed_gaussian_and_dual_everywhere() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for d in [1, 2, 3, 7] {
        for g in 1..=2 {
            let t = random_t_with_nontrivial_g2(&mut rng, field(d), g, 2, 300);
            let dual = orthogonality_check(g, &t, DEFAULT_GROUP_CAP, Pairing::Dual).unwrap();
            assert!(dual.holds(), "d = {d}, g = {g}: {dual:?}");
            if d == 1 {
                assert!(orthogonality_check(g, &t, DEFAULT_GROUP_CAP, Pairing::Printed).unwrap().holds());
            }
        }
    }
}

#[test]
fn orthogonality_printed_fails_for_the_counterexample() {
    let f = field(2);
    let t = scalar(KElement::new(rat(2, 3), rat(-1, 3), f));
    let r = orthogonality_check(1, &t, DEFAULT_GROUP_CAP, Pairing::Printed).unwrap();
    assert!(!r.holds());
    assert!(r.mismatches > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dual_orthogonality_random(seed in any::<u64>(), di in 0usize..4, h in 1usize..=2) {
        let d = [1, 2, 3, 7][di];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_t_with_nontrivial_g2(&mut rng, field(d), 1, h, 200);
        prop_assert!(orthogonality_check(1, &t, DEFAULT_GROUP_CAP, Pairing::Dual).unwrap().holds());
    }

    #[test]
    fn group_orders_match_norms(seed in any::<u64>(), di in 0usize..4) {
        // for a scalar T the two quotients have orders |N(T)|-related by duality
        let d = [1, 2, 3, 7][di];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_t(&mut rng, field(d), 1, 2);
        let g1 = compute_g1(1, &t).unwrap();
        let g2 = compute_g2(1, &t).unwrap();
        let n = t.det().unwrap().norm();
        prop_assert_eq!(int(g1.order as i64) * n, int(g2.order as i64));
    }
}
