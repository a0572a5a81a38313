use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::theta::CMatrix;

pub const DEFAULT_SEED: u64 = 20_240_601;

/// Fixed Hermitian direction used by the second sample.
fn hermitian_direction(g: usize) -> CMatrix {
    CMatrix::from_fn(g, g, |j, k| {
        if j == k {
            Complex64::new(0.5 - 0.25 * j as f64, 0.0)
        } else {
            let z = Complex64::new(0.2, 0.1 * (1 + j.min(k)) as f64);
            if j < k {
                z
            } else {
                z.conj()
            }
        }
    })
}

fn random_positive(rng: &mut ChaCha8Rng, g: usize, floor: f64) -> CMatrix {
    let b = CMatrix::from_fn(g, g, |_, _| Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)));
    let bb = b.mul(&b.conj_transpose()).expect("square");
    CMatrix::from_fn(g, g, |j, k| {
        bb.get(j, k) + if j == k { Complex64::new(floor, 0.0) } else { Complex64::new(0.0, 0.0) }
    })
}

/// Three points of `H_I^(g)`: `i·I`, `i·I` plus a Hermitian shift, and a seeded
/// random point with `λ_min(Y) ≥ 0.5`.
pub fn w_samples(g: usize, seed: u64) -> Vec<CMatrix> {
    let base = CMatrix::i_identity(g);
    let shifted = base.add(&hermitian_direction(g).scale(0.3)).expect("same shape");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (g as u64).wrapping_mul(0x9e37_79b9));
    let y = random_positive(&mut rng, g, 0.5);
    let x = CMatrix::from_fn(g, g, |_, _| Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)));
    let x = x.hermitian_part();
    let i = Complex64::new(0.0, 1.0);
    let random = CMatrix::from_fn(g, g, |j, k| x.get(j, k) + i * y.get(j, k));
    vec![base, shifted, random]
}

/// A random point of `H_I^(g)` with `λ_min(Y) ≥ 0.5`.
pub fn random_w(rng: &mut impl Rng, g: usize) -> CMatrix {
    let mut r = ChaCha8Rng::seed_from_u64(rng.gen());
    let y = random_positive(&mut r, g, 0.5);
    let x =
        CMatrix::from_fn(g, g, |_, _| Complex64::new(r.gen_range(-0.5..0.5), r.gen_range(-0.5..0.5))).hermitian_part();
    let i = Complex64::new(0.0, 1.0);
    CMatrix::from_fn(g, g, |j, k| x.get(j, k) + i * y.get(j, k))
}

/// Three points of the Siegel upper half space (complex symmetric, `Im Ω > 0`).
pub fn omega_samples(g: usize, seed: u64) -> Vec<CMatrix> {
    let base = CMatrix::i_identity(g);
    let sym =
        CMatrix::from_fn(g, g, |j, k| Complex64::new(if j == k { 0.4 } else { 0.15 }, if j == k { 0.0 } else { 0.1 }));
    let shifted = base.add(&sym).expect("same shape");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed ^ g as u64);
    let b: Vec<Vec<f64>> = (0..g).map(|_| (0..g).map(|_| rng.gen_range(-0.5..0.5)).collect()).collect();
    let mut re = vec![vec![0.0; g]; g];
    for j in 0..g {
        for k in j..g {
            let v = rng.gen_range(-0.5..0.5);
            re[j][k] = v;
            re[k][j] = v;
        }
    }
    let random = CMatrix::from_fn(g, g, |j, k| {
        let im: f64 = (0..g).map(|l| b[j][l] * b[k][l]).sum::<f64>() + if j == k { 0.5 } else { 0.0 };
        Complex64::new(re[j][k], im)
    });
    vec![base, shifted, random]
}

/// `τ ∈ {i, 2i, (1+5i)/3}`.
pub fn tau_samples() -> Vec<Complex64> {
    vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 2.0), Complex64::new(1.0 / 3.0, 5.0 / 3.0)]
}
