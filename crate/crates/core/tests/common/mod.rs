//! Seeded random problems shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use scb_admm::linops::{DenseSymOp, MatrixMap, PsdOp};
use scb_admm::model::{BlockProblem, IterateState, ProxBlock, QuadraticBlock};
use scb_admm::prox::ProxFriendlyFunction;
use scb_admm::solver2::{SecondBlock, TwoBlockProblem, TwoBlockState};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

pub fn symmetric_matrix(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = gaussian_matrix(rng, n, n);
    (&a + a.transpose()) * 0.5
}

/// PSD matrix of the given rank (`rank = 0` gives zero).
pub fn psd_matrix(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> DMatrix<f64> {
    let w = gaussian_matrix(rng, n, rank);
    &w * w.transpose()
}

/// Random nonsmooth-capable function supported by the dense oracles.
pub fn random_prox_function(rng: &mut ChaCha8Rng, dim: usize) -> ProxFriendlyFunction {
    match rng.gen_range(0..3) {
        0 => ProxFriendlyFunction::Zero { dim },
        1 => ProxFriendlyFunction::NonnegIndicator { dim },
        _ => {
            let rank = rng.gen_range(0..=dim);
            ProxFriendlyFunction::DenseQuadratic {
                p: psd_matrix(rng, dim, rank),
                b: gaussian_vector(rng, dim),
            }
        }
    }
}

/// Map `X → block` whose coordinate matrix is `block × m`; rank deficient
/// with probability ½.
pub fn random_map_matrix(rng: &mut ChaCha8Rng, rows: usize, m: usize) -> DMatrix<f64> {
    if rows > 1 && rng.gen_bool(0.5) {
        let r = rng.gen_range(1..rows);
        gaussian_matrix(rng, rows, r) * gaussian_matrix(rng, r, m)
    } else {
        gaussian_matrix(rng, rows, m)
    }
}

pub fn random_prox_block(rng: &mut ChaCha8Rng, name: &str, dim: usize, m: usize) -> ProxBlock {
    let func = random_prox_function(rng, dim);
    let map = MatrixMap::shared(random_map_matrix(rng, dim, m));
    ProxBlock::new(name, func, map).expect("valid prox block")
}

pub fn random_quadratic_block(rng: &mut ChaCha8Rng, name: &str, dim: usize, m: usize) -> QuadraticBlock {
    let rank = rng.gen_range(0..=dim);
    let hessian: PsdOp = DenseSymOp::shared(psd_matrix(rng, dim, rank));
    // A full-rank map keeps σ⁻¹P + A A* invertible even when P is singular.
    let map = MatrixMap::shared(gaussian_matrix(rng, dim, m));
    QuadraticBlock::new(name, hessian, gaussian_vector(rng, dim), map).expect("valid quadratic block")
}

/// Two-block problem with a quadratic second block, total dimension ≤ 10.
pub fn random_two_block(seed: u64) -> TwoBlockProblem {
    let mut r = rng(seed);
    let nu = r.gen_range(1..=5);
    let nv = r.gen_range(1..=(10 - nu).min(5));
    let m = r.gen_range(nv..=6.max(nv));
    let f = random_prox_block(&mut r, "u", nu, m);
    let g = random_quadratic_block(&mut r, "v", nv, m);
    TwoBlockProblem::new(f, SecondBlock::Quadratic(g), gaussian_vector(&mut r, m)).expect("valid 2-block problem")
}

pub fn random_two_block_state(problem: &TwoBlockProblem, seed: u64) -> TwoBlockState {
    let mut r = rng(seed);
    let mut s = problem.zero_state();
    s.u = problem.f.func.prox(&gaussian_vector(&mut r, s.u.len()), 1.0);
    s.v = gaussian_vector(&mut r, s.v.len());
    s.x = gaussian_vector(&mut r, s.x.len());
    s
}

/// Multi-block problem with `p` θ blocks and `q` φ blocks, total dimension
/// ≤ `max_total`.
pub fn random_multi_block(seed: u64, p: usize, q: usize, max_total: usize) -> BlockProblem {
    let mut r = rng(seed);
    let nblocks = 2 + p + q;
    assert!(nblocks <= max_total);
    let mut dims = vec![1; nblocks];
    let mut spare = max_total - nblocks;
    for d in dims.iter_mut() {
        let extra = r.gen_range(0..=spare.min(2));
        *d += extra;
        spare -= extra;
    }
    let quad_max = dims[1..=p].iter().chain(&dims[p + 2..]).copied().max().unwrap_or(1);
    let m = r.gen_range(quad_max..=quad_max + 3);
    let f = random_prox_block(&mut r, "u", dims[0], m);
    let theta = (0..p)
        .map(|i| random_quadratic_block(&mut r, &format!("y{}", i + 1), dims[1 + i], m))
        .collect();
    let g = random_prox_block(&mut r, "v", dims[1 + p], m);
    let phi = (0..q)
        .map(|j| random_quadratic_block(&mut r, &format!("z{}", j + 1), dims[2 + p + j], m))
        .collect();
    BlockProblem::new(f, theta, g, phi, gaussian_vector(&mut r, m)).expect("valid block problem")
}

pub fn random_state(problem: &BlockProblem, seed: u64) -> IterateState {
    let mut r = rng(seed);
    let mut s = IterateState::zeros(problem);
    s.u = problem.f.func.prox(&gaussian_vector(&mut r, s.u.len()), 1.0);
    s.v = problem.g.func.prox(&gaussian_vector(&mut r, s.v.len()), 1.0);
    for y in s.y.iter_mut().chain(s.z.iter_mut()) {
        *y = gaussian_vector(&mut r, y.len());
    }
    s.y_bar = s.y.clone();
    s.z_bar = s.z.clone();
    s.x = gaussian_vector(&mut r, s.x.len());
    s
}

pub fn rel_dev(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}
