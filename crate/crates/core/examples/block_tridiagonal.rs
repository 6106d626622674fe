//! Solves one random block-tridiagonal system with 5x5 blocks three ways:
//! sequential Thomas, partitioned Schur complement and a dense LU reference.
//!
//! `cargo run --example block_tridiagonal`

use shellflow::blocktri::{dense_oracle, solve_schur, solve_thomas, BlockTriSystem, Partition, NB};

/// Small deterministic generator so the example needs no extra crates.
fn lcg(state: &mut u64) -> f64 {
    *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    ((*state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
}

pub fn run_example() -> shellflow::Result<()> {
    let n = 64;
    let mut seed = 7;
    let mut sys = BlockTriSystem::zeros(n);
    for i in 0..n {
        for blk in [&mut sys.lower[i], &mut sys.diag[i], &mut sys.upper[i]] {
            *blk = std::array::from_fn(|_| std::array::from_fn(|_| lcg(&mut seed)));
        }
        for r in 0..NB {
            sys.diag[i][r][r] += 16.0;
        }
        sys.rhs[i] = std::array::from_fn(|_| lcg(&mut seed));
    }
    let thomas = solve_thomas(&sys)?;
    let schur = solve_schur(&sys, &Partition::even(n, 4)?)?;
    let dense = dense_oracle(&sys)?;
    let diff = |a: &[[f64; NB]]| {
        a.iter()
            .flatten()
            .zip(dense.iter().flatten())
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
    };
    println!("n = {n} blocks");
    println!("thomas residual {:.2e}, difference from dense {:.2e}", sys.residual_max(&thomas), diff(&thomas));
    println!("schur (4 segments) residual {:.2e}, difference from dense {:.2e}", sys.residual_max(&schur), diff(&schur));
    Ok(())
}

#[allow(dead_code)]
fn main() -> shellflow::Result<()> {
    run_example()
}
