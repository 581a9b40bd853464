//! Coisotropic subspaces near the model subspace: the quadratic condition
//! against a brute-force check, and the dimension count.
use shla::oracle::grassmann::{brute_force, grassmann_dimension, grassmann_is_coisotropic, sample};
use shla::sampling::rng;

fn main() -> anyhow::Result<()> {
    let mut g = rng(7);
    for (n, k) in [(2, 1), (3, 1), (3, 2)] {
        let pts: Vec<_> = (0..500).map(|_| sample(n, k, &mut g)).collect();
        let agree = pts.iter().filter(|p| grassmann_is_coisotropic(p).0 == brute_force(p).0).count();
        println!("n={n} k={k}: dimension {}, agreement {agree}/500", grassmann_dimension(n, k)?);
    }
    Ok(())
}
