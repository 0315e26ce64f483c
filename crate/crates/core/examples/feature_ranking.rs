//! Recursive feature elimination with a CART tree: a full ranking, best first.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use undersample_ensemble::cart::TreeParams;
use undersample_ensemble::rfe::rfe_rank;
use undersample_ensemble::Matrix;

fn main() -> undersample_ensemble::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 80;
    let y: Vec<u8> = (0..n).map(|i| u8::from(i % 2 == 0)).collect();
    // columns 2 and 4 carry signal of different strength; the rest is noise
    let rows: Vec<Vec<f64>> = y
        .iter()
        .map(|&c| {
            let c = f64::from(c);
            (0..6)
                .map(|j| {
                    let shift = match j {
                        2 => 0.7 * c,
                        4 => 0.4 * c,
                        _ => 0.0,
                    };
                    rng.gen::<f64>() + shift
                })
                .collect()
        })
        .collect();
    let x = Matrix::from_rows(&rows);

    let params = TreeParams {
        max_depth: Some(3),
        ..TreeParams::default()
    };
    let ranks = rfe_rank(&x, &y, 1, &params)?;
    println!("best to worst: {:?}", ranks.order());
    for f in 0..x.n_cols() {
        println!("  feature {f}: rank {}", ranks.rank(f));
    }
    Ok(())
}
