//! Fit a Gini CART tree, inspect its splits, importances and leaf probabilities.

use undersample_ensemble::cart::{fit, TreeParams};
use undersample_ensemble::Matrix;

fn main() -> undersample_ensemble::Result<()> {
    // feature 0 separates the classes; feature 1 is noise
    let x = Matrix::from_rows(&[
        vec![1.0, 5.0],
        vec![2.0, 3.0],
        vec![3.0, 4.0],
        vec![4.0, 1.0],
        vec![6.0, 2.0],
        vec![7.0, 5.0],
        vec![8.0, 3.0],
        vec![9.0, 1.0],
    ]);
    let y = [0, 0, 0, 1, 1, 1, 1, 0];

    let tree = fit(&x, &y, &TreeParams::default())?;
    println!("depth {}", tree.root.depth());
    println!("training predictions {:?}", tree.predict(&x)?);
    println!("importances {:?}", tree.importances());
    println!("features used {:?}", tree.split_features());

    let stump = fit(
        &x,
        &y,
        &TreeParams {
            max_depth: Some(1),
            ..TreeParams::default()
        },
    )?;
    println!("stump leaf probabilities {:?}", stump.predict_proba(&x)?);
    println!("{}", stump.to_json()?);
    Ok(())
}
