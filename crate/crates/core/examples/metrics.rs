//! ROC-AUC with ties, confusion counts and stratified fold assignment.

use undersample_ensemble::metrics::{auc, confusion, stratified_folds};

fn main() -> undersample_ensemble::Result<()> {
    let labels = [0, 0, 1, 1, 0, 1, 0, 0];
    let scores = [0.1, 0.4, 0.35, 0.8, 0.35, 0.9, 0.2, 0.0];
    println!("AUC {:.4}", auc(&scores, &labels)?);

    let preds: Vec<u8> = scores.iter().map(|&s| u8::from(s >= 0.35)).collect();
    let c = confusion(&preds, &labels)?;
    println!(
        "{c:?}\naccuracy {:.3} sensitivity {:.3} fallout {:.3}",
        c.accuracy(),
        c.sensitivity(),
        c.fallout()
    );

    let folds = stratified_folds(&labels, 3, 42)?;
    println!("fold per row {folds:?}");
    Ok(())
}
