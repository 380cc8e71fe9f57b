//! Cross-validated miss-classification counts for binomial PLSGLR.

use alloc::vec;
use alloc::vec::Vec;

use super::cv::fold_partition;
use super::{
    argmin_smallest, component_cap, CriterionKind, CriterionResult, Decision, TraceRecord,
};
use crate::data::{center_scale, Dataset};
use crate::error::{Error, Result};
use crate::evaluation::missclassed_count;
use crate::pls::PlsPath;

/// `q`-fold CV: for each `k = 0..kmax`, held-out rows are classified at the
/// 0.5 threshold by the `k`-component model of their training part; the
/// count minimizer is selected.
pub fn select_cv_missclassed(
    data: &Dataset,
    kmax: usize,
    q: usize,
    seed: u64,
) -> Result<CriterionResult> {
    CriterionKind::CvMclassed.check(data.family())?;
    let n = data.n();
    let parts = fold_partition(n, q, seed)?;
    let min_train = n - parts.iter().map(Vec::len).max().unwrap_or(0);
    let cap = component_cap(min_train, data.p(), kmax);
    if cap == 0 && kmax > 0 {
        return Err(Error::FoldTooSmall {
            train: min_train,
            k: kmax,
        });
    }
    let y = data.y();
    let mut counts = vec![0usize; cap + 1];
    let mut nonconverged = 0;
    let mut exhausted = 0;
    for fold in &parts {
        let train_rows: Vec<usize> = (0..n).filter(|i| fold.binary_search(i).is_err()).collect();
        let train = data.subset(&train_rows)?;
        let test_x = data.x().select_rows(fold);
        let test_y: Vec<f64> = fold.iter().map(|&i| y[i]).collect();
        let path = PlsPath::build(&center_scale(&train)?, cap)?;
        if path.exhausted() {
            exhausted += 1;
        }
        for (k, count) in counts.iter_mut().enumerate() {
            let m = path.model(k)?;
            nonconverged += m.glm_nonconverged + usize::from(!m.final_converged);
            *count += missclassed_count(&test_y, &m.predict(&test_x)?)?;
        }
    }
    let mut notes = Vec::new();
    if nonconverged > 0 {
        notes.push(alloc::format!("{nonconverged} GLM fits did not converge"));
    }
    if exhausted > 0 {
        notes.push(alloc::format!(
            "{exhausted} training folds ran out of components"
        ));
    }
    let values: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let k_sel = argmin_smallest(&values);
    let trace = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let mut r = TraceRecord::new(
                k,
                c as f64,
                if k == k_sel {
                    Decision::Selected
                } else {
                    Decision::Evaluated
                },
            );
            r.missclassed = Some(c);
            r
        })
        .collect();
    Ok(CriterionResult {
        criterion: CriterionKind::CvMclassed,
        k: k_sel,
        trace,
        k_max: None,
        notes,
    })
}
