//! Wald significance of the predictors entering each PLSGLR component.

use alloc::vec::Vec;

use super::{component_cap, CriterionKind, CriterionResult, Decision, TraceRecord};
use crate::data::{center_scale, Dataset};
use crate::error::{Error, Result};
use crate::pls::PlsPath;

/// Length of the leading run of `p < alpha`.
pub fn consecutive_significant(min_pvalues: &[f64], alpha: f64) -> usize {
    min_pvalues.iter().take_while(|&&p| p < alpha).count()
}

/// Component `k` is significant when some predictor's coefficient in its
/// step GLM (`y` on `t_1..t_{k-1}` and the deflated predictor) has Wald
/// p-value below `alpha`; the count of leading significant components is
/// selected.
pub fn select_pval(data: &Dataset, kmax: usize, alpha: f64) -> Result<CriterionResult> {
    CriterionKind::Pval.check(data.family())?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let cap = component_cap(data.n(), data.p(), kmax);
    let path = PlsPath::build(&center_scale(data)?, cap)?;
    let pv = path.step_min_pvalues();
    let k_sel = consecutive_significant(pv, alpha);
    // the trace stops at the first non-significant component
    let shown = (k_sel + 1).min(pv.len());
    let trace = (0..shown)
        .map(|i| {
            let mut r = TraceRecord::new(
                i + 1,
                pv[i],
                if pv[i] < alpha {
                    Decision::Accept
                } else {
                    Decision::Reject
                },
            );
            r.min_pvalue = Some(pv[i]);
            r
        })
        .collect();
    let mut notes = Vec::new();
    if path.exhausted() {
        notes.push(alloc::format!(
            "only {} components could be extracted",
            path.ncomp()
        ));
    }
    Ok(CriterionResult {
        criterion: CriterionKind::Pval,
        k: k_sel,
        trace,
        k_max: None,
        notes,
    })
}
