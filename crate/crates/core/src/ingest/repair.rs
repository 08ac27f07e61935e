use super::series::{DailySeries, Variable};
use crate::error::{Error, Result};

/// Forward-fills every column, then back-fills any leading missing run.
///
/// Observed values are never modified. A column with no observations at all
/// cannot be repaired and is reported by name.
pub fn fill_gaps(series: &DailySeries) -> Result<DailySeries> {
    let mut out = series.clone();
    for var in Variable::ALL {
        let col = out.column_mut(var);
        if col.is_empty() {
            continue;
        }
        let first = col
            .iter()
            .position(Option::is_some)
            .ok_or_else(|| Error::UnrecoverableColumn(var.to_string()))?;
        let leading = col[first];
        let mut last = leading;
        for v in col.iter_mut().skip(first) {
            match v {
                Some(_) => last = *v,
                None => *v = last,
            }
        }
        for v in col.iter_mut().take(first) {
            *v = leading;
        }
    }
    Ok(out)
}

/// Replaces pressure with its first differences, `p[t] - p[t-1]`, keeping
/// the series length by setting the first element to zero.
pub fn difference_pressure(series: &DailySeries) -> Result<DailySeries> {
    if series.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "pressure differencing needs at least 2 days, got {}",
            series.len()
        )));
    }
    let pressure = series.values(Variable::Pressure)?;
    let mut out = series.clone();
    let col = out.column_mut(Variable::Pressure);
    col[0] = Some(0.0);
    for t in 1..pressure.len() {
        col[t] = Some(pressure[t] - pressure[t - 1]);
    }
    Ok(out)
}
