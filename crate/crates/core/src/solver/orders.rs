use serde::{Deserialize, Serialize};

use super::SolverTrace;
use crate::error::{Error, Result};
use crate::field::Valuation;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    /// Valuations the estimates were computed from.
    pub v: Vec<i64>,
    /// `v_{n+1} / v_n`.
    pub q_ratios: Vec<f64>,
    /// Mean of the last `max(3, ceil(len/3))` ratios.
    pub q_tail: f64,
    pub tail_window: usize,
    /// `exp` of the least-squares slope of `ln v_n` against `n`.
    pub r_order: f64,
    /// `min_w (v_{w+2m} - 2 v_w)`.
    pub doubling_defect: i64,
    /// `max(0, -doubling_defect)`: the smallest `C` with
    /// `v_{w+2m} >= 2 v_w - C` for every `w`.
    pub doubling_constant: i64,
    pub m: usize,
}

/// Order estimates for a trace of an `m`-dimensional run. A final apparent
/// zero is dropped, since its valuation is only a bound.
pub fn estimate_orders(trace: &SolverTrace, m: usize) -> Result<OrderReport> {
    let mut v: Vec<i64> = Vec::with_capacity(trace.records.len());
    for (i, r) in trace.records.iter().enumerate() {
        match r.v {
            Valuation::Finite(x) => v.push(x),
            _ if i + 1 == trace.records.len() => {}
            other => return Err(Error::InvalidArgument(format!("record {i} has valuation {other} before the end"))),
        }
    }
    estimate_orders_from(&v, m)
}

/// [`estimate_orders`] on a bare valuation sequence.
pub fn estimate_orders_from(v: &[i64], m: usize) -> Result<OrderReport> {
    let need = 2 * m + 3;
    if v.len() < need {
        return Err(Error::InvalidArgument(format!(
            "order estimation needs at least {need} valuations, got {}",
            v.len()
        )));
    }
    if let Some(bad) = v.iter().find(|&&x| x < 1) {
        return Err(Error::InvalidArgument(format!("valuation {bad} is not positive")));
    }
    let q_ratios: Vec<f64> = v.windows(2).map(|w| w[1] as f64 / w[0] as f64).collect();
    let tail_window = 3usize.max(v.len().div_ceil(3)).min(q_ratios.len());
    let tail = &q_ratios[q_ratios.len() - tail_window..];
    let q_tail = tail.iter().sum::<f64>() / tail.len() as f64;

    let n = v.len() as f64;
    let xs: Vec<f64> = (0..v.len()).map(|i| i as f64).collect();
    let ys: Vec<f64> = v.iter().map(|&x| (x as f64).ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let r_order = (sxy / sxx).exp();

    let k = 2 * m;
    let doubling_defect = (0..v.len() - k).map(|w| v[w + k] - 2 * v[w]).min().expect("length checked above");
    Ok(OrderReport {
        v: v.to_vec(),
        q_ratios,
        q_tail,
        tail_window,
        r_order,
        doubling_defect,
        doubling_constant: (-doubling_defect).max(0),
        m,
    })
}
