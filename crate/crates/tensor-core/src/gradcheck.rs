//! Central finite-difference verification of the reverse pass.
//!
//! The checker rebuilds the computation at `f64` for every probe so
//! truncation, not precision, limits the comparison. Relative error is
//! `|g_a - g_n| / max(1e-6, |g_a| + |g_n|)`, the scale-free form that stays
//! meaningful when both gradients are near zero.

use crate::{Graph, NodeId, Tensor, TensorError};

/// Worst disagreement found by [`grad_check`].
#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub max_rel_err: f64,
    /// Index of the input tensor holding the worst coordinate.
    pub input: usize,
    /// Flat coordinate within that input.
    pub coord: usize,
    pub analytic: f64,
    pub numeric: f64,
}

/// Compares analytic gradients of a scalar-valued graph against central
/// finite differences with step `h` (1e-3 is the conventional choice).
///
/// `build` receives leaf ids for each input tensor and must return the
/// scalar loss node.
pub fn grad_check<B>(
    build: B,
    inputs: &[Tensor<f64>],
    h: f64,
) -> Result<GradCheckReport, TensorError>
where
    B: Fn(&mut Graph<f64>, &[NodeId]) -> Result<NodeId, TensorError>,
{
    // analytic pass
    let mut graph = Graph::new();
    let mut ids = Vec::with_capacity(inputs.len());
    for t in inputs {
        ids.push(graph.leaf(t.clone(), true)?);
    }
    let loss = build(&mut graph, &ids)?;
    if graph.value(loss).data.len() != 1 {
        return Err(TensorError::NotScalar {
            op: "grad_check",
            shape: graph.value(loss).shape.clone(),
        });
    }
    graph.backward(loss)?;
    let analytic: Vec<Tensor<f64>> = ids
        .iter()
        .map(|&id| {
            graph
                .grad(id)
                .unwrap_or_else(|| Tensor::zeros(&graph.value(id).shape))
        })
        .collect();

    let eval = |probe: &[Tensor<f64>]| -> Result<f64, TensorError> {
        let mut g = Graph::new();
        let mut pids = Vec::with_capacity(probe.len());
        for t in probe {
            pids.push(g.leaf(t.clone(), false)?);
        }
        let l = build(&mut g, &pids)?;
        Ok(g.value(l).data[0])
    };

    let mut report = GradCheckReport {
        max_rel_err: 0.0,
        input: 0,
        coord: 0,
        analytic: 0.0,
        numeric: 0.0,
    };
    let mut probe: Vec<Tensor<f64>> = inputs.to_vec();
    for (i, input) in inputs.iter().enumerate() {
        for c in 0..input.data.len() {
            let orig = input.data[c];
            probe[i].data[c] = orig + h;
            let up = eval(&probe)?;
            probe[i].data[c] = orig - h;
            let down = eval(&probe)?;
            probe[i].data[c] = orig;
            let numeric = (up - down) / (2.0 * h);
            let a = analytic[i].data[c];
            let rel = (a - numeric).abs() / f64::max(1e-6, a.abs() + numeric.abs());
            if rel > report.max_rel_err {
                report = GradCheckReport {
                    max_rel_err: rel,
                    input: i,
                    coord: c,
                    analytic: a,
                    numeric,
                };
            }
        }
    }
    Ok(report)
}
