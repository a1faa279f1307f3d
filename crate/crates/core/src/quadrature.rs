//! Adaptive Gauss–Kronrod quadrature (G7–K15 embedded pair).
//!
//! Panels are bisected worst-error-first; the local error estimate is the
//! difference between the embedded 7-point Gauss and 15-point Kronrod rules.
//! Callers integrating peaked functions should seed breakpoints at the known
//! feature locations so the initial panels resolve them. Panel results are
//! summed in interval order, so the value is independent of refinement order.

use crate::error::{Error, Result};

// 15-point Kronrod abscissae on [-1, 1] (positive half) and weights; the
// even-indexed abscissae form the embedded 7-point Gauss rule.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Converged integral with its error estimate and panel count.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    seq: usize,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let lo = f(center - half * x);
        let hi = f(center + half * x);
        kronrod += WGK[j] * (lo + hi);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    (value, error)
}

/// Adaptively integrate `f` over `[a, b]`.
///
/// Convergence: total error estimate ≤ max(rel_tol·|integral|, abs_tol).
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<Integral> {
    integrate_with_breakpoints(f, &[a, b], rel_tol, abs_tol, max_panels)
}

/// Adaptively integrate over the span of `points`, seeding one initial panel
/// between each pair of consecutive (sorted, deduplicated) breakpoints.
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<Integral> {
    assert!(points.len() >= 2, "need at least the interval endpoints");
    let mut edges: Vec<f64> = points.to_vec();
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    assert!(
        edges.len() >= 2,
        "breakpoints collapse to a single point; empty interval"
    );

    let mut panels: Vec<Panel> = Vec::new();
    let mut seq = 0;
    for w in edges.windows(2) {
        let (value, error) = gauss_kronrod(&f, w[0], w[1]);
        panels.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
            seq,
        });
        seq += 1;
    }

    loop {
        let total: f64 = {
            let mut ordered: Vec<&Panel> = panels.iter().collect();
            ordered.sort_by(|p, q| p.a.total_cmp(&q.a));
            ordered.iter().map(|p| p.value).sum()
        };
        let total_error: f64 = panels.iter().map(|p| p.error).sum();
        let target = (rel_tol * total.abs()).max(abs_tol);
        if total_error <= target {
            return Ok(Integral {
                value: total,
                error_estimate: total_error,
                panels: panels.len(),
            });
        }
        if panels.len() >= max_panels {
            return Err(Error::QuadratureNoConvergence {
                achieved: total_error,
                target,
                panels: panels.len(),
            });
        }
        // Bisect the worst panel; ties broken by insertion order for
        // run-to-run determinism.
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|(_, p), (_, q)| p.error.total_cmp(&q.error).then(q.seq.cmp(&p.seq)))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let Panel { a, b, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // Interval at rounding resolution; treat its estimate as final.
            panels[worst].error = 0.0;
            continue;
        }
        let (left_value, left_error) = gauss_kronrod(&f, a, mid);
        let (right_value, right_error) = gauss_kronrod(&f, mid, b);
        panels[worst] = Panel {
            a,
            b: mid,
            value: left_value,
            error: left_error,
            seq,
        };
        seq += 1;
        panels.push(Panel {
            a: mid,
            b,
            value: right_value,
            error: right_error,
            seq,
        });
        seq += 1;
    }
}
