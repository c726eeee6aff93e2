//! Many walks sharing one coupon phase.

use serde::{Deserialize, Serialize};

use crate::congest::{Encoding, Engine};
use crate::graph::NodeId;

use super::naive::concurrent_naive_walks;
use super::phase1::phase1_distribute;
use super::stitch::{stitch_walk, Stitcher};
use super::{WalkError, WalkParams, WalkResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkCase {
    /// `λ ≥ τ`: all tokens walk live at once.
    Concurrent,
    /// One shared coupon phase, then each source is stitched in turn.
    Stitched,
}

#[derive(Clone, Debug)]
pub struct ManyWalks {
    pub walks: Vec<WalkResult>,
    pub lambda_walk: u64,
    pub case: WalkCase,
    pub phase1_rounds: u64,
    pub max_edge_coupons: u64,
    pub total_rounds: u64,
}

/// `k` independent walks of length `τ`, one per entry of `sources`.
pub fn many_random_walks(
    engine: &mut Engine,
    sources: &[NodeId],
    params: &WalkParams,
) -> Result<ManyWalks, WalkError> {
    let k = sources.len();
    let phi = engine.config().phi;
    let lambda = params.lambda_for(k.max(1), phi);
    let g = engine.next_snapshot()?;
    engine.set_encoding(Encoding::new(engine.n()).with_walks(
        g.max_degree(),
        lambda,
        params.tau,
        k.max(1),
    ));
    let start = engine.round();
    if lambda >= params.tau {
        let walks = concurrent_naive_walks(engine, sources, params.tau, params.stepper)?;
        return Ok(ManyWalks {
            walks,
            lambda_walk: lambda,
            case: WalkCase::Concurrent,
            phase1_rounds: 0,
            max_edge_coupons: 0,
            total_rounds: engine.round() - start,
        });
    }
    let mut placement = phase1_distribute(engine, lambda, params.stepper)?;
    let mut stitcher = Stitcher::new(engine);
    let mut walks = Vec::with_capacity(k);
    for (j, &s) in sources.iter().enumerate() {
        walks.push(stitch_walk(
            engine,
            &mut placement,
            &mut stitcher,
            s,
            params.tau,
            j as u32,
            params.stepper,
        )?);
    }
    Ok(ManyWalks {
        walks,
        lambda_walk: lambda,
        case: WalkCase::Stitched,
        phase1_rounds: placement.rounds,
        max_edge_coupons: placement.max_edge_coupons,
        total_rounds: engine.round() - start,
    })
}
