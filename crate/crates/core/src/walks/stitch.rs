//! Phase 2: stitching coupon walks into one long walk.

use rand::Rng;

use crate::congest::{Encoding, Engine, Payload};
use crate::graph::NodeId;
use crate::rng::{NodeStreams, Purpose};

use super::naive::{extend_walk, naive_walk};
use super::phase1::{phase1_distribute, CouponPlacement};
use super::{Segment, SegmentKind, Stepper, WalkError, WalkParams, WalkResult};

/// Samples and deletes a uniform unused coupon of `connector`, then locates its
/// holder and hands it the token with two floods of `phi` rounds each.
///
/// Returns the coupon index and its holder, or `None` (without using any rounds)
/// when the connector has no unused coupons.
pub fn sample_coupon<R: Rng + ?Sized>(
    engine: &mut Engine,
    placement: &mut CouponPlacement,
    connector: NodeId,
    token: Payload,
    rng: &mut R,
) -> Result<Option<(usize, NodeId)>, WalkError> {
    let Some(c) = placement.take_uniform(connector, rng) else {
        return Ok(None);
    };
    let coupon = placement.coupons[c];
    let phi = engine.config().phi;
    // The unique node holding (origin, serial) recognizes the request.
    engine.flood(
        Payload::CouponRequest {
            origin: coupon.origin,
            serial: coupon.serial,
        },
        connector,
        phi,
    )?;
    engine.flood(token, coupon.holder, phi)?;
    Ok(Some((c, coupon.holder)))
}

/// Connector-side randomness shared by every walk stitched from one placement.
#[derive(Debug)]
pub struct Stitcher {
    streams: NodeStreams,
}

impl Stitcher {
    pub fn new(engine: &Engine) -> Self {
        Self {
            streams: NodeStreams::new(
                engine.config().seed,
                Purpose::Stitch,
                engine.round(),
                engine.n(),
            ),
        }
    }
}

/// Builds a walk of length `tau` from `source` by stitching coupons while at least
/// `2λ` steps remain, then walking the rest live.
pub fn stitch_walk(
    engine: &mut Engine,
    placement: &mut CouponPlacement,
    stitcher: &mut Stitcher,
    source: NodeId,
    tau: u64,
    walk_id: u32,
    stepper: Stepper,
) -> Result<WalkResult, WalkError> {
    let lambda = placement.lambda_walk;
    let mut naive_streams = NodeStreams::new(
        engine.config().seed,
        Purpose::Naive,
        engine.round(),
        engine.n(),
    );
    let mut walk = WalkResult::at_source(source);
    while walk.length() + 2 * lambda <= tau {
        let v = walk.destination;
        let token = Payload::Token {
            source,
            walk_id,
            completed: walk.length(),
        };
        let before = engine.round();
        match sample_coupon(engine, placement, v, token, stitcher.streams.get(v.index()))? {
            Some((c, holder)) => {
                walk.path.extend_from_slice(&placement.paths[c][1..]);
                walk.step_rounds
                    .extend_from_slice(&placement.step_rounds[c]);
                walk.destination = holder;
                walk.rounds_used += engine.round() - before;
                walk.segments.push(Segment {
                    kind: SegmentKind::Stitched,
                    length: placement.coupons[c].desired_length,
                });
            }
            None => {
                extend_walk(
                    engine,
                    &mut walk,
                    walk_id,
                    lambda,
                    SegmentKind::Fallback,
                    stepper,
                    &mut naive_streams,
                )?;
                walk.fallbacks += 1;
            }
        }
        walk.connectors.push(walk.destination);
    }
    let rest = tau - walk.length();
    extend_walk(
        engine,
        &mut walk,
        walk_id,
        rest,
        SegmentKind::Naive,
        stepper,
        &mut naive_streams,
    )?;
    Ok(walk)
}

/// One walk of length `τ` from `source`: coupon phase, stitching, naive remainder.
///
/// When `τ < 2λ` no coupon is ever stitched, so the coupon phase is skipped and the
/// walk is a plain token walk.
pub fn single_random_walk(
    engine: &mut Engine,
    source: NodeId,
    params: &WalkParams,
) -> Result<WalkResult, WalkError> {
    let phi = engine.config().phi;
    let lambda = params.lambda_for(1, phi);
    let g = engine.next_snapshot()?;
    let enc = Encoding::new(engine.n()).with_walks(g.max_degree(), lambda, params.tau, 1);
    engine.set_encoding(enc);
    if params.tau < 2 * lambda {
        return naive_walk(engine, source, params.tau, params.stepper);
    }
    let start = engine.round();
    let mut placement = phase1_distribute(engine, lambda, params.stepper)?;
    let mut stitcher = Stitcher::new(engine);
    let mut walk = stitch_walk(
        engine,
        &mut placement,
        &mut stitcher,
        source,
        params.tau,
        0,
        params.stepper,
    )?;
    walk.rounds_used = engine.round() - start;
    Ok(walk)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::congest::{CongestionPolicy, SimConfig};
    use crate::graph::GraphSchedule;

    fn engine(spec: &str, phi: u64, seed: u64) -> Engine {
        let s = Arc::new(GraphSchedule::parse(spec, 7).unwrap());
        let n = s.n();
        Engine::new(
            s,
            SimConfig::new(n, phi, seed).with_policy(CongestionPolicy::Queue),
        )
    }

    #[test]
    fn short_tau_is_a_naive_walk() {
        let mut e = engine("static:K4", 1, 1);
        let w = single_random_walk(&mut e, NodeId(0), &WalkParams::new(3).with_lambda(2)).unwrap();
        assert_eq!(w.rounds_used, 3);
        assert_eq!(
            w.segments,
            vec![Segment {
                kind: SegmentKind::Naive,
                length: 3
            }]
        );
        assert_eq!(w.connectors, vec![NodeId(0)]);
    }

    #[test]
    fn stitched_walk_structure() {
        for seed in 0..50 {
            let mut e = engine("static:petersen", 2, seed);
            let w =
                single_random_walk(&mut e, NodeId(3), &WalkParams::new(40).with_lambda(3)).unwrap();
            assert_eq!(w.length(), 40);
            assert_eq!(w.path.len(), 41);
            assert_eq!(w.path[0], NodeId(3));
            assert_eq!(*w.path.last().unwrap(), w.destination);
            let g = crate::graph::petersen();
            assert!(w.path.windows(2).all(|p| g.has_edge(p[0], p[1])));
            assert_eq!(w.segments.iter().map(|s| s.length).sum::<u64>(), 40);
            for s in &w.segments {
                match s.kind {
                    SegmentKind::Stitched => assert!((3..=5).contains(&s.length)),
                    SegmentKind::Fallback => assert_eq!(s.length, 3),
                    SegmentKind::Naive => assert!(s.length < 6),
                }
            }
            assert_eq!(
                w.connectors.len(),
                w.segments
                    .iter()
                    .filter(|s| s.kind != SegmentKind::Naive)
                    .count()
                    + 1
            );
            assert_eq!(w.rounds_used, e.round());
        }
    }
}
