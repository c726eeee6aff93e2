//! Token walks that take one live step per round.

use crate::congest::{Engine, Envelope, Payload};
use crate::graph::NodeId;
use crate::rng::{NodeStreams, Purpose};

use super::{Segment, SegmentKind, Stepper, WalkError, WalkResult};

/// A token in flight: which walk it belongs to and how far it has come.
#[derive(Clone, Copy, Debug)]
struct Token {
    pos: NodeId,
    remaining: u64,
    in_flight: bool,
}

/// Advances several walks by live steps until each has taken its quota.
///
/// `walks[i]` takes `quota[i]` steps. Holders draw from `streams`; a token
/// bounced back from a vanished edge picks again next round.
pub(crate) fn advance_live(
    engine: &mut Engine,
    walks: &mut [&mut WalkResult],
    quota: &[u64],
    walk_ids: &[u32],
    stepper: Stepper,
    streams: &mut NodeStreams,
) -> Result<(), WalkError> {
    let mut tokens: Vec<Token> = walks
        .iter()
        .zip(quota)
        .map(|(w, &q)| Token {
            pos: w.destination,
            remaining: q,
            in_flight: false,
        })
        .collect();
    while tokens.iter().any(|t| t.remaining > 0) {
        let g = engine.next_snapshot()?;
        let round = g.round;
        let mut sends = Vec::new();
        let mut stayed = Vec::new();
        for (i, t) in tokens.iter_mut().enumerate() {
            if t.remaining == 0 || t.in_flight {
                continue;
            }
            let w = &walks[i];
            match stepper.step(streams.get(t.pos.index()), t.pos, g.neighbors(t.pos))? {
                Some(next) => {
                    let payload = Payload::Token {
                        source: w.source,
                        walk_id: walk_ids[i],
                        completed: w.length(),
                    };
                    sends.push(Envelope {
                        from: t.pos,
                        to: next,
                        payload,
                        tag: i,
                    });
                    t.in_flight = true;
                }
                None => stayed.push(i),
            }
        }
        let ex = engine.exchange(sends)?;
        for i in stayed {
            let t = &mut tokens[i];
            walks[i].path.push(t.pos);
            walks[i].step_rounds.push(round);
            t.remaining -= 1;
        }
        for m in &ex.delivered {
            let t = &mut tokens[m.tag];
            t.pos = m.to;
            t.in_flight = false;
            t.remaining -= 1;
            walks[m.tag].path.push(m.to);
            walks[m.tag].step_rounds.push(ex.round);
        }
        for m in &ex.bounced {
            tokens[m.tag].in_flight = false;
        }
    }
    for (w, t) in walks.iter_mut().zip(&tokens) {
        w.destination = t.pos;
    }
    Ok(())
}

/// Appends `steps` live steps of the given kind to `walk`.
pub(crate) fn extend_walk(
    engine: &mut Engine,
    walk: &mut WalkResult,
    walk_id: u32,
    steps: u64,
    kind: SegmentKind,
    stepper: Stepper,
    streams: &mut NodeStreams,
) -> Result<(), WalkError> {
    if steps == 0 {
        return Ok(());
    }
    let start = engine.round();
    advance_live(
        engine,
        &mut [&mut *walk],
        &[steps],
        &[walk_id],
        stepper,
        streams,
    )?;
    walk.rounds_used += engine.round() - start;
    walk.segments.push(Segment {
        kind,
        length: steps,
    });
    Ok(())
}

/// Forwards a token from `source` for `length` steps, one per round.
pub fn naive_walk(
    engine: &mut Engine,
    source: NodeId,
    length: u64,
    stepper: Stepper,
) -> Result<WalkResult, WalkError> {
    let mut streams = NodeStreams::new(
        engine.config().seed,
        Purpose::Naive,
        engine.round(),
        engine.n(),
    );
    let mut walk = WalkResult::at_source(source);
    extend_walk(
        engine,
        &mut walk,
        0,
        length,
        SegmentKind::Naive,
        stepper,
        &mut streams,
    )?;
    Ok(walk)
}

/// Runs one token per source simultaneously, each for `length` steps.
pub fn concurrent_naive_walks(
    engine: &mut Engine,
    sources: &[NodeId],
    length: u64,
    stepper: Stepper,
) -> Result<Vec<WalkResult>, WalkError> {
    let start = engine.round();
    let mut streams = NodeStreams::new(engine.config().seed, Purpose::Naive, start, engine.n());
    let mut walks: Vec<WalkResult> = sources.iter().map(|&s| WalkResult::at_source(s)).collect();
    if length > 0 {
        let quota = vec![length; walks.len()];
        let ids: Vec<u32> = (0..walks.len() as u32).collect();
        let mut refs: Vec<&mut WalkResult> = walks.iter_mut().collect();
        advance_live(engine, &mut refs, &quota, &ids, stepper, &mut streams)?;
        let used = engine.round() - start;
        for w in &mut walks {
            w.rounds_used = used;
            w.segments.push(Segment {
                kind: SegmentKind::Naive,
                length,
            });
        }
    }
    Ok(walks)
}
