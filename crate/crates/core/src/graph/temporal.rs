//! Temporal reachability over a schedule: flooding time and dynamic diameter.

use super::schedule::GraphSchedule;
use super::snapshot::{NodeId, Round};
use super::ScheduleError;

/// Rounds needed for a flood from `source`, started at `start`, to inform every node.
///
/// Round `start + i` uses snapshot `G_{start+i}`; an informed node informs all of its
/// neighbors in that snapshot.
pub fn flooding_time(
    schedule: &GraphSchedule,
    source: NodeId,
    start: Round,
) -> Result<u64, ScheduleError> {
    let n = schedule.n();
    let mut informed = vec![false; n];
    informed[source.index()] = true;
    let mut count = 1;
    let mut r = 0;
    while count < n {
        let g = schedule.snapshot_at(start + r)?;
        let mut next = informed.clone();
        for &(u, v) in g.edges() {
            if informed[u.index()] || informed[v.index()] {
                next[u.index()] = true;
                next[v.index()] = true;
            }
        }
        let grown = next.iter().filter(|&&b| b).count();
        assert!(
            grown > count,
            "flood stalled at round {}: snapshot is disconnected",
            start + r
        );
        informed = next;
        count = grown;
        r += 1;
    }
    Ok(r)
}

/// Start rounds worth checking within `[1, horizon]`.
fn start_rounds(schedule: &GraphSchedule, horizon: Round) -> Round {
    match schedule.period() {
        Some(p) => horizon.min(p as Round),
        None => horizon,
    }
}

/// Worst flooding time over every source and every start round in `[1, horizon]`.
pub fn dynamic_diameter(schedule: &GraphSchedule, horizon: Round) -> Result<u64, ScheduleError> {
    assert!(horizon >= 1, "horizon must be at least 1");
    let n = schedule.n();
    let words = n.div_ceil(64);
    let full: Vec<u64> = (0..words)
        .map(|w| {
            if (w + 1) * 64 <= n {
                u64::MAX
            } else {
                (1u64 << (n - w * 64)) - 1
            }
        })
        .collect();
    let mut worst = 0;
    for start in 1..=start_rounds(schedule, horizon) {
        // reach[v] holds the set of sources whose flood has reached v.
        let mut reach = vec![0u64; n * words];
        for v in 0..n {
            reach[v * words + v / 64] |= 1 << (v % 64);
        }
        let mut r = 0;
        while (0..n).any(|v| reach[v * words..(v + 1) * words] != full[..]) {
            let g = schedule.snapshot_at(start + r)?;
            let mut next = reach.clone();
            for &(u, v) in g.edges() {
                let (u, v) = (u.index(), v.index());
                for w in 0..words {
                    next[u * words + w] |= reach[v * words + w];
                    next[v * words + w] |= reach[u * words + w];
                }
            }
            reach = next;
            r += 1;
            assert!(
                r < n as u64 || n == 1,
                "flooding exceeded n - 1 rounds; a snapshot is disconnected"
            );
        }
        worst = worst.max(r);
    }
    Ok(worst)
}
