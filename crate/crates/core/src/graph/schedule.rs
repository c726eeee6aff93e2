//! Oblivious-adversary graph schedules.
//!
//! A schedule maps a round `t >= 1` to the snapshot `G_t`. The mapping is a pure
//! function of the generator, the adversary seed and `t`.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::{Arc, Mutex};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::generators::{named, random_regular};
use super::snapshot::{Graph, GraphSnapshot, Round};
use super::ScheduleError;
use crate::rng::{mix, stream, Purpose};

const CACHE_LIMIT: usize = 1 << 14;

#[derive(Clone, Debug)]
pub enum Generator {
    Static(Arc<Graph>),
    /// `G_t = list[(t - 1) mod len]`.
    Periodic(Vec<Arc<Graph>>),
    /// A fresh random `d`-regular graph each round.
    RandomRegular {
        n: usize,
        d: usize,
    },
    /// A seeded random relabeling of `base` each round.
    Permuted {
        base: Arc<Graph>,
    },
    /// Exactly the listed snapshots for rounds `1..=len`.
    Explicit(Vec<Arc<Graph>>),
}

pub struct GraphSchedule {
    generator: Generator,
    n: usize,
    degree: Option<usize>,
    seed: u64,
    spec: String,
    cache: Mutex<HashMap<Round, Arc<Graph>>>,
}

impl Clone for GraphSchedule {
    fn clone(&self) -> Self {
        Self {
            generator: self.generator.clone(),
            n: self.n,
            degree: self.degree,
            seed: self.seed,
            spec: self.spec.clone(),
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl fmt::Debug for GraphSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphSchedule")
            .field("spec", &self.spec)
            .field("n", &self.n)
            .field("degree", &self.degree)
            .field("seed", &self.seed)
            .finish()
    }
}

fn check_list(graphs: &[Arc<Graph>]) -> Result<(usize, Option<usize>), ScheduleError> {
    let first = graphs.first().ok_or(ScheduleError::Empty)?;
    let n = first.n();
    let degree = first.regular_degree();
    let mut common = degree;
    for (i, g) in graphs.iter().enumerate() {
        if g.n() != n {
            return Err(ScheduleError::NodeCountMismatch {
                expected: n,
                found: g.n(),
            });
        }
        if !g.is_connected() {
            return Err(ScheduleError::Disconnected { index: i });
        }
        if g.regular_degree() != common {
            common = None;
        }
    }
    Ok((n, common))
}

impl GraphSchedule {
    fn build(
        generator: Generator,
        n: usize,
        degree: Option<usize>,
        seed: u64,
        spec: String,
    ) -> Self {
        Self {
            generator,
            n,
            degree,
            seed,
            spec,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn static_graph(g: Graph) -> Result<Self, ScheduleError> {
        let g = Arc::new(g);
        let (n, d) = check_list(std::slice::from_ref(&g))?;
        Ok(Self::build(Generator::Static(g), n, d, 0, "static".into()))
    }

    pub fn periodic(graphs: Vec<Graph>) -> Result<Self, ScheduleError> {
        let graphs: Vec<_> = graphs.into_iter().map(Arc::new).collect();
        let (n, d) = check_list(&graphs)?;
        Ok(Self::build(
            Generator::Periodic(graphs),
            n,
            d,
            0,
            "periodic".into(),
        ))
    }

    pub fn explicit(graphs: Vec<Graph>) -> Result<Self, ScheduleError> {
        let graphs: Vec<_> = graphs.into_iter().map(Arc::new).collect();
        let (n, d) = check_list(&graphs)?;
        Ok(Self::build(
            Generator::Explicit(graphs),
            n,
            d,
            0,
            "explicit".into(),
        ))
    }

    pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Self, ScheduleError> {
        let s = Self::build(
            Generator::RandomRegular { n, d },
            n,
            Some(d),
            seed,
            format!("rr:n={n},d={d}"),
        );
        // Surface infeasible parameters at construction time.
        s.snapshot_at(1)?;
        Ok(s)
    }

    pub fn permuted(base: Graph, seed: u64) -> Result<Self, ScheduleError> {
        let base = Arc::new(base);
        let (n, d) = check_list(std::slice::from_ref(&base))?;
        Ok(Self::build(
            Generator::Permuted { base },
            n,
            d,
            seed,
            "perm".into(),
        ))
    }

    /// Parses a generator spec string.
    ///
    /// Grammar: `static:<name|file|rr:n=..,d=..>`, `periodic:<file|name+name+..>`,
    /// `rr:n=<n>,d=<d>`, `perm:base=<name|file>`, `file:<path>`. Names are
    /// `K<n>`, `C<n>`, `star<k>` and `petersen`.
    pub fn parse(spec: &str, seed: u64) -> Result<Self, ScheduleError> {
        let spec = spec.trim();
        let (kind, arg) = spec
            .split_once(':')
            .ok_or_else(|| ScheduleError::Parse(format!("missing ':' in {spec:?}")))?;
        let mut schedule = match kind {
            "static" => {
                let g = if let Some(rr) = arg.strip_prefix("rr:") {
                    let (n, d) = parse_rr(rr)?;
                    let mut rng = stream(seed, 0, Purpose::Schedule, u64::MAX);
                    random_regular(n, d, &mut rng).map_err(|e| ScheduleError::Generation {
                        round: 0,
                        source: e,
                    })?
                } else {
                    resolve_graph(arg)?.swap_remove(0)
                };
                Self::static_graph(g)?
            }
            "periodic" => {
                let graphs = if arg.contains('+') || named(arg).is_some() {
                    arg.split('+')
                        .map(|a| resolve_graph(a).map(|mut v| v.swap_remove(0)))
                        .collect::<Result<_, _>>()?
                } else {
                    read_schedule_file(Path::new(arg))?.graphs
                };
                Self::periodic(graphs)?
            }
            "rr" => {
                let (n, d) = parse_rr(arg)?;
                Self::random_regular(n, d, seed)?
            }
            "perm" => {
                let base = arg.strip_prefix("base=").ok_or_else(|| {
                    ScheduleError::Parse(format!("perm expects base=..., got {arg:?}"))
                })?;
                let g = resolve_graph(base)?.swap_remove(0);
                Self::permuted(g, seed)?
            }
            "file" => Self::explicit(read_schedule_file(Path::new(arg))?.graphs)?,
            other => return Err(ScheduleError::Parse(format!("unknown generator {other:?}"))),
        };
        schedule.spec = spec.to_string();
        schedule.seed = seed;
        Ok(schedule)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Declared regularity, when every snapshot is `d`-regular.
    pub fn degree(&self) -> Option<usize> {
        self.degree
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    /// Number of rounds after which the sequence repeats, when known.
    pub fn period(&self) -> Option<usize> {
        match &self.generator {
            Generator::Static(_) => Some(1),
            Generator::Periodic(list) => Some(list.len()),
            _ => None,
        }
    }

    /// Last round this schedule can produce, if bounded.
    pub fn last_round(&self) -> Option<Round> {
        match &self.generator {
            Generator::Explicit(list) => Some(list.len() as Round),
            _ => None,
        }
    }

    pub fn snapshot_at(&self, t: Round) -> Result<GraphSnapshot, ScheduleError> {
        if t == 0 {
            return Err(ScheduleError::RoundZero);
        }
        let graph = match &self.generator {
            Generator::Static(g) => g.clone(),
            Generator::Periodic(list) => list[((t - 1) % list.len() as u64) as usize].clone(),
            Generator::Explicit(list) => {
                list.get((t - 1) as usize)
                    .cloned()
                    .ok_or(ScheduleError::RoundOutOfRange {
                        round: t,
                        last: list.len() as Round,
                    })?
            }
            Generator::RandomRegular { n, d } => self.cached(t, |rng| {
                random_regular(*n, *d, rng).map_err(|e| ScheduleError::Generation {
                    round: t,
                    source: e,
                })
            })?,
            Generator::Permuted { base } => self.cached(t, |rng| {
                let mut perm: Vec<usize> = (0..base.n()).collect();
                perm.shuffle(rng);
                Ok(base.relabel(&perm))
            })?,
        };
        Ok(GraphSnapshot { round: t, graph })
    }

    fn cached<F>(&self, t: Round, make: F) -> Result<Arc<Graph>, ScheduleError>
    where
        F: FnOnce(&mut crate::rng::Rng) -> Result<Graph, ScheduleError>,
    {
        if let Some(g) = self.cache.lock().expect("schedule cache poisoned").get(&t) {
            return Ok(g.clone());
        }
        let mut rng = stream(mix(self.seed, t), 0, Purpose::Schedule, t);
        let g = Arc::new(make(&mut rng)?);
        let mut cache = self.cache.lock().expect("schedule cache poisoned");
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(t, g.clone());
        Ok(g)
    }

    /// Distinct snapshots among rounds `1..=horizon`, in first-seen order.
    pub fn distinct_graphs(&self, horizon: Round) -> Result<Vec<Arc<Graph>>, ScheduleError> {
        let rounds = match self.period() {
            Some(p) => horizon.min(p as Round),
            None => horizon,
        };
        let mut out: Vec<Arc<Graph>> = Vec::new();
        for t in 1..=rounds {
            let g = self.snapshot_at(t)?.graph;
            if !out.iter().any(|h| **h == *g) {
                out.push(g);
            }
        }
        Ok(out)
    }

    /// Writes rounds `1..=rounds` in the JSON Lines schedule format.
    pub fn write_jsonl<W: Write>(&self, rounds: Round, mut out: W) -> Result<(), ScheduleError> {
        let header = FileHeader {
            n: self.n,
            d: self.degree,
            t: rounds,
        };
        writeln!(out, "{}", serde_json::to_string(&header)?)?;
        for t in 1..=rounds {
            let g = self.snapshot_at(t)?;
            let line = FileSnapshot {
                t,
                edges: g
                    .edges()
                    .iter()
                    .map(|&(u, v)| [u.0 as usize, v.0 as usize])
                    .collect(),
            };
            writeln!(out, "{}", serde_json::to_string(&line)?)?;
        }
        Ok(())
    }
}

fn parse_rr(arg: &str) -> Result<(usize, usize), ScheduleError> {
    let mut n = None;
    let mut d = None;
    for part in arg.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| ScheduleError::Parse(format!("expected key=value in {arg:?}")))?;
        let v: usize = v
            .trim()
            .parse()
            .map_err(|_| ScheduleError::Parse(format!("bad number {v:?}")))?;
        match k.trim() {
            "n" => n = Some(v),
            "d" => d = Some(v),
            other => return Err(ScheduleError::Parse(format!("unknown rr key {other:?}"))),
        }
    }
    match (n, d) {
        (Some(n), Some(d)) => Ok((n, d)),
        _ => Err(ScheduleError::Parse(format!(
            "rr needs n and d, got {arg:?}"
        ))),
    }
}

fn resolve_graph(arg: &str) -> Result<Vec<Graph>, ScheduleError> {
    if let Some(g) = named(arg) {
        return Ok(vec![g]);
    }
    let file = read_schedule_file(Path::new(arg))?;
    Ok(file.graphs)
}

#[derive(Debug, Serialize, Deserialize)]
struct FileHeader {
    n: usize,
    d: Option<usize>,
    #[serde(rename = "T")]
    t: Round,
}

#[derive(Debug, Serialize, Deserialize)]
struct FileSnapshot {
    t: Round,
    edges: Vec<[usize; 2]>,
}

/// Contents of a schedule file.
#[derive(Debug)]
pub struct ScheduleFile {
    pub n: usize,
    pub d: Option<usize>,
    pub graphs: Vec<Graph>,
}

pub fn parse_schedule_jsonl<R: BufRead>(reader: R) -> Result<ScheduleFile, ScheduleError> {
    let mut lines = reader
        .lines()
        .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
    let header: FileHeader = match lines.next() {
        Some(line) => serde_json::from_str(&line?)?,
        None => return Err(ScheduleError::Empty),
    };
    let mut graphs = Vec::new();
    for (i, line) in lines.enumerate() {
        let snap: FileSnapshot = serde_json::from_str(&line?)?;
        let expected = i as Round + 1;
        if snap.t != expected {
            return Err(ScheduleError::Parse(format!(
                "expected t={expected}, found t={}",
                snap.t
            )));
        }
        let g =
            Graph::from_edges(header.n, snap.edges.iter().map(|e| (e[0], e[1]))).map_err(|e| {
                ScheduleError::Generation {
                    round: snap.t,
                    source: e,
                }
            })?;
        if let Some(d) = header.d {
            if g.regular_degree() != Some(d) {
                return Err(ScheduleError::Parse(format!(
                    "snapshot t={} is not {d}-regular",
                    snap.t
                )));
            }
        }
        graphs.push(g);
    }
    if graphs.len() as Round != header.t {
        return Err(ScheduleError::Parse(format!(
            "header declares T={} but file has {} snapshots",
            header.t,
            graphs.len()
        )));
    }
    Ok(ScheduleFile {
        n: header.n,
        d: header.d,
        graphs,
    })
}

pub fn read_schedule_file(path: &Path) -> Result<ScheduleFile, ScheduleError> {
    let file = std::fs::File::open(path)
        .map_err(|e| ScheduleError::Parse(format!("cannot open {}: {e}", path.display())))?;
    parse_schedule_jsonl(std::io::BufReader::new(file))
}
