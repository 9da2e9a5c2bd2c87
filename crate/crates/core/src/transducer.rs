//! Image-length transducer and the exact big-integer DP built on it.
//!
//! Appending a letter `b` to a reduced word `w` turns `φ(w)` into
//! `reduce(φ(w) φ(b))`, which only looks at the end of `φ(w)`. A state keeps
//! the last letter of `w` (to know which letters may follow) and the last
//! `window` letters of `φ(w)`, flagged as truncated when `φ(w)` is longer.
//! Construction is a breadth-first search from the empty word; if a
//! cancellation would ever consume the whole stored suffix of a truncated
//! state the window is doubled and the search restarted. A search that
//! finishes is closed: every edge weight is the exact change in `|φ(w)|`.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::joint::{CurlFluxPoint, JointLengthTable};
use crate::limbs;
use crate::morphisms::Endomorphism;
use crate::words::{GroupContext, Letter, Word};

/// Window ceiling as a multiple of the longest generator image.
pub const WINDOW_CEILING_FACTOR: usize = 1 << 10;
pub const DEFAULT_MAX_STATES: usize = 400_000;

#[derive(Clone, Debug)]
pub struct BuildConfig {
    /// Starting window; raised to at least `max_i |φ(x_i)|`.
    pub initial_window: usize,
    pub max_states: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig { initial_window: 0, max_states: DEFAULT_MAX_STATES }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State {
    pub last: Option<Letter>,
    pub suffix: Vec<Letter>,
    pub truncated: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub letter: Letter,
    pub target: usize,
    pub delta: i32,
}

#[derive(Clone, Debug)]
pub struct Transducer {
    ctx: GroupContext,
    window: usize,
    states: Vec<State>,
    edges: Vec<Vec<Edge>>,
}

enum Attempt {
    Closed(Transducer),
    Violation,
}

impl Transducer {
    pub const START: usize = 0;

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn ctx(&self) -> &GroupContext {
        &self.ctx
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn edges(&self, state: usize) -> &[Edge] {
        &self.edges[state]
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn step(&self, state: usize, letter: Letter) -> Option<Edge> {
        self.edges[state].iter().find(|e| e.letter == letter).copied()
    }

    /// Sum of edge weights along `w`'s path, i.e. `|φ(w)|`.
    pub fn path_weight(&self, w: &Word) -> i64 {
        let mut state = Self::START;
        let mut total = 0i64;
        for &l in w.letters() {
            let e = self.step(state, l).expect("reduced words always have an edge");
            total += e.delta as i64;
            state = e.target;
        }
        total
    }

    pub fn min_delta(&self) -> i32 {
        self.edges.iter().flatten().map(|e| e.delta).min().unwrap_or(0)
    }

    pub fn max_delta(&self) -> i32 {
        self.edges.iter().flatten().map(|e| e.delta).max().unwrap_or(0)
    }

    /// Collapse states with identical counting behaviour: same multiset of
    /// `(delta, target class)` over outgoing edges. Letters are forgotten and
    /// parallel edges merge into multiplicities.
    pub fn counting_machine(&self) -> CountingMachine {
        let n = self.states.len();
        let mut class = vec![0usize; n];
        let mut num_classes = 1;
        loop {
            let mut ids: HashMap<(usize, Vec<(i32, usize)>), usize> = HashMap::new();
            let mut next = vec![0usize; n];
            for s in 0..n {
                let mut sig: Vec<(i32, usize)> = self.edges[s].iter().map(|e| (e.delta, class[e.target])).collect();
                sig.sort_unstable();
                let len = ids.len();
                next[s] = *ids.entry((class[s], sig)).or_insert(len);
            }
            let refined = ids.len();
            class = next;
            if refined == num_classes {
                break;
            }
            num_classes = refined;
        }

        let mut representative = vec![usize::MAX; num_classes];
        for s in 0..n {
            if representative[class[s]] == usize::MAX {
                representative[class[s]] = s;
            }
        }
        let transitions = representative
            .iter()
            .map(|&s| {
                let mut merged: Vec<(usize, i32, u64)> = Vec::new();
                for e in &self.edges[s] {
                    let key = (class[e.target], e.delta);
                    match merged.iter_mut().find(|t| (t.0, t.1) == key) {
                        Some(t) => t.2 += 1,
                        None => merged.push((key.0, key.1, 1)),
                    }
                }
                merged.sort_unstable();
                merged
            })
            .collect();
        CountingMachine { start: class[Self::START], transitions }
    }

    pub fn dump(&self) -> TransducerDump {
        let fmt = |w: &[Letter]| -> String { w.iter().map(|&l| self.ctx.letter_char(l)).collect() };
        TransducerDump {
            window: self.window,
            start: Self::START,
            states: self
                .states
                .iter()
                .enumerate()
                .map(|(id, s)| StateDump {
                    id,
                    last: s.last.map(|l| self.ctx.letter_char(l).to_string()),
                    suffix: fmt(&s.suffix),
                    truncated: s.truncated,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .enumerate()
                .flat_map(|(from, es)| {
                    es.iter().map(move |e| EdgeDump {
                        from,
                        letter: self.ctx.letter_char(e.letter).to_string(),
                        to: e.target,
                        delta: e.delta,
                    })
                })
                .collect(),
        }
    }
}

/// JSON-serializable view of a transducer.
#[derive(Clone, Debug, Serialize)]
pub struct TransducerDump {
    pub window: usize,
    pub start: usize,
    pub states: Vec<StateDump>,
    pub edges: Vec<EdgeDump>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StateDump {
    pub id: usize,
    pub last: Option<String>,
    pub suffix: String,
    pub truncated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeDump {
    pub from: usize,
    pub letter: String,
    pub to: usize,
    pub delta: i32,
}

/// Build a closed transducer, doubling the window on closure violations.
pub fn build(phi: &Endomorphism, config: &BuildConfig) -> Result<Transducer> {
    let longest = phi.max_image_len().max(1);
    let ceiling = WINDOW_CEILING_FACTOR * longest;
    let mut window = config.initial_window.max(longest);
    loop {
        match try_build(phi, window, config.max_states)? {
            Attempt::Closed(t) => return Ok(t),
            Attempt::Violation if window * 2 <= ceiling => window *= 2,
            Attempt::Violation => return Err(Error::UnboundedCancellation { window }),
        }
    }
}

fn try_build(phi: &Endomorphism, window: usize, max_states: usize) -> Result<Attempt> {
    let ctx = phi.ctx().clone();
    let start = State { last: None, suffix: Vec::new(), truncated: false };
    let mut index: HashMap<State, usize> = HashMap::new();
    let mut states = vec![start.clone()];
    let mut edges: Vec<Vec<Edge>> = Vec::new();
    index.insert(start, 0);
    let mut queue = VecDeque::from([0usize]);

    while let Some(id) = queue.pop_front() {
        let mut out = Vec::with_capacity(ctx.alphabet_size());
        for b in ctx.letters() {
            if states[id].last == Some(b.inverse()) {
                continue;
            }
            let img = phi.letter_image(b).letters();
            let state = &states[id];
            let cancel = state.suffix.iter().rev().zip(img).take_while(|(a, c)| **a == c.inverse()).count();
            if state.truncated && cancel == state.suffix.len() {
                return Ok(Attempt::Violation);
            }
            let mut suffix = state.suffix[..state.suffix.len() - cancel].to_vec();
            suffix.extend_from_slice(&img[cancel..]);
            let mut truncated = state.truncated;
            if suffix.len() > window {
                suffix.drain(..suffix.len() - window);
                truncated = true;
            }
            let delta = img.len() as i32 - 2 * cancel as i32;
            let next = State { last: Some(b), suffix, truncated };
            let target = match index.get(&next) {
                Some(&t) => t,
                None => {
                    if states.len() >= max_states {
                        return Err(Error::StateBudgetExceeded { budget: max_states, window });
                    }
                    let t = states.len();
                    index.insert(next.clone(), t);
                    states.push(next);
                    queue.push_back(t);
                    t
                }
            };
            out.push(Edge { letter: b, target, delta });
        }
        if edges.len() <= id {
            edges.resize(id + 1, Vec::new());
        }
        edges[id] = out;
    }
    edges.resize(states.len(), Vec::new());
    Ok(Attempt::Closed(Transducer { ctx, window, states, edges }))
}

/// Minimized weighted automaton used by the DP: per state, a list of
/// `(target, delta, multiplicity)`.
#[derive(Clone, Debug)]
pub struct CountingMachine {
    pub start: usize,
    pub transitions: Vec<Vec<(usize, i32, u64)>>,
}

impl CountingMachine {
    pub fn num_states(&self) -> usize {
        self.transitions.len()
    }

    fn min_delta(&self) -> i32 {
        self.transitions.iter().flatten().map(|t| t.1).min().unwrap_or(0)
    }

    fn max_delta(&self) -> i32 {
        self.transitions.iter().flatten().map(|t| t.1).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, Default)]
pub struct DpOptions {
    /// Extra room above the OUT threshold; results must not depend on it.
    pub out_slack: usize,
    /// Abort when the live DP buffers would exceed this many bytes.
    pub memory_budget: Option<usize>,
}

/// One DP level: cells laid out as `[state][m - lo][limb]` with a shared
/// width.
struct Slice {
    width: usize,
    hi: usize,
    cells: Vec<u64>,
}

impl Slice {
    fn per_state(&self) -> usize {
        (self.hi + 1) * self.width
    }

    fn cell(&self, state: usize, m: usize) -> &[u64] {
        let base = state * self.per_state() + m * self.width;
        &self.cells[base..base + self.width]
    }
}

/// Exact joint table up to radius `n`. Rows keep every `m <= n`; a class
/// whose image length exceeds `n + D (n - l)` at level `l`, where `D` is the
/// largest single-step decrease, can never come back below `n` and is moved
/// to the OUT bucket.
pub fn count_joint(t: &Transducer, n: usize, options: &DpOptions) -> Result<JointLengthTable> {
    let ctx = t.ctx();
    let machine = t.counting_machine();
    let states = machine.num_states();
    let drop = (-machine.min_delta()).max(0) as usize;
    let rise = machine.max_delta().max(0) as usize;
    let threshold = |l: usize| n + options.out_slack + drop * (n - l);
    let spheres = ctx.sphere_sizes(n);
    let branching = (ctx.alphabet_size() - 1) as u32;

    // incoming edges per target, for the pull-style update
    let mut incoming: Vec<Vec<(usize, i32, u64)>> = vec![Vec::new(); states];
    for (s, ts) in machine.transitions.iter().enumerate() {
        for &(target, delta, mult) in ts {
            incoming[target].push((s, delta, mult));
        }
    }

    let mut slice = Slice { width: 1, hi: 0, cells: vec![0; states] };
    slice.cells[machine.start] = 1;
    let (row, above) = row_of(&slice, states, n);
    let mut rows = vec![row];
    let mut out = vec![above];
    let mut gone = BigUint::zero();

    for l in 0..n {
        let width = limbs::width_for(&spheres[l + 1]);
        let hi = threshold(l + 1).min((l + 1) * rise);
        let bytes = (states * (hi + 1) * width + slice.cells.len()) * 8;
        if let Some(budget) = options.memory_budget {
            if bytes > budget {
                return Err(Error::MemoryBudgetExceeded { budget, completed: l });
            }
        }
        let mut next = Slice { width, hi, cells: vec![0; states * (hi + 1) * width] };
        let per_state = next.per_state();
        let src = &slice;
        next.cells.par_chunks_mut(per_state).enumerate().for_each(|(target, dst)| {
            for &(s, delta, mult) in &incoming[target] {
                let lo_m = (-delta).max(0) as usize;
                let top = (hi as i64 - delta as i64).min(src.hi as i64);
                if top < lo_m as i64 {
                    continue;
                }
                for m in lo_m..=top as usize {
                    let cell = src.cell(s, m);
                    if limbs::is_zero(cell) {
                        continue;
                    }
                    let d = (m as i64 + delta as i64) as usize * width;
                    limbs::mul_add_into(&mut dst[d..d + width], cell, mult);
                }
            }
        });

        // mass pushed past the threshold
        let mut pruned = vec![0u64; width];
        for (s, ts) in machine.transitions.iter().enumerate() {
            for &(_, delta, mult) in ts {
                let first = (hi as i64 + 1 - delta as i64).max(0) as usize;
                for m in first..=slice.hi {
                    let cell = slice.cell(s, m);
                    if !limbs::is_zero(cell) {
                        limbs::mul_add_into(&mut pruned, cell, mult);
                    }
                }
            }
        }
        gone = gone * branching + limbs::to_biguint(&pruned);
        let (row, above) = row_of(&next, states, n);
        rows.push(row);
        out.push(above + &gone);
        slice = next;
    }
    Ok(JointLengthTable::new(ctx.rank(), rows, out))
}

/// Cells `m <= n` summed over states, and the total mass above `n`.
fn row_of(slice: &Slice, states: usize, n: usize) -> (Vec<BigUint>, BigUint) {
    let mut acc = vec![0u64; slice.width + 1];
    let mut column = |m: usize| {
        acc.iter_mut().for_each(|x| *x = 0);
        for s in 0..states {
            limbs::add_into(&mut acc, slice.cell(s, m));
        }
        limbs::to_biguint(&acc)
    };
    let row = (0..=n).map(|m| if m > slice.hi { BigUint::zero() } else { column(m) }).collect();
    let above = (n + 1..=slice.hi).map(&mut column).sum();
    (row, above)
}

/// Curl/flux counts for every radius `0..=n` from one DP run.
pub fn curl_flux_series_dp(
    phi: &Endomorphism,
    n: usize,
    config: &BuildConfig,
    options: &DpOptions,
) -> Result<Vec<CurlFluxPoint>> {
    let t = build(phi, config)?;
    Ok(count_joint(&t, n, options)?.points(phi.ctx()))
}

pub fn curl_flux_dp(phi: &Endomorphism, n: usize) -> Result<CurlFluxPoint> {
    let series = curl_flux_series_dp(phi, n, &BuildConfig::default(), &DpOptions::default())?;
    Ok(series.into_iter().last().unwrap())
}
