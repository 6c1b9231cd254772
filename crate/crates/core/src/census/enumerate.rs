//! Rooted backtracking enumeration of edge animals (Redelmeier's scheme on
//! the edge-adjacency graph of Z^d).
//!
//! Lattice sites live in a dense box indexed with coordinate 0 most
//! significant, so integer order on vertex indices is the lexicographic
//! vertex order and edge index `vertex * d + axis` orders edges by
//! `(base, axis)`. The minimal edge of an animal has the animal's minimal
//! vertex as its base; fixing that edge at the origin and only admitting
//! larger edges produces every translation class exactly once.
//!
//! Perimeter, contact and vertex counts are maintained incrementally from
//! per-vertex degrees.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{CensusEntry, CensusTable};
use crate::error::{Error, Result};
use crate::lattice::{Animal, AnimalStats, Edge, Vertex};

/// Animals of this many edges are handed out as independent work units.
const SPLIT_DEPTH: usize = 5;

/// Refuse boxes with more edge slots than this.
const MAX_EDGE_SLOTS: usize = 1 << 28;

#[derive(Clone, Debug)]
struct Geometry {
    d: usize,
    n_max: usize,
    side: usize,
    offset: i32,
    strides: Vec<usize>,
    origin: usize,
}

impl Geometry {
    fn new(d: usize, n_max: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        if n_max == 0 {
            return Err(Error::Parameter("n_max must be at least 1".into()));
        }
        // Animal vertices sit within distance n_max of the origin, their
        // perimeter one step further; two layers of padding cover both.
        let side = 2 * n_max + 5;
        let slots = (side as u128).pow(d as u32) * d as u128;
        if slots > MAX_EDGE_SLOTS as u128 {
            return Err(Error::ResourceLimit(format!(
                "lattice box for d={d}, n_max={n_max} needs {slots} edge slots"
            )));
        }
        let offset = (n_max + 2) as i32;
        let strides: Vec<usize> = (0..d).map(|i| side.pow((d - 1 - i) as u32)).collect();
        let origin = strides.iter().map(|s| s * offset as usize).sum();
        Ok(Geometry {
            d,
            n_max,
            side,
            offset,
            strides,
            origin,
        })
    }

    fn vertex_slots(&self) -> usize {
        self.side.pow(self.d as u32)
    }

    fn vertex(&self, idx: usize) -> Vertex {
        let coords = self
            .strides
            .iter()
            .map(|&s| ((idx / s) % self.side) as i32 - self.offset)
            .collect();
        Vertex::new(coords)
    }

    fn edge(&self, idx: u32) -> Edge {
        let idx = idx as usize;
        Edge::new(self.vertex(idx / self.d), idx % self.d).expect("axis in range")
    }
}

/// One enumerated animal, as seen by an [`AnimalVisitor`].
pub struct Frame<'a> {
    pub n: usize,
    pub m: usize,
    pub v: usize,
    pub k_contacts: usize,
    geometry: &'a Geometry,
    edges: &'a [u32],
}

impl Frame<'_> {
    pub fn stats(&self) -> AnimalStats {
        AnimalStats {
            n: self.n,
            m: self.m,
            v: self.v,
            c: self.n + 1 - self.v,
            k_contacts: self.k_contacts,
            s_solvents: self.m - self.k_contacts,
        }
    }

    /// Materialise the animal (already normalised to the origin).
    pub fn to_animal(&self) -> Animal {
        Animal::new(
            self.geometry.d,
            self.edges.iter().map(|&e| self.geometry.edge(e)),
        )
        .expect("enumerated animals are connected")
    }
}

pub trait AnimalVisitor {
    fn visit(&mut self, frame: &Frame<'_>);
}

impl AnimalVisitor for () {
    #[inline]
    fn visit(&mut self, _: &Frame<'_>) {}
}

impl<F: FnMut(&Frame<'_>)> AnimalVisitor for F {
    fn visit(&mut self, frame: &Frame<'_>) {
        self(frame)
    }
}

/// Dense per-`(n, m)` tallies.
#[derive(Clone, Debug)]
struct Tally {
    rows: Vec<Vec<CensusEntry>>,
}

impl Tally {
    fn new(d: usize, n_max: usize) -> Self {
        Tally {
            rows: (0..=n_max)
                .map(|n| vec![CensusEntry::default(); AnimalStats::max_perimeter(d, n) + 1])
                .collect(),
        }
    }

    fn merge(mut self, other: Tally) -> Result<Tally> {
        for (a, b) in self.rows.iter_mut().zip(other.rows) {
            for (x, y) in a.iter_mut().zip(b) {
                x.sigma_prime = x
                    .sigma_prime
                    .checked_add(y.sigma_prime)
                    .ok_or_else(|| Error::ResourceLimit("class count overflow".into()))?;
                x.vertex_weighted = x
                    .vertex_weighted
                    .checked_add(y.vertex_weighted)
                    .ok_or_else(|| Error::ResourceLimit("vertex-weighted count overflow".into()))?;
            }
        }
        Ok(self)
    }

    fn into_table(self, d: usize, n_max: usize) -> CensusTable {
        let mut entries = BTreeMap::new();
        for (n, row) in self.rows.into_iter().enumerate() {
            for (m, e) in row.into_iter().enumerate() {
                if e.sigma_prime > 0 {
                    entries.insert((n, m), e);
                }
            }
        }
        CensusTable::from_entries(d, n_max, entries)
    }
}

/// A subtree of the search, rooted at an animal of `SPLIT_DEPTH` edges.
struct Task {
    root: u32,
    edges: Vec<u32>,
    untried: Vec<u32>,
    reached: Vec<u32>,
}

struct Walker<'g, V> {
    g: &'g Geometry,
    degree: Vec<u8>,
    reached: Vec<bool>,
    marked: Vec<u32>,
    current: Vec<u32>,
    m: usize,
    k: usize,
    v: usize,
    tally: Tally,
    visitor: V,
}

impl<'g, V: AnimalVisitor> Walker<'g, V> {
    fn new(g: &'g Geometry, visitor: V) -> Self {
        Walker {
            g,
            degree: vec![0; g.vertex_slots()],
            reached: vec![false; g.vertex_slots() * g.d],
            marked: Vec::new(),
            current: Vec::with_capacity(g.n_max),
            m: 0,
            k: 0,
            v: 0,
            tally: Tally::new(g.d, g.n_max),
            visitor,
        }
    }

    #[inline]
    fn endpoints(&self, e: u32) -> (usize, usize) {
        let e = e as usize;
        let u = e / self.g.d;
        (u, u + self.g.strides[e % self.g.d])
    }

    /// Incremental add; returns the previous `(m, k, v)` for undo.
    #[inline]
    fn add(&mut self, e: u32) -> (usize, usize, usize) {
        let saved = (self.m, self.k, self.v);
        let (u, w) = self.endpoints(e);
        let d = self.g.d;
        match (self.degree[u] > 0, self.degree[w] > 0) {
            (true, true) => {
                self.m -= 1;
                self.k -= 1;
            }
            (true, false) | (false, true) => self.m -= 1,
            (false, false) => {}
        }
        for x in [u, w] {
            if self.degree[x] == 0 {
                self.v += 1;
                for axis in 0..d {
                    let s = self.g.strides[axis];
                    for (f, y) in [(x * d + axis, x + s), ((x - s) * d + axis, x - s)] {
                        if f == e as usize {
                            continue;
                        }
                        if self.degree[y] == 0 {
                            self.m += 1;
                        } else {
                            self.k += 1;
                        }
                    }
                }
            }
            self.degree[x] += 1;
        }
        self.current.push(e);
        saved
    }

    #[inline]
    fn remove(&mut self, e: u32, saved: (usize, usize, usize)) {
        let (u, w) = self.endpoints(e);
        self.degree[u] -= 1;
        self.degree[w] -= 1;
        self.current.pop();
        (self.m, self.k, self.v) = saved;
    }

    #[inline]
    fn record(&mut self) {
        let n = self.current.len();
        let cell = &mut self.tally.rows[n][self.m];
        cell.sigma_prime += 1;
        cell.vertex_weighted += self.v as u64;
        let frame = Frame {
            n,
            m: self.m,
            v: self.v,
            k_contacts: self.k,
            geometry: self.g,
            edges: &self.current,
        };
        self.visitor.visit(&frame);
    }

    fn mark(&mut self, f: u32) {
        self.reached[f as usize] = true;
        self.marked.push(f);
    }

    fn unmark_to(&mut self, len: usize) {
        for f in self.marked.drain(len..) {
            self.reached[f as usize] = false;
        }
    }

    /// Push unreached neighbours of `e` larger than `root` onto `next`.
    #[inline]
    fn extend_untried(&mut self, root: u32, e: u32, next: &mut Vec<u32>) {
        let (u, w) = self.endpoints(e);
        let d = self.g.d;
        for x in [u, w] {
            for axis in 0..d {
                let s = self.g.strides[axis];
                for f in [(x * d + axis) as u32, ((x - s) * d + axis) as u32] {
                    if f > root && !self.reached[f as usize] {
                        self.mark(f);
                        next.push(f);
                    }
                }
            }
        }
    }

    fn grow(&mut self, root: u32, mut untried: Vec<u32>, mut split: Option<&mut Vec<Task>>) {
        while let Some(e) = untried.pop() {
            let saved = self.add(e);
            self.record();
            let n = self.current.len();
            if n < self.g.n_max {
                let mark = self.marked.len();
                let mut next = untried.clone();
                self.extend_untried(root, e, &mut next);
                match split.as_deref_mut() {
                    Some(tasks) if n == SPLIT_DEPTH => tasks.push(Task {
                        root,
                        edges: self.current.clone(),
                        untried: next,
                        reached: self.marked.clone(),
                    }),
                    _ => self.grow(root, next, split.as_deref_mut()),
                }
                self.unmark_to(mark);
            }
            self.remove(e, saved);
        }
    }

    fn run_roots(&mut self, mut split: Option<&mut Vec<Task>>) {
        for axis in 0..self.g.d {
            let root = (self.g.origin * self.g.d + axis) as u32;
            self.mark(root);
            self.grow(root, vec![root], split.as_deref_mut());
            self.unmark_to(0);
        }
    }

    fn run_task(&mut self, task: &Task) {
        for &f in &task.reached {
            self.mark(f);
        }
        for &e in &task.edges {
            self.add(e);
        }
        self.grow(task.root, task.untried.clone(), None);
    }
}

/// Exact census of translation classes with `1 ≤ n ≤ n_max`.
///
/// The search tree is cut at a fixed depth and the subtrees are counted on
/// up to `parallelism` threads; partial tallies are summed, so the result
/// does not depend on the thread count.
pub fn enumerate_census(d: usize, n_max: usize, parallelism: usize) -> Result<CensusTable> {
    let g = Geometry::new(d, n_max)?;
    if parallelism <= 1 || n_max <= SPLIT_DEPTH {
        let mut w = Walker::new(&g, ());
        w.run_roots(None);
        return Ok(w.tally.into_table(d, n_max));
    }
    let mut tasks = Vec::new();
    let mut prefix = Walker::new(&g, ());
    prefix.run_roots(Some(&mut tasks));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::ResourceLimit(format!("thread pool: {e}")))?;
    let merged = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| {
                // The task's own root animal was tallied by the prefix pass;
                // run_task only records strictly larger descendants.
                let mut w = Walker::new(&g, ());
                w.run_task(t);
                Ok(w.tally)
            })
            .try_reduce(|| Tally::new(d, n_max), Tally::merge)
    })?;
    merged.merge(prefix.tally).map(|t| t.into_table(d, n_max))
}

/// Serial enumeration that shows every animal to `visitor`.
pub fn enumerate_with_visitor<V: AnimalVisitor>(
    d: usize,
    n_max: usize,
    visitor: V,
) -> Result<CensusTable> {
    let g = Geometry::new(d, n_max)?;
    let mut w = Walker::new(&g, visitor);
    w.run_roots(None);
    Ok(w.tally.into_table(d, n_max))
}

/// Result of checking the perimeter bound and the contact identity on
/// every enumerated animal.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct IdentityAudit {
    pub animals: u64,
    pub bound_violations: u64,
    pub identity_violations: u64,
    pub first_violation: Option<String>,
}

pub fn audit_identities(d: usize, n_max: usize) -> Result<IdentityAudit> {
    let mut audit = IdentityAudit::default();
    let mut visit = |f: &Frame<'_>| {
        let s = f.stats();
        audit.animals += 1;
        let bound_ok = s.m <= AnimalStats::max_perimeter(d, s.n);
        let ident_ok = s.satisfies_contact_identity(d) && s.satisfies_perimeter_identity(d);
        if !bound_ok {
            audit.bound_violations += 1;
        }
        if !ident_ok {
            audit.identity_violations += 1;
        }
        if (!bound_ok || !ident_ok) && audit.first_violation.is_none() {
            audit.first_violation = Some(format!("{:?} with {s:?}", f.to_animal()));
        }
    };
    enumerate_with_visitor(d, n_max, &mut visit)?;
    Ok(audit)
}
