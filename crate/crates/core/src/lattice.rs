//! Edge animals in Z^d: representation, connectivity, perimeter and
//! canonical translation.
//!
//! Vertices are ordered lexicographically with coordinate 0 compared first.
//! That single order is used for edge canonicalisation, for picking the
//! translation representative of an animal, and for the concatenation
//! operation in [`crate::constructions`].
//!
//! Coordinates are `i32`. Every animal produced by the enumeration or the
//! constructions in this crate has coordinates bounded by its edge count,
//! so overflow is out of reach for any size that fits in memory.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lattice point. The derived `Ord` is the lexicographic order used
/// everywhere in the crate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vertex(Vec<i32>);

impl Vertex {
    pub fn new(coords: Vec<i32>) -> Self {
        Vertex(coords)
    }

    pub fn origin(d: usize) -> Self {
        Vertex(vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i32] {
        &self.0
    }

    /// The neighbour one unit away along `axis`, in direction `sign` (±1).
    pub fn step(&self, axis: usize, sign: i32) -> Vertex {
        let mut c = self.0.clone();
        c[axis] += sign;
        Vertex(c)
    }

    pub fn offset(&self, by: &[i32]) -> Vertex {
        Vertex(self.0.iter().zip(by).map(|(a, b)| a + b).collect())
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i32>> for Vertex {
    fn from(c: Vec<i32>) -> Self {
        Vertex(c)
    }
}

/// A nearest-neighbour edge, stored as its lexicographically smaller
/// endpoint and the axis of the unit step to the other endpoint.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    base: Vertex,
    axis: usize,
}

impl Edge {
    pub fn new(base: Vertex, axis: usize) -> Result<Self> {
        if axis >= base.dim() {
            return Err(Error::Parameter(format!(
                "axis {axis} out of range for dimension {}",
                base.dim()
            )));
        }
        Ok(Edge { base, axis })
    }

    /// The edge joining two adjacent vertices, in canonical form.
    pub fn between(a: &Vertex, b: &Vertex) -> Option<Edge> {
        if a.dim() != b.dim() {
            return None;
        }
        let mut axis = None;
        for (i, (x, y)) in a.0.iter().zip(&b.0).enumerate() {
            match (x - y).abs() {
                0 => {}
                1 if axis.is_none() => axis = Some(i),
                _ => return None,
            }
        }
        let axis = axis?;
        let base = if a < b { a.clone() } else { b.clone() };
        Some(Edge { base, axis })
    }

    pub fn base(&self) -> &Vertex {
        &self.base
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn tip(&self) -> Vertex {
        self.base.step(self.axis, 1)
    }

    pub fn endpoints(&self) -> (Vertex, Vertex) {
        (self.base.clone(), self.tip())
    }

    pub fn translate(&self, by: &[i32]) -> Edge {
        Edge {
            base: self.base.offset(by),
            axis: self.axis,
        }
    }

    /// All `2d` edges incident to `v`.
    pub fn incident(v: &Vertex) -> impl Iterator<Item = Edge> + '_ {
        (0..v.dim()).flat_map(move |axis| {
            [
                Edge {
                    base: v.clone(),
                    axis,
                },
                Edge {
                    base: v.step(axis, -1),
                    axis,
                },
            ]
        })
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}-{:?}", self.base, self.tip())
    }
}

/// True iff `edges` is nonempty and its edges form one connected piece
/// (two edges touch when they share an endpoint).
pub fn is_connected<'a, I>(edges: I) -> bool
where
    I: IntoIterator<Item = &'a Edge>,
{
    let edges: Vec<&Edge> = edges.into_iter().collect();
    let Some(first) = edges.first() else {
        return false;
    };
    let mut adjacency: std::collections::HashMap<Vertex, Vec<Vertex>> = Default::default();
    for e in &edges {
        let (a, b) = e.endpoints();
        adjacency.entry(a.clone()).or_default().push(b.clone());
        adjacency.entry(b).or_default().push(a);
    }
    let start = first.base().clone();
    let mut seen: HashSet<Vertex> = HashSet::new();
    let mut queue = VecDeque::from([start.clone()]);
    seen.insert(start);
    while let Some(v) = queue.pop_front() {
        for w in &adjacency[&v] {
            if seen.insert(w.clone()) {
                queue.push_back(w.clone());
            }
        }
    }
    seen.len() == adjacency.len()
}

/// A finite connected, nonempty set of edges of Z^d.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Animal {
    d: usize,
    edges: BTreeSet<Edge>,
}

impl fmt::Debug for Animal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Animal")
            .field("d", &self.d)
            .field("edges", &self.edges)
            .finish()
    }
}

impl Animal {
    pub fn new(d: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        let edges: BTreeSet<Edge> = edges.into_iter().collect();
        if edges.is_empty() {
            return Err(Error::EmptyAnimal);
        }
        if let Some(e) = edges.iter().find(|e| e.base.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: e.base.dim(),
            });
        }
        if !is_connected(&edges) {
            return Err(Error::Disconnected);
        }
        Ok(Animal { d, edges })
    }

    /// Build from `(from, to)` vertex pairs, which must be unit steps apart.
    pub fn from_pairs<V: Into<Vertex>>(
        d: usize,
        pairs: impl IntoIterator<Item = (V, V)>,
    ) -> Result<Self> {
        let mut edges = Vec::new();
        for (a, b) in pairs {
            let (a, b) = (a.into(), b.into());
            let e = Edge::between(&a, &b).ok_or_else(|| {
                Error::Parameter(format!("{a:?} and {b:?} are not lattice neighbours"))
            })?;
            edges.push(e);
        }
        Animal::new(d, edges)
    }


    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.edges.contains(e)
    }

    pub fn vertices(&self) -> BTreeSet<Vertex> {
        let mut vs = BTreeSet::new();
        for e in &self.edges {
            vs.insert(e.base.clone());
            vs.insert(e.tip());
        }
        vs
    }

    pub fn translate(&self, by: &[i32]) -> Animal {
        Animal {
            d: self.d,
            edges: self.edges.iter().map(|e| e.translate(by)).collect(),
        }
    }

    /// Lexicographically minimal vertex. The minimal edge's base is always
    /// the minimal vertex, since every tip exceeds its own base.
    pub fn lex_min_vertex(&self) -> &Vertex {
        &self.edges.first().expect("animals are nonempty").base
    }

    pub fn is_normalized(&self) -> bool {
        self.lex_min_vertex().is_origin()
    }
}

/// Exact per-animal counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnimalStats {
    /// Edges.
    pub n: usize,
    /// Outlying (perimeter) edges.
    pub m: usize,
    /// Vertices.
    pub v: usize,
    /// Cyclomatic index `n - v + 1`.
    pub c: usize,
    /// Outlying edges with both endpoints in the vertex set.
    pub k_contacts: usize,
    /// Outlying edges with exactly one endpoint in the vertex set.
    pub s_solvents: usize,
}

impl AnimalStats {
    /// `2(d-1)n + 2d`, the largest perimeter an `n`-edge animal can have.
    pub fn max_perimeter(d: usize, n: usize) -> usize {
        2 * (d - 1) * n + 2 * d
    }

    /// `s + 2k + 2c == 2(d-1)v + 2`.
    pub fn satisfies_contact_identity(&self, d: usize) -> bool {
        self.s_solvents + 2 * self.k_contacts + 2 * self.c == 2 * (d - 1) * self.v + 2
    }

    /// `m == 2(d-1)n + 2d - k - 2dc`, the same identity eliminated to `n`.
    pub fn satisfies_perimeter_identity(&self, d: usize) -> bool {
        self.m + self.k_contacts + 2 * d * self.c == Self::max_perimeter(d, self.n)
    }
}

pub fn compute_stats(animal: &Animal) -> Result<AnimalStats> {
    if animal.edges.is_empty() {
        return Err(Error::EmptyAnimal);
    }
    if !is_connected(&animal.edges) {
        return Err(Error::Disconnected);
    }
    let vertices: HashSet<Vertex> = animal.vertices().into_iter().collect();
    let mut outlying: HashSet<Edge> = HashSet::new();
    for v in &vertices {
        for e in Edge::incident(v) {
            if !animal.edges.contains(&e) {
                outlying.insert(e);
            }
        }
    }
    let k_contacts = outlying
        .iter()
        .filter(|e| vertices.contains(&e.base) && vertices.contains(&e.tip()))
        .count();
    let n = animal.edges.len();
    let v = vertices.len();
    Ok(AnimalStats {
        n,
        m: outlying.len(),
        v,
        c: n + 1 - v,
        k_contacts,
        s_solvents: outlying.len() - k_contacts,
    })
}

/// The translate whose lexicographically minimal vertex is the origin.
pub fn normalize_lex_min(animal: &Animal) -> Result<Animal> {
    if animal.edges.is_empty() {
        return Err(Error::EmptyAnimal);
    }
    let shift: Vec<i32> = animal.lex_min_vertex().0.iter().map(|c| -c).collect();
    Ok(animal.translate(&shift))
}

/// `(lex-min vertex, lex-max vertex)`.
pub fn lex_extreme_vertices(animal: &Animal) -> Result<(Vertex, Vertex)> {
    if animal.edges.is_empty() {
        return Err(Error::EmptyAnimal);
    }
    let lo = animal.lex_min_vertex().clone();
    // Largest tip wins: a base is never the maximum of its own edge.
    let hi = animal
        .edges
        .iter()
        .map(Edge::tip)
        .max()
        .expect("nonempty");
    Ok((lo, hi))
}

/// Test-fixture form: `{"d": 2, "edges": [[[0,0], 0], ...]}`.
#[derive(Serialize, Deserialize)]
struct AnimalFixture {
    d: usize,
    edges: Vec<(Vec<i32>, usize)>,
}

impl Serialize for Animal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AnimalFixture {
            d: self.d,
            edges: self
                .edges
                .iter()
                .map(|e| (e.base.0.clone(), e.axis))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Animal {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let fx = AnimalFixture::deserialize(de)?;
        let edges = fx
            .edges
            .into_iter()
            .map(|(c, axis)| Edge::new(Vertex(c), axis))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Animal::new(fx.d, edges).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i32]) -> Vertex {
        Vertex(c.to_vec())
    }

    fn animal(d: usize, pairs: &[(&[i32], &[i32])]) -> Animal {
        Animal::from_pairs(d, pairs.iter().map(|(a, b)| (v(a), v(b)))).unwrap()
    }

    /// Perimeter by scanning every edge in the bounding box inflated by one.
    fn brute_perimeter(a: &Animal) -> usize {
        let vs = a.vertices();
        let d = a.dim();
        let lo: Vec<i32> = (0..d).map(|i| vs.iter().map(|x| x.0[i]).min().unwrap() - 1).collect();
        let hi: Vec<i32> = (0..d).map(|i| vs.iter().map(|x| x.0[i]).max().unwrap() + 1).collect();
        let mut count = 0;
        let mut cur = lo.clone();
        loop {
            for axis in 0..d {
                let e = Edge { base: Vertex(cur.clone()), axis };
                let touches = vs.contains(&e.base) || vs.contains(&e.tip());
                if touches && !a.contains(&e) {
                    count += 1;
                }
            }
            let mut i = 0;
            loop {
                if i == d {
                    return count;
                }
                cur[i] += 1;
                if cur[i] <= hi[i] {
                    break;
                }
                cur[i] = lo[i];
                i += 1;
            }
        }
    }

    #[test]
    fn single_edge_stats() {
        let a = animal(2, &[(&[0, 0], &[1, 0])]);
        let s = compute_stats(&a).unwrap();
        assert_eq!((s.n, s.m, s.v, s.c, s.k_contacts, s.s_solvents), (1, 6, 2, 0, 0, 6));
        assert_eq!(brute_perimeter(&a), 6);
    }

    #[test]
    fn straight_path_stats() {
        let a = animal(2, &[(&[0, 0], &[1, 0]), (&[1, 0], &[2, 0])]);
        assert_eq!(compute_stats(&a).unwrap().m, 8);
        assert_eq!(brute_perimeter(&a), 8);
    }

    #[test]
    fn unit_square_stats() {
        let a = animal(
            2,
            &[
                (&[0, 0], &[1, 0]),
                (&[1, 0], &[1, 1]),
                (&[1, 1], &[0, 1]),
                (&[0, 1], &[0, 0]),
            ],
        );
        let s = compute_stats(&a).unwrap();
        assert_eq!((s.n, s.v, s.c, s.m, s.k_contacts, s.s_solvents), (4, 4, 1, 8, 0, 8));
        assert!(s.satisfies_contact_identity(2));
        assert!(s.satisfies_perimeter_identity(2));
    }

    #[test]
    fn u_shape_has_a_contact() {
        let a = animal(2, &[(&[0, 0], &[1, 0]), (&[1, 0], &[1, 1]), (&[1, 1], &[0, 1])]);
        let s = compute_stats(&a).unwrap();
        assert_eq!(s.k_contacts, 1);
        assert_eq!(s.m, 9);
        assert!(s.satisfies_contact_identity(2));
    }

    #[test]
    fn stats_reject_disconnected() {
        let e1 = Edge::new(v(&[0, 0]), 0).unwrap();
        let e2 = Edge::new(v(&[0, 2]), 0).unwrap();
        let a = Animal {
            d: 2,
            edges: [e1, e2].into_iter().collect(),
        };
        assert!(matches!(compute_stats(&a), Err(Error::Disconnected)));
        assert!(matches!(Animal::new(2, a.edges.clone()), Err(Error::Disconnected)));
        assert!(matches!(Animal::new(2, []), Err(Error::EmptyAnimal)));
    }

    #[test]
    fn normalize_translates_to_origin() {
        let a = Animal::new(2, [Edge::new(v(&[5, 3]), 0).unwrap()]).unwrap();
        let n = normalize_lex_min(&a).unwrap();
        assert_eq!(n.edges().iter().next().unwrap(), &Edge::new(v(&[0, 0]), 0).unwrap());
        assert_eq!(normalize_lex_min(&n).unwrap(), n);
    }

    #[test]
    fn extremes() {
        let h = animal(2, &[(&[0, 0], &[1, 0])]);
        assert_eq!(lex_extreme_vertices(&h).unwrap(), (v(&[0, 0]), v(&[1, 0])));
        let l = animal(2, &[(&[0, 0], &[1, 0]), (&[1, 0], &[1, 1])]);
        assert_eq!(lex_extreme_vertices(&l).unwrap(), (v(&[0, 0]), v(&[1, 1])));
        let vert = animal(2, &[(&[0, 0], &[0, 1])]);
        assert_eq!(lex_extreme_vertices(&vert).unwrap(), (v(&[0, 0]), v(&[0, 1])));
        // The max vertex need not be the tip of the max edge's base.
        let t = animal(2, &[(&[0, 0], &[0, 1]), (&[0, 1], &[1, 1]), (&[1, 1], &[1, 0])]);
        assert_eq!(lex_extreme_vertices(&t).unwrap().1, v(&[1, 1]));
    }

    #[test]
    fn connectivity() {
        let e = |c: &[i32], ax| Edge::new(v(c), ax).unwrap();
        assert!(!is_connected(&Vec::<Edge>::new()));
        assert!(is_connected(&[e(&[0, 0], 0), e(&[1, 0], 1)]));
        assert!(!is_connected(&[e(&[0, 0], 0), e(&[0, 1], 0)]));
    }

    #[test]
    fn edge_between_rejects_non_neighbours() {
        assert!(Edge::between(&v(&[0, 0]), &v(&[1, 1])).is_none());
        assert!(Edge::between(&v(&[0, 0]), &v(&[2, 0])).is_none());
        assert!(Edge::between(&v(&[0, 0]), &v(&[0, 0])).is_none());
        let e = Edge::between(&v(&[1, 0]), &v(&[0, 0])).unwrap();
        assert_eq!(e.base(), &v(&[0, 0]));
    }

    #[test]
    fn fixture_json_round_trip() {
        let a = animal(3, &[(&[0, 0, 0], &[0, 0, 1]), (&[0, 0, 1], &[1, 0, 1])]);
        let js = serde_json::to_string(&a).unwrap();
        assert_eq!(js, r#"{"d":3,"edges":[[[0,0,0],2],[[0,0,1],0]]}"#);
        let back: Animal = serde_json::from_str(&js).unwrap();
        assert_eq!(back, a);
        let bad = r#"{"d":2,"edges":[[[0,0],0],[[5,5],0]]}"#;
        assert!(serde_json::from_str::<Animal>(bad).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        /// Random walk-grown animals: connected by construction.
        fn grown(d: usize) -> impl Strategy<Value = Animal> {
            prop::collection::vec((0..d, any::<bool>(), 0usize..64, -20i32..20), 1..14).prop_map(
                move |steps| {
                    let mut edges: BTreeSet<Edge> = BTreeSet::new();
                    let mut verts: Vec<Vertex> = vec![Vertex(vec![steps[0].3; d])];
                    for (axis, up, pick, _) in steps {
                        let from = verts[pick % verts.len()].clone();
                        let to = from.step(axis, if up { 1 } else { -1 });
                        edges.insert(Edge::between(&from, &to).unwrap());
                        verts.push(to);
                    }
                    Animal::new(d, edges).unwrap()
                },
            )
        }

        proptest! {
            #[test]
            fn identities_hold(a in prop_oneof![grown(2), grown(3)]) {
                let d = a.dim();
                let s = compute_stats(&a).unwrap();
                prop_assert_eq!(s.m, s.k_contacts + s.s_solvents);
                prop_assert!(s.satisfies_contact_identity(d));
                prop_assert!(s.satisfies_perimeter_identity(d));
                prop_assert!(s.m <= AnimalStats::max_perimeter(d, s.n));
                prop_assert_eq!(s.m == AnimalStats::max_perimeter(d, s.n), s.c == 0 && s.k_contacts == 0);
                prop_assert_eq!(s.m, brute_perimeter(&a));
            }

            #[test]
            fn normalization_is_idempotent_and_stats_invariant(a in grown(2)) {
                let n = normalize_lex_min(&a).unwrap();
                prop_assert!(n.is_normalized());
                prop_assert_eq!(normalize_lex_min(&n).unwrap(), n.clone());
                prop_assert_eq!(compute_stats(&a).unwrap(), compute_stats(&n).unwrap());
            }
        }
    }
}
