//! The halfturn group `G_{m,k}` and the vertex/circle skeleton it permutes.
//!
//! `G_{m,k}` is generated by the halfturns about the great circles
//! `γ_{j,l}` through `P_j` and `Q_l`, `0 ≤ j ≤ k`, `0 ≤ l ≤ m`. It has
//! order `2(m+1)(k+1)`. The larger symmetry groups of the Lawson surface
//! (orders `4(m+1)(k+1)` in SO(4) and `8(m+1)(k+1)` in O(4)) are not built
//! here.

use std::collections::VecDeque;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::TriMesh;
use crate::sphere::{halfturn, GreatCircle, Point4, Rotation4};
use crate::spatial::PointGrid;
use crate::tolerance::TOL;

/// The pair `(m, k)` with `m ≥ k ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct LawsonParams {
    m: u32,
    k: u32,
}

#[derive(Deserialize)]
struct RawParams {
    m: u32,
    k: u32,
}

impl TryFrom<RawParams> for LawsonParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        LawsonParams::new(raw.m, raw.k)
    }
}

impl LawsonParams {
    /// Swaps the arguments if needed so that `m ≥ k`.
    pub fn new(m: u32, k: u32) -> Result<Self> {
        if m == 0 || k == 0 {
            return Err(Error::InvalidParams(format!(
                "m and k must be positive, got ({m}, {k})"
            )));
        }
        let (m, k) = if m >= k { (m, k) } else { (k, m) };
        Ok(LawsonParams { m, k })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn genus(&self) -> u64 {
        self.m as u64 * self.k as u64
    }

    /// `|G_{m,k}| = 2(m+1)(k+1)`.
    pub fn group_order(&self) -> usize {
        2 * (self.m as usize + 1) * (self.k as usize + 1)
    }

    /// Number of tetrahedral tiles, `4(m+1)(k+1)`.
    pub fn tile_count(&self) -> usize {
        2 * self.group_order()
    }

    /// Number of `P_j`, i.e. `2k+2`.
    pub fn p_count(&self) -> usize {
        2 * self.k as usize + 2
    }

    /// Number of `Q_l`, i.e. `2m+2`.
    pub fn q_count(&self) -> usize {
        2 * self.m as usize + 2
    }

    /// Angular step between consecutive `P_j` along `γ`.
    pub fn p_step(&self) -> f64 {
        PI / (self.k as f64 + 1.0)
    }

    /// Angular step between consecutive `Q_l` along `γ⊥`.
    pub fn q_step(&self) -> f64 {
        PI / (self.m as f64 + 1.0)
    }

    /// `P_j`, index taken mod `2k+2`.
    pub fn p(&self, j: i64) -> Point4 {
        let j = j.rem_euclid(self.p_count() as i64);
        let t = j as f64 * self.p_step();
        Point4::new(0.0, 0.0, t.cos(), t.sin())
    }

    /// `Q_l`, index taken mod `2m+2`.
    pub fn q(&self, l: i64) -> Point4 {
        let l = l.rem_euclid(self.q_count() as i64);
        let t = l as f64 * self.q_step();
        Point4::new(t.cos(), t.sin(), 0.0, 0.0)
    }
}

/// All `P_j` and all `Q_l`.
pub fn canonical_vertices(params: &LawsonParams) -> (Vec<Point4>, Vec<Point4>) {
    let ps = (0..params.p_count() as i64).map(|j| params.p(j)).collect();
    let qs = (0..params.q_count() as i64).map(|l| params.q(l)).collect();
    (ps, qs)
}

/// The great circle `γ_{j,l}` through `P_j` and `Q_l`.
pub fn gamma(params: &LawsonParams, j: i64, l: i64) -> GreatCircle {
    GreatCircle::from_orthonormal(params.p(j), params.q(l))
        .expect("P_j and Q_l lie in orthogonal coordinate blocks")
}

/// Halfturns about `γ_{j,l}` for `0 ≤ j ≤ k`, `0 ≤ l ≤ m`, ordered by `j` then `l`.
pub fn generators(params: &LawsonParams) -> Vec<Rotation4> {
    let mut out = Vec::with_capacity((params.k as usize + 1) * (params.m as usize + 1));
    for j in 0..=params.k as i64 {
        for l in 0..=params.m as i64 {
            out.push(halfturn(&gamma(params, j, l)));
        }
    }
    out
}

/// Default cap handed to [`generate_group`] for a given parameter pair.
pub fn default_max_order(params: &LawsonParams) -> usize {
    16 * (params.m as usize + 1) * (params.k as usize + 1)
}

/// A finite subgroup of SO(4) with a shortest generator word per element.
#[derive(Debug, Clone)]
pub struct Group {
    elements: Vec<Rotation4>,
    words: Vec<Vec<usize>>,
    generators: Vec<Rotation4>,
    dedup_tol: f64,
}

impl Group {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Rotation4] {
        &self.elements
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    pub fn generators(&self) -> &[Rotation4] {
        &self.generators
    }

    pub fn dedup_tol(&self) -> f64 {
        self.dedup_tol
    }

    /// Index of the element within `dedup_tol` of `r`, if any.
    pub fn find(&self, r: &Rotation4) -> Option<usize> {
        self.elements
            .iter()
            .position(|e| e.frobenius_distance(r) < self.dedup_tol)
    }

    /// Product of the generators named by `word`, left to right.
    pub fn evaluate_word(&self, word: &[usize]) -> Option<Rotation4> {
        word.iter().try_fold(Rotation4::identity(), |acc, &i| {
            self.generators.get(i).map(|g| acc * *g)
        })
    }

    /// Checks closure, identity, inverses, distinctness and the word table.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::MalformedGroup(msg));
        if self.find(&Rotation4::identity()).is_none() {
            return bad("identity missing".into());
        }
        for (i, a) in self.elements.iter().enumerate() {
            for b in &self.elements[i + 1..] {
                if a.frobenius_distance(b) < self.dedup_tol {
                    return bad(format!("duplicate element at index {i}"));
                }
            }
            if self.find(&a.inverse()).is_none() {
                return bad(format!("inverse of element {i} missing"));
            }
            for b in &self.elements {
                if self.find(&(a * b)).is_none() {
                    return bad(format!("product with element {i} escapes the set"));
                }
            }
        }
        for (i, (e, w)) in self.elements.iter().zip(&self.words).enumerate() {
            match self.evaluate_word(w) {
                Some(r) if r.frobenius_distance(e) < self.dedup_tol => {}
                _ => return bad(format!("word of element {i} does not reproduce it")),
            }
        }
        Ok(())
    }

    /// Row-major matrices and generator words.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GroupDocument::from(self)).expect("plain data serializes")
    }

    /// Decode and fully validate a document produced by [`Group::to_json`].
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GroupDocument =
            serde_json::from_str(text).map_err(|e| Error::MalformedGroup(e.to_string()))?;
        doc.into_group().map_err(|e| match e {
            Error::MalformedGroup(_) => e,
            other => Error::MalformedGroup(other.to_string()),
        })
    }
}

/// Serialized form of a [`Group`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupDocument {
    pub dedup_tol: f64,
    pub generators: Vec<Vec<f64>>,
    pub elements: Vec<GroupElementDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupElementDocument {
    pub matrix: Vec<f64>,
    pub word: Vec<usize>,
}

impl From<&Group> for GroupDocument {
    fn from(g: &Group) -> Self {
        GroupDocument {
            dedup_tol: g.dedup_tol,
            generators: g.generators.iter().map(|r| r.to_row_major().to_vec()).collect(),
            elements: g
                .elements
                .iter()
                .zip(&g.words)
                .map(|(r, w)| GroupElementDocument {
                    matrix: r.to_row_major().to_vec(),
                    word: w.clone(),
                })
                .collect(),
        }
    }
}

/// Decoded documents larger than this are rejected before validation.
const MAX_DECODED_ORDER: usize = 4096;

impl GroupDocument {
    pub fn into_group(self) -> Result<Group> {
        if !(self.dedup_tol.is_finite() && self.dedup_tol > 0.0 && self.dedup_tol < 1.0) {
            return Err(Error::MalformedGroup(format!("dedup_tol {}", self.dedup_tol)));
        }
        if self.elements.len() > MAX_DECODED_ORDER || self.generators.len() > MAX_DECODED_ORDER {
            return Err(Error::MalformedGroup("too many elements".into()));
        }
        let generators = self
            .generators
            .iter()
            .map(|m| Rotation4::from_row_slice(m))
            .collect::<Result<Vec<_>>>()?;
        let mut elements = Vec::with_capacity(self.elements.len());
        let mut words = Vec::with_capacity(self.elements.len());
        for e in self.elements {
            elements.push(Rotation4::from_row_slice(&e.matrix)?);
            words.push(e.word);
        }
        let group = Group {
            elements,
            words,
            generators,
            dedup_tol: self.dedup_tol,
        };
        group.validate()?;
        Ok(group)
    }
}

/// Breadth-first closure of `gens` under composition.
///
/// Elements closer than `dedup_tol` in Frobenius norm are identified; the
/// first word found for an element is a shortest one.
pub fn generate_group(gens: &[Rotation4], dedup_tol: f64, max_order: usize) -> Result<Group> {
    if gens.is_empty() {
        return Err(Error::InvalidParams("no generators".into()));
    }
    for g in gens {
        Rotation4::new(*g.matrix())?;
    }
    let mut elements = vec![Rotation4::identity()];
    let mut words: Vec<Vec<usize>> = vec![Vec::new()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(idx) = queue.pop_front() {
        for (gi, g) in gens.iter().enumerate() {
            let candidate = elements[idx] * *g;
            if elements
                .iter()
                .any(|e| e.frobenius_distance(&candidate) < dedup_tol)
            {
                continue;
            }
            if elements.len() >= max_order {
                return Err(Error::OrderOverflow { max_order });
            }
            let mut word = words[idx].clone();
            word.push(gi);
            elements.push(candidate);
            words.push(word);
            queue.push_back(elements.len() - 1);
        }
    }
    Ok(Group {
        elements,
        words,
        generators: gens.to_vec(),
        dedup_tol,
    })
}

/// `G_{m,k}` with the default dedup tolerance and order cap.
pub fn lawson_group(params: &LawsonParams) -> Result<Group> {
    generate_group(&generators(params), TOL.dedup, default_max_order(params))
}

/// True iff every element maps the vertex set of `mesh` onto itself within `tol`.
pub fn is_invariant(mesh: &TriMesh, group: &Group, tol: f64) -> bool {
    let vertices = mesh.vertices();
    if vertices.is_empty() {
        return true;
    }
    let grid = PointGrid::new(vertices, tol.max(1e-12));
    group.elements().iter().all(|g| {
        vertices
            .iter()
            .all(|v| grid.nearest_within(&g.apply(v), tol).is_some())
    })
}
