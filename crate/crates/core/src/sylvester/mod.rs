//! Permutations of `[m]`, block-sylvester congruence classes and the fan
//! their cones form.
//!
//! A permutation `pi` indexes the braid region `x_{pi_1} < ... < x_{pi_m}`.
//! Two words differing by an adjacent swap `..ik.. <-> ..ki..` are congruent
//! when `i`, `k` and some earlier letter `j` with `i < j < k` all lie in the
//! same block. Classes are stored as explicit member sets.

mod minkowski;
mod tree;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_traits::Signed;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{int, HCone, RationalVector};
use crate::error::{Error, Result};
use crate::model::BlockStructure;
use crate::pivot::{Fan, FanCone};

pub use minkowski::{
    asso_summands, minkowski_vertex, normal_fan_check, shuffle_summands, MinkowskiReport,
    MinkowskiVertex, Summand,
};
pub use tree::{cone_of_tree, tree_of_permutation, BinaryTree};

/// Largest `m` for which classes are enumerated.
pub const MAX_LETTERS: usize = 8;

/// A word containing each of `1..=m` exactly once.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(word: Vec<usize>) -> Result<Self> {
        let m = word.len();
        let mut seen = vec![false; m + 1];
        for &a in &word {
            if a == 0 || a > m || seen[a] {
                return Err(Error::Parse(format!("not a permutation: {word:?}")));
            }
            seen[a] = true;
        }
        Ok(Self(word))
    }

    pub fn identity(m: usize) -> Self {
        Self((1..=m).collect())
    }

    pub fn word(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `x` with `x_{pi_a} = a`.
    pub fn ranking_point(&self) -> RationalVector {
        let mut x = vec![int(0); self.len()];
        for (a, &letter) in self.0.iter().enumerate() {
            x[letter - 1] = int(a as i64 + 1);
        }
        x
    }

    fn swapped(&self, pos: usize) -> Self {
        let mut w = self.0.clone();
        w.swap(pos, pos + 1);
        Self(w)
    }

    /// All permutations of `[m]` in lexicographic order.
    pub fn all(m: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut w: Vec<usize> = (1..=m).collect();
        loop {
            out.push(Self(w.clone()));
            // Next permutation in lexicographic order.
            let Some(i) = (1..w.len()).rev().find(|&i| w[i - 1] < w[i]) else {
                break;
            };
            let j = (i..w.len()).rev().find(|&j| w[j] > w[i - 1]).unwrap();
            w.swap(i - 1, j);
            w[i..].reverse();
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&a| a < 10) {
            for a in &self.0 {
                write!(f, "{a}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

/// Accepts `"231"` or `"2,3,1"`.
impl FromStr for Permutation {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a permutation: {text:?}"));
        let text = text.trim();
        let word: Vec<usize> = if text.contains(',') {
            text.split(',')
                .map(|t| t.trim().parse().map_err(|_| bad()))
                .collect::<Result<_>>()?
        } else {
            text.chars()
                .map(|ch| ch.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                .collect::<Result<_>>()?
        };
        Self::new(word)
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SylvesterClass {
    pub blocks: BlockStructure,
    /// Sorted; the first member is the canonical one.
    pub members: Vec<Permutation>,
}

impl SylvesterClass {
    pub fn canonical(&self) -> &Permutation {
        &self.members[0]
    }

    pub fn contains(&self, pi: &Permutation) -> bool {
        self.members.binary_search(pi).is_ok()
    }
}

/// Word positions `p` where swapping `p, p+1` stays in the class.
fn congruent_swaps<'a>(
    pi: &'a Permutation,
    blocks: &'a BlockStructure,
) -> impl Iterator<Item = usize> + 'a {
    let w = pi.word();
    (0..w.len().saturating_sub(1)).filter(move |&p| {
        let (i, k) = (w[p].min(w[p + 1]), w[p].max(w[p + 1]));
        let block = blocks.block_of(i);
        blocks.block_of(k) == block
            && w[..p]
                .iter()
                .any(|&j| i < j && j < k && blocks.block_of(j) == block)
    })
}

fn check_length(pi: &Permutation, blocks: &BlockStructure) -> Result<()> {
    if pi.len() != blocks.m() {
        return Err(Error::DimensionMismatch {
            expected: blocks.m(),
            found: pi.len(),
        });
    }
    Ok(())
}

pub fn sylvester_class_of(pi: &Permutation, blocks: &BlockStructure) -> Result<SylvesterClass> {
    check_length(pi, blocks)?;
    let mut members = BTreeSet::new();
    let mut queue = VecDeque::from([pi.clone()]);
    members.insert(pi.clone());
    while let Some(w) = queue.pop_front() {
        for p in congruent_swaps(&w, blocks) {
            let next = w.swapped(p);
            if members.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Ok(SylvesterClass {
        blocks: blocks.clone(),
        members: members.into_iter().collect(),
    })
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Every class, ordered by canonical member.
pub fn enumerate_classes(blocks: &BlockStructure) -> Result<Vec<SylvesterClass>> {
    let m = blocks.m();
    if m > MAX_LETTERS {
        return Err(Error::SizeCap {
            size: m,
            cap: MAX_LETTERS,
        });
    }
    let perms = Permutation::all(m);
    let index: HashMap<&Permutation, usize> =
        perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut parent: Vec<usize> = (0..perms.len()).collect();
    for (i, pi) in perms.iter().enumerate() {
        for p in congruent_swaps(pi, blocks) {
            let j = index[&pi.swapped(p)];
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    // Roots are the smallest index, hence the lex-min member, of each class.
    let mut groups: Vec<Vec<Permutation>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for (i, pi) in perms.iter().enumerate() {
        let root = find(&mut parent, i);
        let k = *slot.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[k].push(pi.clone());
    }
    Ok(groups
        .into_iter()
        .map(|members| SylvesterClass {
            blocks: blocks.clone(),
            members,
        })
        .collect())
}

fn wall_row(m: usize, low: usize, high: usize) -> RationalVector {
    let mut row = vec![int(0); m];
    row[high - 1] = int(1);
    row[low - 1] = int(-1);
    row
}

/// H-description of the union of the member regions. Rows are the braid
/// walls `x_{pi_{a+1}} - x_{pi_a} >= 0` across which the neighbor region
/// belongs to another class.
pub fn class_cone(cls: &SylvesterClass) -> Result<HCone> {
    let m = cls.blocks.m();
    let mut rows = BTreeSet::new();
    for pi in &cls.members {
        let w = pi.word();
        for p in 0..m.saturating_sub(1) {
            if !cls.contains(&pi.swapped(p)) {
                rows.insert(wall_row(m, w[p], w[p + 1]));
            }
        }
    }
    let mut cone = HCone::new(m, rows.into_iter().collect())?;
    for pi in &cls.members {
        if !cone.strictly_contains(&pi.ranking_point()) {
            return Err(Error::NonConvexUnion(format!(
                "region of {pi} is not inside the cone of class {}",
                cls.canonical()
            )));
        }
    }
    cone.witness = Some(cls.canonical().ranking_point());
    debug_assert!(cone.rows.iter().all(|r| r.iter().any(Signed::is_positive)));
    Ok(cone)
}

/// Fan of all class cones, labeled by canonical member.
pub fn sylvester_fan(blocks: &BlockStructure) -> Result<Fan<Permutation>> {
    let cones = enumerate_classes(blocks)?
        .iter()
        .map(|cls| {
            class_cone(cls).map(|cone| FanCone {
                label: cls.canonical().clone(),
                cone,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Fan {
        dim: blocks.m(),
        cones,
    })
}
