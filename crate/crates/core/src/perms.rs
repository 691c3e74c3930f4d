//! Permutations acting on the right of `0..degree`.
//!
//! `p.then(&q)` is "apply `p`, then `q`", so `x^(pq) = (x^p)^q`.

use std::borrow::Cow;
use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::FiniteGroup;

pub const DEFAULT_CLOSURE_CAP: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Perm {
    image: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Perm {
    type Error = Error;

    fn try_from(image: Vec<usize>) -> Result<Perm> {
        Perm::from_images(image)
    }
}

impl From<Perm> for Vec<usize> {
    fn from(p: Perm) -> Vec<usize> {
        p.image
    }
}

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm {
            image: (0..degree).collect(),
        }
    }

    pub fn from_images(image: Vec<usize>) -> Result<Perm> {
        let mut seen = vec![false; image.len()];
        for &x in &image {
            if x >= image.len() || std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidInput(format!("{image:?} is not a permutation")));
            }
        }
        Ok(Perm { image })
    }

    /// Builds from a point map that the caller guarantees is a bijection.
    pub(crate) fn from_images_unchecked(image: Vec<usize>) -> Perm {
        debug_assert!(Perm::from_images(image.clone()).is_ok());
        Perm { image }
    }

    pub fn degree(&self) -> usize {
        self.image.len()
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.image[point]
    }

    pub fn images(&self) -> &[usize] {
        &self.image
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm {
            image: self.image.iter().map(|&x| other.image[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.degree()];
        for (x, &y) in self.image.iter().enumerate() {
            inv[y] = x;
        }
        Perm { image: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `g⁻¹·self·g`.
    pub fn conjugate_by(&self, g: &Perm) -> Perm {
        g.inverse().then(self).then(g)
    }

    pub fn fixes(&self, point: usize) -> bool {
        self.image[point] == point
    }
}

/// Orbits of `⟨gens⟩` on `0..degree`, each sorted, ordered by least point.
pub fn orbits_of(degree: usize, gens: &[Perm]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; degree];
    let mut orbits = Vec::new();
    for start in 0..degree {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orbit = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    orbit.push(y);
                    queue.push_back(y);
                }
            }
        }
        orbit.sort_unstable();
        orbits.push(orbit);
    }
    orbits
}

/// A permutation group with every element materialized.
#[derive(Debug, Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
}

impl PermGroup {
    /// All products of `gens`; the identity is element 0.
    pub fn closure(degree: usize, gens: &[Perm], cap: usize) -> Result<PermGroup> {
        if let Some(g) = gens.iter().find(|g| g.degree() != degree) {
            return Err(Error::InvalidInput(format!(
                "generator of degree {} in a group of degree {degree}",
                g.degree()
            )));
        }
        let id = Perm::identity(degree);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id, 0)]);
        let mut next = 0;
        while next < elements.len() {
            for g in gens {
                let p = elements[next].then(g);
                if !index.contains_key(&p) {
                    if elements.len() == cap {
                        return Err(Error::ClosureCapExceeded { cap });
                    }
                    index.insert(p.clone(), elements.len());
                    elements.push(p);
                }
            }
            next += 1;
        }
        Ok(PermGroup {
            degree,
            generators: gens.to_vec(),
            elements,
            index,
        })
    }

    pub fn trivial(degree: usize) -> PermGroup {
        Self::closure(degree, &[], 1).expect("trivial group")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.index.contains_key(p)
    }

    pub fn position(&self, p: &Perm) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Re-closing the element set under the generators adds nothing.
    pub fn is_closed(&self) -> bool {
        self.elements
            .iter()
            .all(|a| self.generators.iter().all(|g| self.contains(&a.then(g))))
    }

    pub fn orbits(&self) -> Vec<Vec<usize>> {
        orbits_of(self.degree, &self.generators)
    }

    pub fn is_transitive(&self) -> bool {
        self.degree <= 1 || self.orbits().len() == 1
    }

    /// Transitive with trivial point stabilizers.
    pub fn is_regular(&self) -> bool {
        let regular = self.is_transitive() && self.order() == self.degree;
        if regular {
            assert!(
                self.elements.iter().skip(1).all(|g| !g.fixes(0)),
                "regular group with a nontrivial point stabilizer"
            );
        }
        regular
    }

    /// Every generator maps each block onto a block.
    pub fn is_block_system(&self, partition: &PartitionOfPoints) -> bool {
        self.generators
            .iter()
            .all(|g| partition.is_preserved_by(g))
    }

    /// Same test, over every element rather than the generators.
    pub fn is_block_system_exhaustive(&self, partition: &PartitionOfPoints) -> bool {
        self.elements.iter().all(|g| partition.is_preserved_by(g))
    }

    /// The group as a multiplication table (`i·j` = element `i` then `j`).
    pub fn to_finite_group(&self) -> Result<FiniteGroup> {
        let names = (0..self.order()).map(|i| format!("p{i}")).collect();
        self.to_finite_group_named(names)
    }

    pub fn to_finite_group_named(&self, names: Vec<String>) -> Result<FiniteGroup> {
        let table = self
            .elements
            .iter()
            .map(|a| {
                self.elements
                    .iter()
                    .map(|b| {
                        self.position(&a.then(b))
                            .ok_or_else(|| Error::InvalidInput("element set not closed".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteGroup::from_table(names, table)
    }
}

/// Something that can be viewed as an abstract finite group.
pub trait GroupView {
    fn as_finite_group(&self) -> Result<Cow<'_, FiniteGroup>>;
}

impl GroupView for FiniteGroup {
    fn as_finite_group(&self) -> Result<Cow<'_, FiniteGroup>> {
        Ok(Cow::Borrowed(self))
    }
}

impl GroupView for PermGroup {
    fn as_finite_group(&self) -> Result<Cow<'_, FiniteGroup>> {
        Ok(Cow::Owned(self.to_finite_group()?))
    }
}

/// An abstract isomorphism `a → b` as an image list over element indices.
pub fn group_isomorphic(a: &impl GroupView, b: &impl GroupView) -> Result<Option<Vec<usize>>> {
    let (a, b) = (a.as_finite_group()?, b.as_finite_group()?);
    Ok(a.isomorphism(&b))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionOfPoints {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl PartitionOfPoints {
    pub fn new(degree: usize, blocks: Vec<Vec<usize>>) -> Result<PartitionOfPoints> {
        let mut block_of = vec![usize::MAX; degree];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::SigmaNotPartition(format!("block {b} is empty")));
            }
            for &p in block {
                if p >= degree {
                    return Err(Error::SigmaNotPartition(format!("point {p} out of range")));
                }
                if block_of[p] != usize::MAX {
                    return Err(Error::SigmaNotPartition(format!("point {p} lies in two blocks")));
                }
                block_of[p] = b;
            }
        }
        if let Some(p) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::SigmaNotPartition(format!("point {p} is not covered")));
        }
        Ok(PartitionOfPoints { blocks, block_of })
    }

    pub fn singletons(degree: usize) -> PartitionOfPoints {
        Self::new(degree, (0..degree).map(|p| vec![p]).collect()).expect("singletons")
    }

    pub fn degree(&self) -> usize {
        self.block_of.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, point: usize) -> usize {
        self.block_of[point]
    }

    /// `g` maps every block onto some block.
    pub fn is_preserved_by(&self, g: &Perm) -> bool {
        self.blocks.iter().all(|block| {
            let target = self.block_of[g.apply(block[0])];
            block.len() == self.blocks[target].len()
                && block.iter().all(|&p| self.block_of[g.apply(p)] == target)
        })
    }
}
