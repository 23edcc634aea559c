//! d-dimensional hypercubic lattices with periodic or open boundaries.
//!
//! Site linearization is row-major with the first axis fastest, so state
//! files built on top of it are portable. Nearest-neighbor enumeration
//! keeps both coinciding bonds of an L = 2 column: the Hamiltonian sums
//! over the formal bond list, which does not deduplicate.

use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Open,
}

/// One chirality sign per lattice direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChiralityVector(pub Vec<i8>);

impl ChiralityVector {
    pub fn uniform(d: usize, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        ChiralityVector(alloc::vec![sign; d])
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }
}

/// An unordered site pair displaced by `range` steps along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub site_a: usize,
    pub site_b: usize,
    pub direction: usize,
    pub range: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    dims: Vec<usize>,
    volume: usize,
    boundary: Boundary,
}

/// Materialize the geometry; periodic directions need L >= 2.
pub fn build_lattice(dims: &[usize], boundary: Boundary) -> Result<Lattice> {
    if dims.is_empty() {
        return Err(Error::InvalidDims { axis: 0, len: 0 });
    }
    for (axis, &len) in dims.iter().enumerate() {
        if len < 1 || (boundary == Boundary::Periodic && len < 2) {
            return Err(Error::InvalidDims { axis, len });
        }
    }
    let volume = dims.iter().product();
    Ok(Lattice {
        dims: dims.to_vec(),
        volume,
        boundary,
    })
}

impl Lattice {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn d(&self) -> usize {
        self.dims.len()
    }

    pub fn volume(&self) -> usize {
        self.volume
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Coordinate vector of a site index (first axis fastest).
    pub fn coords(&self, mut site: usize) -> Vec<usize> {
        debug_assert!(site < self.volume);
        let mut out = Vec::with_capacity(self.d());
        for &len in &self.dims {
            out.push(site % len);
            site /= len;
        }
        out
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.d());
        let mut idx = 0;
        let mut stride = 1;
        for (&c, &len) in coords.iter().zip(&self.dims) {
            debug_assert!(c < len);
            idx += c * stride;
            stride *= len;
        }
        idx
    }

    /// Signed helix phase epsilon . n_j.
    pub fn phase(&self, epsilon: &ChiralityVector, site: usize) -> i64 {
        debug_assert_eq!(epsilon.0.len(), self.d());
        self.coords(site)
            .iter()
            .zip(epsilon.signs())
            .map(|(&n, &e)| e as i64 * n as i64)
            .sum()
    }

    /// Nearest-neighbor bond list in lexicographic (axis, site) order.
    ///
    /// Periodic: d*V bonds (L = 2 columns contribute two coinciding bonds).
    /// Open: wrap bonds are dropped.
    pub fn nearest_neighbor_bonds(&self) -> Vec<Bond> {
        let mut bonds = Vec::new();
        for axis in 0..self.d() {
            for site in 0..self.volume {
                let mut c = self.coords(site);
                let wrap = c[axis] + 1 == self.dims[axis];
                if wrap && self.boundary == Boundary::Open {
                    continue;
                }
                c[axis] = (c[axis] + 1) % self.dims[axis];
                bonds.push(Bond {
                    site_a: site,
                    site_b: self.index(&c),
                    direction: axis,
                    range: 1,
                });
            }
        }
        bonds
    }

    /// k-th axial-neighbor bonds, each unordered pair once.
    ///
    /// Requires 2k < L strictly along every axis so wrap pairs are not
    /// double-counted.
    pub fn axial_neighbors(&self, k: usize) -> Result<Vec<Bond>> {
        if self.boundary != Boundary::Periodic || k < 1 {
            return Err(Error::RangeTooLarge {
                range: k,
                axis_len: 0,
            });
        }
        for &len in &self.dims {
            if 2 * k >= len {
                return Err(Error::RangeTooLarge {
                    range: k,
                    axis_len: len,
                });
            }
        }
        let mut bonds = Vec::new();
        for axis in 0..self.d() {
            for site in 0..self.volume {
                let mut c = self.coords(site);
                c[axis] = (c[axis] + k) % self.dims[axis];
                bonds.push(Bond {
                    site_a: site,
                    site_b: self.index(&c),
                    direction: axis,
                    range: k,
                });
            }
        }
        Ok(bonds)
    }
}
