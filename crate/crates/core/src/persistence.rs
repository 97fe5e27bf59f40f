//! Persistence diagrams of gridded scalar fields.
//!
//! A field on an `r_0 x ... x r_{d-1}` lattice induces a cubical complex:
//! vertices are the sites, and every elementary cube spanned by adjacent
//! sites is a cell. Cells are addressed on the doubled lattice of shape
//! `(2 r_i - 1)`, where a coordinate is even along axes the cell is thin in
//! and odd along axes it spans, so the cell dimension is the number of odd
//! coordinates. Each cell takes the maximum of its vertex values (lower-star
//! rule). Superlevel fields are negated first and mapped back on output.

use crate::diagram::{Feature, Lifetimes, PersistenceDiagram};
use crate::error::{Result, TdaError};
use crate::grid::{EvaluationGrid, Orientation, ScalarField};

const NONE: u32 = u32::MAX;

/// Lower-star cubical filtration of a scalar field.
#[derive(Debug, Clone)]
pub struct CubicalComplex {
    grid: EvaluationGrid,
    orientation: Orientation,
    shape: Vec<usize>,
    strides: Vec<usize>,
    /// Filtration value per cell id, in sublevel scale.
    values: Vec<f64>,
    cell_dims: Vec<u8>,
    /// Cell ids sorted by (value, dim, id).
    order: Vec<u32>,
}

impl CubicalComplex {
    pub fn grid(&self) -> &EvaluationGrid {
        &self.grid
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn cell_count(&self) -> usize {
        self.values.len()
    }

    /// Number of cells of each dimension `0..=d`.
    pub fn cell_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.shape.len() + 1];
        for &k in &self.cell_dims {
            counts[k as usize] += 1;
        }
        counts
    }

    pub fn cell_dim(&self, cell: usize) -> usize {
        self.cell_dims[cell] as usize
    }

    /// Value of a cell in the field's own scale (max of its vertices for
    /// sublevel fields, min for superlevel ones).
    pub fn cell_value(&self, cell: usize) -> f64 {
        self.to_field_scale(self.values[cell])
    }

    /// Cell ids in filtration order.
    pub fn filtration_order(&self) -> impl Iterator<Item = usize> + '_ {
        self.order.iter().map(|&c| c as usize)
    }

    /// Codimension-1 faces of a cell.
    pub fn boundary(&self, cell: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(2 * self.shape.len());
        for (axis, &s) in self.strides.iter().enumerate() {
            let c = (cell / s) % self.shape[axis];
            if c % 2 == 1 {
                out.push(cell - s);
                out.push(cell + s);
            }
        }
        out
    }

    /// Doubled-lattice id of the vertex at grid site `site`.
    pub fn vertex_cell(&self, site: usize) -> usize {
        self.grid
            .multi_index(site)
            .iter()
            .zip(&self.strides)
            .map(|(j, s)| 2 * j * s)
            .sum()
    }

    fn to_field_scale(&self, v: f64) -> f64 {
        match self.orientation {
            Orientation::Sublevel => v,
            Orientation::Superlevel => -v,
        }
    }
}

/// Builds the lower-star cubical complex of `field`.
pub fn build_complex(field: &ScalarField) -> Result<CubicalComplex> {
    let grid = field.grid().clone();
    if grid.resolution().iter().any(|&r| r < 2) {
        return Err(TdaError::InvalidGrid("every axis needs at least 2 sites".into()));
    }
    let d = grid.dim();
    if d > 8 {
        return Err(TdaError::InvalidGrid(format!("{d}-dimensional cubical complexes are not supported")));
    }
    let shape: Vec<usize> = grid.resolution().iter().map(|&r| 2 * r - 1).collect();
    let mut strides = vec![1; d];
    for i in (0..d.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * shape[i + 1];
    }
    let total: usize = shape.iter().product();
    if total >= NONE as usize {
        return Err(TdaError::InvalidGrid(format!("complex with {total} cells is too large")));
    }

    let sign = match field.orientation() {
        Orientation::Sublevel => 1.0,
        Orientation::Superlevel => -1.0,
    };

    let mut cell_dims = vec![0u8; total];
    let mut by_dim: Vec<Vec<u32>> = vec![Vec::new(); d + 1];
    for (id, slot) in cell_dims.iter_mut().enumerate() {
        let k = strides
            .iter()
            .zip(&shape)
            .filter(|&(&s, &n)| (id / s) % n % 2 == 1)
            .count();
        *slot = k as u8;
        by_dim[k].push(id as u32);
    }

    let mut values = vec![0.0; total];
    let mut site_of = vec![0usize; d];
    for &id in &by_dim[0] {
        let id = id as usize;
        for axis in 0..d {
            site_of[axis] = (id / strides[axis]) % shape[axis] / 2;
        }
        values[id] = sign * field.values()[grid.flat_index(&site_of)];
    }
    for cells in &by_dim[1..] {
        for &id in cells {
            let id = id as usize;
            let s = strides
                .iter()
                .zip(&shape)
                .find(|&(&s, &n)| (id / s) % n % 2 == 1)
                .map(|(&s, _)| s)
                .expect("positive-dimensional cell spans an axis");
            values[id] = values[id - s].max(values[id + s]);
        }
    }

    let mut order: Vec<u32> = (0..total as u32).collect();
    order.sort_unstable_by(|&a, &b| {
        let (a, b) = (a as usize, b as usize);
        values[a]
            .total_cmp(&values[b])
            .then(cell_dims[a].cmp(&cell_dims[b]))
            .then(a.cmp(&b))
    });

    Ok(CubicalComplex {
        grid,
        orientation: field.orientation(),
        shape,
        strides,
        values,
        cell_dims,
        order,
    })
}

/// Symmetric difference of two ascending sequences, written into `out`.
fn add_columns(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// Persistence pairs of a complex, as filtration positions.
struct Reduction {
    pairs: Vec<(u32, u32)>,
    essential: Vec<u32>,
}

/// Column reduction over GF(2) with clearing, highest dimension first.
fn reduce(complex: &CubicalComplex) -> Reduction {
    let n = complex.cell_count();
    let d = complex.shape.len();
    let mut position = vec![0u32; n];
    for (pos, &cell) in complex.order.iter().enumerate() {
        position[cell as usize] = pos as u32;
    }

    // pivot_owner[row] = column whose reduced lowest entry is `row`
    let mut pivot_owner = vec![NONE; n];
    let mut is_death = vec![false; n];
    let mut cleared = vec![false; n];
    let mut reduced: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut pairs = Vec::new();
    let mut col = Vec::new();
    let mut scratch = Vec::new();

    for k in (1..=d).rev() {
        for (pos, &cell) in complex.order.iter().enumerate() {
            let cell = cell as usize;
            if complex.cell_dims[cell] as usize != k || cleared[pos] {
                continue;
            }
            col.clear();
            col.extend(complex.boundary(cell).into_iter().map(|f| position[f]));
            col.sort_unstable();
            while let Some(&low) = col.last() {
                let owner = pivot_owner[low as usize];
                if owner == NONE {
                    break;
                }
                add_columns(&col, &reduced[owner as usize], &mut scratch);
                std::mem::swap(&mut col, &mut scratch);
            }
            if let Some(&low) = col.last() {
                pivot_owner[low as usize] = pos as u32;
                cleared[low as usize] = true;
                is_death[pos] = true;
                reduced[pos] = col.clone();
                pairs.push((low, pos as u32));
            }
        }
    }

    let essential = (0..n as u32)
        .filter(|&p| !is_death[p as usize] && pivot_owner[p as usize] == NONE)
        .collect();
    Reduction { pairs, essential }
}

/// Persistence diagram of the complex's filtration, dimensions `0..d-1`.
///
/// Zero-persistence pairs are dropped. Values are reported in the field's
/// own scale and orientation.
pub fn compute_diagram(complex: &CubicalComplex) -> PersistenceDiagram {
    let Reduction { pairs, essential } = reduce(complex);
    let top = complex.shape.len();
    let cell_at = |pos: u32| complex.order[pos as usize] as usize;
    let mut features = Vec::with_capacity(pairs.len() + essential.len());
    for (b, dpos) in pairs {
        let (bc, dc) = (cell_at(b), cell_at(dpos));
        let (birth, death) = (complex.values[bc], complex.values[dc]);
        if birth == death {
            continue;
        }
        features.push(Feature::new(
            complex.cell_dim(bc),
            complex.to_field_scale(birth),
            complex.to_field_scale(death),
        ));
    }
    for pos in essential {
        let c = cell_at(pos);
        let k = complex.cell_dim(c);
        if k >= top {
            continue;
        }
        features.push(Feature::new(
            k,
            complex.to_field_scale(complex.values[c]),
            complex.to_field_scale(f64::INFINITY),
        ));
    }
    PersistenceDiagram::new(complex.orientation, features)
        .expect("reduction pairs are ordered by filtration")
}

/// Convenience: complex construction followed by reduction.
pub fn field_diagram(field: &ScalarField) -> Result<PersistenceDiagram> {
    Ok(compute_diagram(&build_complex(field)?))
}

/// Finite lifetimes of `dim` (descending) and the essential count.
pub fn lifetimes(diagram: &PersistenceDiagram, dim: usize) -> Lifetimes {
    diagram.lifetimes(dim)
}
