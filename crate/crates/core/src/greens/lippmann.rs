//! Coupled-dipole discretization of the Lippmann–Schwinger equation
//!
//! ```text
//! G_χ = G_b + ω² G_b χ₂ G_χ
//! ```
//!
//! on a set of cubic cells. The integral over a cell is replaced by its
//! center value times the cell volume; inside the source cell the
//! principal value is dropped and the depolarization term `−L/k_b²` is
//! added, with `L = I/3` (spherical exclusion).

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;

use super::dyadic::green_closed_form;
use super::{complexify, Dyad};
use crate::error::{Error, Result};
use crate::medium::{Medium, SpatialMediumMap};
use crate::propagators::wavenumber;
use crate::tolerances::{MAX_SCATTERER_CELLS, SINGULAR_RCOND};

/// A point at which a Green operator can be queried.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Site {
    /// Center of cell `i` of the operator's cell list (self-terms regularized).
    Cell(usize),
    /// An arbitrary point that is not a cell center.
    Point(Vector3<f64>),
}

/// One discretization cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatterCell {
    pub index: [i64; 3],
    pub center: Vector3<f64>,
    pub volume: f64,
}

/// Cells, their contrast `χ₂ = ε_cell − ε_background` and the frequency.
#[derive(Clone, Debug)]
pub struct ScattererGrid {
    pub cells: Vec<ScatterCell>,
    pub contrast: Vec<Complex64>,
    pub omega: Complex64,
}

impl ScattererGrid {
    /// Contrast of every listed cell of `map` against its background.
    pub fn from_map(map: &SpatialMediumMap, omega: Complex64) -> Result<Self> {
        let eb = map.background().epsilon(omega)?;
        let mut cells = Vec::with_capacity(map.cells().len());
        let mut contrast = Vec::with_capacity(map.cells().len());
        for c in map.cells() {
            cells.push(ScatterCell {
                index: c.index,
                center: Vector3::from(map.cell_center(c.index)),
                volume: map.cell_volume(),
            });
            contrast.push(c.medium.epsilon(omega)? - eb);
        }
        Ok(ScattererGrid { cells, contrast, omega })
    }

    /// The same cells with a different contrast.
    pub fn with_contrast(&self, contrast: Vec<Complex64>) -> Result<Self> {
        if contrast.len() != self.cells.len() {
            return Err(Error::invalid("contrast", "one value per cell required"));
        }
        Ok(ScattererGrid { cells: self.cells.clone(), contrast, omega: self.omega })
    }
}

/// A Green operator that can be sampled between cells and points.
pub trait GreenBackground {
    fn omega(&self) -> Complex64;
    fn cells(&self) -> &[ScatterCell];
    fn green(&self, a: &Site, b: &Site) -> Result<Dyad>;
}

/// Homogeneous background medium.
#[derive(Clone, Debug)]
pub struct HomogeneousBackground {
    medium: Medium,
    omega: Complex64,
    k: Complex64,
    depolarization: Matrix3<f64>,
    cells: Vec<ScatterCell>,
}

impl HomogeneousBackground {
    pub fn new(medium: &Medium, omega: Complex64, cells: Vec<ScatterCell>) -> Result<Self> {
        let k = wavenumber(medium, omega)?;
        if k.norm() == 0.0 {
            return Err(Error::invalid("omega", "static limit is not supported"));
        }
        Ok(HomogeneousBackground { medium: medium.clone(), omega, k, depolarization: Matrix3::identity() / 3.0, cells })
    }

    pub fn medium(&self) -> &Medium {
        &self.medium
    }

    pub fn k(&self) -> Complex64 {
        self.k
    }

    fn position(&self, s: &Site) -> Result<Vector3<f64>> {
        match *s {
            Site::Cell(i) => self
                .cells
                .get(i)
                .map(|c| c.center)
                .ok_or_else(|| Error::invalid("site", format!("cell {i} out of range"))),
            Site::Point(x) => Ok(x),
        }
    }
}

impl GreenBackground for HomogeneousBackground {
    fn omega(&self) -> Complex64 {
        self.omega
    }

    fn cells(&self) -> &[ScatterCell] {
        &self.cells
    }

    fn green(&self, a: &Site, b: &Site) -> Result<Dyad> {
        if let (Site::Cell(i), Site::Cell(j)) = (a, b) {
            if i == j {
                let v = self.cells[*i].volume;
                return Ok(complexify(&self.depolarization) * (-1.0 / (self.k * self.k * v)));
            }
        }
        let r = self.position(a)? - self.position(b)?;
        if r.norm() == 0.0 {
            return Err(Error::invalid("site", "coincident points outside a regularized cell"));
        }
        Ok(green_closed_form(self.k, &r))
    }
}

/// The solved inhomogeneous Green operator.
#[derive(Debug)]
pub struct SolvedGreen<B: GreenBackground> {
    background: B,
    /// `ω² V_j χ_j` per cell.
    weights: Vec<Complex64>,
    /// `(I − D W)⁻¹`, `D` the regularized background on the cells.
    a_inv: DMatrix<Complex64>,
    /// `A⁻¹D`: the solved operator between cell centers.
    cell_block: DMatrix<Complex64>,
    condition: f64,
}

/// Solve on a homogeneous background medium.
pub fn lippmann_schwinger_solve(
    grid: &ScattererGrid,
    background: &Medium,
) -> Result<SolvedGreen<HomogeneousBackground>> {
    let bg = HomogeneousBackground::new(background, grid.omega, grid.cells.clone())?;
    SolvedGreen::solve(bg, &grid.contrast)
}

impl<B: GreenBackground> SolvedGreen<B> {
    /// Solve with per-cell contrast `χ₂` relative to `background`, on the
    /// background's own cell list.
    pub fn solve(background: B, contrast: &[Complex64]) -> Result<Self> {
        let n = background.cells().len();
        if n > MAX_SCATTERER_CELLS {
            return Err(Error::TooManyCells { cells: n, cap: MAX_SCATTERER_CELLS });
        }
        if contrast.len() != n {
            return Err(Error::invalid("contrast", "one value per cell required"));
        }
        let w2 = background.omega() * background.omega();
        let weights: Vec<Complex64> =
            background.cells().iter().zip(contrast).map(|(c, chi)| w2 * c.volume * chi).collect();
        let mut d = DMatrix::<Complex64>::zeros(3 * n, 3 * n);
        for i in 0..n {
            for j in 0..n {
                let g = background.green(&Site::Cell(i), &Site::Cell(j))?;
                d.fixed_view_mut::<3, 3>(3 * i, 3 * j).copy_from(&g);
            }
        }
        let mut a = -d.clone();
        for j in 0..n {
            a.columns_mut(3 * j, 3).iter_mut().for_each(|v| *v *= weights[j]);
        }
        for i in 0..3 * n {
            a[(i, i)] += Complex64::new(1.0, 0.0);
        }
        let norm1 = |m: &DMatrix<Complex64>| {
            (0..m.ncols()).map(|c| m.column(c).iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
        };
        let a_norm = norm1(&a);
        let a_inv = a.try_inverse().ok_or(Error::SingularSystem { condition: f64::INFINITY })?;
        let condition = a_norm * norm1(&a_inv);
        if !condition.is_finite() || 1.0 / condition < SINGULAR_RCOND {
            return Err(Error::SingularSystem { condition });
        }
        let cell_block = &a_inv * d;
        Ok(SolvedGreen { background, weights, a_inv, cell_block, condition })
    }

    /// One-norm condition number of the dense system.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn background(&self) -> &B {
        &self.background
    }

    /// `B(·, b)` stacked over the cells (3n × 3).
    fn column(&self, b: &Site) -> Result<DMatrix<Complex64>> {
        let n = self.background.cells().len();
        let mut col = DMatrix::zeros(3 * n, 3);
        for j in 0..n {
            let d = self.background.green(&Site::Cell(j), b)?;
            col.fixed_view_mut::<3, 3>(3 * j, 0).copy_from(&d);
        }
        Ok(col)
    }
}

impl<B: GreenBackground> GreenBackground for SolvedGreen<B> {
    fn omega(&self) -> Complex64 {
        self.background.omega()
    }

    fn cells(&self) -> &[ScatterCell] {
        self.background.cells()
    }

    /// `G_χ(a, b) = B(a, b) + Σ_j B(a, j) W_j [A⁻¹ B(·, b)]_j`.
    fn green(&self, a: &Site, b: &Site) -> Result<Dyad> {
        let n = self.cells().len();
        if let (Site::Cell(i), Site::Cell(j)) = (a, b) {
            if *i < n && *j < n {
                return Ok(self.cell_block.fixed_view::<3, 3>(3 * i, 3 * j).into_owned());
            }
        }
        let mut g = self.background.green(a, b)?;
        let sol = &self.a_inv * self.column(b)?;
        for (j, w) in self.weights.iter().enumerate() {
            if *w == Complex64::new(0.0, 0.0) {
                continue;
            }
            let left = self.background.green(a, &Site::Cell(j))?;
            let right: Dyad = sol.fixed_view::<3, 3>(3 * j, 0).into_owned();
            g += left * right * *w;
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(i: i64, dx: f64) -> ScatterCell {
        ScatterCell { index: [i, 0, 0], center: Vector3::new((i as f64 + 0.5) * dx, 0.0, 0.0), volume: dx.powi(3) }
    }

    #[test]
    fn zero_contrast_reproduces_background() {
        let grid = ScattererGrid {
            cells: vec![cell(0, 0.2), cell(1, 0.2)],
            contrast: vec![Complex64::new(0.0, 0.0); 2],
            omega: Complex64::new(1.0, 0.0),
        };
        let s = lippmann_schwinger_solve(&grid, &Medium::vacuum()).unwrap();
        let a = Site::Point(Vector3::new(1.0, 0.5, 0.0));
        let b = Site::Point(Vector3::new(-0.3, 0.1, 0.2));
        let diff = s.green(&a, &b).unwrap() - s.background().green(&a, &b).unwrap();
        assert_eq!(super::super::max_abs(&diff), 0.0);
    }

    #[test]
    fn too_many_cells_is_rejected() {
        let cells: Vec<_> = (0..(MAX_SCATTERER_CELLS as i64 + 1)).map(|i| cell(i, 0.1)).collect();
        let n = cells.len();
        let grid =
            ScattererGrid { cells, contrast: vec![Complex64::new(0.1, 0.0); n], omega: Complex64::new(1.0, 0.0) };
        assert!(matches!(lippmann_schwinger_solve(&grid, &Medium::vacuum()), Err(Error::TooManyCells { .. })));
    }
}
