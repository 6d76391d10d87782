//! Real Clifford representations for n = 1..8.
//!
//! The 8x8 matrices for Cl_6 are fixed; lower dimensions come from
//! `restrict` (v -> v e_n), Cl_8 doubles Cl_6 with two extra generators,
//! and Cl_7 is the restriction of Cl_8.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Result, SpinError};

pub type Spinor = DVector<f64>;

const REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CliffordRep {
    gens: Vec<DMatrix<f64>>,
    volume: DMatrix<f64>,
}

fn ordered_product(gens: &[DMatrix<f64>], n: usize) -> DMatrix<f64> {
    let mut p = DMatrix::identity(n, n);
    for g in gens {
        p *= g;
    }
    p
}

impl CliffordRep {
    /// Validate generators against the Clifford relations, skew-symmetry and orthogonality.
    pub fn new(gens: Vec<DMatrix<f64>>) -> Result<Self> {
        let rep = Self::from_gens(gens)?;
        let r = rep.relation_residual();
        if r > REL_TOL {
            return Err(SpinError::Numerical(format!("Clifford relations fail: residual {r:.3e}")));
        }
        Ok(rep)
    }

    fn from_gens(gens: Vec<DMatrix<f64>>) -> Result<Self> {
        let n = gens.first().map(|g| g.nrows()).ok_or_else(|| SpinError::Unsupported("empty generator list".into()))?;
        if gens.iter().any(|g| g.nrows() != n || g.ncols() != n) {
            return Err(SpinError::Unsupported("generators must be square of equal size".into()));
        }
        let volume = ordered_product(&gens, n);
        Ok(CliffordRep { gens, volume })
    }

    /// Dimension of the underlying Euclidean space.
    pub fn n(&self) -> usize {
        self.gens.len()
    }

    /// Dimension of the spinor space.
    pub fn spinor_dim(&self) -> usize {
        self.volume.nrows()
    }

    /// Generator for frame index `i` (1-based).
    pub fn gen(&self, i: usize) -> &DMatrix<f64> {
        &self.gens[i - 1]
    }

    pub fn gens(&self) -> &[DMatrix<f64>] {
        &self.gens
    }

    pub fn volume(&self) -> &DMatrix<f64> {
        &self.volume
    }

    /// Clifford action of a vector.
    pub fn vector(&self, v: &[f64]) -> DMatrix<f64> {
        let n = self.spinor_dim();
        let mut m = DMatrix::zeros(n, n);
        for (g, &x) in self.gens.iter().zip(v) {
            if x != 0.0 {
                m += g * x;
            }
        }
        m
    }

    /// Max entry of `G_i G_j + G_j G_i + 2 delta_ij`, `G_i^T + G_i`, `G_i^T G_i - I`.
    pub fn relation_residual(&self) -> f64 {
        let n = self.spinor_dim();
        let id = DMatrix::<f64>::identity(n, n);
        let mut r: f64 = 0.0;
        for (i, gi) in self.gens.iter().enumerate() {
            r = r.max((gi.transpose() + gi).amax());
            r = r.max((gi.transpose() * gi - &id).amax());
            for gj in &self.gens[i..] {
                let mut s = gi * gj + gj * gi;
                if std::ptr::eq(gi, gj) {
                    s += &id * 2.0;
                }
                r = r.max(s.amax());
            }
        }
        r
    }

    /// Residual of the volume element's (anti)commutation with the generators.
    pub fn volume_residual(&self) -> f64 {
        let sign = if self.n() % 2 == 1 { -1.0 } else { 1.0 };
        self.gens
            .iter()
            .map(|g| (&self.volume * g + g * &self.volume * sign).amax())
            .fold(0.0, f64::max)
    }
}

fn e_mat(i: usize, j: usize) -> DMatrix<f64> {
    // E_ij: u_i -> u_j, u_j -> -u_i
    let mut m = DMatrix::zeros(8, 8);
    m[(j - 1, i - 1)] = 1.0;
    m[(i - 1, j - 1)] = -1.0;
    m
}

const CL6_TABLE: [[(usize, usize, f64); 4]; 6] = [
    [(1, 8, 1.0), (2, 7, 1.0), (3, 6, -1.0), (4, 5, -1.0)],
    [(1, 7, -1.0), (2, 8, 1.0), (3, 5, 1.0), (4, 6, -1.0)],
    [(1, 6, -1.0), (2, 5, 1.0), (3, 8, -1.0), (4, 7, 1.0)],
    [(1, 5, -1.0), (2, 6, -1.0), (3, 7, -1.0), (4, 8, -1.0)],
    [(1, 3, -1.0), (2, 4, -1.0), (5, 7, 1.0), (6, 8, 1.0)],
    [(1, 4, 1.0), (2, 3, -1.0), (5, 8, -1.0), (6, 7, 1.0)],
];

/// The fixed 8-dimensional representation of Cl_6.
pub fn rep_cl6() -> CliffordRep {
    let gens = CL6_TABLE
        .iter()
        .map(|row| row.iter().fold(DMatrix::zeros(8, 8), |acc, &(i, j, s)| acc + e_mat(i, j) * s))
        .collect();
    CliffordRep::new(gens).expect("Cl6 table satisfies the Clifford relations")
}

/// Representation of Cl_{n-1} given by `v -> rho_n(v e_n)`.
pub fn restrict(rep: &CliffordRep) -> Result<CliffordRep> {
    let n = rep.n();
    if n < 2 {
        return Err(SpinError::Unsupported("cannot restrict a rep of Cl_1".into()));
    }
    let last = rep.gen(n);
    let gens = rep.gens[..n - 1].iter().map(|g| g * last).collect();
    CliffordRep::new(gens)
}

/// 16-dimensional Cl_8 representation built from Cl_6 by block doubling.
pub fn rep_cl8() -> CliffordRep {
    let r6 = rep_cl6();
    let id = DMatrix::<f64>::identity(8, 8);
    let off = |a: &DMatrix<f64>, b: &DMatrix<f64>| {
        let mut m = DMatrix::zeros(16, 16);
        m.view_mut((0, 8), (8, 8)).copy_from(a);
        m.view_mut((8, 0), (8, 8)).copy_from(b);
        m
    };
    let mut gens: Vec<_> = r6.gens.iter().map(|g| off(g, g)).collect();
    gens.push(off(&(-&id), &id));
    gens.push(off(r6.volume(), r6.volume()));
    CliffordRep::new(gens).expect("doubled Cl6 satisfies the Clifford relations")
}

/// Representation used for an n-dimensional algebra: restrictions of Cl_6 for n <= 6,
/// restriction of Cl_8 for n = 7, Cl_8 itself for n = 8.
pub fn rep(n: usize) -> Result<CliffordRep> {
    match n {
        1..=6 => {
            let mut r = rep_cl6();
            while r.n() > n {
                r = restrict(&r)?;
            }
            Ok(r)
        }
        7 => restrict(&rep_cl8()),
        8 => Ok(rep_cl8()),
        _ => Err(SpinError::Unsupported(format!("no Clifford representation for n = {n}"))),
    }
}

/// Orthogonal projectors `(I + nu)/2`, `(I - nu)/2` for n = 0 mod 4.
pub fn chirality_split(rep: &CliffordRep) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if !rep.n().is_multiple_of(4) {
        return Err(SpinError::Unsupported(format!("chirality split needs n = 0 mod 4, got {}", rep.n())));
    }
    let id = DMatrix::<f64>::identity(rep.spinor_dim(), rep.spinor_dim());
    Ok(((&id + rep.volume()) * 0.5, (&id - rep.volume()) * 0.5))
}

/// Orthonormal basis (as columns) of the +1 eigenspace of the volume element.
pub fn positive_basis(rep: &CliffordRep) -> Result<DMatrix<f64>> {
    let (p, _) = chirality_split(rep)?;
    let eig = SymmetricEigen::new(p);
    let cols: Vec<_> = (0..eig.eigenvalues.len())
        .filter(|&k| eig.eigenvalues[k] > 0.5)
        .map(|k| eig.eigenvectors.column(k).into_owned())
        .collect();
    Ok(DMatrix::from_columns(&cols))
}

/// The operators j1, j2, j3 acting on the 8-dimensional spinors of dimension 5.
#[derive(Debug, Clone, PartialEq)]
pub struct QuaternionicOps {
    pub j1: DMatrix<f64>,
    pub j2: DMatrix<f64>,
    pub j3: DMatrix<f64>,
}

impl QuaternionicOps {
    /// `j_k` for k = 1, 2, 3.
    pub fn j(&self, k: usize) -> &DMatrix<f64> {
        match k {
            1 => &self.j1,
            2 => &self.j2,
            3 => &self.j3,
            _ => panic!("j index {k} out of range 1..=3"),
        }
    }
}

/// j1 = volume of rho_5, j2 = rho_6(e_6), j3 = j1 j2.
pub fn quaternionic_ops_dim5() -> QuaternionicOps {
    let r6 = rep_cl6();
    let r5 = restrict(&r6).expect("restriction of Cl6");
    let j1 = r5.volume().clone();
    let j2 = r6.gen(6).clone();
    let j3 = &j1 * &j2;
    QuaternionicOps { j1, j2, j3 }
}

/// Orthonormal basis of spinors as unit vectors `u_1..u_N`.
pub fn unit_spinor(n: usize, k: usize) -> Spinor {
    let mut v = DVector::zeros(n);
    v[k - 1] = 1.0;
    v
}
