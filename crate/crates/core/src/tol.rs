//! Tolerance bundle shared by every numerical check.

/// Scaled copies of the default tolerances. The defaults suit double
/// precision at the dimensions this library targets (a few hundred at most);
/// `scale` multiplies all of them at once for exploratory runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tol {
    pub scale: f64,
}

impl Default for Tol {
    fn default() -> Self {
        Self { scale: 1.0 }
    }
}

impl Tol {
    pub fn scaled(scale: f64) -> Self {
        Self { scale }
    }

    /// Residual bound for eigen/SVD/unitarity identities.
    pub fn eps_eig(&self) -> f64 {
        1e-10 * self.scale
    }

    /// Relative Hermitian-symmetry acceptance.
    pub fn eps_herm(&self) -> f64 {
        1e-8 * self.scale
    }

    /// How far below zero an eigenvalue may dip and still count as PSD.
    pub fn eps_psd(&self) -> f64 {
        1e-8 * self.scale
    }

    /// Relative singular-value threshold for numerical rank.
    pub fn rank_tol(&self) -> f64 {
        1e-10 * self.scale
    }

    /// Residual bound for the dilation power-compression identities.
    pub fn eps_dil(&self) -> f64 {
        1e-10 * self.scale
    }

    /// Commutation acceptance for user-supplied tuples.
    pub fn eps_dc(&self) -> f64 {
        1e-8 * self.scale
    }

    /// Off-diagonal residual target for joint diagonalization.
    pub fn eps_jd(&self) -> f64 {
        1e-8 * self.scale
    }

    /// The named effective tolerances, for report emission.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("eps_eig", self.eps_eig()),
            ("eps_herm", self.eps_herm()),
            ("eps_psd", self.eps_psd()),
            ("rank_tol", self.rank_tol()),
            ("eps_dil", self.eps_dil()),
            ("eps_dc", self.eps_dc()),
            ("eps_jd", self.eps_jd()),
        ]
    }
}
