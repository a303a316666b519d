/// Default numerical tolerances shared by the state, rotation and squeezing code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed deviation of `sum |c_n|^2` from one.
    pub norm: f64,
    /// Allowed deviation of `d d^T` from the identity.
    pub orthogonality: f64,
    /// Mean spin lengths below `degeneracy * N` are treated as zero.
    pub degeneracy: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        norm: 1e-10,
        orthogonality: 1e-9,
        degeneracy: 1e-8,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
