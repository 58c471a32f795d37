use crate::system::DEFAULT_PIECE_CAP;

/// Search and size bounds shared by the engines. Every bound is explicit; a
/// computation that hits one reports it instead of truncating.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum piece count of an explicit iterate `f^n`.
    pub piece_cap: usize,
    /// Largest iterate `m` scanned for periodic witnesses.
    pub search_cap: usize,
    /// Largest `n` tried by reach-time searches.
    pub reach_cap: usize,
    /// Maximum cell-path or cylinder refinement depth.
    pub depth_cap: usize,
    /// Maximum orbit length followed when detecting repetition.
    pub orbit_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            piece_cap: DEFAULT_PIECE_CAP,
            search_cap: 24,
            reach_cap: 4096,
            depth_cap: 64,
            orbit_cap: 1 << 16,
        }
    }
}
