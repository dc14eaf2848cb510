//! Mollifiers and the convolution kernels `B`, `B₁`, `B₂` built from them.

mod mollifier;
mod pair;

pub use mollifier::{
    CatalogEntry, Mollifier, MollifierKind, ProfileFn, CATALOG, FD_STEP, MAX_MOMENT,
};
pub use pair::{KernelPair, Orientation};
