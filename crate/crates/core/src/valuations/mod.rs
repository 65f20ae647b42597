//! Tensor valuations on polytopes, weighted and restricted to regions of
//! support elements, and their smooth counterpart on a paraboloid cap.

mod eval;
pub mod smooth;
mod spec;

pub use eval::{evaluate, evaluate_with, omega, w1, EdgeOrientation};
pub use smooth::{cap_support, smooth_cap_phitilde, smooth_cap_w1, SmoothCapSample};
pub use spec::{Functional, FunctionalSpec};
