//! Exponential stability certificates for networks of polynomial subsystems.
//!
//! The pipeline: each subsystem gets a quadratic Lyapunov function and a
//! certified sublevel set, then a linear comparison equation `v' <= A v` over
//! the vector of Lyapunov values is synthesized with sum-of-squares
//! optimization. If the Metzler matrix `A` is Hurwitz and the chosen level
//! vector is invariant, every trajectory starting in the product sublevel set
//! decays exponentially.
//!
//! Modules are layered bottom-up:
//!
//! * [`poly`]: sparse multivariate polynomials.
//! * [`linalg`]: dense eigenvalues, Lyapunov equations, factorizations.
//! * [`sdp`]: a primal-dual interior-point solver for block-diagonal SDPs.
//! * [`sosprog`]: sum-of-squares programs compiled to SDPs.
//! * [`network`]: interconnected polynomial systems and the Van der Pol
//!   benchmark family.
//! * [`lyap`]: per-subsystem Lyapunov functions and certified levels.
//! * [`comparison`]: comparison matrices (direct SOS rows and the
//!   traditional bound-based construction).
//! * [`sim`]: trajectory integration and domination checks.
//! * [`cli`]: the command-line entry points.

pub mod cli;
pub mod comparison;
pub mod linalg;
pub mod lyap;
pub mod network;
pub mod poly;
pub mod sdp;
pub mod sim;
pub mod sosprog;
