//! Singularity invariants of generically reduced curve germs and
//! equisingularity verdicts for one-parameter families of them.
//!
//! Layers, bottom up: [`poly`] (exact polynomials), [`gb`] (Gröbner and
//! local standard bases), [`localdim`] (lengths, multiplicities,
//! Cohen–Macaulay test), [`curveinv`] (δ, ε, μ, m, r of a curve),
//! [`family`] (classification of families) and [`cli`] (manifests,
//! reports, the built-in example corpus).

pub mod cli;
pub mod curveinv;
pub mod family;
pub mod gb;
pub mod localdim;
pub mod poly;
