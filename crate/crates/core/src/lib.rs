//! Exact computer-algebra kernels for relation polynomials among the period
//! G-functions of split abelian surfaces: polynomials, Groebner bases of the
//! symplectic ideal, symbolic block matrices, relation builders, certificates
//! and a small numeric period lab.

pub mod certifier;
pub mod digest;
pub mod groebner;
pub mod periodlab;
pub mod polyring;
pub mod relations;
pub mod symmat;
