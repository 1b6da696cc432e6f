//! Exact computer algebra for the quasi-Hopf algebras A(n,s,q), their dual
//! Majid algebras, the Drinfeld double and the presentation Q_s u_q(sl2).

pub mod cyclo;
pub mod tensor;
pub mod qha;
pub mod report;
pub mod ansq;
pub mod majid;
pub mod double;
pub mod qusl2;
pub mod cohomology;
pub mod cli;
