pub mod laurent;
pub mod quadrature;
pub mod special;
pub mod sum;
