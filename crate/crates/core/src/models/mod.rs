//! Concrete foliated complexes.

pub mod fcx;
pub mod tensor;
pub mod torus;
