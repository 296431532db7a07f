pub mod inequalities;
pub mod sample;
pub mod sg;
pub mod tomography;
