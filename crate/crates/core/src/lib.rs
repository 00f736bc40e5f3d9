pub mod coeffring;
pub mod complexes;
pub mod derivations;
pub mod dolbeault;
pub mod frames;
pub mod linalg;
pub mod models;
