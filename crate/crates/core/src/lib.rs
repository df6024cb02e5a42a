#![no_std]
#![doc = include_str!("../README.md")]

extern crate alloc;

pub mod bayes;
pub mod cone;
pub mod dist;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod math;
pub mod rng;
pub mod shape;
pub mod verify;
pub mod wishart;

pub use error::{Error, Result};
