#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod conservative;
pub mod convert;
pub mod diagnostics;
pub mod driver;
pub mod elliptic;
pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod primitive;
pub mod reconstruction;
pub mod scenarios;
pub mod stencil;
