#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod algebra;
pub mod cli;
pub mod dynamics;
pub mod electrocalc;
pub mod error;
pub mod pairsim;
pub mod par;
pub mod planewave;
