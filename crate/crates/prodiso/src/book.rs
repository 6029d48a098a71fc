//! The guide, one module per chapter. `mdbook` cannot run chapter
//! code as tests, so the chapters are included here as rustdoc and
//! `cargo test --doc` keeps every snippet compiling and passing. The
//! sources live in `book/src`; this file is only the mirror.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/metric-spaces.md")]
pub mod metric_spaces {}

#[doc = include_str!("../../../book/src/products-and-slices.md")]
pub mod products_and_slices {}

#[doc = include_str!("../../../book/src/isometry-groups.md")]
pub mod isometry_groups {}

#[doc = include_str!("../../../book/src/reducibility.md")]
pub mod reducibility {}

#[doc = include_str!("../../../book/src/quadrilateral-graphs.md")]
pub mod quadrilateral_graphs {}

#[doc = include_str!("../../../book/src/command-line.md")]
pub mod command_line {}
