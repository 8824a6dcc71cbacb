// Each chapter becomes a module whose docs are the chapter itself, so
// `cargo test --doc` runs every listing in the guide.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/families.md")]
pub mod families {}
#[doc = include_str!("../../../book/src/translation-numbers.md")]
pub mod translation_numbers {}
#[doc = include_str!("../../../book/src/tongues.md")]
pub mod tongues {}
#[doc = include_str!("../../../book/src/asymptotics.md")]
pub mod asymptotics {}
#[doc = include_str!("../../../book/src/series.md")]
pub mod series {}
#[doc = include_str!("../../../book/src/guided.md")]
pub mod guided {}
#[doc = include_str!("../../../book/src/rendering.md")]
pub mod rendering {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
