//! Runs the code blocks of the guide in `book/src` as doctests.

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/model.md")]
pub mod model {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/environment.md")]
pub mod environment {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/switching.md")]
pub mod switching {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/feynman-kac.md")]
pub mod feynman_kac {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/pam.md")]
pub mod pam {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/spectral.md")]
pub mod spectral {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/asymptotics.md")]
pub mod asymptotics {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/acceptance.md")]
pub mod acceptance {}

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
pub mod readme {}
