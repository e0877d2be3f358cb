//! Test-only helpers: random diagram generation, a brute-force oracle for
//! exchange classes that shares no code with the library's normal form, and
//! SVG inspection.

#![allow(dead_code)]

pub mod oracle;
pub mod random;
pub mod svg;
