//! Acceptance suite for `kicktop` and `kicktop-cli`; see `tests/acceptance.rs`.
