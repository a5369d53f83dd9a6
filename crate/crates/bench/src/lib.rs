//! Shared inputs for the criterion benches.

use spectra_gap::{Ledger, PointedWord, Preset};

pub fn preset(name: &str) -> (Preset, Ledger) {
    let p = Preset::load(name).expect("shipped preset");
    let l = p.ledger().expect("stored ledger");
    (p, l)
}

/// A long window from the first region's ledger.
pub fn long_window(p: &Preset) -> PointedWord {
    p.pointed("2111{w}{ws}{w}2122").expect("valid window")
}
