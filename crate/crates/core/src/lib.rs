//! Spread nets: safe Petri nets whose places carry vector clocks, built by
//! spreading a multi-clock net over a ticking domain.

pub mod cli;
pub mod io;
pub mod mcnet;
pub mod modes;
pub mod net;
pub mod oracle;
pub mod spread;
pub mod ticking;
pub mod verdict;
