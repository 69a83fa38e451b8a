//! Receding-horizon persistent monitoring of target networks.
//!
//! Agents patrol a directed graph of targets whose uncertainty grows linearly while
//! unattended and shrinks while an agent dwells. Controllers solve small rational
//! optimization problems at every local event; the simulator executes them and accounts
//! the mean system uncertainty exactly.

pub mod controller;
pub mod model;
pub mod rfop;
pub mod rhcp;
pub mod scenario;
pub mod sim;
