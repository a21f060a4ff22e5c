//! Reset schedule construction and simulation.
