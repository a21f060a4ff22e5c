//! Appendix error-channel estimates.
