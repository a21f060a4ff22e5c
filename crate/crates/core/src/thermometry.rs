//! RPM statistics and truncated-normal posterior analysis.
