//! Holds the `acceptance` test target, one PASS/FAIL line per criterion.
//!
//! It lives in its own package so that a failing criterion, which makes the
//! target exit nonzero, does not stop the other crates' tests from running.
