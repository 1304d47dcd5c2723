"""Tests for the Precond-HQ solvers."""
