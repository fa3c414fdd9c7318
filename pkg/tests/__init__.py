"""Tests package for quartic-slag."""
