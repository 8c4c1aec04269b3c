"""Ensures the tests directory itself is importable (helpers, oracles)."""
