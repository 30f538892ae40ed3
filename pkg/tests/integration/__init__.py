"""Integration tests on benchmark models."""
