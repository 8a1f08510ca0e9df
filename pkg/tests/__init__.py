"""Tests for controlled-modules."""
