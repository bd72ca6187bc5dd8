"""Test suite for arbor."""
