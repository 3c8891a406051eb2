"""Tests for sphkit."""
