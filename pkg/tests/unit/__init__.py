"""Unit tests for fairsim."""
