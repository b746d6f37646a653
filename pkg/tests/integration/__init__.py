"""Integration tests for fairsim."""
