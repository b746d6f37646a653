"""Acceptance tests for fairsim."""
