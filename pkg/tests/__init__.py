"""Test suite for fairsim."""
