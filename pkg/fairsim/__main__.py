"""CLI entry point for fairsim."""

from fairsim.cli import main

if __name__ == "__main__":
    main()
