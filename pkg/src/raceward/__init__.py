"""raceward: static race-idiom checks, race-report triage and trace analysis for Go."""

__version__ = "0.1.0"
