"""Core infrastructure (configuration)."""
