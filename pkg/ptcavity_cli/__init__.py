"""ptcavity command-line interface."""
