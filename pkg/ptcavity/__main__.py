"""Entry point for running ptcavity as a module: python -m ptcavity."""

from ptcavity_cli.commands import app

if __name__ == "__main__":
    app()
