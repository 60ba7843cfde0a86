"""File output: atomic writers and the per-command run layer."""
