"""ptcavity - atom-cavity-mirror multistability under broken PT-symmetry."""

from ptcavity.__version__ import __version__

__all__ = ["__version__"]
