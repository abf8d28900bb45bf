"""CHSH-game bias amplification for linear cryptanalysis of SIMON."""

__version__ = "0.1.0"
