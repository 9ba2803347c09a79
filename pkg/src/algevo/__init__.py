"""Evolution of binary matrices under algorithmic-probability weighted mutation."""
__version__ = "0.1.0"
