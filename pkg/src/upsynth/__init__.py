"""Symbolic model checking and exact parameter synthesis for timed automata
whose clocks may be updated to parameters."""

__version__ = "0.1.0"
