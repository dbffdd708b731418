"""Split-step quantum walk topology and SPDC biphoton coupling simulator."""

__version__ = "0.1.0"
