"""Fair vertex- and edge-deletion solvers parameterized by neighborhood
diversity and vertex cover, with brute-force oracles and reduction gadgets."""

__version__ = "0.1.0"
