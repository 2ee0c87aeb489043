"""Random k-uniform hypergraphs and their high-order (j-set) connectivity."""

__version__ = "0.1.0"
