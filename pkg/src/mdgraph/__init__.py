"""Modular decomposition of graphs and MD-tree random graphs."""
