"""scslab: a numerical laboratory for shifted convolution sums of level-1
holomorphic Hecke eigenforms."""

__version__ = "0.1.0"
