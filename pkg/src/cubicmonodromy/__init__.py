"""Numerical certification of monodromy groups of classical enumerative
problems: the 27 lines on cubic surfaces (with and without prescribed
symmetry) and the 9 flexes of plane cubics."""

__version__ = "0.1.0"
