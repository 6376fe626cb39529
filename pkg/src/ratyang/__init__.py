"""Exact realizations of RTT- and reflection-type algebras, with a
verification CLI.  All arithmetic is over the rationals; every check is
an identity of matrices of rational functions, tested with tolerance zero.
"""

__version__ = "0.1.0"
