"""Twin building lattices: SL_2 over Laurent polynomials acting on a twin tree,
Coxeter growth and flat-rank computations, and certified non-distortion."""

__version__ = "0.1.0"
