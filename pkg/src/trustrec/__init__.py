"""Trust-aware collaborative filtering: multi-faceted trust and trust-regularized matrix factorization."""

__version__ = "0.1.0"
