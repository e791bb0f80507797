"""Causal profit evaluation of uplift and predictive models."""

__version__ = "0.1.0"
