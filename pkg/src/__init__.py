"""Exact solutions of Burgers-like equations with Laguerre, fractional and hyper-Bessel time derivatives."""
