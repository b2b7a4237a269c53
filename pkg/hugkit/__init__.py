"""
HUG Lab: hyperspherical uniformity gap losses and generalized neural
collapse diagnostics in the unconstrained-features setting.
"""
__version__ = "0.1.0"
