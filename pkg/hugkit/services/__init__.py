"""
Numerical services: energies, losses, optimizer, proxies, diagnostics,
oracles, persistence and experiment orchestration.
"""
