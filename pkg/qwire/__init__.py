"""Compiled Shor factoring of N=15 on SAW-driven quantum-wire qubits.

The package is split by business area, each with its own models, services
and exceptions:

- ``qlogic``: exact logical gate engine (states, gates, networks, metrics).
- ``classical``: classical pre- and post-processing of Shor's algorithm.
- ``wavesim``: semi-1D multi-particle wavepacket engine (Crank-Nicolson).
- ``calibrate``: geometry sweeps that tune gate phases.
- ``reports``: end-to-end experiments, invariant checks and report emission.
"""
