"""Benchmarks reproducing the published N=15 figures of merit."""
