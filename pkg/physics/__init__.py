"""
physics — Numerical core: Green tensors, particle response, tweezer arrays,
linearized binding matrices, stochastic dynamics, frequency response and the
classical-force oracle. Nothing in this package prints; results are returned
as dataclasses and soft failures are reported through `warnings`.
"""
