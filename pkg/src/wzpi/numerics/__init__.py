"""Arbitrary-precision numerics: Gamma, constants, series sums, formal series checks."""
