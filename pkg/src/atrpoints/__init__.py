"""Algebraic points on elliptic curves over real quadratic fields,
computed through p-adic uniformization by definite quaternion orders."""

__version__ = "0.1.0"
