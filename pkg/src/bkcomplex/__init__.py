"""Complex b^k-structures on the plane: symbolic and numeric verification."""

__version__ = "0.1.0"
