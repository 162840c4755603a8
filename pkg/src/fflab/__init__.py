"""fflab: exact L-functions over F_q[t] and their zero statistics."""

__version__ = "0.1.0"
