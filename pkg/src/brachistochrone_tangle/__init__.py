"""
Three-qubit entanglement measures along time-optimal (brachistochrone) evolutions and Haar-random Monte Carlo
campaigns over them.
"""
__version__ = "1.0.0"
