# __init__.py
"""rdlab: a numerical laboratory for dissipative reaction-diffusion systems."""

__version__ = "0.1.0"
