"""
SplineNet - neural networks with power activations and their spline counterparts
"""

__version__ = "0.1.0"
