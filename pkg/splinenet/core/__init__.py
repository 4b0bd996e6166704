"""
Core module - activations, network model, regularizers and datasets
"""
