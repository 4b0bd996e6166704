"""
Utilities - file formats and plotting
"""
