"""
Core functionality: configuration, logging, errors, precision and workers
"""
