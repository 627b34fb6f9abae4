"""
Command-line surface
"""
