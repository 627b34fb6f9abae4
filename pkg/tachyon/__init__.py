"""
tachyon-selfforce
Electromagnetic self-interaction of a classical charged tachyon on a circular orbit
"""

__version__ = "1.0.0"
