"""
Service layer: one class of static operations per physics module
"""
