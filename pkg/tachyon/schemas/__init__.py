"""
Pydantic schemas for domain types and result sets
"""
