"""
Pydantic schemas for configurations, reports and API payloads.
"""
