"""
API routes and endpoints.
"""
