"""
Core configuration and utilities
"""
