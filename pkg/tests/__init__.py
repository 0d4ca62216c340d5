"""
Test package for the optomech toolkit.
Fixtures live in conftest.py.
"""
