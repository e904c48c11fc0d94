"""
Test package for the merger exchange-ratio model.
"""

# This file makes the test directory a Python package
