"""Iterated derivatives along a 1-form, their divisors and the flat geometry of the limit."""
