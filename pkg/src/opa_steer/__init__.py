"""Optical phased-array beam steering simulator."""
