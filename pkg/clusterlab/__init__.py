"""Denominator vectors, cluster characters and cluster categories of acyclic quivers"""

__version__ = "0.1.0"
