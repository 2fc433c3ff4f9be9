"""
Core numerical modules: leakage measures, max-lift polytope, mixture LP and mechanisms
"""
